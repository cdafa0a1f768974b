#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "hexwave/partition.hpp"

namespace hexwave {

namespace {

struct Atomic {
  LineKey key;
  Q t0, t1;
  int plus, minus;  // labels on the +a and -a sides
};

RPt point_on(const LineKey& k, const Q& t) {
  Q n2 = Q(k.a1 * k.a1 + k.a2 * k.a2);
  return {(Q(k.a1) * k.b - Q(k.a2) * t) / n2, (Q(k.a2) * k.b + Q(k.a1) * t) / n2};
}

std::vector<Atomic> atomic_segments(const FrequencyPartition& part) {
  SegSet edges;
  std::vector<RPt> verts;
  for (auto& r : part.regions)
    for (auto& pc : r.pieces) {
      for (std::size_t i = 0; i < pc.verts.size(); ++i) {
        edges.add(Seg{pc.verts[i], pc.verts[(i + 1) % pc.verts.size()]});
        for (int l1 = -1; l1 <= 1; ++l1)
          for (int l2 = -1; l2 <= 1; ++l2) verts.push_back(pc.verts[i] + RPt{Q(l1), Q(l2)});
      }
    }
  std::vector<Atomic> out;
  for (auto& [k, iv] : edges.lines()) {
    for (auto& x : iv) {
      std::set<Q> cuts{x.first, x.second};
      for (auto& v : verts) {
        if (Q(k.a1) * v[0] + Q(k.a2) * v[1] != k.b) continue;
        Q t = Q(-k.a2) * v[0] + Q(k.a1) * v[1];
        if (x.first < t && t < x.second) cuts.insert(t);
      }
      std::vector<Q> c(cuts.begin(), cuts.end());
      for (std::size_t i = 0; i + 1 < c.size(); ++i) {
        RPt m = point_on(k, (c[i] + c[i + 1]) / Q(2));
        Q d(1, 4096 * (std::abs(k.a1) + std::abs(k.a2)));
        RPt off{Q(k.a1) * d, Q(k.a2) * d};
        int lp = part.label(to_grid(m + off));
        int lm = part.label(to_grid(m - off));
        out.push_back({k, c[i], c[i + 1], lp, lm});
      }
    }
  }
  return out;
}

bool in_dual(const IMat2& a, const RPt& g) {
  // g in A^{-T} Z^2  <=>  A^T g integral
  Q x = Q(a.m[0][0]) * g[0] + Q(a.m[1][0]) * g[1];
  Q y = Q(a.m[0][1]) * g[0] + Q(a.m[1][1]) * g[1];
  return x.denominator() == 1 && y.denominator() == 1;
}

Q frac(const Q& q) {
  i64 n = q.numerator(), d = q.denominator();
  i64 f = n >= 0 ? n / d : -((-n + d - 1) / d);
  return q - Q(f);
}

RPt mod1(const RPt& g) { return {frac(g[0]), frac(g[1])}; }

bool in_closed_cell(const ReciprocalCell& cell, const RPt& x) {
  for (auto& h : cell.planes)
    if (Q(h.a1) * x[0] + Q(h.a2) * x[1] > Q(h.b)) return false;
  return true;
}

SegSet prune(const SegSet& s, const ReciprocalCell& cell, double tol) {
  SegSet r;
  for (auto& seg : s.segments()) {
    SegSet one;
    one.add(seg);
    if (one.length(cell) > tol) r = r.unite(one);
  }
  return r;
}

}  // namespace

std::vector<RPt> cell_vertices(const ReciprocalCell& cell) {
  std::vector<RPt> v;
  auto& P = cell.planes;
  for (std::size_t i = 0; i < P.size(); ++i)
    for (std::size_t j = i + 1; j < P.size(); ++j) {
      Q d = Q(P[i].a1 * P[j].a2 - P[i].a2 * P[j].a1);
      if (d.numerator() == 0) continue;
      RPt x{Q(P[i].b * P[j].a2 - P[j].b * P[i].a2) / d, Q(P[i].a1 * P[j].b - P[j].a1 * P[i].b) / d};
      if (in_closed_cell(cell, x) && std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
    }
  std::sort(v.begin(), v.end(), [&](const RPt& a, const RPt& b) {
    auto xa = cell.to_xi({to_double(a[0]), to_double(a[1])});
    auto xb = cell.to_xi({to_double(b[0]), to_double(b[1])});
    return std::atan2(xa[1], xa[0]) < std::atan2(xb[1], xb[0]);
  });
  return v;
}

SegSet cell_boundary(const ReciprocalCell& cell) {
  auto v = cell_vertices(cell);
  SegSet s;
  for (std::size_t i = 0; i < v.size(); ++i) s.add(Seg{v[i], v[(i + 1) % v.size()]});
  return s;
}

SegSet region_boundary(const FrequencyPartition& part, int k) {
  SegSet s;
  for (auto& a : atomic_segments(part))
    if ((a.plus == k) != (a.minus == k)) s.add(a.key, a.t0, a.t1);
  return s;
}

BoundaryClassification classify_boundaries(const FrequencyPartition& part, double tol) {
  BoundaryClassification bc;
  const int K = part.size();
  auto atoms = atomic_segments(part);
  bc.boundary.resize(K);
  for (auto& a : atoms)
    for (int k = 0; k < K; ++k)
      if ((a.plus == k) != (a.minus == k)) bc.boundary[k].add(a.key, a.t0, a.t1);

  std::map<std::pair<int, RPt>, SegSet> c0cache;
  auto C0 = [&](int k, const RPt& g) -> const SegSet& {
    auto key = std::make_pair(k, mod1(g));
    auto it = c0cache.find(key);
    if (it != c0cache.end()) return it->second;
    SegSet acc;
    for (int l1 = -2; l1 <= 2; ++l1)
      for (int l2 = -2; l2 <= 2; ++l2)
        acc = acc.unite(bc.boundary[k].intersect(bc.boundary[k].translate(RPt{Q(l1), Q(l2)} - g)));
    return c0cache.emplace(key, acc).first->second;
  };

  bc.singular.resize(K);
  bc.regular.resize(K);
  for (int k = 0; k < K; ++k) {
    SegSet sing;
    for (auto& g : part.dual_cosets(k)) {
      if (g[0].numerator() == 0 && g[1].numerator() == 0) continue;
      SegSet d = C0(k, g);
      for (int k2 = 0; k2 < K; ++k2)
        if (k2 != k && in_dual(part.sub[k2], g)) d = d.subtract(C0(k2, g));
      sing = sing.unite(d);
    }
    bc.singular[k] = prune(sing, part.cell, tol);
    bc.regular[k] = prune(bc.boundary[k].subtract(sing), part.cell, tol);
  }

  // common regular boundaries, grouped by {+-gamma}
  SegSet edge = cell_boundary(part.cell);
  auto canonical = [&](const RPt& g) {
    RPt best{};
    Vec2 bx{-1e300, -1e300};
    for (int s : {1, -1})
      for (int l1 = -2; l1 <= 2; ++l1)
        for (int l2 = -2; l2 <= 2; ++l2) {
          RPt x{g[0] * Q(s) + Q(l1), g[1] * Q(s) + Q(l2)};
          if (!in_closed_cell(part.cell, x)) continue;
          auto xi = part.cell.to_xi({to_double(x[0]), to_double(x[1])});
          bool better = xi[0] > bx[0] + 1e-12 || (std::abs(xi[0] - bx[0]) <= 1e-12 && xi[1] > bx[1] + 1e-12);
          if (better) best = x, bx = xi;
        }
    return best;
  };
  std::map<std::tuple<int, int, RPt>, SegSet> groups;
  for (int k1 = 0; k1 < K; ++k1)
    for (int k2 = k1 + 1; k2 < K; ++k2)
      for (auto& g : part.dual_cosets(k1)) {
        if (g[0].numerator() == 0 && g[1].numerator() == 0) continue;
        if (!in_dual(part.sub[k2], g)) continue;
        SegSet e = C0(k1, g).intersect(C0(k2, g)).intersect(bc.regular[k1]).intersect(bc.regular[k2]);
        e = prune(e, part.cell, tol);
        if (e.empty()) continue;
        auto& dst = groups[{k1, k2, canonical(g)}];
        dst = dst.unite(e);
      }
  for (auto& [key, e] : groups) {
    auto [k1, k2, g] = key;
    Vec2 gx = part.cell.to_xi({to_double(g[0]), to_double(g[1])});
    SegSet inner = prune(e.subtract(edge), part.cell, tol);
    SegSet outer = prune(e.intersect(edge), part.cell, tol);
    if (!inner.empty()) bc.triples.push_back({k1, k2, g, gx, inner});
    if (!outer.empty()) bc.boundary_triples.push_back({k1, k2, g, gx, outer});
  }
  return bc;
}

std::vector<Triple> regular_triples(const BoundaryClassification& bc) { return bc.triples; }

namespace {

nlohmann::json seg_json(const SegSet& s, const ReciprocalCell& cell) {
  nlohmann::json a = nlohmann::json::array();
  for (auto& seg : s.segments()) {
    auto p = cell.to_xi({to_double(seg.p[0]), to_double(seg.p[1])});
    auto q = cell.to_xi({to_double(seg.q[0]), to_double(seg.q[1])});
    a.push_back({{p[0], p[1]}, {q[0], q[1]}});
  }
  return a;
}

}  // namespace

nlohmann::json to_json(const FrequencyPartition& part) {
  nlohmann::json j;
  j["family"] = part.family_name();
  j["p"] = part.p;
  j["base"] = to_json(part.base);
  nlohmann::json regs = nlohmann::json::array();
  for (std::size_t k = 0; k < part.regions.size(); ++k) {
    nlohmann::json polys = nlohmann::json::array();
    for (auto& pc : part.regions[k].pieces) {
      nlohmann::json poly = nlohmann::json::array();
      for (auto& v : pc.verts) {
        auto x = part.cell.to_xi({to_double(v[0]), to_double(v[1])});
        poly.push_back({x[0], x[1]});
      }
      polys.push_back(poly);
    }
    const IMat2& a = part.sub[k];
    regs.push_back({{"k", k},
                    {"polygons", polys},
                    {"sublattice_coords", {{a.m[0][0], a.m[0][1]}, {a.m[1][0], a.m[1][1]}}},
                    {"sublattice", to_json(part.sublattices[k])},
                    {"index", std::abs(a.det())}});
  }
  j["regions"] = regs;
  Q r = part.redundancy();
  j["redundancy"] = {r.numerator(), r.denominator()};
  return j;
}

nlohmann::json to_json(const BoundaryClassification& bc, const FrequencyPartition& part) {
  nlohmann::json j;
  nlohmann::json regs = nlohmann::json::array();
  for (std::size_t k = 0; k < bc.boundary.size(); ++k)
    regs.push_back({{"k", k},
                    {"singular", seg_json(bc.singular[k], part.cell)},
                    {"regular", seg_json(bc.regular[k], part.cell)}});
  j["regions"] = regs;
  auto trip = [&](const std::vector<Triple>& ts) {
    nlohmann::json a = nlohmann::json::array();
    for (auto& t : ts)
      a.push_back({{"k1", t.k1}, {"k2", t.k2}, {"gamma", {t.gamma_xi[0], t.gamma_xi[1]}},
                   {"segments", seg_json(t.common, part.cell)}});
    return a;
  };
  j["triples"] = trip(bc.triples);
  j["cell_boundary_triples"] = trip(bc.boundary_triples);
  return j;
}

std::string to_svg(const FrequencyPartition& part, const BoundaryClassification* bc) {
  const double S = 60, W = 480;
  auto X = [&](double x) { return W / 2 + S * x; };
  auto Y = [&](double y) { return W / 2 - S * y; };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << W << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  const char* fills[] = {"#eeeeee", "#fde0c5", "#c5e3fd", "#d9f7c8", "#f7c8ee", "#fff3b0", "#d0d0ff"};
  for (std::size_t k = 0; k < part.regions.size(); ++k)
    for (auto& pc : part.regions[k].pieces) {
      os << "<polygon fill=\"" << fills[k % 7] << "\" stroke=\"#999\" stroke-width=\"0.5\" points=\"";
      double cx = 0, cy = 0;
      for (auto& v : pc.verts) {
        auto x = part.cell.to_xi({to_double(v[0]), to_double(v[1])});
        os << X(x[0]) << "," << Y(x[1]) << " ";
        cx += x[0], cy += x[1];
      }
      os << "\"/>\n";
      cx /= pc.verts.size(), cy /= pc.verts.size();
      os << "<text x=\"" << X(cx) << "\" y=\"" << Y(cy) << "\" font-size=\"10\" text-anchor=\"middle\">" << k
         << "</text>\n";
    }
  if (bc) {
    auto draw = [&](const SegSet& s, const char* col) {
      for (auto& seg : s.segments()) {
        auto p = part.cell.to_xi({to_double(seg.p[0]), to_double(seg.p[1])});
        auto q = part.cell.to_xi({to_double(seg.q[0]), to_double(seg.q[1])});
        os << "<line x1=\"" << X(p[0]) << "\" y1=\"" << Y(p[1]) << "\" x2=\"" << X(q[0]) << "\" y2=\"" << Y(q[1])
           << "\" stroke=\"" << col << "\" stroke-width=\"2\"/>\n";
      }
    };
    for (auto& s : bc->regular) draw(s, "green");
    for (auto& s : bc->singular) draw(s, "red");
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace hexwave
