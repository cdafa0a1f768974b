#include "hexwave/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace hexwave {

std::string QS3::str() const {
  std::ostringstream os;
  os << a;
  if (b.numerator() != 0) os << (b.numerator() > 0 ? "+" : "") << b << "/sqrt3";
  return os.str();
}

Mat2 Mat2::inverse() const {
  QS3 d = det();
  if (d == QS3{}) throw LatticeError(LatticeError::InvalidLattice, "singular generator matrix");
  Mat2 r;
  r.m[0][0] = m[1][1] / d;
  r.m[0][1] = -m[0][1] / d;
  r.m[1][0] = -m[1][0] / d;
  r.m[1][1] = m[0][0] / d;
  return r;
}

Mat2 Mat2::transpose() const {
  Mat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r.m[i][j] = m[j][i];
  return r;
}

Mat2 Mat2::operator*(const Mat2& o) const {
  Mat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r.m[i][j] = m[i][0] * o.m[0][j] + m[i][1] * o.m[1][j];
  return r;
}

std::array<QS3, 2> Mat2::apply(const std::array<QS3, 2>& v) const {
  return {m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]};
}

std::array<std::array<double, 2>, 2> Mat2::value() const {
  return {{{m[0][0].value(), m[0][1].value()}, {m[1][0].value(), m[1][1].value()}}};
}

bool Mat2::operator==(const Mat2& o) const {
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      if (m[i][j] != o.m[i][j]) return false;
  return true;
}

IMat2 IMat2::operator*(const IMat2& o) const {
  IMat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r.m[i][j] = m[i][0] * o.m[0][j] + m[i][1] * o.m[1][j];
  return r;
}

bool IMat2::operator==(const IMat2& o) const {
  return m[0][0] == o.m[0][0] && m[0][1] == o.m[0][1] && m[1][0] == o.m[1][0] && m[1][1] == o.m[1][1];
}

Lattice2 Lattice2::square() {
  Mat2 e;
  e.m[0][0] = 1; e.m[1][1] = 1;
  return {e, false};
}

Lattice2 Lattice2::hexagonal() {
  Mat2 e;
  e.m[0][0] = QS3(1);
  e.m[1][0] = QS3(0, 1);
  e.m[0][1] = QS3(0);
  e.m[1][1] = QS3(0, 2);
  return {e, false};
}

Lattice2 Lattice2::from(const Mat2& e, bool twopi) {
  if (e.det() == QS3{}) throw LatticeError(LatticeError::InvalidLattice, "singular generator matrix");
  return {e, twopi};
}

Lattice2 Lattice2::scaled(const Q& s) const {
  Lattice2 r = *this;
  for (auto& row : r.gen.m)
    for (auto& x : row) x = x * QS3(s);
  return r;
}

Lattice2 Lattice2::sub(const IMat2& a) const {
  Mat2 am;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) am.m[i][j] = QS3(a.m[i][j]);
  return from(gen * am, twopi);
}

double Lattice2::det_value() const {
  double d = std::abs(gen.det().value());
  return twopi ? d * 4 * M_PI * M_PI : d;
}

std::array<std::array<double, 2>, 2> Lattice2::generators() const {
  auto v = gen.value();
  if (twopi)
    for (auto& r : v)
      for (auto& x : r) x *= 2 * M_PI;
  return v;
}

Lattice2 reciprocal(const Lattice2& lat) {
  return Lattice2::from(lat.gen.inverse().transpose(), !lat.twopi);
}

IMat2 coords_in(const Lattice2& parent, const Lattice2& child) {
  if (parent.twopi != child.twopi)
    throw LatticeError(LatticeError::NotSublattice, "lattices live in different spaces");
  Mat2 c = parent.gen.inverse() * child.gen;
  IMat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      if (!c.m[i][j].is_integer())
        throw LatticeError(LatticeError::NotSublattice, "child generator not in parent: " + c.m[i][j].str());
      r.m[i][j] = c.m[i][j].a.numerator();
    }
  return r;
}

bool is_sublattice(const Lattice2& parent, const Lattice2& child) {
  try {
    coords_in(parent, child);
    return true;
  } catch (const LatticeError&) {
    return false;
  }
}

i64 quotient_index(const Lattice2& parent, const Lattice2& child) {
  return std::abs(coords_in(parent, child).det());
}

bool same_lattice(const Lattice2& a, const Lattice2& b) {
  if (!is_sublattice(a, b)) return false;
  return quotient_index(a, b) == 1;
}

// column operations until the first row is (g, 0), then reduce
IMat2 hnf_cols(const std::vector<IVec2>& cols_in) {
  std::vector<IVec2> cols = cols_in;
  auto combine = [](IVec2& x, IVec2& y, int row) {
    // gcd step on entries x[row], y[row]; leaves y[row] = 0
    while (y[row] != 0) {
      i64 q = x[row] / y[row];
      for (int k = 0; k < 2; ++k) x[k] -= q * y[k];
      std::swap(x, y);
    }
  };
  if (cols.empty()) throw LatticeError(LatticeError::InvalidLattice, "no generators");
  IVec2 first = cols[0];
  for (std::size_t i = 1; i < cols.size(); ++i) combine(first, cols[i], 0);
  // now all other columns have zero first entry
  IVec2 second{0, 0};
  for (std::size_t i = 1; i < cols.size(); ++i) {
    IVec2 c = cols[i];
    combine(second, c, 1);
  }
  if (first[0] < 0) first = {-first[0], -first[1]};
  if (second[1] < 0) second = {0, -second[1]};
  if (first[0] == 0 || second[1] == 0) throw LatticeError(LatticeError::InvalidLattice, "rank deficient");
  i64 h = second[1];
  i64 r = ((first[1] % h) + h) % h;
  IMat2 out;
  out.m[0][0] = first[0];
  out.m[1][0] = r;
  out.m[0][1] = 0;
  out.m[1][1] = h;
  return out;
}

IMat2 hnf(const IMat2& a) {
  return hnf_cols({IVec2{a.m[0][0], a.m[1][0]}, IVec2{a.m[0][1], a.m[1][1]}});
}

std::vector<IVec2> coset_reps_int(const IMat2& a) {
  IMat2 h = hnf(a);
  std::vector<IVec2> reps;
  for (i64 i = 0; i < h.m[0][0]; ++i)
    for (i64 j = 0; j < h.m[1][1]; ++j) reps.push_back({i, j});
  return reps;
}

std::size_t QuotientReps::index_of(const IVec2& v) const {
  const IMat2& h = child_hnf;
  i64 h0 = h.m[0][0], h1 = h.m[1][1];
  i64 q = v[0] >= 0 ? v[0] / h0 : -((-v[0] + h0 - 1) / h0);
  i64 x = v[0] - q * h0;
  i64 y = v[1] - q * h.m[1][0];
  y = ((y % h1) + h1) % h1;
  return std::size_t(x * h1 + y);
}

QuotientReps coset_reps(const Lattice2& parent, const Lattice2& child) {
  IMat2 a = coords_in(parent, child);
  QuotientReps q{parent, child, hnf(a), coset_reps_int(a)};
  return q;
}

// (L1 n L2)^# = L1^# + L2^#; duals of integer lattices are rational
IMat2 intersect_int(const IMat2& a, const IMat2& b) {
  i64 da = a.det(), db = b.det();
  if (da == 0 || db == 0) throw LatticeError(LatticeError::InvalidLattice, "singular");
  i64 D = std::lcm(std::abs(da), std::abs(db));
  // columns of D*a^{-T}
  auto dual_cols = [&](const IMat2& m, i64 d) {
    i64 s = D / d;
    // a^{-T} = (1/d) [[m11, -m10], [-m01, m00]]
    return std::vector<IVec2>{{s * m.m[1][1], -s * m.m[0][1]}, {-s * m.m[1][0], s * m.m[0][0]}};
  };
  auto ca = dual_cols(a, da), cb = dual_cols(b, db);
  std::vector<IVec2> cols{ca[0], ca[1], cb[0], cb[1]};
  IMat2 h = hnf_cols(cols);  // basis of D*(sum of duals)
  // dual back: (h/D)^{-T} = D * h^{-T}
  i64 dh = h.det();
  IMat2 r;
  // h^{-T} = (1/dh)[[h11, -h10],[-h01, h00]]
  r.m[0][0] = D * h.m[1][1];
  r.m[0][1] = -D * h.m[1][0];
  r.m[1][0] = -D * h.m[0][1];
  r.m[1][1] = D * h.m[0][0];
  for (auto& row : r.m)
    for (auto& x : row) {
      if (x % dh != 0) throw LatticeError(LatticeError::InvalidLattice, "intersection not integral");
      x /= dh;
    }
  return hnf(r);
}

bool lexneg_normal(const Mat2& recip_gen, const Q& a1, const Q& a2) {
  // cartesian normal n = R^{-T} a
  Mat2 rt = recip_gen.inverse().transpose();
  auto n = rt.apply({QS3(a1), QS3(a2)});
  int s0 = n[0].sign();
  if (s0 != 0) return s0 < 0;
  return n[1].sign() < 0;
}

HalfPlane make_halfplane(const Mat2& recip_gen, Q a1, Q a2, Q b) {
  i64 l = std::lcm(std::lcm(a1.denominator(), a2.denominator()), b.denominator());
  Q a1s = a1 * l, a2s = a2 * l, bs = b * l;
  i64 g = std::gcd(std::gcd(a1s.numerator(), a2s.numerator()), bs.numerator());
  if (g == 0) g = 1;
  return {a1s.numerator() / g, a2s.numerator() / g, bs.numerator() / g, lexneg_normal(recip_gen, a1, a2)};
}

ReciprocalCell make_cell(const Lattice2& lat) {
  ReciprocalCell cell;
  cell.owner = lat;
  Lattice2 r = reciprocal(lat);
  cell.recip = r.gen;
  Mat2 g = r.gen.transpose() * r.gen;
  bool rational = g.m[0][0].is_rational() && g.m[0][1].is_rational() && g.m[1][1].is_rational();
  if (rational) {
    // Voronoi cell: c.G.w <= w.G.w/2 for short w
    for (i64 w1 = -1; w1 <= 1; ++w1)
      for (i64 w2 = -1; w2 <= 1; ++w2) {
        if (w1 == 0 && w2 == 0) continue;
        Q gw1 = g.m[0][0].a * w1 + g.m[0][1].a * w2;
        Q gw2 = g.m[1][0].a * w1 + g.m[1][1].a * w2;
        Q wgw = gw1 * w1 + gw2 * w2;
        cell.planes.push_back(make_halfplane(cell.recip, gw1, gw2, wgw / 2));
      }
    cell.kind = (g.m[0][1].a.numerator() == 0) ? ReciprocalCell::Square : ReciprocalCell::Hexagon;
    // keep only facets: planes tight at two or more vertices of the polygon
    std::vector<HalfPlane> keep;
    auto& P = cell.planes;
    for (std::size_t i = 0; i < P.size(); ++i) {
      int tight = 0;
      for (std::size_t j = 0; j < P.size(); ++j) {
        if (i == j) continue;
        Q d = Q(P[i].a1 * P[j].a2 - P[i].a2 * P[j].a1);
        if (d.numerator() == 0) continue;
        Q x = Q(P[i].b * P[j].a2 - P[j].b * P[i].a2) / d;
        Q y = Q(P[i].a1 * P[j].b - P[j].a1 * P[i].b) / d;
        bool ok = true;
        for (auto& h : P)
          if (Q(h.a1) * x + Q(h.a2) * y > Q(h.b)) ok = false;
        if (ok) ++tight;
      }
      if (tight >= 2) keep.push_back(P[i]);
    }
    cell.planes = keep;
  } else {
    cell.kind = ReciprocalCell::Parallelogram;
    cell.planes.push_back(make_halfplane(cell.recip, 1, 0, Q(1, 2)));
    cell.planes.push_back(make_halfplane(cell.recip, -1, 0, Q(1, 2)));
    cell.planes.push_back(make_halfplane(cell.recip, 0, 1, Q(1, 2)));
    cell.planes.push_back(make_halfplane(cell.recip, 0, -1, Q(1, 2)));
  }
  return cell;
}

bool ReciprocalCell::contains(const GridPt& p) const {
  for (auto& h : planes)
    if (!h.contains(p)) return false;
  return true;
}

bool ReciprocalCell::contains_c(const Vec2& c) const {
  for (auto& h : planes)
    if (!h.contains(c)) return false;
  return true;
}

static i64 floordiv(i64 a, i64 b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }

GridPt ReciprocalCell::fold(GridPt p) const {
  p.u -= floordiv(p.u, p.n1) * p.n1;
  p.v -= floordiv(p.v, p.n2) * p.n2;
  for (i64 l1 = 0; l1 <= 1; ++l1)
    for (i64 l2 = 0; l2 <= 1; ++l2) {
      GridPt q{p.u - l1 * p.n1, p.v - l2 * p.n2, p.n1, p.n2};
      if (contains(q)) return q;
    }
  for (i64 l1 = -1; l1 <= 2; ++l1)
    for (i64 l2 = -1; l2 <= 2; ++l2) {
      GridPt q{p.u - l1 * p.n1, p.v - l2 * p.n2, p.n1, p.n2};
      if (contains(q)) return q;
    }
  throw std::logic_error("fold: no cell representative");
}

Vec2 ReciprocalCell::fold_c(Vec2 c) const {
  c[0] -= std::floor(c[0]);
  c[1] -= std::floor(c[1]);
  for (int l1 = -1; l1 <= 2; ++l1)
    for (int l2 = -1; l2 <= 2; ++l2) {
      Vec2 q{c[0] - l1, c[1] - l2};
      if (contains_c(q)) return q;
    }
  // rounding left the point outside every candidate; take the nearest
  Vec2 best = c;
  double bd = 1e300;
  for (int l1 = -1; l1 <= 2; ++l1)
    for (int l2 = -1; l2 <= 2; ++l2) {
      Vec2 q{c[0] - l1, c[1] - l2};
      double worst = -1e300;
      for (auto& h : planes) worst = std::max(worst, h.a1 * q[0] + h.a2 * q[1] - double(h.b));
      if (worst < bd) bd = worst, best = q;
    }
  return best;
}

Vec2 ReciprocalCell::to_xi(const Vec2& c) const {
  auto r = recip.value();
  return {2 * M_PI * (r[0][0] * c[0] + r[0][1] * c[1]), 2 * M_PI * (r[1][0] * c[0] + r[1][1] * c[1])};
}

Vec2 ReciprocalCell::to_c(const Vec2& xi) const {
  auto r = recip.inverse().value();
  return {(r[0][0] * xi[0] + r[0][1] * xi[1]) / (2 * M_PI), (r[1][0] * xi[0] + r[1][1] * xi[1]) / (2 * M_PI)};
}

std::vector<std::pair<double, double>> ReciprocalCell::normals_offsets() const {
  std::vector<std::pair<double, double>> out;
  auto rt = recip.inverse().transpose().value();
  for (auto& h : planes) {
    double n0 = rt[0][0] * h.a1 + rt[0][1] * h.a2, n1 = rt[1][0] * h.a1 + rt[1][1] * h.a2;
    double len = std::hypot(n0, n1);
    out.push_back({std::atan2(n1, n0), 2 * M_PI * double(h.b) / len});
  }
  return out;
}

Vec2 fold_to_cell(const Vec2& xi, const ReciprocalCell& cell) {
  return cell.to_xi(cell.fold_c(cell.to_c(xi)));
}

nlohmann::json to_json(const QS3& x) {
  auto q = [](const Q& r) { return nlohmann::json::array({r.numerator(), r.denominator()}); };
  return {{"rational", q(x.a)}, {"sqrt3_rational", q(x.b)}};
}

QS3 qs3_from_json(const nlohmann::json& j) {
  auto q = [](const nlohmann::json& a) {
    if (a.is_number_integer()) return Q(a.get<i64>());
    return Q(a.at(0).get<i64>(), a.at(1).get<i64>());
  };
  return {q(j.at("rational")), j.contains("sqrt3_rational") ? q(j.at("sqrt3_rational")) : Q(0)};
}

nlohmann::json to_json(const Lattice2& l) {
  nlohmann::json g = nlohmann::json::array();
  for (int i = 0; i < 2; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < 2; ++j) row.push_back(to_json(l.gen.m[i][j]));
    g.push_back(row);
  }
  return {{"generators", g}, {"twopi", l.twopi}};
}

Lattice2 lattice_from_json(const nlohmann::json& j) {
  Mat2 m;
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k) m.m[i][k] = qs3_from_json(j.at("generators").at(i).at(k));
  return Lattice2::from(m, j.value("twopi", false));
}

}  // namespace hexwave
