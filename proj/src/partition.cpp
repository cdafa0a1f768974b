#include "hexwave/partition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace hexwave {

namespace {


IMat2 imat(i64 a, i64 b, i64 c, i64 d) {
  IMat2 m;
  m.m[0][0] = a; m.m[0][1] = b; m.m[1][0] = c; m.m[1][1] = d;
  return m;
}

Mat2 qmat(QS3 a, QS3 b, QS3 c, QS3 d) {
  Mat2 m;
  m.m[0][0] = a; m.m[0][1] = b; m.m[1][0] = c; m.m[1][1] = d;
  return m;
}

// rotations acting on reciprocal coordinates of the hexagonal lattice
const IMat2 kRotP60 = imat(1, -1, 1, 0);
const IMat2 kRotM60 = imat(0, 1, -1, 1);
const IMat2 kRot90 = imat(0, -1, 1, 0);

ConvexPoly map_poly(const Mat2& recip, const ConvexPoly& p, const IMat2& m) {
  std::vector<RPt> v;
  for (auto& x : p.verts) v.push_back(apply(m, x));
  return make_poly(recip, v);
}

ConvexPoly neg_poly(const Mat2& recip, const ConvexPoly& p) { return map_poly(recip, p, imat(-1, 0, 0, -1)); }

}  // namespace

GridPt to_grid(const RPt& p) {
  return {p[0].numerator(), p[1].numerator(), p[0].denominator(), p[1].denominator()};
}
RPt operator+(const RPt& a, const RPt& b) { return {a[0] + b[0], a[1] + b[1]}; }
RPt operator-(const RPt& a, const RPt& b) { return {a[0] - b[0], a[1] - b[1]}; }
RPt scale(const RPt& a, const Q& s) { return {a[0] * s, a[1] * s}; }
RPt apply(const IMat2& m, const RPt& p) {
  return {Q(m.m[0][0]) * p[0] + Q(m.m[0][1]) * p[1], Q(m.m[1][0]) * p[0] + Q(m.m[1][1]) * p[1]};
}

ConvexPoly make_poly(const Mat2& recip, std::vector<RPt> verts) {
  ConvexPoly poly;
  poly.verts = verts;
  std::size_t n = verts.size();
  for (std::size_t i = 0; i < n; ++i) {
    const RPt& a = verts[i];
    const RPt& b = verts[(i + 1) % n];
    Q e0 = b[0] - a[0], e1 = b[1] - a[1];
    // outward normal of a ccw polygon is (e1, -e0)
    poly.planes.push_back(make_halfplane(recip, e1, -e0, e1 * a[0] - e0 * a[1]));
  }
  return poly;
}

int FrequencyPartition::label_folded(const GridPt& p) const {
  for (std::size_t k = 0; k < regions.size(); ++k)
    for (auto& piece : regions[k].pieces)
      if (piece.contains(p)) return int(k);
  return -1;
}

int FrequencyPartition::label(const GridPt& p) const { return label_folded(cell.fold(p)); }

int FrequencyPartition::label_c(const Vec2& c0) const {
  Vec2 c = cell.fold_c(c0);
  for (std::size_t k = 0; k < regions.size(); ++k)
    for (auto& piece : regions[k].pieces)
      if (piece.contains_c(c)) return int(k);
  return -1;
}

std::vector<RPt> FrequencyPartition::dual_cosets(int k) const {
  const IMat2& a = sub[k];
  IMat2 at = imat(a.m[0][0], a.m[1][0], a.m[0][1], a.m[1][1]);
  i64 d = a.det();
  std::vector<RPt> out;
  for (auto& r : coset_reps_int(at)) {
    // a^{-T} r = (1/d) [[a11, -a10], [-a01, a00]] r
    Q c0 = Q(a.m[1][1] * r[0] - a.m[1][0] * r[1], d);
    Q c1 = Q(-a.m[0][1] * r[0] + a.m[0][0] * r[1], d);
    out.push_back({c0, c1});
  }
  return out;
}

Q FrequencyPartition::redundancy() const {
  Q s(0);
  for (auto& a : sub) s += Q(1, std::abs(a.det()));
  return s;
}

std::string FrequencyPartition::family_name() const {
  switch (family) {
    case Family::Dyadic: return "dyadic";
    case Family::Hexagonal: return "hexagonal";
    case Family::HexagonalFrame: return "hexagonal-frame";
    default: return "custom";
  }
}

FrequencyPartition build_hexagonal(int p) {
  if (p < 1) throw std::invalid_argument("p must be >= 1");
  FrequencyPartition part;
  part.family = Family::Hexagonal;
  part.p = p;
  part.base = Lattice2::hexagonal();
  part.cell = make_cell(part.base);
  const Mat2& R = part.cell.recip;
  std::vector<RPt> hexv{{Q(1, 3), Q(-1, 3)}, {Q(2, 3), Q(1, 3)},   {Q(1, 3), Q(2, 3)},
                        {Q(-1, 3), Q(1, 3)}, {Q(-2, 3), Q(-1, 3)}, {Q(-1, 3), Q(-2, 3)}};
  std::vector<RPt> a0;
  for (auto& v : hexv) a0.push_back(scale(v, Q(1, 2)));
  part.regions.push_back({0, {make_poly(R, a0)}});
  auto P = [&](int i) { return RPt{Q(1, 3) + Q(i, 3 * p), Q(-1, 3) + Q(2 * i, 3 * p)}; };
  std::vector<FrequencyRegion> fan;
  for (int k = 1; k <= p; ++k) {
    int a = p - k, b = a + 1;
    ConvexPoly right = make_poly(R, {scale(P(a), Q(1, 2)), P(a), P(b), scale(P(b), Q(1, 2))});
    fan.push_back({k, {right, neg_poly(R, right)}});
  }
  for (auto& f : fan) part.regions.push_back(f);
  for (auto& f : fan) {
    FrequencyRegion g{f.k + p, {}};
    for (auto& pc : f.pieces) g.pieces.push_back(map_poly(R, pc, kRotM60));
    part.regions.push_back(g);
  }
  for (auto& f : fan) {
    FrequencyRegion g{f.k + 2 * p, {}};
    for (auto& pc : f.pieces) g.pieces.push_back(map_poly(R, pc, kRotP60));
    part.regions.push_back(g);
  }
  // sublattices in cartesian entries, converted to base coordinates
  Mat2 g1 = qmat(QS3(2 * p), QS3(4), QS3(0, -2 * p), QS3(0));
  Mat2 g2 = qmat(QS3(0), QS3(-2), QS3(0, 4 * p), QS3(0, 6));
  Mat2 g3 = qmat(QS3(2 * p), QS3(2), QS3(0, 2 * p), QS3(0, 6));
  part.sub.push_back(imat(2, 0, 0, 2));
  for (const Mat2* g : {&g1, &g2, &g3})
    for (int k = 0; k < p; ++k) part.sub.push_back(coords_in(part.base, Lattice2::from(*g)));
  for (auto& a : part.sub) part.sublattices.push_back(part.base.sub(a));
  return part;
}

FrequencyPartition build_dyadic(int p) {
  if (p < 1) throw std::invalid_argument("p must be >= 1");
  FrequencyPartition part;
  part.family = Family::Dyadic;
  part.p = p;
  part.base = Lattice2::square();
  part.cell = make_cell(part.base);
  const Mat2& R = part.cell.recip;
  Q h(1, 4);
  part.regions.push_back({0, {make_poly(R, {{-h, -h}, {h, -h}, {h, h}, {-h, h}})}});
  auto P = [&](int i) { return RPt{Q(1, 2), Q(-1, 2) + Q(i, 3 * p)}; };
  std::vector<FrequencyRegion> fan;
  for (int k = 1; k <= 3 * p; ++k) {
    int a = 3 * p - k, b = a + 1;
    ConvexPoly right = make_poly(R, {scale(P(a), Q(1, 2)), P(a), P(b), scale(P(b), Q(1, 2))});
    fan.push_back({k, {right, neg_poly(R, right)}});
  }
  for (auto& f : fan) part.regions.push_back(f);
  for (auto& f : fan) {
    FrequencyRegion g{f.k + 3 * p, {}};
    for (auto& pc : f.pieces) g.pieces.push_back(map_poly(R, pc, kRot90));
    part.regions.push_back(g);
  }
  part.sub.push_back(imat(2, 0, 0, 2));
  for (int k = 0; k < 3 * p; ++k) part.sub.push_back(imat(2 * p, 0, 2 * p, 4));
  for (int k = 0; k < 3 * p; ++k) part.sub.push_back(imat(4, 2 * p, 0, 2 * p));
  for (auto& a : part.sub) part.sublattices.push_back(part.base.sub(a));
  return part;
}

FrequencyPartition build_hexagonal_frame() {
  FrequencyPartition part = build_hexagonal(2);
  part.family = Family::HexagonalFrame;
  for (auto& a : part.sub) a = imat(2, 0, 0, 2);
  for (auto& l : part.sublattices) l = part.base.sub(imat(2, 0, 0, 2));
  return part;
}

FrequencyPartition with_lattices(FrequencyPartition part, const std::vector<IMat2>& sub) {
  if (sub.size() != part.regions.size()) throw std::invalid_argument("one lattice per region required");
  part.family = Family::Custom;
  part.sub = sub;
  part.sublattices.clear();
  for (auto& a : sub) {
    if (a.det() == 0) throw LatticeError(LatticeError::InvalidLattice, "invalid-partition: singular sublattice");
    part.sublattices.push_back(part.base.sub(a));
  }
  return part;
}

AdmissibilityReport check_admissible(const FrequencyPartition& part, int n) {
  AdmissibilityReport rep;
  rep.grid_n = n;
  if (n < 64) throw std::invalid_argument("grid_n must be >= 64");
  for (std::size_t k = 0; k < part.sublattices.size(); ++k)
    if (!is_sublattice(part.base, part.sublattices[k]))
      throw LatticeError(LatticeError::NotSublattice, "invalid-partition: Gamma_k not in Lambda");
  std::vector<int> lab(std::size_t(n) * n);
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v) lab[std::size_t(u) * n + v] = part.label(GridPt{u, v, n, n});
  for (int k = 0; k < part.size(); ++k) {
    std::vector<IVec2> shifts;
    for (auto& t : part.dual_cosets(k)) {
      Q s0 = t[0] * n, s1 = t[1] * n;
      if (s0.denominator() != 1 || s1.denominator() != 1)
        throw LatticeError(LatticeError::GridMisaligned, "grid size not divisible by coset denominators");
      shifts.push_back({s0.numerator(), s1.numerator()});
    }
    int mx = 0, mn = 1 << 30;
    for (int u = 0; u < n; ++u)
      for (int v = 0; v < n; ++v) {
        int cnt = 0;
        for (auto& s : shifts) {
          i64 uu = ((u + s[0]) % n + n) % n, vv = ((v + s[1]) % n + n) % n;
          cnt += lab[std::size_t(uu) * n + vv] == k;
        }
        mx = std::max(mx, cnt);
        mn = std::min(mn, cnt);
      }
    rep.max_multiplicity.push_back(mx);
    rep.min_coverage.push_back(mn);
    if (mx != 1 || mn != 1) {
      rep.ok = false;
      rep.message += "region " + std::to_string(k) + ": multiplicity " + std::to_string(mx) + ", coverage " +
                     std::to_string(mn) + "; ";
    }
  }
  return rep;
}

}  // namespace hexwave
