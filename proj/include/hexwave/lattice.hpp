#pragma once
#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hexwave/qs3.hpp"

namespace hexwave {

using i64 = std::int64_t;
using IVec2 = std::array<i64, 2>;
using Vec2 = std::array<double, 2>;

struct LatticeError : std::runtime_error {
  enum Kind { InvalidLattice, NotSublattice, GridMisaligned } kind;
  LatticeError(Kind k, const std::string& m) : std::runtime_error(m), kind(k) {}
};

struct Mat2 {
  QS3 m[2][2];
  QS3 det() const { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }
  Mat2 inverse() const;
  Mat2 transpose() const;
  Mat2 operator*(const Mat2& o) const;
  std::array<QS3, 2> apply(const std::array<QS3, 2>& v) const;
  std::array<std::array<double, 2>, 2> value() const;
  bool operator==(const Mat2& o) const;
};

struct IMat2 {
  i64 m[2][2]{{0, 0}, {0, 0}};
  i64 det() const { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }
  IMat2 operator*(const IMat2& o) const;
  IVec2 apply(const IVec2& v) const { return {m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]}; }
  bool operator==(const IMat2& o) const;
};

// lattice E*Z^2; when twopi is set the true generators are 2*pi*E
struct Lattice2 {
  Mat2 gen;
  bool twopi = false;

  static Lattice2 square();
  static Lattice2 hexagonal();  // columns (1, 1/sqrt3), (0, 2/sqrt3)
  static Lattice2 from(const Mat2& e, bool twopi = false);
  Lattice2 scaled(const Q& s) const;
  // sublattice E*A*Z^2, A integer in this lattice's coordinates
  Lattice2 sub(const IMat2& a) const;
  double det_value() const;
  std::array<std::array<double, 2>, 2> generators() const;
};

Lattice2 reciprocal(const Lattice2& lat);
// integer coordinates of child generators in the parent basis
IMat2 coords_in(const Lattice2& parent, const Lattice2& child);
bool is_sublattice(const Lattice2& parent, const Lattice2& child);
i64 quotient_index(const Lattice2& parent, const Lattice2& child);
bool same_lattice(const Lattice2& a, const Lattice2& b);

// lower-triangular column Hermite form: [[h00,0],[h10,h11]], h00,h11 > 0, 0 <= h10 < h11
IMat2 hnf(const IMat2& a);
IMat2 hnf_cols(const std::vector<IVec2>& cols);

struct QuotientReps {
  Lattice2 parent, child;
  IMat2 child_hnf;
  std::vector<IVec2> reps;  // parent coordinates
  std::size_t index_of(const IVec2& v) const;  // which coset v is in
};
QuotientReps coset_reps(const Lattice2& parent, const Lattice2& child);
std::vector<IVec2> coset_reps_int(const IMat2& a);

// intersection of integer sublattices a*Z^2 and b*Z^2 of Z^2
IMat2 intersect_int(const IMat2& a, const IMat2& b);

struct GridPt {
  i64 u = 0, v = 0, n1 = 1, n2 = 1;  // c = (u/n1, v/n2)
  Vec2 c() const { return {double(u) / double(n1), double(v) / double(n2)}; }
};

// a1*c1 + a2*c2 <= b in coordinates of the reciprocal basis
struct HalfPlane {
  i64 a1, a2, b;
  bool keep_tie;  // outward normal lexicographically negative -> boundary belongs
  bool contains(const GridPt& p) const {
    i64 s = a1 * p.u * p.n2 + a2 * p.v * p.n1 - b * p.n1 * p.n2;
    return s < 0 || (s == 0 && keep_tie);
  }
  bool contains(const Vec2& c) const {
    double s = double(a1) * c[0] + double(a2) * c[1] - double(b);
    return s < 0 || (s == 0 && keep_tie);
  }
};

// tie flag of a constraint a.c <= b given the reciprocal generators (without 2pi)
bool lexneg_normal(const Mat2& recip_gen, const Q& a1, const Q& a2);
HalfPlane make_halfplane(const Mat2& recip_gen, Q a1, Q a2, Q b);

struct ReciprocalCell {
  enum Kind { Square, Hexagon, Parallelogram } kind = Square;
  Lattice2 owner;
  Mat2 recip;  // generators of owner* divided by 2pi
  std::vector<HalfPlane> planes;

  bool contains(const GridPt& p) const;
  bool contains_c(const Vec2& c) const;
  GridPt fold(GridPt p) const;
  Vec2 fold_c(Vec2 c) const;
  Vec2 to_xi(const Vec2& c) const;
  Vec2 to_c(const Vec2& xi) const;
  std::vector<std::pair<double, double>> normals_offsets() const;  // cartesian (unit normal, offset)
};

ReciprocalCell make_cell(const Lattice2& lat);
Vec2 fold_to_cell(const Vec2& xi, const ReciprocalCell& cell);

nlohmann::json to_json(const QS3& x);
nlohmann::json to_json(const Lattice2& l);
QS3 qs3_from_json(const nlohmann::json& j);
Lattice2 lattice_from_json(const nlohmann::json& j);

}  // namespace hexwave
