#pragma once
#include <map>
#include <string>
#include <vector>

#include "hexwave/lattice.hpp"

namespace hexwave {

using RPt = std::array<Q, 2>;  // exact point in reciprocal coordinates c

GridPt to_grid(const RPt& p);
RPt operator+(const RPt& a, const RPt& b);
RPt operator-(const RPt& a, const RPt& b);
RPt scale(const RPt& a, const Q& s);
// 2x2 integer matrix acting on reciprocal coordinates
RPt apply(const IMat2& m, const RPt& p);

struct ConvexPoly {
  std::vector<RPt> verts;  // counter-clockwise
  std::vector<HalfPlane> planes;
  bool contains(const GridPt& p) const {
    for (auto& h : planes)
      if (!h.contains(p)) return false;
    return true;
  }
  bool contains_c(const Vec2& c) const {
    for (auto& h : planes)
      if (!h.contains(c)) return false;
    return true;
  }
};
ConvexPoly make_poly(const Mat2& recip, std::vector<RPt> verts);

struct FrequencyRegion {
  int k = 0;
  std::vector<ConvexPoly> pieces;
};

enum class Family { Dyadic, Hexagonal, HexagonalFrame, Custom };

struct FrequencyPartition {
  Family family = Family::Custom;
  int p = 0;
  Lattice2 base;
  ReciprocalCell cell;
  std::vector<FrequencyRegion> regions;  // regions[0] = A_0
  std::vector<IMat2> sub;                // Gamma_k in base coordinates
  std::vector<Lattice2> sublattices;

  int size() const { return int(regions.size()); }
  // region index of a frequency (folded into S first); -1 if uncovered
  int label(const GridPt& p) const;
  int label_c(const Vec2& c) const;  // floating version
  int label_folded(const GridPt& p) const;  // p already in S
  // Gamma_k^* / Lambda^* coset representatives in reciprocal coordinates
  std::vector<RPt> dual_cosets(int k) const;
  // redundancy sum_k 1/|Lambda/Gamma_k| as exact fraction
  Q redundancy() const;
  std::string family_name() const;
};

FrequencyPartition build_hexagonal(int p);
FrequencyPartition build_dyadic(int p);
FrequencyPartition build_hexagonal_frame();
// hexagonal(2) regions with user lattices (used for negative tests)
FrequencyPartition with_lattices(FrequencyPartition part, const std::vector<IMat2>& sub);

struct AdmissibilityReport {
  bool ok = true;
  int grid_n = 0;
  std::vector<int> max_multiplicity, min_coverage;
  std::string message;
};
AdmissibilityReport check_admissible(const FrequencyPartition& part, int grid_n = 192);

// ---- exact segment sets -------------------------------------------------
struct LineKey {
  i64 a1, a2;  // a.c = b, gcd-normalized, (a1,a2) lexicographically positive
  Q b;
  bool operator<(const LineKey& o) const {
    if (a1 != o.a1) return a1 < o.a1;
    if (a2 != o.a2) return a2 < o.a2;
    return b < o.b;
  }
};
struct Seg {
  RPt p, q;
};
class SegSet {
 public:
  void add(const Seg& s);
  void add(const LineKey& l, Q t0, Q t1);
  SegSet unite(const SegSet& o) const;
  SegSet intersect(const SegSet& o) const;
  SegSet subtract(const SegSet& o) const;
  SegSet translate(const RPt& v) const;
  bool empty() const { return lines_.empty(); }
  std::vector<Seg> segments() const;
  double length(const ReciprocalCell& cell) const;  // cartesian length
  const std::map<LineKey, std::vector<std::pair<Q, Q>>>& lines() const { return lines_; }

 private:
  void normalize(std::vector<std::pair<Q, Q>>& iv) const;
  std::map<LineKey, std::vector<std::pair<Q, Q>>> lines_;
};

struct Triple {
  int k1, k2;
  RPt gamma;      // reciprocal coordinates
  Vec2 gamma_xi;  // angular frequency
  SegSet common;  // E(k1,k2,gamma), interior part
};

struct BoundaryClassification {
  std::vector<SegSet> boundary, singular, regular;  // per region
  std::vector<Triple> triples;                       // every (k1<k2, gamma) with common regular boundary
  std::vector<Triple> boundary_triples;              // same but lying on the cell boundary
};

BoundaryClassification classify_boundaries(const FrequencyPartition& part, double tol = 1e-9);
std::vector<Triple> regular_triples(const BoundaryClassification& bc);
// boundary segments of a region as the set where exactly one side has label k
SegSet region_boundary(const FrequencyPartition& part, int k);
std::vector<RPt> cell_vertices(const ReciprocalCell& cell);  // counter-clockwise
SegSet cell_boundary(const ReciprocalCell& cell);

nlohmann::json to_json(const FrequencyPartition& part);
nlohmann::json to_json(const BoundaryClassification& bc, const FrequencyPartition& part);
std::string to_svg(const FrequencyPartition& part, const BoundaryClassification* bc);

}  // namespace hexwave
