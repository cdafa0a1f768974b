#pragma once
#include <memory>
#include <string>
#include <vector>

#include "hexwave/filters.hpp"

namespace hexwave {

// one period of a lattice-periodic signal; sample (i, j) sits at lattice point i*e1 + j*e2
struct ImageGrid {
  int n1 = 0, n2 = 0;
  std::vector<double> v;
  std::string tag = "pixels-on-hex-lattice";

  ImageGrid() = default;
  ImageGrid(int a, int b, double fill = 0.0) : n1(a), n2(b), v(std::size_t(a) * b, fill) {}
  double& at(int i, int j) { return v[std::size_t(i) * n2 + j]; }
  double at(int i, int j) const { return v[std::size_t(i) * n2 + j]; }
  double energy() const;
};

// coefficients on a sublattice A Z^2 (A in lower column Hermite form [[a,0],[b,d]]) of the level lattice,
// stored as a rows x cols array: entry (z1, z2) is the sample at (a z1, b z1 + d z2) mod (n1, n2).
// complex: the sampled banks are not exactly hermitian at boundary ties, so real images can pick up
// small imaginary parts there
struct BandGrid {
  int level = 1;   // 1 = finest
  int band = 0;    // k
  int child = -1;  // 0 or 1 after a cut
  IMat2 lattice;
  int rows = 0, cols = 0;
  std::vector<cplx> data;
  double energy() const;
};

struct CutPlan {
  int level = 1;
  int stage = 1;
  std::vector<int> bands{1, 2, 3, 4, 5, 6};
  double eps = kDefaultBasisEps;
  // filled by make_cut_plan, one per entry of `bands`
  std::vector<std::shared_ptr<const FilterBankSpec>> banks;
};

struct SubbandPyramid {
  std::shared_ptr<const FilterBankSpec> fb;
  int levels = 0;
  int n1 = 0, n2 = 0;
  std::vector<BandGrid> bands;  // wavelet bands, ordered by (level, band, child)
  BandGrid scaling;
  std::shared_ptr<const CutPlan> cut;  // null when uncut

  std::size_t coefficient_count() const;
  double energy() const;
  const BandGrid& find(int level, int band, int child = -1) const;
};

struct TransformError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// throws TransformError unless the bank passes the pr check at 1e-10 (result memoised per bank object)
void require_verified(const FilterBankSpec& fb);

// sample a level-lattice signal on lattice A; and put samples back (zeros elsewhere)
BandGrid restrict_to(const std::vector<cplx>& x, int n1, int n2, const IMat2& a);
std::vector<cplx> embed(const BandGrid& b, int n1, int n2);
void check_divisible(int n1, int n2, const IMat2& a);

struct LevelBands {
  std::vector<BandGrid> bands;  // index k, band 0 is the scaling band
};
LevelBands analyze_one_level(const ImageGrid& x, const FilterBankSpec& fb, int level = 1);
ImageGrid synthesize_one_level(const LevelBands& y, const FilterBankSpec& fb, int n1, int n2);
// same on complex signals (used by the cascade)
LevelBands analyze_level(const std::vector<cplx>& x, int n1, int n2, const FilterBankSpec& fb, int level);
std::vector<cplx> synthesize_level(const LevelBands& y, const FilterBankSpec& fb, int n1, int n2);

SubbandPyramid analyze(const ImageGrid& x, std::shared_ptr<const FilterBankSpec> fb, int levels);
ImageGrid synthesize(const SubbandPyramid& p);  // real part of synthesize_complex
std::vector<cplx> synthesize_complex(const SubbandPyramid& p);

CutPlan make_cut_plan(const FilterBankSpec& fb, int stage = 1, double eps = kDefaultBasisEps,
                      std::vector<int> bands = {1, 2, 3, 4, 5, 6}, int level = 1);
SubbandPyramid apply_cut(const SubbandPyramid& p, std::shared_ptr<const CutPlan> plan);
SubbandPyramid undo_cut(const SubbandPyramid& p);

// divisibility needed for a J-level transform with optional cut
int required_multiple(const FilterBankSpec& fb, int levels, bool cut);

// content hash of a bank's stored grids and phases
std::string bank_hash(const FilterBankSpec& fb);

void save_pyramid(const SubbandPyramid& p, const std::string& path);
SubbandPyramid load_pyramid(const std::string& path);

// grayscale io: binary/ascii PGM and 8/16-bit PNG
ImageGrid read_image(const std::string& path);
void write_pgm(const std::string& path, const ImageGrid& img);  // rounded, clamped to [0, 255]

}  // namespace hexwave
