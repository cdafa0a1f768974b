#pragma once
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "hexwave/partition.hpp"
#include "hexwave/util.hpp"

namespace hexwave {

// smooth step with nu(x) + nu(1-x) = 1; p_smooth 0 is the clamp, higher orders are C^p polynomials
double ramp(double x, int p_smooth);

enum class BankKind { Shannon, BasisOb1, BasisOb2, Frame, Cut2Band };
std::string kind_name(BankKind k);
BankKind kind_from_name(const std::string& s);

struct FilterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// samples all band moduli on the grid c = (u/n1, v/n2); result[k][u*n2+v]
class FilterEvaluator {
 public:
  virtual ~FilterEvaluator() = default;
  virtual int bands() const = 0;
  virtual std::vector<std::vector<double>> sample(int n1, int n2) const = 0;
};

// evaluators with a closed form at every exact frequency
class PointEvaluator : public FilterEvaluator {
 public:
  virtual void moduli(const GridPt& p, double* out) const = 0;
  std::vector<std::vector<double>> sample(int n1, int n2) const override;
};

struct TransferGrid {
  int k = 0;
  int n = 0;
  std::vector<double> modulus;  // n*n, row-major over c = (u/n, v/n)
  IVec2 eta{0, 0};              // lattice coordinates of eta_k
  Vec2 eta_xi{0, 0};
};

struct FilterBankSpec {
  BankKind kind = BankKind::Shannon;
  FrequencyPartition part;
  double eps = 0;
  int p_smooth = 0;
  int grid_n = 0;
  // lattice the bank acts on (identity for ordinary banks, Gamma_k for a cut) and its band sublattices
  IMat2 parent;
  std::vector<IMat2> sub;
  std::vector<IVec2> eta;
  std::vector<TransferGrid> filters;  // sampled at grid_n
  std::shared_ptr<const FilterEvaluator> eval;
  // cut metadata
  int cut_band = 0, cut_stage = 0;
  RPt cut_gamma{Q(0), Q(0)};

  int size() const { return int(sub.size()); }
  Vec2 eta_xi(int k) const;
  // moduli on an n1 x n2 grid, cached; analytic evaluator when present, else the stored grids
  const std::vector<std::vector<double>>& moduli(int n1, int n2) const;
  // complex response m_k on the grid including the phase exp(i<xi, eta_k>)
  std::vector<cplx> response(int k, int n1, int n2) const;
  // all responses on an n1 x n2 grid, cached (eta must not change afterwards)
  const std::vector<std::vector<cplx>>& responses(int n1, int n2) const;
  void resample(int n);  // refresh `filters` at a new grid size

 private:
  mutable std::mutex mu_;
  mutable std::map<std::pair<int, int>, std::shared_ptr<std::vector<std::vector<double>>>> cache_;
  mutable std::map<std::pair<int, int>, std::shared_ptr<std::vector<std::vector<cplx>>>> rcache_;

 public:
  FilterBankSpec() = default;
  FilterBankSpec(const FilterBankSpec& o);
  FilterBankSpec& operator=(const FilterBankSpec& o);
};

// hexagonal p=2 eta choices
std::vector<IVec2> basis_eta();
std::vector<IVec2> frame_eta();
// lattice coordinates -> cartesian for the hexagonal lattice
Vec2 hex_point(const IVec2& q);

FilterBankSpec shannon_filters(const FrequencyPartition& part, int grid_n = 192);
FilterBankSpec smooth_regular_boundaries(const FilterBankSpec& fb, double eps, int p_smooth);
FilterBankSpec smooth_refinement(const FilterBankSpec& fb, double eps, int p_smooth);
FilterBankSpec frame_filters(double eps, int p_smooth, int grid_n = 192);
// convenience: hexagonal basis bank of the given kind with defaults
FilterBankSpec make_bank(BankKind kind, double eps, int p_smooth, int grid_n = 192);

constexpr double kDefaultBasisEps = 0.19634954084936207;  // pi/16
constexpr double kDefaultFrameEps = 0.40;
double max_basis_eps();
double max_frame_eps();

// 2-band split of band k of `parent_bank` into two index-2 sublattices of Gamma_k
FilterBankSpec cutting_filters(const FilterBankSpec& parent_bank, int band, int stage, double eps);
FilterBankSpec cutting_filters(BankKind target, int stage, double eps, int grid_n, int band = 1);

// spatial renders: [0] = phi, [k] = psi^k, each out_n x out_n (row-major over lattice coordinates, centred)
std::vector<std::vector<double>> render_basis_functions(const FilterBankSpec& fb, int levels, int out_n);

// persistence
void save_bank(const FilterBankSpec& fb, const std::string& path);
FilterBankSpec load_bank(const std::string& path);
void write_png_gray(const std::string& path, const std::vector<double>& v, int n1, int n2, bool symmetric = false);
void write_png_range(const std::string& path, const std::vector<double>& v, int n1, int n2, double lo, double hi);
std::vector<std::string> write_heatmaps(const FilterBankSpec& fb, const std::string& prefix);

}  // namespace hexwave
