#pragma once
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "hexwave/filters.hpp"

namespace hexwave {

enum class Verdict { Pass, Warn, Fail };
Verdict classify_residual(double r);  // pass <= 1e-10, warn <= 1e-6
std::string verdict_name(Verdict v);

struct PRReport {
  std::string bank;
  std::string check;
  int grid_n = 0;
  double max_identity_residual = 0;
  double max_matrix_residual = -1;  // -1 when not computed
  std::map<std::string, double> shift_residual;
  std::vector<double> mirror_residual;  // per band, empty when not computed
  Q critical_ratio{1};
  std::size_t probes = 0;
  double runtime_ms = 0;

  double worst() const;
  Verdict verdict() const { return classify_residual(worst()); }
};

nlohmann::json to_json(const PRReport& r);
std::string to_table(const PRReport& r);

// sum over bands of 1/|parent/Gamma_k|, exact
Q critical_ratio(const FilterBankSpec& fb);
// representatives of child*/parent*, in reciprocal coordinates of Z^2
std::vector<RPt> dual_quotient(const IMat2& child, const IMat2& parent);

// full modulation-matrix test at grid probes (u, v) over fb.grid_n
PRReport matrix_pr_residual(const FilterBankSpec& fb, const std::vector<GridPt>& probes);
PRReport matrix_pr_residual(const FilterBankSpec& fb, int n_probes = 500, unsigned seed = 1);
// per-band fold identity; throws FilterError unless critically sampled
std::vector<double> mirror_residual(const FilterBankSpec& fb);
// identity summation plus shift families, grouped by which band duals contain the shift
PRReport hex_pr_residual(const FilterBankSpec& fb);
PRReport frame_pr_residual(const FilterBankSpec& fb);
// picks the checks that apply to the bank kind and merges them
PRReport check_pr(const FilterBankSpec& fb);

}  // namespace hexwave
