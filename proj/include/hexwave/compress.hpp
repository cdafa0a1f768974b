#pragma once
#include <map>
#include <string>
#include <vector>

#include "hexwave/transform.hpp"

namespace hexwave {

struct CompressError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// orthogonal 1-D pair; g[n] = (-1)^n h[L-1-n]
struct SeparableFilterPair {
  std::vector<double> h, g;
  int moments = 0;  // declared vanishing moments of g
  std::string name;
};

// max_m |sum_n h[n] h[n+2m] - delta_m|
double double_shift_residual(const std::vector<double>& h);
// max_k |sum_n (-1)^n n^k h[n]| / sum_n |n^k h[n]| for k < moments
double moment_residual(const std::vector<double>& h, int moments);
// validates taps (sum sqrt2, orthogonality, moments at 1e-10); throws CompressError
SeparableFilterPair make_filter_pair(std::vector<double> h, int moments, std::string name = "custom");
SeparableFilterPair haar_pair();
// minimum-phase Daubechies taps of length 2N by spectral factorization
SeparableFilterPair daubechies_pair(int N);
// whitespace/comma separated taps, '#' comments
SeparableFilterPair load_filter_pair(const std::string& path, int moments);

// tensor DWT bands; orient 0 = lowpass (only at the last level), 1 = LH, 2 = HL, 3 = HH
struct TensorBand {
  int level = 1, orient = 0, rows = 0, cols = 0;
  std::vector<double> data;
};
struct TensorPyramid {
  int levels = 0, n1 = 0, n2 = 0;
  std::vector<TensorBand> bands;  // ordered by (level, orient); lowpass is (levels, 0)
  std::size_t coefficient_count() const;
  double energy() const;
};

TensorPyramid separable_analyze(const ImageGrid& x, const SeparableFilterPair& fp, int levels);
ImageGrid separable_synthesize(const TensorPyramid& p, const SeparableFilterPair& fp);

// indices of the `keep` largest |v|; ties go to the smaller index. Callers enumerate
// scalars in tie-key order. Result sorted ascending.
std::vector<std::size_t> topn_indices(const std::vector<double>& v, std::size_t keep);

// hex coefficients compete by modulus, one unit per lattice point.
// Tie key: (level, band, child, row-major index), scaling band keyed as (levels, 0).
SubbandPyramid topn_threshold(const SubbandPyramid& p, std::size_t keep);
TensorPyramid topn_threshold(const TensorPyramid& p, std::size_t keep);
// magnitudes in tie-key order
std::vector<double> flatten(const SubbandPyramid& p);
std::vector<double> flatten(const TensorPyramid& p);

constexpr double kPsnrCap = 200.0;
double psnr(const ImageGrid& f, const ImageGrid& fc);

struct CompressionResult {
  std::string image, method;
  double ratio = 20;
  std::size_t kept = 0;
  double psnr_db = 0;
  double runtime_ms = 0;
};

struct BenchConfig {
  double ratio = 20;
  int levels = 3;         // hex levels
  int tensor_levels = 5;  // separable baseline levels
  double eps = kDefaultBasisEps;
  double frame_eps = kDefaultFrameEps;
  int p_smooth = 1;
  int cut_level = 1;
  std::vector<std::string> methods{"tensor", "hex-basis-ob1", "hex-basis-ob2", "hex-frame", "hex-basis-cut", "hex-frame-cut"};
  std::vector<std::string> images;
  std::string taps;     // empty: db6 by spectral factorization
  std::string out_dir;  // reconstructions written here when set
  bool timing = false;  // runtime_ms stays 0 unless set, so the CSV is reproducible
};

const std::vector<std::string>& known_methods();
// key = value lines, '#' comments, lists comma separated (optional [ ] and quotes)
BenchConfig load_bench_config(const std::string& path);
std::map<std::string, std::string> parse_key_values(const std::string& text);

// one cell; reconstruction returned through `rec` when non-null
CompressionResult compress_image(const ImageGrid& x, const std::string& image_id, const std::string& method,
                                 const BenchConfig& cfg, ImageGrid* rec = nullptr);
std::vector<CompressionResult> run_benchmark(const BenchConfig& cfg);
std::string to_csv(const std::vector<CompressionResult>& rows);

}  // namespace hexwave
