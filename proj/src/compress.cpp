#include "hexwave/compress.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>

namespace hexwave {

namespace {

const double kTapTol = 1e-10;

std::vector<double> qmf(const std::vector<double>& h) {
  const std::size_t L = h.size();
  std::vector<double> g(L);
  for (std::size_t n = 0; n < L; ++n) g[n] = (n % 2 ? -1.0 : 1.0) * h[L - 1 - n];
  return g;
}

// roots of sum_k a[k] x^k via the companion matrix, polished with a few Newton steps
std::vector<cplx> poly_roots(const std::vector<double>& a) {
  const int m = int(a.size()) - 1;
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(m, m);
  for (int i = 1; i < m; ++i) c(i, i - 1) = 1;
  for (int i = 0; i < m; ++i) c(i, m - 1) = -a[i] / a[m];
  Eigen::EigenSolver<Eigen::MatrixXd> es(c, false);
  std::vector<cplx> r(es.eigenvalues().data(), es.eigenvalues().data() + m);
  for (auto& z : r)
    for (int it = 0; it < 3; ++it) {
      cplx p = 0, dp = 0;
      for (int k = m; k >= 0; --k) {
        dp = dp * z + p;
        p = p * z + a[k];
      }
      if (std::abs(dp) > 0) z -= p / dp;
    }
  return r;
}

void dwt1(const double* x, std::size_t stride, int m, const std::vector<double>& h, const std::vector<double>& g,
          double* lo, double* hi, std::size_t ostride) {
  const int L = int(h.size());
  for (int k = 0; k < m / 2; ++k) {
    double a = 0, d = 0;
    for (int n = 0; n < L; ++n) {
      double v = x[std::size_t(wrap(2 * k + n, m)) * stride];
      a += h[n] * v;
      d += g[n] * v;
    }
    lo[std::size_t(k) * ostride] = a;
    hi[std::size_t(k) * ostride] = d;
  }
}

void idwt1(const double* lo, const double* hi, std::size_t istride, int m, const std::vector<double>& h,
           const std::vector<double>& g, double* x, std::size_t stride) {
  const int L = int(h.size());
  for (int i = 0; i < m; ++i) x[std::size_t(i) * stride] = 0;
  for (int k = 0; k < m / 2; ++k) {
    double a = lo[std::size_t(k) * istride], d = hi[std::size_t(k) * istride];
    for (int n = 0; n < L; ++n) x[std::size_t(wrap(2 * k + n, m)) * stride] += h[n] * a + g[n] * d;
  }
}

// one 2-D level on the top-left r x c block of a row-major array with row length w
void dwt2_level(std::vector<double>& a, int w, int r, int c, const SeparableFilterPair& fp) {
  std::vector<double> tmp(std::max(r, c));
  for (int i = 0; i < r; ++i) {
    double* row = a.data() + std::size_t(i) * w;
    dwt1(row, 1, c, fp.h, fp.g, tmp.data(), tmp.data() + c / 2, 1);
    std::copy(tmp.begin(), tmp.begin() + c, row);
  }
  for (int j = 0; j < c; ++j) {
    double* col = a.data() + j;
    dwt1(col, std::size_t(w), r, fp.h, fp.g, tmp.data(), tmp.data() + r / 2, 1);
    for (int i = 0; i < r; ++i) col[std::size_t(i) * w] = tmp[i];
  }
}

void idwt2_level(std::vector<double>& a, int w, int r, int c, const SeparableFilterPair& fp) {
  std::vector<double> tmp(std::max(r, c));
  for (int j = 0; j < c; ++j) {
    double* col = a.data() + j;
    idwt1(col, col + std::size_t(r / 2) * w, std::size_t(w), r, fp.h, fp.g, tmp.data(), 1);
    for (int i = 0; i < r; ++i) col[std::size_t(i) * w] = tmp[i];
  }
  for (int i = 0; i < r; ++i) {
    double* row = a.data() + std::size_t(i) * w;
    idwt1(row, row + c / 2, 1, c, fp.h, fp.g, tmp.data(), 1);
    std::copy(tmp.begin(), tmp.begin() + c, row);
  }
}

// band (level, orient) as a block of the in-place layout
struct Block {
  int r0, c0, rows, cols;
};
Block block_of(int n1, int n2, int level, int orient) {
  int r = n1 >> level, c = n2 >> level;
  switch (orient) {
    case 0: return {0, 0, r, c};
    case 1: return {0, c, r, c};
    case 2: return {r, 0, r, c};
    default: return {r, c, r, c};
  }
}

std::vector<const BandGrid*> key_order(const SubbandPyramid& p) {
  std::vector<const BandGrid*> out;
  for (auto& b : p.bands) out.push_back(&b);
  out.push_back(&p.scaling);
  auto key = [&](const BandGrid* b) {
    bool sc = b == &p.scaling;
    return std::make_tuple(sc ? p.levels : b->level, sc ? 0 : b->band, sc ? -1 : b->child);
  };
  std::stable_sort(out.begin(), out.end(), [&](auto* a, auto* b) { return key(a) < key(b); });
  return out;
}

std::string trim(std::string s) {
  auto ws = [](unsigned char ch) { return std::isspace(ch) != 0; };
  while (!s.empty() && ws(s.back())) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && ws(s[i])) ++i;
  return s.substr(i);
}

std::string unquote(std::string s) {
  s = trim(s);
  if (s.size() >= 2 && (s[0] == '"' || s[0] == '\'') && s.back() == s[0]) s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> split_list(std::string s) {
  s = trim(s);
  if (!s.empty() && s.front() == '[') {
    if (s.back() != ']') throw CompressError("unterminated list: " + s);
    s = s.substr(1, s.size() - 2);
  }
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = unquote(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct BankKey {
  BankKind kind;
  double eps;
  int p_smooth;
  auto operator<=>(const BankKey&) const = default;
};

std::shared_ptr<const FilterBankSpec> cached_bank(BankKind kind, double eps, int p_smooth) {
  static std::mutex mu;
  static std::map<BankKey, std::shared_ptr<const FilterBankSpec>> cache;
  std::lock_guard<std::mutex> lk(mu);
  auto& s = cache[{kind, eps, p_smooth}];
  if (!s) s = std::make_shared<FilterBankSpec>(make_bank(kind, eps, p_smooth));
  return s;
}

std::shared_ptr<const CutPlan> cached_plan(const std::shared_ptr<const FilterBankSpec>& fb, double eps, int level) {
  static std::mutex mu;
  static std::map<std::tuple<const FilterBankSpec*, double, int>, std::shared_ptr<const CutPlan>> cache;
  std::lock_guard<std::mutex> lk(mu);
  auto& s = cache[{fb.get(), eps, level}];
  if (!s) s = std::make_shared<CutPlan>(make_cut_plan(*fb, 1, eps, {1, 2, 3, 4, 5, 6}, level));
  return s;
}

}  // namespace

double double_shift_residual(const std::vector<double>& h) {
  const long L = long(h.size());
  double worst = 0;
  for (long m = 0; 2 * m < L; ++m) {
    double s = 0;
    for (long n = 0; n + 2 * m < L; ++n) s += h[n] * h[n + 2 * m];
    worst = std::max(worst, std::abs(s - (m == 0 ? 1.0 : 0.0)));
  }
  return worst;
}

double moment_residual(const std::vector<double>& h, int moments) {
  double worst = 0;
  for (int k = 0; k < moments; ++k) {
    double s = 0, scale = 0;
    for (std::size_t n = 0; n < h.size(); ++n) {
      double t = std::pow(double(n), k) * h[n];
      s += (n % 2 ? -t : t);
      scale += std::abs(t);
    }
    worst = std::max(worst, std::abs(s) / scale);
  }
  return worst;
}

SeparableFilterPair make_filter_pair(std::vector<double> h, int moments, std::string name) {
  if (h.size() < 2 || h.size() % 2) throw CompressError("taps must have even length >= 2");
  for (double v : h)
    if (!std::isfinite(v)) throw CompressError("non-finite tap");
  double s = std::accumulate(h.begin(), h.end(), 0.0);
  if (std::abs(s - std::sqrt(2.0)) > kTapTol) throw CompressError("taps must sum to sqrt(2), got " + std::to_string(s));
  double o = double_shift_residual(h);
  if (!(o <= kTapTol)) throw CompressError("taps fail double-shift orthogonality, residual " + std::to_string(o));
  if (moments < 1 || std::size_t(moments) * 2 > h.size()) throw CompressError("moment count out of range");
  double mr = moment_residual(h, moments);
  if (!(mr <= kTapTol)) throw CompressError("taps fail the moment condition, residual " + std::to_string(mr));
  SeparableFilterPair fp;
  fp.g = qmf(h);
  fp.h = std::move(h);
  fp.moments = moments;
  fp.name = std::move(name);
  return fp;
}

SeparableFilterPair haar_pair() { return make_filter_pair({M_SQRT1_2, M_SQRT1_2}, 1, "haar"); }

SeparableFilterPair daubechies_pair(int N) {
  if (N < 1 || N > 10) throw CompressError("daubechies order must be in 1..10");
  if (N == 1) return haar_pair();
  // |H|^2 splits as cos^{2N} times P(sin^2) with P(y) = sum_k C(N-1+k, k) y^k
  std::vector<double> P(N);
  for (int k = 0; k < N; ++k) P[k] = std::round(std::tgamma(N + k) / (std::tgamma(k + 1) * std::tgamma(N)));
  std::vector<cplx> zs;
  for (cplx y : poly_roots(P)) {
    // y = (2 - z - 1/z) / 4  ->  z^2 - (2 - 4y) z + 1 = 0; keep the root inside the circle
    cplx b = 2.0 - 4.0 * y;
    cplx d = std::sqrt(b * b - 4.0);
    cplx z1 = (b + d) / 2.0, z2 = (b - d) / 2.0;
    zs.push_back(std::abs(z1) < 1 ? z1 : z2);
  }
  for (int i = 0; i < N; ++i) zs.push_back(-1.0);
  std::vector<cplx> c{1.0};
  for (cplx z : zs) {
    std::vector<cplx> n(c.size() + 1, 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) {
      n[i + 1] += c[i];
      n[i] -= z * c[i];
    }
    c = std::move(n);
  }
  std::vector<double> h(c.size());
  double s = 0;
  for (std::size_t i = 0; i < c.size(); ++i) s += (h[i] = c[i].real());
  for (auto& v : h) v *= std::sqrt(2.0) / s;
  std::reverse(h.begin(), h.end());  // usual tabulated order, largest taps first
  return make_filter_pair(std::move(h), N, "db" + std::to_string(N));
}

SeparableFilterPair load_filter_pair(const std::string& path, int moments) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path);
  std::vector<double> h;
  std::string line;
  while (std::getline(is, line)) {
    line = line.substr(0, line.find('#'));
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) {
      try {
        std::size_t used = 0;
        h.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw CompressError("bad tap '" + tok + "' in " + path);
      }
    }
  }
  return make_filter_pair(std::move(h), moments, std::filesystem::path(path).stem().string());
}

std::size_t TensorPyramid::coefficient_count() const {
  std::size_t n = 0;
  for (auto& b : bands) n += b.data.size();
  return n;
}

double TensorPyramid::energy() const {
  double e = 0;
  for (auto& b : bands)
    for (double v : b.data) e += v * v;
  return e;
}

TensorPyramid separable_analyze(const ImageGrid& x, const SeparableFilterPair& fp, int levels) {
  if (levels < 1) throw CompressError("levels must be >= 1");
  if (x.n1 % (1 << levels) || x.n2 % (1 << levels))
    throw CompressError("image dimensions must be divisible by 2^levels = " + std::to_string(1 << levels));
  std::vector<double> a = x.v;
  for (int j = 0; j < levels; ++j) dwt2_level(a, x.n2, x.n1 >> j, x.n2 >> j, fp);
  TensorPyramid p;
  p.levels = levels;
  p.n1 = x.n1;
  p.n2 = x.n2;
  for (int j = 1; j <= levels; ++j)
    for (int o = (j == levels ? 0 : 1); o <= 3; ++o) {
      auto bl = block_of(x.n1, x.n2, j, o);
      TensorBand b{j, o, bl.rows, bl.cols, {}};
      b.data.reserve(std::size_t(bl.rows) * bl.cols);
      for (int r = 0; r < bl.rows; ++r)
        for (int c = 0; c < bl.cols; ++c) b.data.push_back(a[std::size_t(bl.r0 + r) * x.n2 + bl.c0 + c]);
      p.bands.push_back(std::move(b));
    }
  return p;
}

ImageGrid separable_synthesize(const TensorPyramid& p, const SeparableFilterPair& fp) {
  ImageGrid out(p.n1, p.n2);
  for (auto& b : p.bands) {
    auto bl = block_of(p.n1, p.n2, b.level, b.orient);
    if (bl.rows != b.rows || bl.cols != b.cols || b.data.size() != std::size_t(b.rows) * b.cols)
      throw CompressError("tensor band shape mismatch");
    for (int r = 0; r < bl.rows; ++r)
      for (int c = 0; c < bl.cols; ++c) out.at(bl.r0 + r, bl.c0 + c) = b.data[std::size_t(r) * b.cols + c];
  }
  for (int j = p.levels - 1; j >= 0; --j) idwt2_level(out.v, p.n2, p.n1 >> j, p.n2 >> j, fp);
  return out;
}

std::vector<std::size_t> topn_indices(const std::vector<double>& v, std::size_t keep) {
  if (keep >= v.size()) {
    std::vector<std::size_t> all(v.size());
    std::iota(all.begin(), all.end(), 0);
    return all;
  }
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  auto before = [&](std::size_t a, std::size_t b) {
    double x = std::abs(v[a]), y = std::abs(v[b]);
    return x > y || (x == y && a < b);
  };
  std::nth_element(idx.begin(), idx.begin() + std::ptrdiff_t(keep), idx.end(), before);
  idx.resize(keep);
  std::sort(idx.begin(), idx.end());
  return idx;
}

std::vector<double> flatten(const SubbandPyramid& p) {
  std::vector<double> out;
  out.reserve(p.coefficient_count());
  for (auto* b : key_order(p))
    for (auto& c : b->data) out.push_back(std::abs(c));
  return out;
}

std::vector<double> flatten(const TensorPyramid& p) {
  std::vector<double> out;
  out.reserve(p.coefficient_count());
  for (auto& b : p.bands) out.insert(out.end(), b.data.begin(), b.data.end());
  return out;
}

SubbandPyramid topn_threshold(const SubbandPyramid& p, std::size_t keep) {
  auto idx = topn_indices(flatten(p), keep);
  SubbandPyramid q = p;
  // walk the copy in the same order
  std::vector<BandGrid*> order;
  for (auto* b : key_order(p)) order.push_back(b == &p.scaling ? &q.scaling : &q.bands[std::size_t(b - p.bands.data())]);
  std::size_t flat = 0, next = 0;
  for (auto* b : order)
    for (auto& c : b->data) {
      if (next < idx.size() && idx[next] == flat)
        ++next;
      else
        c = 0.0;
      ++flat;
    }
  return q;
}

TensorPyramid topn_threshold(const TensorPyramid& p, std::size_t keep) {
  auto idx = topn_indices(flatten(p), keep);
  TensorPyramid q = p;
  std::size_t flat = 0, next = 0;
  for (auto& b : q.bands)
    for (auto& c : b.data) {
      if (next < idx.size() && idx[next] == flat)
        ++next;
      else
        c = 0.0;
      ++flat;
    }
  return q;
}

double psnr(const ImageGrid& f, const ImageGrid& fc) {
  if (f.n1 != fc.n1 || f.n2 != fc.n2) throw CompressError("psnr: dimension mismatch");
  double e = 0;
  for (std::size_t i = 0; i < f.v.size(); ++i) e += (f.v[i] - fc.v[i]) * (f.v[i] - fc.v[i]);
  if (e == 0) return kPsnrCap;
  return std::min(kPsnrCap, 10 * std::log10(255.0 * 255.0 * double(f.v.size()) / e));
}

const std::vector<std::string>& known_methods() {
  static const std::vector<std::string> m{"tensor", "hex-basis-ob1", "hex-basis-ob2", "hex-frame", "hex-basis-cut", "hex-frame-cut"};
  return m;
}

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream is(text);
  std::string line;
  int no = 0;
  while (std::getline(is, line)) {
    ++no;
    // strip comments outside quotes
    bool q = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') q = !q;
      if (line[i] == '#' && !q) {
        line.resize(i);
        break;
      }
    }
    line = trim(line);
    if (line.empty() || line[0] == '[') continue;  // table headers are ignored
    auto eq = line.find('=');
    if (eq == std::string::npos) throw CompressError("config line " + std::to_string(no) + ": expected key = value");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

BenchConfig load_bench_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  BenchConfig c;
  auto num = [](const std::string& k, const std::string& v) {
    try {
      std::size_t used = 0;
      double d = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      return d;
    } catch (const std::exception&) {
      throw CompressError("config: " + k + " is not a number: " + v);
    }
  };
  for (auto& [k, v] : parse_key_values(ss.str())) {
    if (k == "ratio") c.ratio = num(k, v);
    else if (k == "levels") c.levels = int(num(k, v));
    else if (k == "tensor_levels") c.tensor_levels = int(num(k, v));
    else if (k == "eps") c.eps = num(k, v);
    else if (k == "frame_eps") c.frame_eps = num(k, v);
    else if (k == "p_smooth") c.p_smooth = int(num(k, v));
    else if (k == "cut_level") c.cut_level = int(num(k, v));
    else if (k == "methods") c.methods = split_list(v);
    else if (k == "images") c.images = split_list(v);
    else if (k == "taps") c.taps = unquote(v);
    else if (k == "out_dir") c.out_dir = unquote(v);
    else if (k == "timing") c.timing = unquote(v) == "true";
    else throw CompressError("config: unknown key '" + k + "'");
  }
  // relative paths resolve against the config file
  auto base = std::filesystem::path(path).parent_path();
  auto fix = [&](std::string& s) {
    if (!s.empty() && std::filesystem::path(s).is_relative()) s = (base / s).lexically_normal().string();
  };
  for (auto& im : c.images) fix(im);
  fix(c.taps);
  fix(c.out_dir);
  return c;
}

CompressionResult compress_image(const ImageGrid& x, const std::string& image_id, const std::string& method,
                                 const BenchConfig& cfg, ImageGrid* rec) {
  if (std::find(known_methods().begin(), known_methods().end(), method) == known_methods().end())
    throw CompressError("unknown method '" + method + "'");
  if (!(cfg.ratio >= 1)) throw CompressError("ratio must be >= 1");
  auto t0 = std::chrono::steady_clock::now();
  CompressionResult r;
  r.image = image_id;
  r.method = method;
  r.ratio = cfg.ratio;
  r.kept = std::size_t(std::floor(double(x.v.size()) / cfg.ratio));
  ImageGrid y;
  if (method == "tensor") {
    static std::mutex mu;
    static std::map<std::string, SeparableFilterPair> pairs;
    SeparableFilterPair fp;
    {
      std::lock_guard<std::mutex> lk(mu);
      auto it = pairs.find(cfg.taps);
      if (it == pairs.end()) it = pairs.emplace(cfg.taps, cfg.taps.empty() ? daubechies_pair(6) : load_filter_pair(cfg.taps, 6)).first;
      fp = it->second;
    }
    auto p = separable_analyze(x, fp, cfg.tensor_levels);
    y = separable_synthesize(topn_threshold(p, r.kept), fp);
  } else {
    bool frame = method.starts_with("hex-frame");
    BankKind kind = frame ? BankKind::Frame : (method == "hex-basis-ob1" ? BankKind::BasisOb1 : BankKind::BasisOb2);
    auto fb = cached_bank(kind, frame ? cfg.frame_eps : cfg.eps, cfg.p_smooth);
    auto p = analyze(x, fb, cfg.levels);
    if (method.ends_with("-cut")) p = apply_cut(p, cached_plan(fb, cfg.eps, cfg.cut_level));
    y = synthesize(topn_threshold(p, r.kept));
  }
  r.psnr_db = psnr(x, y);
  if (cfg.timing)
    r.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  if (rec) *rec = std::move(y);
  return r;
}

std::vector<CompressionResult> run_benchmark(const BenchConfig& cfg) {
  if (cfg.images.empty()) throw CompressError("no images given");
  for (auto& m : cfg.methods)
    if (std::find(known_methods().begin(), known_methods().end(), m) == known_methods().end())
      throw CompressError("unknown method '" + m + "'");
  std::vector<ImageGrid> imgs;
  for (auto& path : cfg.images) {
    if (!std::filesystem::exists(path)) throw std::runtime_error("missing image file: " + path);
    imgs.push_back(read_image(path));
  }
  if (!cfg.out_dir.empty()) std::filesystem::create_directories(cfg.out_dir);
  const std::size_t nm = cfg.methods.size();
  std::vector<CompressionResult> rows(imgs.size() * nm);
  std::vector<std::string> errors(rows.size());
  parallel_for(rows.size(), [&](std::size_t c) {
    std::size_t i = c / nm, m = c % nm;
    std::string id = std::filesystem::path(cfg.images[i]).stem().string();
    try {
      ImageGrid rec;
      rows[c] = compress_image(imgs[i], id, cfg.methods[m], cfg, cfg.out_dir.empty() ? nullptr : &rec);
      if (!cfg.out_dir.empty()) write_pgm((std::filesystem::path(cfg.out_dir) / (id + "_" + cfg.methods[m] + ".pgm")).string(), rec);
    } catch (const std::exception& e) {
      errors[c] = e.what();
    }
  });
  for (auto& e : errors)
    if (!e.empty()) throw CompressError(e);
  return rows;
}

std::string to_csv(const std::vector<CompressionResult>& rows) {
  std::ostringstream os;
  os << "image,method,ratio,kept,psnr_db,runtime_ms\n";
  char buf[256];
  for (auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%s,%g,%zu,%.4f,%.1f\n", r.image.c_str(), r.method.c_str(), r.ratio, r.kept,
                  r.psnr_db, r.runtime_ms);
    os << buf;
  }
  return os.str();
}

}  // namespace hexwave
