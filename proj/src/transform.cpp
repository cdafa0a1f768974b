#include "hexwave/transform.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <set>

#include "hexwave/pr.hpp"

namespace hexwave {

namespace {

IMat2 diag2(i64 a) {
  IMat2 m;
  m.m[0][0] = m.m[1][1] = a;
  return m;
}

std::vector<cplx> to_complex(const ImageGrid& x) {
  std::vector<cplx> c(x.v.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = x.v[i];
  return c;
}

bool fits(int n1, int n2, const IMat2& h) {
  i64 a = h.m[0][0], b = h.m[1][0], d = h.m[1][1];
  if (n1 % a != 0 || n2 % d != 0) return false;
  return (b * (n1 / a)) % d == 0;
}

double band_scale(const FilterBankSpec& fb, int k) {
  return std::sqrt(double(std::abs(fb.sub[k].det()) / std::abs(fb.parent.det())));
}

// filter-then-subsample for every band of `fb` acting on a signal already in the frequency domain
std::vector<BandGrid> split(const std::vector<cplx>& X, int n1, int n2, const FilterBankSpec& fb) {
  const auto& R = fb.responses(n1, n2);
  std::vector<BandGrid> out(fb.size());
  parallel_for(fb.size(), [&](std::size_t k) {
    double s = band_scale(fb, int(k));
    std::vector<cplx> w(X.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = X[i] * std::conj(R[k][i]) * s;
    fft2(w, n1, n2, true);
    out[k] = restrict_to(w, n1, n2, hnf(fb.sub[k]));
  });
  return out;
}

// upsample-then-filter, summed over bands in a fixed order
std::vector<cplx> merge(const std::vector<const BandGrid*>& y, int n1, int n2, const FilterBankSpec& fb) {
  const auto& R = fb.responses(n1, n2);
  std::vector<std::vector<cplx>> part(fb.size());
  parallel_for(fb.size(), [&](std::size_t k) {
    auto u = embed(*y[k], n1, n2);
    fft2(u, n1, n2, false);
    double s = band_scale(fb, int(k));
    for (std::size_t i = 0; i < u.size(); ++i) u[i] *= R[k][i] * s;
    part[k] = std::move(u);
  });
  std::vector<cplx> acc(std::size_t(n1) * n2, 0.0);
  for (auto& p : part)
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += p[i];
  fft2(acc, n1, n2, true);
  return acc;
}

std::mutex verified_mu;
std::set<std::string> verified;

}  // namespace

double ImageGrid::energy() const {
  double s = 0;
  for (double x : v) s += x * x;
  return s;
}

double BandGrid::energy() const {
  double s = 0;
  for (auto x : data) s += std::norm(x);
  return s;
}

std::size_t SubbandPyramid::coefficient_count() const {
  std::size_t n = scaling.data.size();
  for (auto& b : bands) n += b.data.size();
  return n;
}

double SubbandPyramid::energy() const {
  double s = scaling.energy();
  for (auto& b : bands) s += b.energy();
  return s;
}

const BandGrid& SubbandPyramid::find(int level, int band, int child) const {
  for (auto& b : bands)
    if (b.level == level && b.band == band && b.child == child) return b;
  throw TransformError("no band (" + std::to_string(level) + "," + std::to_string(band) + ")");
}

void check_divisible(int n1, int n2, const IMat2& a) {
  if (n1 <= 0 || n2 <= 0 || !fits(n1, n2, hnf(a)))
    throw TransformError("image size " + std::to_string(n1) + "x" + std::to_string(n2) +
                         " is not a period of the band lattice");
}

BandGrid restrict_to(const std::vector<cplx>& x, int n1, int n2, const IMat2& a) {
  IMat2 h = hnf(a);
  check_divisible(n1, n2, h);
  const i64 ha = h.m[0][0], hb = h.m[1][0], hd = h.m[1][1];
  BandGrid b;
  b.lattice = h;
  b.rows = int(n1 / ha);
  b.cols = int(n2 / hd);
  b.data.resize(std::size_t(b.rows) * b.cols);
  for (int z1 = 0; z1 < b.rows; ++z1)
    for (int z2 = 0; z2 < b.cols; ++z2) {
      long i = long(ha * z1), j = wrap(long(hb * z1 + hd * z2), n2);
      b.data[std::size_t(z1) * b.cols + z2] = x[std::size_t(i) * n2 + j];
    }
  return b;
}

std::vector<cplx> embed(const BandGrid& b, int n1, int n2) {
  const IMat2& h = b.lattice;
  if (i64(b.rows) * h.m[0][0] != n1 || i64(b.cols) * h.m[1][1] != n2) throw TransformError("band shape does not match the grid");
  std::vector<cplx> x(std::size_t(n1) * n2, 0.0);
  for (int z1 = 0; z1 < b.rows; ++z1)
    for (int z2 = 0; z2 < b.cols; ++z2) {
      long i = long(h.m[0][0] * z1), j = wrap(long(h.m[1][0] * z1 + h.m[1][1] * z2), n2);
      x[std::size_t(i) * n2 + j] = b.data[std::size_t(z1) * b.cols + z2];
    }
  return x;
}

std::string bank_hash(const FilterBankSpec& fb) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](const void* p, std::size_t n) {
    auto c = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) h = (h ^ c[i]) * 1099511628211ull;
  };
  int kind = int(fb.kind);
  mix(&kind, sizeof kind);
  mix(&fb.grid_n, sizeof fb.grid_n);
  mix(&fb.parent, sizeof fb.parent);
  for (auto& s : fb.sub) mix(&s, sizeof s);
  for (auto& e : fb.eta) mix(e.data(), sizeof(i64) * 2);
  for (auto& f : fb.filters) mix(f.modulus.data(), f.modulus.size() * sizeof(double));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void require_verified(const FilterBankSpec& fb) {
  std::string key = bank_hash(fb);
  {
    std::lock_guard<std::mutex> lk(verified_mu);
    if (verified.count(key)) return;
  }
  auto rep = check_pr(fb);
  if (!(rep.worst() <= 1e-10))
    throw TransformError("filter bank failed the perfect reconstruction check (residual " + std::to_string(rep.worst()) + ")");
  std::lock_guard<std::mutex> lk(verified_mu);
  verified.insert(key);
}

LevelBands analyze_level(const std::vector<cplx>& x, int n1, int n2, const FilterBankSpec& fb, int level) {
  if (!(fb.parent == diag2(1))) throw TransformError("analysis needs a bank on the full lattice");
  if (x.size() != std::size_t(n1) * n2) throw TransformError("image buffer does not match its dimensions");
  for (auto& s : fb.sub) check_divisible(n1, n2, s);
  auto X = x;
  fft2(X, n1, n2, false);
  LevelBands lb;
  lb.bands = split(X, n1, n2, fb);
  for (int k = 0; k < fb.size(); ++k) {
    lb.bands[k].level = level;
    lb.bands[k].band = k;
  }
  return lb;
}

std::vector<cplx> synthesize_level(const LevelBands& y, const FilterBankSpec& fb, int n1, int n2) {
  if (int(y.bands.size()) != fb.size()) throw TransformError("band count does not match the filter bank");
  std::vector<const BandGrid*> ptr;
  for (int k = 0; k < fb.size(); ++k) {
    const auto& b = y.bands[k];
    if (!(b.lattice == hnf(fb.sub[k])) || b.data.size() != std::size_t(b.rows) * b.cols)
      throw TransformError("band " + std::to_string(k) + " does not match the filter bank");
    ptr.push_back(&b);
  }
  return merge(ptr, n1, n2, fb);
}

LevelBands analyze_one_level(const ImageGrid& x, const FilterBankSpec& fb, int level) {
  if (x.v.size() != std::size_t(x.n1) * x.n2) throw TransformError("image buffer does not match its dimensions");
  return analyze_level(to_complex(x), x.n1, x.n2, fb, level);
}

ImageGrid synthesize_one_level(const LevelBands& y, const FilterBankSpec& fb, int n1, int n2) {
  auto acc = synthesize_level(y, fb, n1, n2);
  ImageGrid g(n1, n2);
  for (std::size_t i = 0; i < acc.size(); ++i) g.v[i] = acc[i].real();
  return g;
}

SubbandPyramid analyze(const ImageGrid& x, std::shared_ptr<const FilterBankSpec> fb, int levels) {
  if (!fb) throw TransformError("no filter bank");
  if (levels < 1) throw TransformError("levels must be >= 1");
  if (!(hnf(fb->sub[0]) == diag2(2))) throw TransformError("scaling band must live on 2 x lattice");
  require_verified(*fb);
  SubbandPyramid p;
  p.fb = fb;
  p.levels = levels;
  p.n1 = x.n1;
  p.n2 = x.n2;
  // check every level up front so nothing is half done on failure
  for (int j = 0; j < levels; ++j) {
    int a = x.n1 >> j, b = x.n2 >> j;
    if ((a << j) != x.n1 || (b << j) != x.n2) throw TransformError("image size not divisible by 2^(levels-1)");
    for (auto& s : fb->sub) check_divisible(a, b, s);
  }
  auto cur = to_complex(x);
  for (int j = 1; j <= levels; ++j) {
    auto lb = analyze_level(cur, x.n1 >> (j - 1), x.n2 >> (j - 1), *fb, j);
    for (int k = 1; k < fb->size(); ++k) p.bands.push_back(std::move(lb.bands[k]));
    if (j == levels)
      p.scaling = std::move(lb.bands[0]);
    else
      cur = std::move(lb.bands[0].data);
  }
  return p;
}

ImageGrid synthesize(const SubbandPyramid& p) {
  auto c = synthesize_complex(p);
  ImageGrid out(p.n1, p.n2);
  for (std::size_t i = 0; i < c.size(); ++i) out.v[i] = c[i].real();
  return out;
}

std::vector<cplx> synthesize_complex(const SubbandPyramid& p) {
  if (!p.fb) throw TransformError("pyramid has no filter bank");
  if (p.cut) return synthesize_complex(undo_cut(p));
  const auto& fb = *p.fb;
  if (p.levels < 1 || p.scaling.level != p.levels || p.bands.size() != std::size_t(p.levels) * (fb.size() - 1))
    throw TransformError("corrupted pyramid metadata");
  std::vector<cplx> cur = p.scaling.data;
  for (int j = p.levels; j >= 1; --j) {
    const int n1 = p.n1 >> (j - 1), n2 = p.n2 >> (j - 1);
    LevelBands lb;
    BandGrid s;
    s.data = std::move(cur);
    s.rows = n1 / 2;
    s.cols = n2 / 2;
    s.lattice = diag2(2);
    if (s.data.size() != std::size_t(s.rows) * s.cols) throw TransformError("corrupted pyramid metadata");
    lb.bands.push_back(std::move(s));
    for (int k = 1; k < fb.size(); ++k) lb.bands.push_back(p.find(j, k));
    cur = synthesize_level(lb, fb, n1, n2);
  }
  return cur;
}

CutPlan make_cut_plan(const FilterBankSpec& fb, int stage, double eps, std::vector<int> bands, int level) {
  CutPlan plan;
  plan.level = level;
  plan.stage = stage;
  plan.eps = eps;
  std::sort(bands.begin(), bands.end());
  bands.erase(std::unique(bands.begin(), bands.end()), bands.end());
  plan.bands = bands;
  for (int b : bands) {
    auto cb = std::make_shared<FilterBankSpec>(cutting_filters(fb, b, stage, eps));
    require_verified(*cb);
    plan.banks.push_back(cb);
  }
  return plan;
}

SubbandPyramid apply_cut(const SubbandPyramid& p, std::shared_ptr<const CutPlan> plan) {
  if (!plan) throw TransformError("no cut plan");
  if (p.cut) throw TransformError("pyramid is already cut");
  if (plan->stage != 1) throw TransformError("cut stage unsupported: only stage 1 is implemented");
  if (plan->level < 1 || plan->level > p.levels) throw TransformError("cut level outside the pyramid");
  if (plan->banks.size() != plan->bands.size()) throw TransformError("cut plan has no filters");
  const int n1 = p.n1 >> (plan->level - 1), n2 = p.n2 >> (plan->level - 1);
  SubbandPyramid out = p;
  out.cut = plan;
  out.bands.clear();
  for (auto& b : p.bands) {
    auto it = std::find(plan->bands.begin(), plan->bands.end(), b.band);
    if (b.level != plan->level || it == plan->bands.end()) {
      out.bands.push_back(b);
      continue;
    }
    const auto& cb = *plan->banks[it - plan->bands.begin()];
    if (cb.cut_stage != plan->stage) throw TransformError("cut stage mismatch");
    if (!(hnf(cb.parent) == b.lattice)) throw TransformError("cut filters do not match the band lattice");
    auto X = embed(b, n1, n2);
    fft2(X, n1, n2, false);
    auto kids = split(X, n1, n2, cb);
    for (int c = 0; c < 2; ++c) {
      kids[c].level = b.level;
      kids[c].band = b.band;
      kids[c].child = c;
      out.bands.push_back(std::move(kids[c]));
    }
  }
  return out;
}

SubbandPyramid undo_cut(const SubbandPyramid& p) {
  if (!p.cut) return p;
  const auto& plan = *p.cut;
  const int n1 = p.n1 >> (plan.level - 1), n2 = p.n2 >> (plan.level - 1);
  SubbandPyramid out = p;
  out.cut = nullptr;
  out.bands.clear();
  for (std::size_t i = 0; i < p.bands.size(); ++i) {
    const auto& b = p.bands[i];
    if (b.child < 0) {
      out.bands.push_back(b);
      continue;
    }
    if (b.child != 0 || i + 1 >= p.bands.size() || p.bands[i + 1].child != 1 || p.bands[i + 1].band != b.band)
      throw TransformError("corrupted cut metadata");
    auto it = std::find(plan.bands.begin(), plan.bands.end(), b.band);
    if (it == plan.bands.end()) throw TransformError("corrupted cut metadata");
    const auto& cb = *plan.banks[it - plan.bands.begin()];
    auto x = merge({&b, &p.bands[i + 1]}, n1, n2, cb);
    BandGrid parent = restrict_to(x, n1, n2, cb.parent);
    parent.level = b.level;
    parent.band = b.band;
    out.bands.push_back(std::move(parent));
    ++i;
  }
  return out;
}

int required_multiple(const FilterBankSpec& fb, int levels, bool cut) {
  for (int t = 1; t <= 4096; ++t) {
    bool ok = true;
    for (int j = 0; j < levels && ok; ++j) {
      int n = t << j;
      for (auto& s : fb.sub) ok = ok && fits(n, n, hnf(s));
    }
    if (ok && cut) {
      // the cut filters need the shift grid (eighths) and the child lattices at level 1
      ok = (t << (levels - 1)) % 8 == 0;
      for (int k = 1; k < fb.size() && ok; ++k) {
        IMat2 h = hnf(fb.sub[k]);
        IMat2 child = h * diag2(2);
        ok = fits(t << (levels - 1), t << (levels - 1), child);
      }
    }
    if (ok) return t << (levels - 1);
  }
  throw TransformError("no admissible image size");
}

}  // namespace hexwave
