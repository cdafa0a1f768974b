#include "hexwave/filters.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace hexwave {

namespace {

const double kPi = M_PI;
const double kS3 = std::sqrt(3.0);

double binom(int n, int k) {
  double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// exact shift of a grid frequency by a rational vector; the grid must resolve it
GridPt shift(const GridPt& p, const RPt& g) {
  Q a = g[0] * Q(p.n1), b = g[1] * Q(p.n2);
  if (a.denominator() != 1 || b.denominator() != 1)
    throw LatticeError(LatticeError::GridMisaligned, "grid does not resolve the shift");
  return {p.u + a.numerator(), p.v + b.numerator(), p.n1, p.n2};
}

double profile_sin(double t, int p) { return std::sin(ramp(t, p) * kPi / 2); }
double profile_cos(double t, int p) { return std::cos(ramp(t, p) * kPi / 2); }

class ShannonEval : public PointEvaluator {
 public:
  explicit ShannonEval(FrequencyPartition part) : part_(std::move(part)) {}
  int bands() const override { return part_.size(); }
  void moduli(const GridPt& p, double* out) const override {
    std::fill(out, out + part_.size(), 0.0);
    int l = part_.label(p);
    if (l >= 0) out[l] = 1.0;
  }

 private:
  FrequencyPartition part_;
};

// ---- smoothing across regular boundaries, optionally with the A_0 refinement ----

struct OmegaRect {
  Vec2 P, u, n;  // start, unit direction, unit normal towards band kp
  double len;
  int kp, km;
  RPt gamma;  // Omega + gamma is the partner strip
};

struct GHit {
  int edge = -1;
  double sigma = 0;  // signed distance to the A_0 edge over pi (positive outside)
  bool outer = false;
};

class BasisEval : public PointEvaluator {
 public:
  BasisEval(FrequencyPartition part, double eps, int ps, bool refine)
      : part_(std::move(part)), eps_(eps), ps_(ps), refine_(refine) {
    build();
  }
  int bands() const override { return part_.size(); }

  void moduli(const GridPt& p, double* out) const override {
    const int K = part_.size();
    std::fill(out, out + K, 0.0);
    GridPt f = part_.cell.fold(p);
    if (refine_) {
      GHit g = gzone(f);
      if (g.edge >= 0) {
        double t = 0.5 - g.sigma * kPi / (2 * eps_);
        out[0] = profile_sin(t, ps_);
        out[gband(f, g)] = profile_cos(t, ps_);
        return;
      }
    }
    for (auto& r : rects_) {
      double d;
      if (in_omega(r, f, d)) {
        double t = 0.5 + d / (2 * eps_);
        out[r.kp] = profile_sin(t, ps_);
        out[r.km] = profile_cos(t, ps_);
        return;
      }
      GridPt b = part_.cell.fold(shift(f, RPt{-r.gamma[0], -r.gamma[1]}));
      if (in_omega(r, b, d)) {
        double t = 0.5 + d / (2 * eps_);
        out[r.kp] = profile_cos(t, ps_);
        out[r.km] = profile_sin(t, ps_);
        return;
      }
    }
    int l = part_.label_folded(f);
    if (l >= 0) out[l] = 1.0;
  }

  const std::vector<OmegaRect>& rects() const { return rects_; }

 private:
  FrequencyPartition part_;
  double eps_;
  int ps_;
  bool refine_;
  std::vector<OmegaRect> rects_;

  Vec2 xi(const GridPt& f) const { return part_.cell.to_xi(f.c()); }

  bool in_omega(const OmegaRect& r, const GridPt& f, double& d) const {
    Vec2 x = xi(f);
    double dx = x[0] - r.P[0], dy = x[1] - r.P[1];
    d = dx * r.n[0] + dy * r.n[1];
    double s = dx * r.u[0] + dy * r.u[1];
    if (std::abs(d) > eps_ || s < 0 || s > r.len) return false;
    int l = part_.label_folded(f);
    if (l != r.kp && l != r.km) return false;
    GridPt g = part_.cell.fold(shift(f, r.gamma));
    int l2 = part_.label_folded(g);
    if (l2 != r.kp && l2 != r.km) return false;
    if (refine_ && (gzone(f).edge >= 0 || gzone(g).edge >= 0)) return false;
    return true;
  }

  // trapezoids of width 2 eps along the six A_0 edges; exact except for the |s| <= eps test
  GHit gzone(const GridPt& f) const {
    i64 D = 2 * f.n1 * f.n2;
    i64 c1 = 2 * f.u * f.n2, c2 = 2 * f.v * f.n1;
    double lim_s = eps_ / kPi;
    for (int i = 0; i < 6; ++i) {
      i64 s = 2 * c1 - c2 - D / 2;
      i64 t = 3 * c2;
      double sig = double(s) / double(D);
      if (std::abs(sig) <= lim_s) {
        i64 lim = D / 2 - std::abs(s);
        // on the edge itself: follow the cell's tie rule, so the point is "outer" when
        // the normal is lexicographically positive (that cell edge is not kept)
        bool outer = s > 0 || (s == 0 && (i <= 1 || i == 5));
        bool vertex = s == 0 && std::abs(t) == lim;
        bool ok = outer ? (-lim <= t && t < lim) : (-lim < t && t <= lim);
        if (ok && !vertex) return {i, sig, outer};
      }
      i64 n1 = c2, n2 = -c1 + c2;  // rotate by -60 degrees
      c1 = n1, c2 = n2;
    }
    return {};
  }

  // the band paired with A_0 at a G-zone point: label just outside the A_0 edge
  int gband(const GridPt& f, const GHit& g) const {
    // w = R60^i (1, 0); 2c_i = w / 2
    i64 w1 = 1, w2 = 0;
    for (int i = 0; i < g.edge; ++i) {
      i64 a = w1 - w2, b = w1;
      w1 = a, w2 = b;
    }
    i64 m = 32 * std::max(f.n1, f.n2);
    GridPt q;
    if (g.outer)
      q = {2 * m * f.u + f.n1 * w1, 2 * m * f.v + f.n2 * w2, 2 * m * f.n1, 2 * m * f.n2};
    else
      q = {2 * m * f.u - (m + 1) * f.n1 * w1, 2 * m * f.v - (m + 1) * f.n2 * w2, 2 * m * f.n1, 2 * m * f.n2};
    int l = part_.label(q);
    if (l <= 0) throw std::logic_error("refinement zone without neighbouring band");
    return l;
  }

  void build() {
    auto bc = classify_boundaries(part_);
    auto trip = regular_triples(bc);
    if (trip.empty()) throw FilterError("no regular boundaries to smooth");
    const auto& cell = part_.cell;
    auto X = [&](const RPt& p) { return cell.to_xi({to_double(p[0]), to_double(p[1])}); };
    for (auto& t : trip) {
      auto segs = t.common.segments();
      std::vector<bool> used(segs.size(), false);
      for (std::size_t i = 0; i < segs.size(); ++i) {
        if (used[i]) continue;
        bool found = false;
        for (int s = 1; s >= -1 && !found; s -= 2)
          for (int l1 = -2; l1 <= 2 && !found; ++l1)
            for (int l2 = -2; l2 <= 2 && !found; ++l2) {
              RPt v{t.gamma[0] * Q(s) + Q(l1), t.gamma[1] * Q(s) + Q(l2)};
              RPt a = segs[i].p + v, b = segs[i].q + v;
              for (std::size_t j = 0; j < segs.size(); ++j) {
                if (j == i || used[j]) continue;
                bool same = (segs[j].p == a && segs[j].q == b) || (segs[j].p == b && segs[j].q == a);
                if (!same) continue;
                used[i] = used[j] = true;
                found = true;
                // Omega is the member with the lexicographically smaller centroid
                Vec2 ci = X(scale(segs[i].p + segs[i].q, Q(1, 2))), cj = X(scale(segs[j].p + segs[j].q, Q(1, 2)));
                bool pick_i = ci[0] < cj[0] - 1e-12 || (std::abs(ci[0] - cj[0]) <= 1e-12 && ci[1] < cj[1]);
                const Seg& om = pick_i ? segs[i] : segs[j];
                RPt g = pick_i ? v : RPt{-v[0], -v[1]};
                add_rect(om, g, t.k1, t.k2);
                break;
              }
            }
        if (!found) throw std::logic_error("regular segment without a partner under gamma");
      }
    }
  }

  void add_rect(const Seg& s, const RPt& g, int k1, int k2) {
    const auto& cell = part_.cell;
    Vec2 P = cell.to_xi({to_double(s.p[0]), to_double(s.p[1])});
    Vec2 Qp = cell.to_xi({to_double(s.q[0]), to_double(s.q[1])});
    double L = std::hypot(Qp[0] - P[0], Qp[1] - P[1]);
    Vec2 u{(Qp[0] - P[0]) / L, (Qp[1] - P[1]) / L};
    Vec2 n{-u[1], u[0]};
    Vec2 mid{(P[0] + Qp[0]) / 2, (P[1] + Qp[1]) / 2};
    int lp = part_.label_c(cell.to_c({mid[0] + 1e-6 * n[0], mid[1] + 1e-6 * n[1]}));
    int lm = part_.label_c(cell.to_c({mid[0] - 1e-6 * n[0], mid[1] - 1e-6 * n[1]}));
    if (std::set<int>{lp, lm} != std::set<int>{k1, k2}) throw std::logic_error("strip labels disagree with triple");
    rects_.push_back({P, u, n, L, lp, lm, g});
  }
};

// ---- frame ----

class FrameEval : public PointEvaluator {
 public:
  FrameEval(FrequencyPartition part, double eps, int ps) : part_(std::move(part)), eps_(eps), ps_(ps) {
    g0_ = std::max(kPi / 2 - eps, (2 + kS3) * eps);
  }
  int bands() const override { return 7; }

  double m0(const GridPt& f) const {
    // hexagonal gauge over pi is exact: max |2c1-c2|, |c1+c2|, |2c2-c1|
    Q c1(f.u, f.n1), c2(f.v, f.n2);
    Q a = Q(2) * c1 - c2, b = c1 + c2, c = Q(2) * c2 - c1;
    double g = kPi * std::max({std::abs(to_double(a)), std::abs(to_double(b)), std::abs(to_double(c))});
    if (g <= g0_) return 1.0;
    if (g >= kPi / 2) return 0.0;
    return profile_cos((g - g0_) / (kPi / 2 - g0_), ps_);
  }

  double n1(double x, double y) const {
    if (std::abs(y) <= eps_) return x < 0 ? profile_cos(y / (2 * eps_) + 0.5, ps_) : profile_cos(-y / (2 * eps_) + 0.5, ps_);
    double d6 = kS3 / 2 * (y - x / kS3);
    if (std::abs(d6) <= eps_) return x < 0 ? profile_cos(-d6 / (2 * eps_) + 0.5, ps_) : profile_cos(d6 / (2 * eps_) + 0.5, ps_);
    if (x <= 0 && (x + 2 * eps_) / kS3 <= y && y <= -eps_) return 1.0;
    if (x >= 0 && (x - 2 * eps_) / kS3 >= y && y >= eps_) return 1.0;
    return 0.0;
  }

  void moduli(const GridPt& p, double* out) const override {
    GridPt f = part_.cell.fold(p);
    double a = m0(f);
    out[0] = a;
    double r = std::sqrt(std::max(0.0, 1 - a * a));
    for (int k = 1; k <= 6; ++k) out[k] = 0;
    if (r == 0) return;
    Vec2 x = part_.cell.to_xi(f.c());
    const double c = 0.5, s = kS3 / 2;
    Vec2 rp{c * x[0] - s * x[1], s * x[0] + c * x[1]};  // rotate +60
    Vec2 rm{c * x[0] + s * x[1], -s * x[0] + c * x[1]};  // rotate -60
    out[1] = r * n1(x[0], x[1]);
    out[2] = r * n1(x[0], -x[1]);
    out[3] = r * n1(rp[0], rp[1]);
    out[4] = r * n1(rp[0], -rp[1]);
    out[5] = r * n1(rm[0], rm[1]);
    out[6] = r * n1(rm[0], -rm[1]);
  }

 private:
  FrequencyPartition part_;
  double eps_, g0_;
  int ps_;
};

IMat2 identity2() {
  IMat2 m;
  m.m[0][0] = m.m[1][1] = 1;
  return m;
}

}  // namespace

double ramp(double x, int p) {
  if (!(x > 0)) return 0.0;
  if (x >= 1) return 1.0;
  if (x == 0.5) return 0.5;
  if (x > 0.5) return 1.0 - ramp(1.0 - x, p);
  if (p <= 0) return x;
  // x^{p+1} sum_j C(p+j, j) C(2p+1, p-j) (-x)^j
  double s = 0, xp = 1;
  for (int j = 0; j <= p; ++j) {
    s += binom(p + j, j) * binom(2 * p + 1, p - j) * xp;
    xp *= -x;
  }
  return std::pow(x, p + 1) * s;
}

std::string kind_name(BankKind k) {
  switch (k) {
    case BankKind::Shannon: return "shannon";
    case BankKind::BasisOb1: return "basis-ob1";
    case BankKind::BasisOb2: return "basis-ob2";
    case BankKind::Frame: return "frame";
    case BankKind::Cut2Band: return "cut-2band";
  }
  return "?";
}

BankKind kind_from_name(const std::string& s) {
  for (auto k : {BankKind::Shannon, BankKind::BasisOb1, BankKind::BasisOb2, BankKind::Frame, BankKind::Cut2Band})
    if (kind_name(k) == s) return k;
  throw FilterError("unknown filter kind: " + s);
}

std::vector<std::vector<double>> PointEvaluator::sample(int n1, int n2) const {
  const int K = bands();
  std::vector<std::vector<double>> out(K, std::vector<double>(std::size_t(n1) * n2));
  parallel_for(std::size_t(n1), [&](std::size_t u) {
    std::vector<double> m(K);
    for (int v = 0; v < n2; ++v) {
      moduli(GridPt{i64(u), v, n1, n2}, m.data());
      for (int k = 0; k < K; ++k) out[k][u * n2 + v] = m[k];
    }
  });
  return out;
}

// ---- FilterBankSpec ----

FilterBankSpec::FilterBankSpec(const FilterBankSpec& o)
    : kind(o.kind), part(o.part), eps(o.eps), p_smooth(o.p_smooth), grid_n(o.grid_n), parent(o.parent), sub(o.sub),
      eta(o.eta), filters(o.filters), eval(o.eval), cut_band(o.cut_band), cut_stage(o.cut_stage), cut_gamma(o.cut_gamma) {}

FilterBankSpec& FilterBankSpec::operator=(const FilterBankSpec& o) {
  if (this == &o) return *this;
  kind = o.kind, part = o.part, eps = o.eps, p_smooth = o.p_smooth, grid_n = o.grid_n, parent = o.parent;
  sub = o.sub, eta = o.eta, filters = o.filters, eval = o.eval;
  cut_band = o.cut_band, cut_stage = o.cut_stage, cut_gamma = o.cut_gamma;
  std::lock_guard<std::mutex> lk(mu_);
  cache_.clear();
  rcache_.clear();
  return *this;
}

Vec2 hex_point(const IVec2& q) { return {double(q[0]), (double(q[0]) + 2.0 * double(q[1])) / kS3}; }

Vec2 FilterBankSpec::eta_xi(int k) const {
  if (part.family == Family::Dyadic) return {double(eta[k][0]), double(eta[k][1])};
  return hex_point(eta[k]);
}

const std::vector<std::vector<double>>& FilterBankSpec::moduli(int n1, int n2) const {
  {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = cache_.find({n1, n2});
    if (it != cache_.end()) return *it->second;
  }
  std::shared_ptr<std::vector<std::vector<double>>> g;
  if (eval) {
    g = std::make_shared<std::vector<std::vector<double>>>(eval->sample(n1, n2));
  } else {
    if (n1 != grid_n || n2 != grid_n) throw FilterError("stored filter grids cannot be resampled");
    g = std::make_shared<std::vector<std::vector<double>>>();
    for (auto& f : filters) g->push_back(f.modulus);
  }
  std::lock_guard<std::mutex> lk(mu_);
  auto& slot = cache_[{n1, n2}];
  if (!slot) slot = g;
  return *slot;
}

std::vector<cplx> FilterBankSpec::response(int k, int n1, int n2) const {
  const auto& m = moduli(n1, n2)[k];
  std::vector<cplx> out(m.size());
  const IVec2 q = eta[k];
  for (int u = 0; u < n1; ++u)
    for (int v = 0; v < n2; ++v) {
      // <xi, eta> = 2 pi c . q, reduced exactly before taking the angle
      i64 num = (i64(u) * q[0] * n2 + i64(v) * q[1] * n1) % (i64(n1) * n2);
      double ph = 2 * kPi * double(num) / (double(n1) * n2);
      out[std::size_t(u) * n2 + v] = std::polar(m[std::size_t(u) * n2 + v], ph);
    }
  return out;
}

const std::vector<std::vector<cplx>>& FilterBankSpec::responses(int n1, int n2) const {
  {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = rcache_.find({n1, n2});
    if (it != rcache_.end()) return *it->second;
  }
  auto g = std::make_shared<std::vector<std::vector<cplx>>>();
  for (int k = 0; k < size(); ++k) g->push_back(response(k, n1, n2));
  std::lock_guard<std::mutex> lk(mu_);
  auto& slot = rcache_[{n1, n2}];
  if (!slot) slot = g;
  return *slot;
}

void FilterBankSpec::resample(int n) {
  grid_n = n;
  auto g = moduli(n, n);
  filters.clear();
  for (int k = 0; k < size(); ++k) {
    TransferGrid t;
    t.k = k;
    t.n = n;
    t.modulus = g[k];
    t.eta = eta[k];
    t.eta_xi = eta_xi(k);
    filters.push_back(std::move(t));
  }
}

std::vector<IVec2> basis_eta() { return {{0, 0}, {-1, -1}, {1, 1}, {2, -1}, {-2, 1}, {-1, 2}, {1, -2}}; }
std::vector<IVec2> frame_eta() { return {{0, 0}, {2, -1}, {1, 1}, {-1, 2}, {-2, 1}, {-1, -1}, {1, -2}}; }

double max_basis_eps() { return kS3 * kPi / 12; }
double max_frame_eps() { return kPi / (2 * (2 + kS3)); }

FilterBankSpec shannon_filters(const FrequencyPartition& part, int grid_n) {
  FilterBankSpec fb;
  fb.kind = BankKind::Shannon;
  fb.part = part;
  fb.parent = identity2();
  fb.sub = part.sub;
  fb.eta.assign(part.size(), IVec2{0, 0});
  fb.eval = std::make_shared<ShannonEval>(part);
  fb.resample(grid_n);
  return fb;
}

namespace {
void require_hex2(const FilterBankSpec& fb) {
  if (fb.part.family != Family::Hexagonal || fb.part.p != 2)
    throw FilterError("smoothing is defined for the hexagonal p=2 partition");
}
}  // namespace

FilterBankSpec smooth_regular_boundaries(const FilterBankSpec& fb, double eps, int p_smooth) {
  if (fb.kind != BankKind::Shannon) throw FilterError("smooth_regular_boundaries expects a shannon bank");
  require_hex2(fb);
  if (!(eps > 0 && eps < max_basis_eps()))
    throw FilterError("eps out of range: need 0 < eps < " + std::to_string(max_basis_eps()));
  FilterBankSpec out = fb;
  out.kind = BankKind::BasisOb1;
  out.eps = eps;
  out.p_smooth = p_smooth;
  out.eta = basis_eta();
  out.eval = std::make_shared<BasisEval>(fb.part, eps, p_smooth, false);
  out.resample(fb.grid_n);
  return out;
}

FilterBankSpec smooth_refinement(const FilterBankSpec& fb, double eps, int p_smooth) {
  if (fb.kind != BankKind::BasisOb1) throw FilterError("smooth_refinement expects a basis-ob1 bank");
  require_hex2(fb);
  // the zones must stay clear of the cell boundary and of each other's strips
  if (!(eps > 0 && eps < max_basis_eps()))
    throw FilterError("eps out of range: need 0 < eps < " + std::to_string(max_basis_eps()));
  FilterBankSpec out = fb;
  out.kind = BankKind::BasisOb2;
  out.eps = eps;
  out.p_smooth = p_smooth;
  out.eval = std::make_shared<BasisEval>(fb.part, eps, p_smooth, true);
  out.resample(fb.grid_n);
  return out;
}

FilterBankSpec frame_filters(double eps, int p_smooth, int grid_n) {
  if (!(eps > 0 && eps < max_frame_eps()))
    throw FilterError("eps out of range: need 0 < eps < " + std::to_string(max_frame_eps()));
  FilterBankSpec fb;
  fb.kind = BankKind::Frame;
  fb.part = build_hexagonal_frame();
  fb.eps = eps;
  fb.p_smooth = p_smooth;
  fb.parent = identity2();
  fb.sub = fb.part.sub;
  fb.eta = frame_eta();
  fb.eval = std::make_shared<FrameEval>(fb.part, eps, p_smooth);
  fb.resample(grid_n);
  return fb;
}

FilterBankSpec make_bank(BankKind kind, double eps, int p_smooth, int grid_n) {
  switch (kind) {
    case BankKind::Shannon: return shannon_filters(build_hexagonal(2), grid_n);
    case BankKind::BasisOb1: return smooth_regular_boundaries(shannon_filters(build_hexagonal(2), grid_n), eps, p_smooth);
    case BankKind::BasisOb2:
      return smooth_refinement(smooth_regular_boundaries(shannon_filters(build_hexagonal(2), grid_n), eps, p_smooth), eps,
                               p_smooth);
    case BankKind::Frame: return frame_filters(eps, p_smooth, grid_n);
    default: throw FilterError("make_bank: use cutting_filters for 2-band banks");
  }
}

}  // namespace hexwave
