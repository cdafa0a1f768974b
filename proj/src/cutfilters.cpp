#include <algorithm>
#include <cmath>

#include "hexwave/filters.hpp"

namespace hexwave {

namespace {

const double kPi = M_PI;

IMat2 imat(i64 a, i64 b, i64 c, i64 d) {
  IMat2 m;
  m.m[0][0] = a, m.m[0][1] = b, m.m[1][0] = c, m.m[1][1] = d;
  return m;
}

// symmetries of the hexagonal partition carrying band 1 (stage-1 layout) onto band k
// c: reciprocal coordinates, L: lattice coordinates, R: cartesian
struct Sym {
  IMat2 c, L;
  double R[2][2];
};

Sym compose(const Sym& a, const Sym& b) {
  Sym s;
  s.c = a.c * b.c;
  s.L = a.L * b.L;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) s.R[i][j] = a.R[i][0] * b.R[0][j] + a.R[i][1] * b.R[1][j];
  return s;
}

Sym band_symmetry(int k) {
  const double h = std::sqrt(3.0) / 2;
  Sym id{imat(1, 0, 0, 1), imat(1, 0, 0, 1), {{1, 0}, {0, 1}}};
  Sym refl{imat(1, -1, 0, -1), imat(1, 0, -1, -1), {{1, 0}, {0, -1}}};
  Sym rp{imat(1, -1, 1, 0), imat(0, -1, 1, 1), {{0.5, -h}, {h, 0.5}}};
  Sym rm{imat(0, 1, -1, 1), imat(1, 1, -1, 0), {{0.5, h}, {-h, 0.5}}};
  switch (k) {
    case 1: return id;
    case 2: return refl;
    case 3: return rm;
    case 4: return compose(rm, refl);
    case 5: return rp;
    case 6: return compose(rp, refl);
  }
  throw FilterError("cut: band must be in 1..6");
}

RPt apply_q(const IMat2& m, const RPt& p) {
  return {Q(m.m[0][0]) * p[0] + Q(m.m[0][1]) * p[1], Q(m.m[1][0]) * p[0] + Q(m.m[1][1]) * p[1]};
}

Q dotq(const RPt& c, const IVec2& q) { return c[0] * Q(q[0]) + c[1] * Q(q[1]); }
bool is_int(const Q& x) { return x.denominator() == 1; }

// index-2 sublattice of `a` annihilated by gamma (pairing 2 pi c.q)
IMat2 child_lattice(const IMat2& a, const RPt& g) {
  IVec2 a1{a.m[0][0], a.m[1][0]}, a2{a.m[0][1], a.m[1][1]};
  Q x = dotq(g, a1), y = dotq(g, a2);
  if (!is_int(x * Q(2)) || !is_int(y * Q(2)) || (is_int(x) && is_int(y)))
    throw FilterError("cut: gamma does not define an index-2 sublattice");
  std::vector<IVec2> cols;
  if (is_int(x))
    cols = {a1, {2 * a2[0], 2 * a2[1]}};
  else if (is_int(y))
    cols = {{2 * a1[0], 2 * a1[1]}, a2};
  else
    cols = {{a1[0] + a2[0], a1[1] + a2[1]}, {2 * a2[0], 2 * a2[1]}};
  return hnf_cols(cols);
}

bool in_lattice(const IMat2& a, const IVec2& q) {
  i64 d = a.det();
  i64 x = a.m[1][1] * q[0] - a.m[0][1] * q[1];
  i64 y = -a.m[1][0] * q[0] + a.m[0][0] * q[1];
  return x % d == 0 && y % d == 0;
}

class CutEval : public FilterEvaluator {
 public:
  CutEval(std::shared_ptr<const FilterBankSpec> parent, int band, RPt gamma, Vec2 u, double eps)
      : parent_(std::move(parent)), band_(band), gamma_(gamma), u_(u), eps_(eps) {}
  int bands() const override { return 2; }

  std::vector<std::vector<double>> sample(int n1, int n2) const override {
    const std::size_t N = std::size_t(n1) * n2;
    const auto& cell = parent_->part.cell;
    auto idx_shift = [&](const RPt& t) {
      Q a = t[0] * Q(n1), b = t[1] * Q(n2);
      if (!is_int(a) || !is_int(b)) throw LatticeError(LatticeError::GridMisaligned, "grid does not resolve the cut lattices");
      return std::pair<long, long>{long(a.numerator()), long(b.numerator())};
    };
    auto at = [&](long u, long v) { return std::size_t(wrap(u, n1)) * n2 + std::size_t(wrap(v, n2)); };

    const auto& mk = parent_->moduli(n1, n2)[band_];
    // weight |m_k|^2 times an even signed side function of the cut direction
    std::vector<double> w(N);
    for (int u = 0; u < n1; ++u)
      for (int v = 0; v < n2; ++v) {
        GridPt f = cell.fold(GridPt{u, v, n1, n2});
        Vec2 x = cell.to_xi(f.c());
        double along = x[0] * u_[0] + x[1] * u_[1];
        double across = -x[0] * u_[1] + x[1] * u_[0];
        double sg = along > 0 ? 1.0 : (along < 0 ? -1.0 : 0.0);
        double m = mk[std::size_t(u) * n2 + v];
        w[std::size_t(u) * n2 + v] = m * m * across * sg;
      }
    std::vector<std::pair<long, long>> cos;
    for (auto& t : parent_->part.dual_cosets(band_)) cos.push_back(idx_shift(t));
    auto gs = idx_shift(gamma_);

    // score summed in index order so that members of one coset agree bit for bit
    std::vector<double> score(N);
    std::vector<std::size_t> ids(cos.size());
    for (int u = 0; u < n1; ++u)
      for (int v = 0; v < n2; ++v) {
        for (std::size_t i = 0; i < cos.size(); ++i) ids[i] = at(u + cos[i].first, v + cos[i].second);
        std::sort(ids.begin(), ids.end());
        double s = 0;
        for (auto i : ids) s += w[i];
        score[std::size_t(u) * n2 + v] = s;
      }
    std::vector<cplx> chi(N);
    for (int u = 0; u < n1; ++u)
      for (int v = 0; v < n2; ++v) {
        double d = score[std::size_t(u) * n2 + v] - score[at(u + gs.first, v + gs.second)];
        chi[std::size_t(u) * n2 + v] = d > 0 ? 1.0 : (d < 0 ? 0.0 : 0.5);
      }

    // bump mollifier on the torus
    std::vector<cplx> g(N);
    double tot = 0;
    for (int u = 0; u < n1; ++u)
      for (int v = 0; v < n2; ++v) {
        Vec2 x = cell.to_xi(cell.fold(GridPt{u, v, n1, n2}).c());
        double r = std::hypot(x[0], x[1]) / eps_;
        double val = r < 1 ? std::exp(-1.0 / (1.0 - r * r)) : 0.0;
        g[std::size_t(u) * n2 + v] = val;
        tot += val;
      }
    for (auto& x : g) x /= tot;
    fft2(chi, n1, n2, false);
    fft2(g, n1, n2, false);
    for (std::size_t i = 0; i < N; ++i) chi[i] *= g[i];
    fft2(chi, n1, n2, true);

    // average over the coset so the result is exactly periodic, then normalise against the partner
    std::vector<double> a(N);
    for (int u = 0; u < n1; ++u)
      for (int v = 0; v < n2; ++v) {
        for (std::size_t i = 0; i < cos.size(); ++i) ids[i] = at(u + cos[i].first, v + cos[i].second);
        std::sort(ids.begin(), ids.end());
        double s = 0;
        for (auto i : ids) s += std::max(0.0, chi[i].real());
        a[std::size_t(u) * n2 + v] = s / double(ids.size());
      }
    // even part, so the pair stays real in space despite the half-open boundary ties
    std::vector<double> ae(N);
    for (int u = 0; u < n1; ++u)
      for (int v = 0; v < n2; ++v) ae[std::size_t(u) * n2 + v] = 0.5 * (a[std::size_t(u) * n2 + v] + a[at(-u, -v)]);
    a.swap(ae);
    std::vector<std::vector<double>> out(2, std::vector<double>(N));
    for (int u = 0; u < n1; ++u)
      for (int v = 0; v < n2; ++v) {
        std::size_t i = std::size_t(u) * n2 + v, j = at(u + gs.first, v + gs.second);
        double x = a[i], y = a[j];
        double nrm = std::sqrt(x * x + y * y);
        out[0][i] = nrm > 0 ? x / nrm : std::sqrt(0.5);
        out[1][i] = nrm > 0 ? y / nrm : std::sqrt(0.5);
      }
    return out;
  }

 private:
  std::shared_ptr<const FilterBankSpec> parent_;
  int band_;
  RPt gamma_;
  Vec2 u_;
  double eps_;
};

}  // namespace

FilterBankSpec cutting_filters(const FilterBankSpec& parent_bank, int band, int stage, double eps) {
  if (stage != 1) throw FilterError("cut stage unsupported: only stage 1 is implemented");
  if (!(eps > 0)) throw FilterError("eps must be positive");
  bool frame = parent_bank.kind == BankKind::Frame;
  bool basis = parent_bank.kind == BankKind::BasisOb1 || parent_bank.kind == BankKind::BasisOb2 ||
               parent_bank.kind == BankKind::Shannon;
  if (!(frame || basis) || parent_bank.part.p != 2) throw FilterError("cut: unsupported parent bank");
  Sym s = band_symmetry(band);
  // stage-1 data for band 1, then carried over by symmetry
  RPt g1 = frame ? RPt{Q(1, 4), Q(1, 2)} : RPt{Q(1, 8), Q(1, 4)};
  IVec2 e1 = frame ? IVec2{2, 0} : IVec2{0, 2};
  Vec2 u1{std::cos(std::atan2(1.0, 2 * std::sqrt(3.0))), std::sin(std::atan2(1.0, 2 * std::sqrt(3.0)))};
  RPt g = apply_q(s.c, g1);
  IVec2 e = s.L.apply(e1);
  Vec2 u{s.R[0][0] * u1[0] + s.R[0][1] * u1[1], s.R[1][0] * u1[0] + s.R[1][1] * u1[1]};

  const IMat2& a = parent_bank.sub[band];
  IMat2 child = child_lattice(a, g);
  if (!in_lattice(a, e) || in_lattice(child, e) || is_int(dotq(g, e)))
    throw std::logic_error("cut: eta is not in the parent minus the child lattice");

  FilterBankSpec fb;
  fb.kind = BankKind::Cut2Band;
  fb.part = parent_bank.part;
  fb.eps = eps;
  fb.p_smooth = parent_bank.p_smooth;
  fb.parent = a;
  fb.sub = {child, child};
  fb.eta = {IVec2{0, 0}, e};
  fb.cut_band = band;
  fb.cut_stage = stage;
  fb.cut_gamma = g;
  fb.eval = std::make_shared<CutEval>(std::make_shared<FilterBankSpec>(parent_bank), band, g, u, eps);
  fb.resample(parent_bank.grid_n);
  return fb;
}

FilterBankSpec cutting_filters(BankKind target, int stage, double eps, int grid_n, int band) {
  FilterBankSpec parent = target == BankKind::Frame ? frame_filters(kDefaultFrameEps, 1, grid_n)
                                                    : make_bank(BankKind::BasisOb2, kDefaultBasisEps, 1, grid_n);
  return cutting_filters(parent, band, stage, eps);
}

}  // namespace hexwave
