#include "hexwave/pr.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <sstream>

namespace hexwave {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

bool is_int(const Q& x) { return x.denominator() == 1; }

IMat2 transpose(const IMat2& a) {
  IMat2 t;
  t.m[0][0] = a.m[0][0], t.m[0][1] = a.m[1][0], t.m[1][0] = a.m[0][1], t.m[1][1] = a.m[1][1];
  return t;
}

// a^{-1} b, must be integral
IMat2 solve_int(const IMat2& a, const IMat2& b) {
  i64 d = a.det();
  IMat2 adj;
  adj.m[0][0] = a.m[1][1], adj.m[0][1] = -a.m[0][1], adj.m[1][0] = -a.m[1][0], adj.m[1][1] = a.m[0][0];
  IMat2 p = adj * b;
  for (auto& row : p.m)
    for (auto& x : row) {
      if (x % d != 0) throw LatticeError(LatticeError::NotSublattice, "not a sublattice");
      x /= d;
    }
  return p;
}

IMat2 common_sublattice(const FilterBankSpec& fb) {
  IMat2 g = fb.sub.at(0);
  for (std::size_t k = 1; k < fb.sub.size(); ++k) g = intersect_int(g, fb.sub[k]);
  return hnf(g);
}

bool in_dual(const IMat2& a, const RPt& g) {
  // g . (a e_j) integral for both columns
  return is_int(g[0] * Q(a.m[0][0]) + g[1] * Q(a.m[1][0])) && is_int(g[0] * Q(a.m[0][1]) + g[1] * Q(a.m[1][1]));
}

struct Shift {
  RPt g;
  long su = 0, sv = 0;
};

Shift grid_shift(const RPt& g, int n) {
  Q a = g[0] * Q(n), b = g[1] * Q(n);
  if (!is_int(a) || !is_int(b))
    throw LatticeError(LatticeError::GridMisaligned, "grid size does not resolve the dual cosets");
  return {g, wrap(long(a.numerator()), n), wrap(long(b.numerator()), n)};
}

std::vector<std::vector<cplx>> responses(const FilterBankSpec& fb, int n) {
  std::vector<std::vector<cplx>> r(fb.size());
  parallel_for(fb.size(), [&](std::size_t k) { r[k] = fb.response(int(k), n, n); });
  return r;
}

void require_sampled(const FilterBankSpec& fb) {
  if (fb.grid_n <= 0 || fb.size() == 0) throw FilterError("pr check: empty filter bank");
}

// max over the grid of |sum_{k in I} conj(m_k(xi+g)) m_k(xi) - [g == 0]|
double shift_residual(const std::vector<std::vector<cplx>>& m, const std::vector<int>& ks, const Shift& s, int n,
                      bool zero) {
  std::vector<double> rowmax(n, 0.0);
  parallel_for(n, [&](std::size_t u) {
    double mx = 0;
    for (int v = 0; v < n; ++v) {
      std::size_t i = u * n + v;
      std::size_t j = std::size_t((long(u) + s.su) % n) * n + std::size_t((v + s.sv) % n);
      cplx acc = 0;
      for (int k : ks) acc += std::conj(m[k][j]) * m[k][i];
      if (zero) acc -= 1.0;
      mx = std::max(mx, std::abs(acc));
    }
    rowmax[u] = mx;
  });
  return *std::max_element(rowmax.begin(), rowmax.end());
}

// identity summation plus every nonzero shift of Gamma*/parent*, grouped by `family`
template <class F>
void compact_conditions(const FilterBankSpec& fb, PRReport& rep, F family) {
  const int n = fb.grid_n;
  auto m = responses(fb, n);
  IMat2 g = common_sublattice(fb);
  for (auto& t : dual_quotient(g, fb.parent)) {
    Shift s = grid_shift(t, n);
    std::vector<int> ks;
    for (int k = 0; k < fb.size(); ++k)
      if (in_dual(fb.sub[k], t)) ks.push_back(k);
    bool zero = s.su == 0 && s.sv == 0;
    double r = shift_residual(m, ks, s, n, zero);
    if (zero) {
      rep.max_identity_residual = std::max(rep.max_identity_residual, r);
    } else {
      auto name = family(t);
      auto it = rep.shift_residual.find(name);
      rep.shift_residual[name] = it == rep.shift_residual.end() ? r : std::max(it->second, r);
    }
  }
  rep.probes = std::size_t(n) * n;
}

}  // namespace

Verdict classify_residual(double r) {
  if (!(r <= 1e-6)) return Verdict::Fail;
  return r <= 1e-10 ? Verdict::Pass : Verdict::Warn;
}

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Warn: return "warn";
    default: return "fail";
  }
}

double PRReport::worst() const {
  double w = max_identity_residual;
  w = std::max(w, max_matrix_residual);
  for (auto& [k, v] : shift_residual) w = std::max(w, v);
  for (double v : mirror_residual) w = std::max(w, v);
  return w;
}

nlohmann::json to_json(const PRReport& r) {
  nlohmann::json j;
  j["bank"] = r.bank;
  j["check"] = r.check;
  j["grid_n"] = r.grid_n;
  j["max_identity_residual"] = r.max_identity_residual;
  if (r.max_matrix_residual >= 0) j["max_matrix_residual"] = r.max_matrix_residual;
  j["max_shift_residual"] = nlohmann::json::object();
  for (auto& [k, v] : r.shift_residual) j["max_shift_residual"][k] = v;
  if (!r.mirror_residual.empty()) j["mirror_residual"] = r.mirror_residual;
  j["critical_ratio"] = std::to_string(r.critical_ratio.numerator()) + "/" + std::to_string(r.critical_ratio.denominator());
  j["probes"] = r.probes;
  j["runtime_ms"] = r.runtime_ms;
  j["verdict"] = verdict_name(r.verdict());
  return j;
}

std::string to_table(const PRReport& r) {
  std::ostringstream os;
  char buf[160];
  auto line = [&](const std::string& name, double v) {
    std::snprintf(buf, sizeof buf, "  %-28s %12.3e  %s\n", name.c_str(), v, verdict_name(classify_residual(v)).c_str());
    os << buf;
  };
  os << "bank " << r.bank << " (" << r.check << ", grid " << r.grid_n << ", ratio " << r.critical_ratio.numerator()
     << "/" << r.critical_ratio.denominator() << ")\n";
  line("identity", r.max_identity_residual);
  for (auto& [k, v] : r.shift_residual) line("shift " + k, v);
  if (r.max_matrix_residual >= 0) line("matrix", r.max_matrix_residual);
  for (std::size_t k = 0; k < r.mirror_residual.size(); ++k) line("mirror band " + std::to_string(k), r.mirror_residual[k]);
  std::snprintf(buf, sizeof buf, "  %zu probes, %.1f ms -> %s\n", r.probes, r.runtime_ms, verdict_name(r.verdict()).c_str());
  os << buf;
  return os.str();
}

Q critical_ratio(const FilterBankSpec& fb) {
  Q s(0);
  i64 dp = std::abs(fb.parent.det());
  for (auto& a : fb.sub) s += Q(dp, std::abs(a.det()));
  return s;
}

std::vector<RPt> dual_quotient(const IMat2& child, const IMat2& parent) {
  // child* = child^{-T} Z^2, reps of child*/Z^2 then deduplicated modulo parent*
  i64 d = child.det();
  std::vector<RPt> out;
  std::set<std::pair<Q, Q>> seen;
  auto frac = [](const Q& x) {
    i64 fl = x.numerator() / x.denominator();
    if (x.numerator() < 0 && x.numerator() % x.denominator() != 0) --fl;
    return x - Q(fl);
  };
  for (auto& r : coset_reps_int(transpose(child))) {
    RPt t{Q(child.m[1][1] * r[0] - child.m[1][0] * r[1], d), Q(-child.m[0][1] * r[0] + child.m[0][0] * r[1], d)};
    // key: parent^T t mod Z^2
    Q k0 = frac(t[0] * Q(parent.m[0][0]) + t[1] * Q(parent.m[1][0]));
    Q k1 = frac(t[0] * Q(parent.m[0][1]) + t[1] * Q(parent.m[1][1]));
    if (seen.insert({k0, k1}).second) out.push_back(t);
  }
  return out;
}

PRReport matrix_pr_residual(const FilterBankSpec& fb, const std::vector<GridPt>& probes) {
  require_sampled(fb);
  auto t0 = Clock::now();
  const int n = fb.grid_n;
  PRReport rep;
  rep.bank = kind_name(fb.kind);
  rep.check = "matrix";
  rep.grid_n = n;
  rep.critical_ratio = critical_ratio(fb);
  for (auto& p : probes)
    if (p.n1 != n || p.n2 != n) throw LatticeError(LatticeError::GridMisaligned, "probe is not on the filter grid");

  IMat2 g = common_sublattice(fb);
  const double q = double(std::abs(g.det()) / std::abs(fb.parent.det()));
  std::vector<Shift> cols;
  for (auto& t : dual_quotient(g, fb.parent)) cols.push_back(grid_shift(t, n));

  struct Row {
    int k;
    IVec2 eta;
    double scale;
  };
  std::vector<Row> rows;
  for (int k = 0; k < fb.size(); ++k) {
    IMat2 b = solve_int(fb.sub[k], g);
    double dk = double(std::abs(fb.sub[k].det()) / std::abs(fb.parent.det()));
    for (auto& r : coset_reps_int(b)) rows.push_back({k, fb.sub[k].apply(r), std::sqrt(dk)});
  }
  auto m = responses(fb, n);
  const std::size_t R = rows.size(), C = cols.size();
  std::vector<double> res(probes.size(), 0.0);
  parallel_for(probes.size(), [&](std::size_t pi) {
    const GridPt& p = probes[pi];
    std::vector<cplx> E(R * C);
    for (std::size_t c = 0; c < C; ++c) {
      long uu = wrap(long(p.u) + cols[c].su, n), vv = wrap(long(p.v) + cols[c].sv, n);
      std::size_t idx = std::size_t(uu) * n + vv;
      for (std::size_t r = 0; r < R; ++r) {
        // <eta, xi + gamma> / 2pi = (xi + gamma) . eta in reciprocal coordinates, reduced mod 1
        long num = wrap(uu * long(rows[r].eta[0]) + vv * long(rows[r].eta[1]), n);
        double ph = 2 * M_PI * double(num) / n;
        E[r * C + c] = std::polar(1.0, ph) * rows[r].scale * m[rows[r].k][idx];
      }
    }
    double mx = 0;
    for (std::size_t a = 0; a < C; ++a)
      for (std::size_t b = 0; b < C; ++b) {
        cplx s = 0;
        for (std::size_t r = 0; r < R; ++r) s += std::conj(E[r * C + a]) * E[r * C + b];
        if (a == b) s -= q;
        mx = std::max(mx, std::abs(s));
      }
    res[pi] = mx;
  });
  rep.max_matrix_residual = res.empty() ? 0 : *std::max_element(res.begin(), res.end());
  rep.probes = probes.size();
  rep.runtime_ms = ms_since(t0);
  return rep;
}

PRReport matrix_pr_residual(const FilterBankSpec& fb, int n_probes, unsigned seed) {
  require_sampled(fb);
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> d(0, fb.grid_n - 1);
  std::vector<GridPt> probes;
  probes.push_back({0, 0, fb.grid_n, fb.grid_n});
  while (int(probes.size()) < n_probes) probes.push_back({d(rng), d(rng), fb.grid_n, fb.grid_n});
  return matrix_pr_residual(fb, probes);
}

std::vector<double> mirror_residual(const FilterBankSpec& fb) {
  require_sampled(fb);
  if (critical_ratio(fb) != Q(1)) throw FilterError("mirror condition needs a critically sampled bank");
  const int n = fb.grid_n;
  const auto& mod = fb.moduli(n, n);
  std::vector<double> out(fb.size(), 0.0);
  for (int k = 0; k < fb.size(); ++k) {
    double dk = double(std::abs(fb.sub[k].det()) / std::abs(fb.parent.det()));
    std::vector<Shift> sh;
    for (auto& t : dual_quotient(fb.sub[k], fb.parent)) sh.push_back(grid_shift(t, n));
    std::vector<double> rowmax(n, 0.0);
    parallel_for(n, [&](std::size_t u) {
      double mx = 0;
      for (int v = 0; v < n; ++v) {
        double s = 0;
        for (auto& t : sh) {
          double x = mod[k][std::size_t((long(u) + t.su) % n) * n + std::size_t((v + t.sv) % n)];
          s += dk * x * x;
        }
        mx = std::max(mx, std::abs(s - dk));
      }
      rowmax[u] = mx;
    });
    out[k] = *std::max_element(rowmax.begin(), rowmax.end());
  }
  return out;
}

PRReport hex_pr_residual(const FilterBankSpec& fb) {
  require_sampled(fb);
  if (fb.part.family != Family::Hexagonal || fb.part.p != 2 || fb.size() != 7 || fb.kind == BankKind::Frame)
    throw FilterError("hexagonal check needs a hexagonal p=2 basis bank");
  auto t0 = Clock::now();
  PRReport rep;
  rep.bank = kind_name(fb.kind);
  rep.check = "hexagonal";
  rep.grid_n = fb.grid_n;
  rep.critical_ratio = critical_ratio(fb);
  compact_conditions(fb, rep, [&](const RPt& t) -> std::string {
    if (in_dual(fb.sub[0], t)) return "G0";
    if (in_dual(fb.sub[1], t)) return "G12";
    if (in_dual(fb.sub[3], t)) return "G34";
    if (in_dual(fb.sub[5], t)) return "G56";
    return "other";
  });
  rep.runtime_ms = ms_since(t0);
  return rep;
}

PRReport frame_pr_residual(const FilterBankSpec& fb) {
  require_sampled(fb);
  if (fb.kind != BankKind::Frame) throw FilterError("frame check needs a frame bank");
  for (auto& s : fb.sub)
    if (!(s == fb.sub[0])) throw FilterError("frame check needs one common sublattice");
  auto t0 = Clock::now();
  PRReport rep;
  rep.bank = kind_name(fb.kind);
  rep.check = "frame";
  rep.grid_n = fb.grid_n;
  rep.critical_ratio = critical_ratio(fb);
  compact_conditions(fb, rep, [](const RPt&) { return std::string("frame"); });
  rep.runtime_ms = ms_since(t0);
  return rep;
}

PRReport check_pr(const FilterBankSpec& fb) {
  auto t0 = Clock::now();
  PRReport rep = matrix_pr_residual(fb);
  bool hex = fb.part.family == Family::Hexagonal && fb.part.p == 2 && fb.size() == 7;
  if (fb.kind == BankKind::Frame) {
    auto f = frame_pr_residual(fb);
    rep.max_identity_residual = f.max_identity_residual;
    rep.shift_residual = f.shift_residual;
    rep.check = "matrix+frame";
  } else if (hex && fb.kind != BankKind::Cut2Band) {
    auto h = hex_pr_residual(fb);
    rep.max_identity_residual = h.max_identity_residual;
    rep.shift_residual = h.shift_residual;
    rep.check = "matrix+hexagonal";
  }
  if (rep.critical_ratio == Q(1)) {
    rep.mirror_residual = mirror_residual(fb);
    rep.check += "+mirror";
  }
  rep.runtime_ms = ms_since(t0);
  return rep;
}

}  // namespace hexwave
