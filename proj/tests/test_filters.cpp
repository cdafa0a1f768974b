#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <algorithm>
#include <filesystem>
#include <set>

#include "hexwave/filters.hpp"
#include "hexwave/pr.hpp"

using namespace hexwave;

namespace {

// brute-force PR oracle: every band, every dual coset shift, every grid point
struct Resid {
  double identity = 0, shift = 0;
};

bool in_dual(const IMat2& a, const RPt& g) {
  Q x = Q(a.m[0][0]) * g[0] + Q(a.m[1][0]) * g[1];
  Q y = Q(a.m[0][1]) * g[0] + Q(a.m[1][1]) * g[1];
  return x.denominator() == 1 && y.denominator() == 1;
}

Resid brute_pr(const FilterBankSpec& fb, int n) {
  const int K = fb.size();
  std::vector<std::vector<std::complex<double>>> m;
  for (int k = 0; k < K; ++k) m.push_back(fb.response(k, n, n));
  std::set<std::pair<long, long>> shifts;
  for (int k = 0; k < K; ++k)
    for (auto& t : fb.part.dual_cosets(k)) {
      Q a = t[0] * Q(n), b = t[1] * Q(n);
      REQUIRE(a.denominator() == 1);
      REQUIRE(b.denominator() == 1);
      shifts.insert({wrap(long(a.numerator()), n), wrap(long(b.numerator()), n)});
    }
  Resid r;
  for (auto [su, sv] : shifts) {
    RPt g{Q(su, n), Q(sv, n)};
    std::vector<int> ks;
    for (int k = 0; k < K; ++k)
      if (in_dual(fb.sub[k], g)) ks.push_back(k);
    bool zero = su == 0 && sv == 0;
    for (int u = 0; u < n; ++u)
      for (int v = 0; v < n; ++v) {
        std::complex<double> s = 0;
        std::size_t i = std::size_t(u) * n + v, j = std::size_t((u + su) % n) * n + (v + sv) % n;
        for (int k : ks) s += m[k][i] * std::conj(m[k][j]);
        if (zero)
          r.identity = std::max(r.identity, std::abs(s - 1.0));
        else
          r.shift = std::max(r.shift, std::abs(s));
      }
  }
  return r;
}

}  // namespace

TEST_SUITE("filters") {
  TEST_CASE("ramp values and complement") {
    CHECK(ramp(-1, 0) == 0);
    CHECK(ramp(2, 0) == 1);
    for (int p = 0; p <= 3; ++p) CHECK(ramp(0.5, p) == 0.5);
    CHECK(ramp(0.25, 1) == doctest::Approx(5.0 / 32).epsilon(1e-15));
    CHECK(ramp(0.25, 2) == doctest::Approx(6 * std::pow(0.25, 5) - 15 * std::pow(0.25, 4) + 10 * std::pow(0.25, 3)));
    for (int p = 0; p <= 2; ++p)
      for (int i = 0; i <= 10000; ++i) {
        double x = -0.2 + 1.4 * i / 10000.0;
        CHECK(std::abs(ramp(x, p) + ramp(1 - x, p) - 1) <= 1e-14);
      }
  }

  TEST_CASE("pr of constructed banks on the 192 grid") {
    auto sh = shannon_filters(build_hexagonal(2));
    auto r = brute_pr(sh, 192);
    CHECK(r.identity <= 1e-12);
    CHECK(r.shift <= 1e-12);
    auto ob1 = smooth_regular_boundaries(sh, kDefaultBasisEps, 1);
    r = brute_pr(ob1, 192);
    CHECK(r.identity <= 1e-12);
    CHECK(r.shift <= 1e-12);
    auto ob2 = smooth_refinement(ob1, kDefaultBasisEps, 1);
    r = brute_pr(ob2, 192);
    CHECK(r.identity <= 1e-12);
    CHECK(r.shift <= 1e-12);
    auto fr = frame_filters(kDefaultFrameEps, 1);
    r = brute_pr(fr, 192);
    CHECK(r.identity <= 1e-12);
    CHECK(r.shift <= 1e-12);
  }
}

namespace {

FilterBankSpec bank_n(BankKind k, int n) { return make_bank(k, k == BankKind::Frame ? kDefaultFrameEps : kDefaultBasisEps, 1, n); }

// fraction of samples where M_k(-xi) != M_k(xi)
double asym_fraction(const FilterBankSpec& fb) {
  const int n = fb.grid_n;
  std::size_t bad = 0;
  for (auto& f : fb.filters)
    for (int u = 0; u < n; ++u)
      for (int v = 0; v < n; ++v)
        bad += std::abs(f.modulus[std::size_t(u) * n + v] - f.modulus[std::size_t(wrap(-u, n)) * n + wrap(-v, n)]) > 1e-12;
  return double(bad) / (double(fb.filters.size()) * n * n);
}

// grid points away from every shannon region boundary (checked on the doubled grid)
std::vector<char> off_boundary(int n) {
  auto part = build_hexagonal(2);
  std::vector<char> out(std::size_t(n) * n);
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v) {
      int l = part.label(GridPt{2 * u, 2 * v, 2 * n, 2 * n});
      bool ok = true;
      for (int a = -1; a <= 1; ++a)
        for (int b = -1; b <= 1; ++b) ok = ok && part.label(GridPt{wrap(2 * u + a, 2 * n), wrap(2 * v + b, 2 * n), 2 * n, 2 * n}) == l;
      out[std::size_t(u) * n + v] = ok;
    }
  return out;
}

// hexagonal gauge of S: 1 on the cell boundary
double gauge(const Vec2& xi) {
  double g = 0;
  for (int i = 0; i < 6; ++i) g = std::max(g, (std::cos(i * M_PI / 3) * xi[0] + std::sin(i * M_PI / 3) * xi[1]) / M_PI);
  return g;
}

}  // namespace

TEST_SUITE("filters") {
  TEST_CASE("normalisation at the origin and value range") {
    for (auto k : {BankKind::Shannon, BankKind::BasisOb1, BankKind::BasisOb2, BankKind::Frame}) {
      auto fb = bank_n(k, 96);
      CHECK(fb.filters[0].modulus[0] == doctest::Approx(1.0).epsilon(1e-15));
      for (auto& f : fb.filters)
        for (double m : f.modulus) {
          CHECK(m >= 0);
          CHECK(m <= 1 + 1e-15);
        }
    }
  }

  TEST_CASE("origin symmetry off the tie set") {
    // exact away from region boundaries for the indicator and frame banks
    auto off = off_boundary(192);
    const int n = 192;
    for (auto k : {BankKind::Shannon, BankKind::Frame}) {
      auto fb = bank_n(k, n);
      double worst = 0;
      for (auto& f : fb.filters)
        for (int u = 0; u < n; ++u)
          for (int v = 0; v < n; ++v) {
            std::size_t i = std::size_t(u) * n + v, j = std::size_t(wrap(-u, n)) * n + wrap(-v, n);
            if (off[i] && off[j]) worst = std::max(worst, std::abs(f.modulus[i] - f.modulus[j]));
          }
      CHECK(worst <= 1e-12);
    }
    // every bank: the asymmetric samples are boundary ties, so their share halves with each grid doubling
    for (auto k : {BankKind::Shannon, BankKind::BasisOb1, BankKind::BasisOb2, BankKind::Frame}) {
      double a = asym_fraction(bank_n(k, 96)), b = asym_fraction(bank_n(k, 192)), c = asym_fraction(bank_n(k, 384));
      CAPTURE(kind_name(k));
      CHECK(a < 0.02);
      CHECK(b <= 0.55 * a);
      CHECK(c <= 0.55 * b);
    }
  }

  TEST_CASE("2pi/3 rotation: M0 invariant, band pairs permuted") {
    const int n = 192;
    auto off = off_boundary(n);
    auto rot = [&](int u, int v) { return std::size_t(wrap(-v, n)) * n + wrap(u - v, n); };  // c -> R c
    for (auto k : {BankKind::Shannon, BankKind::BasisOb1, BankKind::BasisOb2, BankKind::Frame}) {
      auto fb = bank_n(k, n);
      CAPTURE(kind_name(k));
      std::size_t bad0 = 0, cnt = 0;
      for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v) {
          std::size_t i = std::size_t(u) * n + v, j = rot(u, v);
          if (!(off[i] && off[j])) continue;
          ++cnt;
          bad0 += std::abs(fb.filters[0].modulus[i] - fb.filters[0].modulus[j]) > 1e-12;
        }
      CHECK(bad0 == 0);
      // match each band to the band it rotates onto (majority over off-boundary points)
      std::vector<int> to(7, 0);
      for (int b = 1; b <= 6; ++b) {
        std::size_t best = 0;
        for (int c = 1; c <= 6; ++c) {
          std::size_t agree = 0;
          for (int u = 0; u < n; ++u)
            for (int v = 0; v < n; ++v) {
              std::size_t i = std::size_t(u) * n + v, j = rot(u, v);
              if (off[i] && off[j] && fb.filters[b].modulus[i] > 0.5)
                agree += std::abs(fb.filters[b].modulus[i] - fb.filters[c].modulus[j]) <= 1e-12;
            }
          if (agree > best) best = agree, to[b] = c;
        }
      }
      std::set<int> img(to.begin() + 1, to.end());
      CHECK(img.size() == 6);
      for (int b = 1; b <= 6; b += 2) CHECK((to[b] + 1) / 2 == (to[b + 1] + 1) / 2);  // pairs go to pairs
      CHECK(to[1] != 1);
    }
  }

  TEST_CASE("eps validation") {
    CHECK_THROWS_AS(make_bank(BankKind::BasisOb1, 0.0, 1), FilterError);
    CHECK_THROWS_AS(make_bank(BankKind::BasisOb1, -0.1, 1), FilterError);
    CHECK_THROWS_AS(make_bank(BankKind::BasisOb2, max_basis_eps() + 1e-3, 1), FilterError);
    CHECK_THROWS_AS(make_bank(BankKind::Frame, max_frame_eps() + 1e-3, 1), FilterError);
    CHECK_THROWS_AS(make_bank(BankKind::Frame, 0.0, 1), FilterError);
    CHECK(max_basis_eps() <= std::sqrt(3.0) * M_PI / 12 + 1e-12);
    CHECK(max_frame_eps() < M_PI / (4 + std::sqrt(3.0)));
    try {
      make_bank(BankKind::BasisOb1, 1.0, 1);
      FAIL("no throw");
    } catch (const FilterError& e) {
      CHECK(std::string(e.what()).find("eps") != std::string::npos);
    }
    CHECK_THROWS_AS(smooth_refinement(shannon_filters(build_hexagonal(2)), kDefaultBasisEps, 1), FilterError);
    CHECK_THROWS_AS(smooth_regular_boundaries(shannon_filters(build_hexagonal(1), 96), kDefaultBasisEps, 1), FilterError);
  }

  TEST_CASE("scaling filter shapes") {
    const int n = 192;
    auto sh = bank_n(BankKind::Shannon, n), ob1 = bank_n(BankKind::BasisOb1, n), ob2 = bank_n(BankKind::BasisOb2, n);
    auto part = build_hexagonal(2);
    std::size_t mid1 = 0, mid2 = 0;
    double closest = 1;
    for (int u = 0; u < n; ++u)
      for (int v = 0; v < n; ++v) {
        std::size_t i = std::size_t(u) * n + v;
        // shannon: M0 vanishes well outside S/2
        double gmin = 1e9;
        for (int a = -1; a <= 1; ++a)
          for (int b = -1; b <= 1; ++b) gmin = std::min(gmin, gauge(part.cell.to_xi({double(u) / n + a, double(v) / n + b})));
        if (gmin > 0.52) CHECK(sh.filters[0].modulus[i] == 0.0);
        mid1 += ob1.filters[0].modulus[i] > 0 && ob1.filters[0].modulus[i] < 1;
        double m0 = ob2.filters[0].modulus[i];
        if (m0 > 0 && m0 < 1) {
          ++mid2;
          closest = std::min(closest, std::abs(m0 - M_SQRT1_2));
        }
      }
    CHECK(mid1 == 0);  // regular-boundary smoothing leaves M0 an indicator
    CHECK(double(mid2) / (n * n) > 0.01);
    CHECK(closest < 0.02);
  }

  TEST_CASE("frame supports") {
    const int n = 192;
    const double eps = kDefaultFrameEps;
    auto fr = bank_n(BankKind::Frame, n);
    auto part = build_hexagonal(2);
    const double inner = (M_PI - 2 * eps) / (2 * M_PI);
    std::size_t tested = 0;
    for (int u = 0; u < n; ++u)
      for (int v = 0; v < n; ++v) {
        std::size_t i = std::size_t(u) * n + v;
        // smallest gauge over translates = gauge of the folded frequency
        double g = 1e9;
        for (int a = -1; a <= 1; ++a)
          for (int b = -1; b <= 1; ++b) g = std::min(g, gauge(part.cell.to_xi({double(u) / n + a, double(v) / n + b})));
        if (g < inner - 1e-9) {
          ++tested;
          CHECK(fr.filters[0].modulus[i] == 1.0);
          for (int k = 1; k <= 6; ++k) CHECK(fr.filters[k].modulus[i] == 0.0);
        }
        if (g > 0.5 + 1e-9) CHECK(fr.filters[0].modulus[i] == 0.0);
      }
    CHECK(tested > 1000);
    auto eta = frame_eta();
    Vec2 e1 = hex_point(eta[1]), e2 = hex_point(eta[2]);
    CHECK(std::abs(e1[0] - 2) <= 1e-15);
    CHECK(std::abs(e1[1]) <= 1e-15);
    CHECK(std::abs(e2[0] - 1) <= 1e-15);
    CHECK(std::abs(e2[1] - std::sqrt(3.0)) <= 1e-15);
    for (int k = 1; k < 7; ++k) CHECK(fr.sub[k] == fr.sub[1]);
  }

  TEST_CASE("basis eta vectors") {
    const double s3 = std::sqrt(3.0);
    Vec2 want[7] = {{0, 0}, {-1, -s3}, {1, s3}, {2, 0}, {-2, 0}, {-1, s3}, {1, -s3}};
    auto eta = basis_eta();
    for (int k = 0; k < 7; ++k) {
      Vec2 q = hex_point(eta[k]);
      CHECK(std::hypot(q[0] - want[k][0], q[1] - want[k][1]) <= 1e-15);
    }
  }

  TEST_CASE("cut banks: two-band identity and shift cancellation") {
    for (auto target : {BankKind::BasisOb2, BankKind::Frame}) {
      auto cut = cutting_filters(target, 1, kDefaultBasisEps, 192, 1);
      REQUIRE(cut.size() == 2);
      auto r = check_pr(cut);
      CHECK(r.worst() <= 1e-10);
      CHECK(r.verdict() == Verdict::Pass);
    }
  }

  TEST_CASE("container round trip") {
    auto fb = bank_n(BankKind::BasisOb2, 96);
    std::string path = "/tmp/hexwave_test_bank.hxfb";
    save_bank(fb, path);
    auto g = load_bank(path);
    CHECK(g.kind == fb.kind);
    CHECK(g.grid_n == 96);
    CHECK(g.eps == fb.eps);
    REQUIRE(g.size() == fb.size());
    for (int k = 0; k < fb.size(); ++k) {
      CHECK(g.filters[k].modulus == fb.filters[k].modulus);
      CHECK(g.eta[k] == fb.eta[k]);
      CHECK(g.sub[k] == fb.sub[k]);
    }
    auto r = brute_pr(g, 96);
    CHECK(r.identity <= 1e-12);
    CHECK(r.shift <= 1e-12);
    // truncated file
    {
      std::FILE* f = std::fopen(path.c_str(), "r+b");
      REQUIRE(f);
      std::fclose(f);
      std::filesystem::resize_file(path, 200);
    }
    CHECK_THROWS(load_bank(path));
    std::remove(path.c_str());
    CHECK_THROWS(load_bank("/tmp/hexwave_no_such_bank.hxfb"));
  }

  TEST_CASE("rendered basis functions") {
    const int n = 128;
    auto sh = render_basis_functions(bank_n(BankKind::Shannon, 192), 3, n);
    auto ob1 = render_basis_functions(bank_n(BankKind::BasisOb1, 192), 3, n);
    REQUIRE(sh.size() == 7);
    // phi peaks at the centre
    auto& phi = sh[0];
    CHECK(*std::max_element(phi.begin(), phi.end()) == phi[std::size_t(n / 2) * n + n / 2]);
    // smoothing moves wavelet energy towards the centre
    auto tail = [&](const std::vector<double>& p) {
      double in = 0, all = 0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          Vec2 x = hex_point({i - n / 2, j - n / 2});
          double e = p[std::size_t(i) * n + j] * p[std::size_t(i) * n + j];
          all += e;
          if (std::hypot(x[0], x[1]) > 24) in += e;
        }
      return in / all;
    };
    for (int k = 1; k <= 6; ++k) CHECK(tail(ob1[k]) < tail(sh[k]));
    auto ob2 = render_basis_functions(bank_n(BankKind::BasisOb2, 192), 3, n);
    CHECK(tail(ob2[0]) < tail(sh[0]));
    CHECK_THROWS_AS(render_basis_functions(bank_n(BankKind::Shannon, 96), 0, n), FilterError);
    CHECK_THROWS_AS(render_basis_functions(bank_n(BankKind::Shannon, 96), 3, 102), FilterError);
  }

  TEST_CASE("frame scaling filter is continuous") {
    // largest neighbour jump shrinks with the sample spacing once the grid resolves the transition
    for (int p = 1; p <= 2; ++p) {
      std::vector<double> jump;
      for (int n : {96, 192, 384}) {
        auto fr = frame_filters(kDefaultFrameEps, p, n);
        const auto& m = fr.filters[0].modulus;
        double w = 0;
        for (int u = 0; u < n; ++u)
          for (int v = 0; v < n; ++v) {
            w = std::max(w, std::abs(m[std::size_t(u) * n + v] - m[std::size_t(wrap(u + 1, n)) * n + v]));
            w = std::max(w, std::abs(m[std::size_t(u) * n + v] - m[std::size_t(u) * n + wrap(v + 1, n)]));
          }
        jump.push_back(w);
      }
      CAPTURE(p);
      CHECK(jump[1] < jump[0]);
      CHECK(jump[2] <= 0.6 * jump[1]);
    }
  }
}
