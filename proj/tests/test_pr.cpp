#include <doctest.h>

#include <cmath>

#include "hexwave/pr.hpp"

using namespace hexwave;

namespace {

FilterBankSpec detached(const FilterBankSpec& fb) {
  FilterBankSpec out = fb;
  out.eval = nullptr;
  return out;
}

double max_shift(const PRReport& r) {
  double m = 0;
  for (auto& [k, v] : r.shift_residual) m = std::max(m, v);
  return m;
}

}  // namespace

TEST_SUITE("pr") {
  TEST_CASE("ladder") {
    CHECK(classify_residual(0) == Verdict::Pass);
    CHECK(classify_residual(1e-10) == Verdict::Pass);
    CHECK(classify_residual(1e-8) == Verdict::Warn);
    CHECK(classify_residual(1e-3) == Verdict::Fail);
    CHECK(classify_residual(NAN) == Verdict::Fail);
  }

  TEST_CASE("critical ratios are exact") {
    for (int p = 1; p <= 3; ++p) CHECK(critical_ratio(shannon_filters(build_hexagonal(p), 96)) == Q(1));
    CHECK(critical_ratio(frame_filters(kDefaultFrameEps, 1, 48)) == Q(7, 4));
  }

  TEST_CASE("dual quotient sizes") {
    IMat2 id;
    id.m[0][0] = id.m[1][1] = 1;
    IMat2 two;
    two.m[0][0] = two.m[1][1] = 2;
    CHECK(dual_quotient(two, id).size() == 4);
    IMat2 four;
    four.m[0][0] = four.m[1][1] = 4;
    CHECK(dual_quotient(four, two).size() == 4);
    CHECK(dual_quotient(two, two).size() == 1);
  }

  TEST_CASE("matrix condition on shannon and smoothed banks") {
    for (int p = 1; p <= 3; ++p) {
      auto r = matrix_pr_residual(shannon_filters(build_hexagonal(p), 96), 100);
      CHECK(r.max_matrix_residual <= 1e-12);
    }
    auto sh = shannon_filters(build_hexagonal(2));
    auto r = matrix_pr_residual(sh, 500);
    CHECK(r.probes == 500);
    CHECK(r.max_matrix_residual <= 1e-12);
    auto ob2 = make_bank(BankKind::BasisOb2, kDefaultBasisEps, 1);
    r = matrix_pr_residual(ob2, 500);
    CHECK(r.max_matrix_residual <= 1e-12);
    auto fr = frame_filters(kDefaultFrameEps, 1);
    r = matrix_pr_residual(fr, 200);
    CHECK(r.max_matrix_residual <= 1e-12);
    CHECK(r.critical_ratio == Q(7, 4));
  }

  TEST_CASE("scaled band breaks the matrix condition") {
    auto bad = detached(make_bank(BankKind::BasisOb1, kDefaultBasisEps, 1));
    for (auto& x : bad.filters[1].modulus) x *= 0.9;
    auto r = matrix_pr_residual(bad, 500);
    CHECK(r.max_matrix_residual >= 0.1);
    CHECK(r.verdict() == Verdict::Fail);
  }

  TEST_CASE("probe off the filter grid is rejected") {
    auto sh = shannon_filters(build_hexagonal(2));
    CHECK_THROWS_AS(matrix_pr_residual(sh, std::vector<GridPt>{{1, 1, 100, 100}}), LatticeError);
  }

  TEST_CASE("mirror condition") {
    auto sh = shannon_filters(build_hexagonal(2));
    auto m = mirror_residual(sh);
    REQUIRE(m.size() == 7);
    for (double v : m) CHECK(v == 0.0);
    for (double v : mirror_residual(make_bank(BankKind::BasisOb1, kDefaultBasisEps, 1))) CHECK(v <= 1e-12);
    CHECK_THROWS_AS(mirror_residual(frame_filters(kDefaultFrameEps, 1)), FilterError);
  }

  TEST_CASE("hexagonal families") {
    for (auto kind : {BankKind::Shannon, BankKind::BasisOb1, BankKind::BasisOb2}) {
      auto fb = make_bank(kind, kDefaultBasisEps, 1);
      auto h = hex_pr_residual(fb);
      CHECK(h.max_identity_residual <= 1e-12);
      CHECK(h.shift_residual.size() == 4);
      for (auto& [name, v] : h.shift_residual) CHECK(v <= 1e-12);
      // both formulations agree
      auto m = matrix_pr_residual(fb, 300);
      CHECK((m.max_matrix_residual <= 1e-10) == (h.worst() <= 1e-10));
    }
    auto bad = make_bank(BankKind::BasisOb1, kDefaultBasisEps, 1);
    bad.eta[1] = {0, 0};
    bad.eta[2] = {0, 0};
    auto h = hex_pr_residual(bad);
    CHECK(h.shift_residual["G12"] > 0.5);
    CHECK(h.max_identity_residual <= 1e-12);
    CHECK(matrix_pr_residual(bad, 500).max_matrix_residual > 1e-6);
    CHECK_THROWS_AS(hex_pr_residual(frame_filters(kDefaultFrameEps, 1)), FilterError);
  }

  TEST_CASE("frame conditions") {
    auto fr = frame_filters(0.4, 0, 192);
    auto r = frame_pr_residual(fr);
    CHECK(r.max_identity_residual <= 1e-12);
    CHECK(r.shift_residual.at("frame") <= 1e-12);
    auto fr1 = frame_filters(kDefaultFrameEps, 1);
    CHECK(frame_pr_residual(fr1).worst() <= 1e-12);

    // flat directional part instead of the ramp
    auto bad = detached(fr);
    const int n = bad.grid_n;
    const auto& m0 = bad.filters[0].modulus;
    for (int k = 1; k <= 6; ++k)
      for (std::size_t i = 0; i < std::size_t(n) * n; ++i) {
        double rr = std::sqrt(std::max(0.0, 1 - m0[i] * m0[i]));
        bad.filters[k].modulus[i] = bad.filters[k].modulus[i] > 0 ? rr / std::sqrt(2.0) : 0.0;
      }
    CHECK(frame_pr_residual(bad).max_identity_residual > 0.2);
    CHECK_THROWS_AS(frame_pr_residual(make_bank(BankKind::BasisOb1, kDefaultBasisEps, 1)), FilterError);
  }

  TEST_CASE("residuals are rotation invariant") {
    // rotating a bank by 2pi/3 permutes its bands; residuals must not move
    auto fb = detached(make_bank(BankKind::BasisOb2, kDefaultBasisEps, 1));
    auto base = hex_pr_residual(fb);
    const int n = fb.grid_n;
    auto rot = fb;
    // c -> R c with R = R(+60)^2 = [[0,-1],[1,-1]]
    for (int k = 0; k < 7; ++k)
      for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v) {
          long ru = wrap(long(-v), n), rv = wrap(long(u - v), n);
          rot.filters[k].modulus[std::size_t(ru) * n + rv] = fb.filters[k].modulus[std::size_t(u) * n + v];
        }
    auto r = hex_pr_residual(rot);
    // the eta choice is not rotated, so only the identity family is comparable exactly
    CHECK(std::abs(r.max_identity_residual - base.max_identity_residual) <= 1e-15);
  }

  TEST_CASE("check_pr dispatch and report output") {
    auto rep = check_pr(make_bank(BankKind::BasisOb2, kDefaultBasisEps, 1));
    CHECK(rep.verdict() == Verdict::Pass);
    CHECK(rep.mirror_residual.size() == 7);
    auto j = to_json(rep);
    CHECK(j["verdict"] == "pass");
    CHECK(j["critical_ratio"] == "1/1");
    CHECK(to_table(rep).find("identity") != std::string::npos);
    auto f = check_pr(frame_filters(kDefaultFrameEps, 1));
    CHECK(f.verdict() == Verdict::Pass);
    CHECK(f.mirror_residual.empty());
    CHECK(max_shift(f) <= 1e-12);
  }

  TEST_CASE("two-band cut banks are perfect reconstruction") {
    for (auto target : {BankKind::BasisOb2, BankKind::Frame})
      for (int band = 1; band <= 6; ++band) {
        auto cut = cutting_filters(target, 1, kDefaultBasisEps, 192, band);
        CAPTURE(band);
        CHECK(critical_ratio(cut) == Q(1));
        auto r = check_pr(cut);
        CHECK(r.max_matrix_residual <= 1e-12);
        for (double v : r.mirror_residual) CHECK(v <= 1e-12);
      }
    CHECK_THROWS_AS(cutting_filters(BankKind::BasisOb2, 2, kDefaultBasisEps, 192), FilterError);
  }
}
