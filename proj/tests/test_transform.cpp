#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>
#include <set>

#include "hexwave/transform.hpp"

using namespace hexwave;

namespace {

std::shared_ptr<const FilterBankSpec> bank(BankKind k) {
  static std::map<BankKind, std::shared_ptr<const FilterBankSpec>> cache;
  auto& s = cache[k];
  if (!s) s = std::make_shared<FilterBankSpec>(make_bank(k, k == BankKind::Frame ? kDefaultFrameEps : kDefaultBasisEps, 1));
  return s;
}

ImageGrid random_image(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> d(0, 255);
  ImageGrid g(n, n);
  for (auto& x : g.v) x = d(rng);
  return g;
}

double rel_err(const ImageGrid& a, const ImageGrid& b) {
  double e = 0, s = 0;
  for (std::size_t i = 0; i < a.v.size(); ++i) e += (a.v[i] - b.v[i]) * (a.v[i] - b.v[i]), s += a.v[i] * a.v[i];
  return std::sqrt(e / s);
}

const BankKind kAll[] = {BankKind::Shannon, BankKind::BasisOb1, BankKind::BasisOb2, BankKind::Frame};

}  // namespace

TEST_SUITE("transform") {
  TEST_CASE("restrict and embed are inverse on the sublattice") {
    IMat2 a;
    a.m[0][0] = 2, a.m[1][0] = 1, a.m[1][1] = 4;
    std::vector<cplx> x(16 * 16);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = double(i);
    auto b = restrict_to(x, 16, 16, a);
    CHECK(b.rows == 8);
    CHECK(b.cols == 4);
    auto y = embed(b, 16, 16);
    int nz = 0;
    for (std::size_t i = 0; i < y.size(); ++i)
      if (y[i] != 0.0) {
        ++nz;
        CHECK(y[i] == x[i]);
      }
    CHECK(nz == 32 - 1);  // the origin sample is 0 in x
    CHECK_THROWS_AS(restrict_to(std::vector<cplx>(15 * 16), 15, 16, a), TransformError);
  }

  TEST_CASE("one level: constant image and delta") {
    for (auto k : kAll) {
      auto fb = bank(k);
      ImageGrid one(32, 32, 1.0);
      auto lb = analyze_one_level(one, *fb);
      for (int b = 1; b < 7; ++b)
        for (auto v : lb.bands[b].data) CHECK(std::abs(v) <= 1e-10);
      cplx s0 = lb.bands[0].data[0];
      for (auto v : lb.bands[0].data) CHECK(std::abs(v - s0) <= 1e-12 * std::abs(s0));
      ImageGrid delta(32, 32);
      delta.at(0, 0) = 1;
      lb = analyze_one_level(delta, *fb);
      double e = 0;
      for (auto& b : lb.bands) e += b.energy();
      CHECK(std::abs(e - 1) <= 1e-10);
      auto back = synthesize_one_level(lb, *fb, 32, 32);
      CHECK(rel_err(delta, back) <= 1e-10);
    }
  }

  TEST_CASE("frame level shapes") {
    ImageGrid x(64, 64, 0.0);
    auto lb = analyze_one_level(x, *bank(BankKind::Frame));
    std::size_t tot = 0;
    for (auto& b : lb.bands) {
      CHECK(b.data.size() == 64 * 64 / 4);
      tot += b.data.size();
    }
    CHECK(tot * 4 == 7 * 64 * 64);
  }

  TEST_CASE("pyramid round trip, energy and counts") {
    for (auto k : kAll)
      for (int J = 1; J <= 3; ++J) {
        auto x = random_image(64, 7 + J);
        auto p = analyze(x, bank(k), J);
        CAPTURE(kind_name(k));
        CAPTURE(J);
        CHECK(rel_err(x, synthesize(p)) <= 1e-10);
        CHECK(std::abs(p.energy() - x.energy()) / x.energy() <= 1e-10);
        if (k == BankKind::Frame) {
          // 3/2 per level plus the coarse band
          double want = 0;
          for (int j = 0; j < J; ++j) want += 1.5 * std::pow(0.25, j);
          want += std::pow(0.25, J);
          CHECK(double(p.coefficient_count()) == want * 64 * 64);
        } else {
          CHECK(p.coefficient_count() == 64u * 64u);
        }
      }
    auto p = analyze(ImageGrid(256, 256), bank(BankKind::Frame), 3);
    CHECK(p.coefficient_count() * 64 == std::size_t(127) * 256 * 256);  // 1.984375 = 127/64
  }

  TEST_CASE("zeroing wavelet bands projects") {
    auto fb = bank(BankKind::BasisOb2);
    auto x = random_image(32, 3);
    auto p = analyze(x, fb, 1);
    for (auto& b : p.bands) std::fill(b.data.begin(), b.data.end(), 0.0);
    auto y = synthesize(p);
    auto q = analyze(y, fb, 1);
    for (std::size_t i = 0; i < p.scaling.data.size(); ++i) CHECK(std::abs(q.scaling.data[i] - p.scaling.data[i]) <= 1e-9);
    for (auto& b : q.bands)
      for (auto v : b.data) CHECK(std::abs(v) <= 1e-9);
    // zero pyramid
    for (auto& v : p.scaling.data) v = 0.0;
    for (double v : synthesize(p).v) CHECK(v == 0.0);
  }

  TEST_CASE("linearity and shift covariance") {
    auto fb = bank(BankKind::BasisOb1);
    auto x = random_image(32, 1), y = random_image(32, 2);
    ImageGrid z(32, 32);
    for (std::size_t i = 0; i < z.v.size(); ++i) z.v[i] = 2 * x.v[i] - 0.5 * y.v[i];
    auto px = analyze(x, fb, 2), py = analyze(y, fb, 2), pz = analyze(z, fb, 2);
    for (std::size_t b = 0; b < pz.bands.size(); ++b)
      for (std::size_t i = 0; i < pz.bands[b].data.size(); ++i)
        CHECK(std::abs(pz.bands[b].data[i] - (2.0 * px.bands[b].data[i] - 0.5 * py.bands[b].data[i])) <= 1e-9);

    // shift by the second generator of each level-1 band lattice: coefficients move by one column
    for (int k = 1; k < 7; ++k) {
      const auto& h = px.find(1, k).lattice;
      long d = long(h.m[1][1]);
      ImageGrid s(32, 32);
      for (int i = 0; i < 32; ++i)
        for (int j = 0; j < 32; ++j) s.at(i, j) = x.at(i, int(wrap(j - d, 32)));
      auto ps = analyze(s, fb, 1);
      auto px1 = analyze(x, fb, 1);
      const auto& a = px1.find(1, k);
      const auto& b = ps.find(1, k);
      double mx = 0;
      for (int r = 0; r < a.rows; ++r)
        for (int c = 0; c < a.cols; ++c)
          mx = std::max(mx, std::abs(b.data[r * b.cols + (c + 1) % b.cols] - a.data[r * a.cols + c]));
      CHECK(mx <= 1e-9);
    }
  }

  TEST_CASE("basis atoms are orthonormal") {
    auto fb = bank(BankKind::BasisOb2);
    auto tmpl = analyze(ImageGrid(32, 32), fb, 2);
    std::mt19937 rng(11);
    std::vector<std::vector<cplx>> atoms;
    std::set<std::size_t> picked;
    while (atoms.size() < 64) {
      auto p = tmpl;
      std::size_t which = rng() % p.coefficient_count();
      if (!picked.insert(which).second) continue;
      for (auto& b : p.bands) {
        if (which < b.data.size()) {
          b.data[which] = 1;
          which = std::size_t(-1);
          break;
        }
        which -= b.data.size();
      }
      if (which != std::size_t(-1)) p.scaling.data[which] = 1;
      atoms.push_back(synthesize_complex(p));
    }
    double worst = 0;
    for (std::size_t i = 0; i < atoms.size(); ++i)
      for (std::size_t j = 0; j < atoms.size(); ++j) {
        cplx g = 0;
        for (std::size_t q = 0; q < atoms[i].size(); ++q) g += std::conj(atoms[i][q]) * atoms[j][q];
        worst = std::max(worst, std::abs(g - (i == j ? 1.0 : 0.0)));
      }
    CHECK(worst <= 1e-8);
  }

  TEST_CASE("cuts keep counts, energy and reconstruction") {
    for (auto k : {BankKind::BasisOb2, BankKind::Frame}) {
      auto fb = bank(k);
      auto plan = std::make_shared<CutPlan>(make_cut_plan(*fb, 1, kDefaultBasisEps));
      auto x = random_image(64, 5);
      auto p = analyze(x, fb, 3);
      auto c = apply_cut(p, plan);
      CHECK(c.coefficient_count() == p.coefficient_count());
      CHECK(c.bands.size() == p.bands.size() + 6);
      for (int b = 1; b <= 6; ++b) {
        double parent = p.find(1, b).energy();
        double kids = c.find(1, b, 0).energy() + c.find(1, b, 1).energy();
        CHECK(std::abs(parent - kids) <= 1e-10 * std::max(1.0, parent));
      }
      CHECK(rel_err(x, synthesize(c)) <= 1e-10);
      CHECK_THROWS_AS(apply_cut(c, plan), TransformError);
    }
    CHECK(required_multiple(*bank(BankKind::BasisOb2), 3, true) % 8 == 0);
  }

  TEST_CASE("dimension errors") {
    CHECK_THROWS_AS(analyze(ImageGrid(30, 32), bank(BankKind::BasisOb1), 1), TransformError);
    CHECK_THROWS_AS(analyze(ImageGrid(32, 32), bank(BankKind::BasisOb1), 0), TransformError);
    auto bad = std::make_shared<FilterBankSpec>(*bank(BankKind::BasisOb1));
    bad->eval = nullptr;
    for (auto& v : bad->filters[2].modulus) v *= 0.5;
    CHECK_THROWS_AS(analyze(ImageGrid(192, 192), bad, 1), TransformError);
  }

  TEST_CASE("pyramid container round trip") {
    auto fb = bank(BankKind::BasisOb1);
    auto x = random_image(32, 9);
    auto p = analyze(x, fb, 2);
    auto plan = std::make_shared<CutPlan>(make_cut_plan(*fb, 1, kDefaultBasisEps));
    p = apply_cut(p, plan);
    std::string path = "/tmp/hexwave_test_pyr.bin";
    save_pyramid(p, path);
    auto q = load_pyramid(path);
    REQUIRE(q.bands.size() == p.bands.size());
    for (std::size_t i = 0; i < p.bands.size(); ++i) CHECK(q.bands[i].data == p.bands[i].data);
    CHECK(q.cut != nullptr);
    CHECK(rel_err(x, synthesize(q)) <= 1e-10);
    std::remove(path.c_str());
  }

  TEST_CASE("pgm io") {
    ImageGrid g(3, 5);
    for (std::size_t i = 0; i < g.v.size(); ++i) g.v[i] = double(i * 17 % 256);
    g.v[0] = -4;
    g.v[1] = 300.4;
    write_pgm("/tmp/hexwave_test.pgm", g);
    auto r = read_image("/tmp/hexwave_test.pgm");
    CHECK(r.n1 == 3);
    CHECK(r.n2 == 5);
    CHECK(r.v[0] == 0);
    CHECK(r.v[1] == 255);
    CHECK(r.v[5] == g.v[5]);
    write_png_range("/tmp/hexwave_test.png", g.v, 3, 5, 0, 255);
    auto q = read_image("/tmp/hexwave_test.png");
    CHECK(q.v[5] == g.v[5]);
    std::remove("/tmp/hexwave_test.pgm");
    std::remove("/tmp/hexwave_test.png");
  }
}
