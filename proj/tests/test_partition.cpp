#include <doctest.h>

#include <cmath>
#include <set>

#include "hexwave/partition.hpp"

using namespace hexwave;

namespace {
const double kPi = M_PI, kS3 = std::sqrt(3.0);

bool same_gamma(const Vec2& a, double x, double y) {
  // triples are defined up to sign of gamma
  return (std::abs(a[0] - x) < 1e-12 && std::abs(a[1] - y) < 1e-12) ||
         (std::abs(a[0] + x) < 1e-12 && std::abs(a[1] + y) < 1e-12);
}

std::set<std::vector<long>> poly_set(const FrequencyPartition& part, const std::vector<int>& ks, const IMat2* rot) {
  // polygons as sorted vertex lists scaled to integers
  std::set<std::vector<long>> out;
  for (int k : ks)
    for (auto& pc : part.regions[k].pieces) {
      std::vector<long> key;
      std::set<std::pair<long, long>> vs;
      for (auto& v : pc.verts) {
        RPt w = rot ? apply(*rot, v) : v;
        vs.insert({long(std::lround(to_double(w[0]) * 1e6)), long(std::lround(to_double(w[1]) * 1e6))});
      }
      for (auto& [a, b] : vs) key.push_back(a), key.push_back(b);
      out.insert(key);
    }
  return out;
}
}  // namespace

TEST_SUITE("partition") {
  TEST_CASE("hexagonal indices and critical sampling") {
    for (int p = 1; p <= 3; ++p) {
      auto h = build_hexagonal(p);
      CHECK(h.size() == 3 * p + 1);
      CHECK(std::abs(h.sub[0].det()) == 4);
      for (int k = 1; k <= 3 * p; ++k) CHECK(std::abs(h.sub[k].det()) == 4 * p);
      CHECK(h.redundancy() == Q(1));
    }
    auto h2 = build_hexagonal(2);
    for (int k = 1; k <= 6; ++k) CHECK(quotient_index(h2.base, h2.sublattices[k]) == 8);
  }

  TEST_CASE("fan angular ranges for p=2") {
    auto h = build_hexagonal(2);
    // sample the ring between A_0 and the cell boundary at several angles
    auto lab = [&](double th) {
      double r = 0.75 * kPi / std::cos(std::fmod(std::fmod(th, kPi / 3) + kPi / 3, kPi / 3) - kPi / 6);
      return h.label_c(h.cell.to_c({r * std::cos(th), r * std::sin(th)}));
    };
    CHECK(lab(0.1) == 1);
    CHECK(lab(-0.1) == 2);
    CHECK(lab(kPi + 0.1) == 1);
    CHECK(lab(kPi - 0.1) == 2);
    CHECK(lab(kPi / 6 + 0.1) == 6);
    CHECK(lab(-kPi / 6 - 0.1) == 3);
    CHECK(lab(kPi / 2 + 0.1) == 4);
    CHECK(lab(kPi / 2 - 0.1) == 5);
    CHECK(h.label_c(h.cell.to_c({0.3, 0.2})) == 0);
  }

  TEST_CASE("dyadic lattices") {
    auto d = build_dyadic(1);
    CHECK(d.size() == 7);
    CHECK(d.sub[1].det() == 8);
    CHECK(d.sub[1].m[0][0] == 2);
    CHECK(d.sub[1].m[1][0] == 2);
    CHECK(d.sub[1].m[1][1] == 4);
    CHECK(build_dyadic(2).size() == 13);
    CHECK(d.redundancy() == Q(1));
  }

  TEST_CASE("frame redundancy") {
    auto f = build_hexagonal_frame();
    for (int k = 0; k <= 6; ++k) CHECK(quotient_index(f.base, f.sublattices[k]) == 4);
    CHECK(f.redundancy() == Q(7, 4));
  }

  TEST_CASE("admissibility on the 192 grid") {
    for (int p = 1; p <= 3; ++p) {
      auto r = check_admissible(build_hexagonal(p), 192);
      CHECK_MESSAGE(r.ok, r.message);
    }
    for (int p = 1; p <= 2; ++p) {
      auto r = check_admissible(build_dyadic(p), 192);
      CHECK_MESSAGE(r.ok, r.message);
    }
    IMat2 id;
    id.m[0][0] = id.m[1][1] = 1;
    auto bad = with_lattices(build_hexagonal(2), std::vector<IMat2>(7, id));
    auto r = check_admissible(bad, 192);
    CHECK_FALSE(r.ok);
    IMat2 sing;
    CHECK_THROWS_AS(with_lattices(build_hexagonal(2), std::vector<IMat2>(7, sing)), LatticeError);
  }

  TEST_CASE("every grid frequency gets exactly one label") {
    auto h = build_hexagonal(2);
    const int n = 96;
    for (int u = -n; u < n; ++u)
      for (int v = -n; v < n; ++v) {
        GridPt g = h.cell.fold(GridPt{u, v, n, n});
        int hits = 0;
        for (auto& r : h.regions)
          for (auto& pc : r.pieces) hits += pc.contains(g);
        CHECK(hits == 1);
      }
  }

  TEST_CASE("boundary classification hexagonal p=2") {
    auto h = build_hexagonal(2);
    auto bc = classify_boundaries(h);
    CHECK(bc.regular[0].empty());
    CHECK(bc.singular[0].length(h.cell) == doctest::Approx(bc.boundary[0].length(h.cell)));
    for (int k = 1; k <= 6; ++k) {
      CHECK_FALSE(bc.regular[k].empty());
      CHECK_FALSE(bc.singular[k].empty());
      // inside the cell, the singular part is exactly the edge shared with A_0
      auto inner = bc.singular[k].subtract(cell_boundary(h.cell));
      CHECK(inner.length(h.cell) == doctest::Approx(bc.boundary[k].intersect(bc.boundary[0]).length(h.cell)));
      CHECK(inner.subtract(bc.boundary[0]).empty());
      // interior regular boundaries are the radial edges
      auto reg_in = bc.regular[k].subtract(cell_boundary(h.cell));
      CHECK(reg_in.length(h.cell) == doctest::Approx(M_PI + 2 * M_PI / std::sqrt(3.0)));
    }
    auto t = regular_triples(bc);
    REQUIRE(t.size() == 6);
    struct Want {
      int a, b;
      double x, y;
    } want[] = {{1, 2, kPi / 2, 0},           {2, 3, kPi / 2, kS3 * kPi / 2}, {3, 4, kPi / 4, -kS3 * kPi / 4},
                {4, 5, kPi, 0},               {5, 6, kPi / 4, kS3 * kPi / 4}, {6, 1, kPi / 2, -kS3 * kPi / 2}};
    for (auto& w : want) {
      int found = 0;
      for (auto& tr : t)
        if (std::set<int>{tr.k1, tr.k2} == std::set<int>{w.a, w.b} && same_gamma(tr.gamma_xi, w.x, w.y)) ++found;
      CHECK_MESSAGE(found == 1, w.a, ",", w.b);
    }
  }

  TEST_CASE("frame lattices: bands fully regular") {
    auto f = build_hexagonal_frame();
    auto bc = classify_boundaries(f);
    CHECK(bc.regular[0].empty());
    for (int k = 1; k <= 6; ++k) CHECK(bc.singular[k].empty());
  }

  TEST_CASE("disjointness of C0 for distinct cosets") {
    auto h = build_hexagonal(2);
    auto B = region_boundary(h, 1);
    auto cos = h.dual_cosets(1);
    auto c0 = [&](const RPt& g) {
      SegSet acc;
      for (int a = -2; a <= 2; ++a)
        for (int b = -2; b <= 2; ++b) acc = acc.unite(B.intersect(B.translate(RPt{Q(a), Q(b)} - g)));
      return acc;
    };
    for (std::size_t i = 1; i < cos.size(); ++i)
      for (std::size_t j = i + 1; j < cos.size(); ++j)
        CHECK(c0(cos[i]).intersect(c0(cos[j])).length(h.cell) < 1e-12);
  }

  TEST_CASE("pairing of triples under gamma") {
    auto h = build_hexagonal(2);
    auto bc = classify_boundaries(h);
    for (auto& t : bc.triples) {
      // the merged set E(gamma) u E(-gamma) maps onto itself under +-gamma
      SegSet shifted;
      for (int a = -2; a <= 2; ++a)
        for (int b = -2; b <= 2; ++b) for (int s : {1, -1}) shifted = shifted.unite(t.common.translate(scale(t.gamma, Q(s)) + RPt{Q(a), Q(b)}));
      CHECK(shifted.intersect(t.common).length(h.cell) == doctest::Approx(t.common.length(h.cell)));
    }
  }

  TEST_CASE("rotation by 2pi/3 permutes band pairs") {
    auto h = build_hexagonal(2);
    IMat2 r120;  // (R60)^2 on reciprocal coordinates
    r120.m[0][0] = 0; r120.m[0][1] = -1; r120.m[1][0] = 1; r120.m[1][1] = -1;
    CHECK(poly_set(h, {0}, &r120) == poly_set(h, {0}, nullptr));
    auto all = poly_set(h, {1, 2, 3, 4, 5, 6}, nullptr);
    CHECK(poly_set(h, {1, 2, 3, 4, 5, 6}, &r120) == all);
    CHECK(poly_set(h, {1, 2}, &r120) == poly_set(h, {3, 4}, nullptr));
  }

  TEST_CASE("json and svg export") {
    auto h = build_hexagonal(2);
    auto bc = classify_boundaries(h);
    auto j = to_json(h);
    CHECK(j["regions"].size() == 7);
    CHECK(j["regions"][1]["index"] == 8);
    auto jb = to_json(bc, h);
    CHECK(jb["triples"].size() == 6);
    auto svg = to_svg(h, &bc);
    CHECK(svg.find("green") != std::string::npos);
    CHECK(svg.find("red") != std::string::npos);
  }
}
