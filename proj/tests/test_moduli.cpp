#include <doctest.h>

#include <random>

#include "eftlab/modforms.hpp"
#include "eftlab/moduli.hpp"

using namespace eftlab;

namespace {

SL2Z random_sl2z(std::mt19937& rng, int len) {
  SL2Z A = SL2Z::identity();
  std::uniform_int_distribution<int> d(0, 2);
  for (int i = 0; i < len; ++i) {
    switch (d(rng)) {
      case 0: A = A * SL2Z::S(); break;
      case 1: A = A * SL2Z::T(); break;
      default: A = A * SL2Z{1, -1, 0, 1}; break;
    }
  }
  return A;
}

GaussQ random_tau(std::mt19937& rng) {
  std::uniform_int_distribution<int> num(-5, 5), den(1, 6), pos(1, 6);
  return {mpq_class(num(rng), den(rng)), mpq_class(pos(rng), den(rng))};
}

}  // namespace

TEST_CASE("gauss rational parsing and printing round trip") {
  GaussQ g{mpq_class(-3, 10), mpq_class(9, 10)};
  CHECK(GaussQ::parse(g.to_string()) == g);
  CHECK(GaussQ::parse("1/2+3/2i") == GaussQ{mpq_class(1, 2), mpq_class(3, 2)});
  CHECK(GaussQ::parse("0+1/2i") == GaussQ{mpq_class(0), mpq_class(1, 2)});
  GaussQ q{mpq_class(2, 4), mpq_class(3, 6)};  // non-canonical inputs
  CHECK(q == GaussQ{mpq_class(1, 2), mpq_class(1, 2)});
}

TEST_CASE("gauss rational field operations") {
  GaussQ a{mpq_class(1, 2), mpq_class(3)};
  GaussQ b{mpq_class(-2), mpq_class(1, 5)};
  CHECK(a * b / b == a);
  CHECK((a - a) == GaussQ{mpq_class(0), mpq_class(0)});
}

TEST_CASE("sl2z requires determinant one") {
  CHECK_THROWS(SL2Z{1, 0, 0, -1});
  CHECK_THROWS(SL2Z{2, 0, 0, 2});
  SL2Z st = SL2Z::S() * SL2Z::T();
  CHECK(st == SL2Z{0, -1, 1, 1});
}

TEST_CASE("tau and torus actions are left actions") {
  std::mt19937 rng(3);
  for (int t = 0; t < 100; ++t) {
    SL2Z A = random_sl2z(rng, 7), B = random_sl2z(rng, 7);
    GaussQ tau = random_tau(rng);
    CHECK(act_tau(A * B, tau) == act_tau(A, act_tau(B, tau)));
    PointedTorus pt(1.25, tau);
    PointedTorus l = act_torus(A * B, pt);
    PointedTorus r = act_torus(A, act_torus(B, pt));
    CHECK(l.tau == r.tau);
    CHECK(l.ell == doctest::Approx(r.ell).epsilon(1e-12));
  }
}

TEST_CASE("spin action is a left action and has two orbits") {
  std::mt19937 rng(5);
  for (int t = 0; t < 1000; ++t) {
    SL2Z A = random_sl2z(rng, 6), B = random_sl2z(rng, 6);
    for (const SpinStructure& s : SpinStructure::all())
      CHECK(act_spin(A * B, s) == act_spin(A, act_spin(B, s)));
  }
  auto orbits = spin_orbits();
  REQUIRE(orbits.size() == 2);
  size_t small = std::min(orbits[0].size(), orbits[1].size());
  size_t big = std::max(orbits[0].size(), orbits[1].size());
  CHECK(small == 1);
  CHECK(big == 3);
}

TEST_CASE("gamma0(2) is exactly the stabilizer of -+") {
  std::mt19937 rng(9);
  for (int t = 0; t < 1000; ++t) {
    SL2Z A = random_sl2z(rng, 8);
    CHECK(in_gamma0_2(A) == stabilizes_minus_plus(A));
  }
  CHECK(in_gamma0_2(SL2Z::T()));
  CHECK(!in_gamma0_2(SL2Z::S()));
}

TEST_CASE("pointed torus demands positive scale and upper half plane") {
  CHECK_THROWS(PointedTorus(0.0, GaussQ{mpq_class(0), mpq_class(1)}));
  CHECK_THROWS(PointedTorus(1.0, GaussQ{mpq_class(0), mpq_class(-1)}));
}

TEST_CASE("equivariance of j as a section, with exact T check") {
  QSeries f = j_function(mpq_class(25));
  SectorSection sec;
  for (int i = 0; i < 4; ++i) sec.sector[i] = f;
  sec.weight = 0;
  auto samples = default_equivariance_samples();
  for (const SL2Z& g : {SL2Z::S(), SL2Z::T()}) {
    auto rep = check_section_equivariance(sec, g, samples, 1e-6);
    CHECK(rep.pass);
  }
  auto trep = check_section_equivariance(sec, SL2Z::T(), samples, 1e-6);
  for (const auto& e : trep.entries) CHECK(e.exact);
}

TEST_CASE("a weight mismatch is caught numerically") {
  QSeries f = j_function(mpq_class(25));
  SectorSection sec;
  for (int i = 0; i < 4; ++i) sec.sector[i] = f;
  sec.weight = 2;  // j is weight 0; the ++ line must now fail under S
  auto rep = check_section_equivariance(sec, SL2Z::S(),
                                        default_equivariance_samples(), 1e-6);
  CHECK(!rep.pass);
}
