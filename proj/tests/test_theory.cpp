#include <doctest.h>

#include "eftlab/modforms.hpp"
#include "eftlab/theory.hpp"

using namespace eftlab;

TEST_CASE("build_from_series rejects what cannot be a graded dimension") {
  QSeries neg = QSeries::monomial(Coeff(mpz_class(-1)), 0, 1, mpq_class(3));
  CHECK_THROWS_AS((void)build_from_series(neg), std::invalid_argument);
  QSeries frac = QSeries::monomial(Coeff(mpz_class(1)), 1, 2, mpq_class(3));
  CHECK_THROWS_AS((void)build_from_series(frac), std::invalid_argument);
  QSeries rat = QSeries::monomial(Coeff(mpq_class(1, 2)), 0, 1, mpq_class(3));
  CHECK_THROWS_AS((void)build_from_series(rat), std::invalid_argument);
}

TEST_CASE("partition round trip on constants, j, and j^2") {
  std::vector<QSeries> fs;
  fs.push_back(QSeries::one(mpq_class(1)));
  fs.push_back(j_function(mpq_class(10)));
  fs.push_back(j_function(mpq_class(12)).pow(2).truncated(mpq_class(10)));
  for (const QSeries& f : fs) {
    TheoryData th = build_from_series(f);
    CHECK(partition(th) == f);
  }
}

TEST_CASE("theory data json round trip") {
  TheoryData th = build_from_series(j_function(mpq_class(6)));
  TheoryData back = TheoryData::from_json(th.to_json());
  CHECK(back.pole == th.pole);
  CHECK(back.trunc == th.trunc);
  CHECK(back.dims == th.dims);
  SpinTheoryData sth{th, th, true};
  SpinTheoryData sback = SpinTheoryData::from_json(sth.to_json());
  CHECK(sback.flip_plus);
  CHECK(sback.plus_sector.dims == th.dims);
  CHECK(sback.minus_sector.dims == th.dims);
}

TEST_CASE("a operator scales block k by q^k") {
  TheoryData th = build_from_series(j_function(mpq_class(4)));
  std::complex<double> tau(0.2, 1.3);
  const std::complex<double> twopii(0.0, 2.0 * 3.14159265358979323846);
  std::complex<double> q = std::exp(twopii * tau);
  AOperator A = a_operator(th, q);
  CHECK(std::abs(A.block_scalar(-1) - 1.0 / q) < 1e-12);
  CHECK(std::abs(A.block_scalar(2) - q * q) < 1e-12);
  CHECK_THROWS_AS((void)A.dense(4), std::length_error);
}

TEST_CASE("conditions pass on the theory of j") {
  TheoryData th = build_from_series(j_function(mpq_class(25)));
  auto rep = verify_conditions(th, default_equivariance_samples(), 1e-6);
  CHECK(rep.pass);
  bool saw_a = false, saw_b = false;
  for (const auto& c : rep.conditions) {
    if (c.condition == "a") { saw_a = true; CHECK(c.exact); }
    if (c.condition == "b") { saw_b = true; CHECK(c.exact); }
    if (c.condition == "d") CHECK(c.deviation <= 1e-6);
  }
  CHECK(saw_a);
  CHECK(saw_b);
}

TEST_CASE("equivariance fails for a non-modular partition") {
  // 1 + q is not SL2(Z)-invariant, so condition (d) must fail
  QSeries f = QSeries::zero(1, mpq_class(25));
  f.set_term(0, Coeff(mpz_class(1)));
  f.set_term(1, Coeff(mpz_class(1)));
  TheoryData th = build_from_series(f);
  auto rep = verify_conditions(th, default_equivariance_samples(), 1e-6);
  bool d_failed = false;
  for (const auto& c : rep.conditions)
    if (c.condition == "d") d_failed = !c.pass;
  CHECK(d_failed);
}

TEST_CASE("a corrupted rho fixture breaks symmetry and gluing") {
  TheoryData th = build_from_series(j_function(mpq_class(6)));
  RhoOverride bad;
  bad.dim = th.total_dim_capped(3);
  bad.entries[{0, 1}] = mpq_class(1);  // asymmetric off-diagonal entry
  auto rep = verify_conditions(th, default_equivariance_samples(), 1e-6, bad);
  bool a_failed = false, b_failed = false;
  for (const auto& c : rep.conditions) {
    if (c.condition == "a") a_failed = !c.pass;
    if (c.condition == "b") b_failed = !c.pass;
  }
  CHECK(a_failed);
  CHECK(b_failed);
  CHECK(!rep.pass);
}

TEST_CASE("spin partitions and the flip sign") {
  TheoryData th = build_from_series(j_function(mpq_class(10)));
  SpinTheoryData sth{th, th, false};
  QSeries f = partition(th);
  for (const SpinStructure& s : SpinStructure::all())
    CHECK(spin_partition(sth, s) == f);
  sth.flip_plus = true;
  CHECK(spin_partition(sth, SpinStructure::from_name("++")) == -f);
  for (const char* n : {"+-", "-+", "--"})
    CHECK(spin_partition(sth, SpinStructure::from_name(n)) == f);
}

TEST_CASE("flipped spin section stays equivariant") {
  SpinTheoryData sth;
  sth.plus_sector = build_from_series(j_function(mpq_class(25)));
  sth.minus_sector = sth.plus_sector;
  sth.flip_plus = true;
  auto rep = verify_conditions(sth, default_equivariance_samples(), 1e-6);
  CHECK(rep.pass);
}
