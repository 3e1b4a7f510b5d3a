#include <doctest.h>

#include "eftlab/modforms.hpp"

using namespace eftlab;

TEST_CASE("divisor power sums") {
  CHECK(sigma(3, 1) == 1);
  CHECK(sigma(3, 6) == 1 + 8 + 27 + 216);
  CHECK(sigma(5, 4) == 1 + 32 + 1024);
}

TEST_CASE("eisenstein leading coefficients") {
  QSeries e4 = c4(mpq_class(4));
  CHECK(e4.coeff_at(0).as_rational() == 1);
  CHECK(e4.coeff_at(1).as_rational() == 240);
  CHECK(e4.coeff_at(2).as_rational() == 2160);
  QSeries e6 = c6(mpq_class(3));
  CHECK(e6.coeff_at(0).as_rational() == 1);
  CHECK(e6.coeff_at(1).as_rational() == -504);
  CHECK(e6.coeff_at(2).as_rational() == -16632);
}

TEST_CASE("ring relation at high order") {
  const mpq_class prec = 50;
  QSeries rel = c4(prec).pow(3) - c6(prec).pow(2) -
                delta(prec).scaled(Coeff(mpz_class(1728)));
  CHECK(rel.is_zero());
}

TEST_CASE("delta starts at q with coefficient 1 and tau(2) = -24") {
  QSeries d = delta(mpq_class(4));
  CHECK(d.order() == mpq_class(1));
  CHECK(d.coeff_at(1).as_rational() == 1);
  CHECK(d.coeff_at(2).as_rational() == -24);
  CHECK(d.coeff_at(3).as_rational() == 252);
}

TEST_CASE("delta inverse is a two-sided inverse with nonnegative integer coefficients") {
  const mpq_class prec = 30;
  QSeries d = delta(prec);
  QSeries di = delta_inv(prec);
  QSeries prod = d * di;
  CHECK(prod == QSeries::one(prod.prec()));
  for (const auto& [k, c] : di.terms()) CHECK(c.is_nonnegative_integer());
  CHECK(di.order() == mpq_class(-1));
}

TEST_CASE("j function pins") {
  QSeries j = j_function(mpq_class(3));
  CHECK(j.order() == mpq_class(-1));
  CHECK(j.coeff_at(-1).as_rational() == 1);
  CHECK(j.coeff_at(0).as_rational() == 744);
  CHECK(j.coeff_at(1).as_rational() == 196884);
  CHECK(j.coeff_at(2).as_rational() == 21493760);
}

TEST_CASE("eta product and the eta^24 cross-check") {
  QSeries e = eta(mpq_class(5));
  CHECK(e.denom() == 24);
  CHECK(e.coeff_at(mpq_class(1, 24)).as_rational() == 1);
  CHECK(e.coeff_at(mpq_class(25, 24)).as_rational() == -1);
  CHECK(e.coeff_at(mpq_class(49, 24)).as_rational() == -1);
  const mpq_class prec = 30;
  CHECK(eta(prec).pow(24) == delta(prec).with_denom(24));
  CHECK(eta(prec).pow(48) == delta(prec).pow(2).with_denom(24));
}

TEST_CASE("polynomials in j evaluate exactly") {
  const mpq_class prec = 6;
  ModularFunctionSpec spec;
  spec.j_poly = {mpz_class(2), mpz_class(-1), mpz_class(1)};  // 2 - j + j^2
  QSeries expect = QSeries::one(prec).scaled(Coeff(mpz_class(2))) -
                   j_function(prec) + j_function(prec).pow(2).truncated(prec);
  CHECK(eval_mf_spec(spec, prec) == expect.truncated(eval_mf_spec(spec, prec).prec()));
}
