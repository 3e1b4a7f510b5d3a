#include <doctest.h>

#include <algorithm>
#include <random>

#include "eftlab/qseries.hpp"

using namespace eftlab;

namespace {

QSeries random_series(std::mt19937& rng, long denom, const mpq_class& prec) {
  std::uniform_int_distribution<int> coeff(-9, 9), lowest(-4, 2);
  QSeries s = QSeries::zero(denom, prec);
  long hi = static_cast<long>(prec.get_d() * static_cast<double>(denom));
  long lo = std::min(lowest(rng) * denom, hi - 1);
  std::uniform_int_distribution<long> expo(lo, hi - 1);
  for (int t = 0; t < 8; ++t) {
    long k = expo(rng);
    s.set_term(k, Coeff(mpz_class(coeff(rng))));
  }
  return s;
}

}  // namespace

TEST_CASE("ring axioms on random triples") {
  std::mt19937 rng(42);
  const mpq_class prec = 10;
  for (int t = 0; t < 100; ++t) {
    QSeries a = random_series(rng, 1, prec);
    QSeries b = random_series(rng, 1, prec);
    QSeries c = random_series(rng, 1, prec);
    CHECK(a + b == b + a);
    CHECK(a * b == b * a);
    CHECK((a + b) + c == a + (b + c));
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * (b + c) == a * b + a * c);
    CHECK(a * QSeries::one(prec) == a.truncated((a * QSeries::one(prec)).prec()));
    CHECK((a - a).is_zero());
  }
}

TEST_CASE("precision obeys min-of-inputs with order shifts") {
  QSeries a = QSeries::monomial(Coeff(mpz_class(1)), 2, 1, mpq_class(7));
  QSeries b = QSeries::monomial(Coeff(mpz_class(3)), -1, 1, mpq_class(5));
  CHECK((a + b).prec() == mpq_class(5));
  // conservative rule: min over both precs and the order-shifted precs,
  // min(7, 5, 5 + 2, 7 - 1) = 5
  CHECK((a * b).prec() == mpq_class(5));
  CHECK((a * b).coeff_at(1).as_rational() == 3);
}

TEST_CASE("denominator promotion and common refinement") {
  QSeries a = QSeries::monomial(Coeff(mpz_class(1)), 1, 2, mpq_class(4));
  QSeries b = QSeries::monomial(Coeff(mpz_class(1)), 1, 3, mpq_class(4));
  QSeries s = a + b;
  CHECK(s.denom() % 2 == 0);
  CHECK(s.denom() % 3 == 0);
  CHECK(s.coeff_at(mpq_class(1, 2)).as_rational() == 1);
  CHECK(s.coeff_at(mpq_class(1, 3)).as_rational() == 1);
  CHECK_THROWS(a.with_denom(3));  // not a multiple of 2
}

TEST_CASE("qs_mul agrees with the serial reference") {
  std::mt19937 rng(7);
  for (int t = 0; t < 10; ++t) {
    QSeries a = random_series(rng, 3, mpq_class(30));
    QSeries b = random_series(rng, 3, mpq_class(30));
    CHECK(qs_mul(a, b) == qs_mul_serial(a, b));
  }
}

TEST_CASE("qs_inv is a two-sided inverse") {
  std::mt19937 rng(11);
  for (int t = 0; t < 20; ++t) {
    QSeries a = random_series(rng, 2, mpq_class(8));
    // unit leading term strictly below anything random_series can emit
    a.set_term(-5 * a.denom(), Coeff(mpz_class(1)));
    QSeries inv = qs_inv(a);
    QSeries lhs = a * inv;
    CHECK(lhs == QSeries::one(lhs.prec()).with_denom(lhs.denom()));
    QSeries rhs = inv * a;
    CHECK(rhs == QSeries::one(rhs.prec()).with_denom(rhs.denom()));
  }
  QSeries bad = QSeries::monomial(Coeff(mpz_class(2)), 0, 1, mpq_class(4));
  CHECK_THROWS_AS((void)qs_inv(bad), std::domain_error);
}

TEST_CASE("exponent scaling acts on exponents only") {
  QSeries a = QSeries::monomial(Coeff(mpz_class(5)), 3, 2, mpq_class(6));
  QSeries b = qs_scale_exponent(a, mpq_class(2, 3));
  CHECK(b.coeff_at(mpq_class(1)).as_rational() == 5);
  CHECK(b.prec() == mpq_class(4));
}

TEST_CASE("t_transform is a ring homomorphism with order 48") {
  std::mt19937 rng(13);
  for (int t = 0; t < 10; ++t) {
    QSeries a = random_series(rng, 48, mpq_class(2));
    QSeries b = random_series(rng, 48, mpq_class(2));
    CHECK(t_transform(a + b) == t_transform(a) + t_transform(b));
    CHECK(t_transform(a * b) == t_transform(a) * t_transform(b));
    QSeries it = a.promoted(Ring::Cyc);
    for (int i = 0; i < 48; ++i) it = t_transform(it);
    CHECK(it == a.promoted(Ring::Cyc));
  }
  QSeries bad = QSeries::monomial(Coeff(mpz_class(1)), 1, 5, mpq_class(2));
  CHECK_THROWS(t_transform(bad));
}

TEST_CASE("coefficient ring promotion chain") {
  Coeff i(mpz_class(3));
  Coeff r(mpq_class(1, 2));
  Coeff z(Cyc48::zeta_pow(1));
  CHECK((i + r).ring() == Ring::Rat);
  CHECK((r * z).ring() == Ring::Cyc);
  CHECK((i * i).ring() == Ring::Int);
  CHECK(i.promoted(Ring::Cyc).ring() == Ring::Cyc);
  CHECK(Coeff(mpq_class(6, 3)).is_nonnegative_integer());
  CHECK(!Coeff(mpq_class(-1, 3)).is_nonnegative_integer());
  CHECK(r.inverse() == Coeff(mpq_class(2)));
  CHECK_THROWS_AS((void)i.inverse(), std::domain_error);
  // zeta48 is a unit of infinite multiplicative order dividing 48
  Coeff zi = z.inverse();
  CHECK(z * zi == Coeff(Cyc48(mpq_class(1))));
}

TEST_CASE("json round trip across rings") {
  std::mt19937 rng(17);
  QSeries a = random_series(rng, 6, mpq_class(5));
  CHECK(QSeries::from_json(a.to_json()) == a);
  QSeries c = a.promoted(Ring::Cyc).scaled(Coeff(Cyc48::zeta_pow(7)));
  CHECK(QSeries::from_json(c.to_json()) == c);
  QSeries r = a.scaled(Coeff(mpq_class(2, 3)));
  CHECK(QSeries::from_json(r.to_json()) == r);
}

TEST_CASE("eval_at_tau matches a hand-computed value") {
  // f = q^{-1} + 2 q^{1/2}
  QSeries f = QSeries::zero(2, mpq_class(3));
  f.set_term(-2, Coeff(mpz_class(1)));
  f.set_term(1, Coeff(mpz_class(2)));
  std::complex<double> tau(0.3, 1.1);
  const std::complex<double> twopii(0.0, 2.0 * 3.14159265358979323846);
  std::complex<double> expect =
      std::exp(-twopii * tau) + 2.0 * std::exp(twopii * tau * 0.5);
  CHECK(std::abs(f.eval_at_tau(tau) - expect) < 1e-12);
}

TEST_CASE("thread cap honors EFTLAB_THREADS") {
  CHECK(effective_thread_count() >= 1);
}
