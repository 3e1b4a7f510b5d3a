#include <doctest.h>

#include "eftlab/clifford.hpp"
#include "eftlab/modforms.hpp"

using namespace eftlab;

TEST_CASE("qm polynomial arithmetic") {
  QmPoly one = QmPoly::scalar(1);
  QmPoly t = QmPoly::qm();
  CHECK((one - t) * (one + t) == QmPoly::scalar(1) - t * t);
  CHECK((one - t).substitute_one() == QmPoly::scalar(0));
}

TEST_CASE("clifford generators satisfy the defining relation") {
  for (const auto& entry : convention_oracle()) {
    Mat2 e = e_matrix(entry.cv);
    Mat2 f = f_matrix(entry.cv);
    Mat2 anti = mat2_add(mat2_mul(e, f), mat2_mul(f, e));
    // ef + fe = 2 * sign * w(e,f) with the pairing normalized to w(e,f) = 1
    QmPoly expect = QmPoly::scalar(2 * entry.cv.sign);
    for (int i = 0; i < 2; ++i)
      for (int k = 0; k < 2; ++k)
        CHECK(anti[i][k] == (i == k ? expect : QmPoly::scalar(0)));
  }
}

TEST_CASE("exactly one convention class reproduces str and tr of b") {
  auto oracle = convention_oracle();
  CHECK(oracle.size() == 8);
  int passing = 0;
  for (const auto& entry : oracle) {
    if (!entry.passes) continue;
    ++passing;
    // every passing parameterization fixes the same sign
    CHECK(entry.cv.sign == -1);
    // and pairs the vacuum choice with the matching v0 parity, which is the
    // same graded module in a relabeled basis
    CHECK(entry.cv.vacuum_e == (entry.cv.v0_parity == 1));
  }
  CHECK(passing == 2);
}

TEST_CASE("b operator identities for all m up to 50") {
  QmPoly one = QmPoly::scalar(1);
  QmPoly t = QmPoly::qm();
  for (long m = 1; m <= 50; ++m) {
    BOperator b = b_operator(mpq_class(m));
    CHECK(b.supertrace() == one - t);
    CHECK(b.trace() == one + t);
  }
  BOperator half = b_operator(mpq_class(1, 2));
  CHECK(half.supertrace() == one - t);
  CHECK_THROWS(b_operator(mpq_class(0)));
}

TEST_CASE("sector series pins") {
  const mpq_class cutoff = 25, prec = 20;
  auto pp48 = sector_series(SpinStructure::from_name("++"), 48, cutoff, prec);
  CHECK(pp48.series == delta(prec).pow(2).with_denom(48));
  CHECK(pp48.series == eta(prec).pow(48).with_denom(48));

  // -+ at n = 2 is 2 eta(2 tau)^2 / eta(tau)^2
  auto mp2 = sector_series(SpinStructure::from_name("-+"), 2, cutoff, mpq_class(10));
  QSeries e = eta(mpq_class(21));
  QSeries quot = qs_scale_exponent(e, 2).pow(2) * qs_inv(e.pow(2));
  quot = quot.scaled(Coeff(mpz_class(2))).truncated(mpq_class(10)).with_denom(48);
  CHECK(mp2.series == quot);

  // +- at n = 24 starts at q^{-1/2}
  auto pm24 = sector_series(SpinStructure::from_name("+-"), 24, cutoff, mpq_class(5));
  CHECK(pm24.series.order() == mpq_class(-1, 2));
}

TEST_CASE("periodicity certificates: 24 fails with ratio -1, 48 passes") {
  auto c24 = periodicity_certificate(24, 25, 15);
  CHECK(!c24.pass);
  int minus_one = 0;
  for (const auto& e : c24.entries) {
    if (e.generator != "T") continue;
    if (e.sector == "+-" || e.sector == "--") {
      CHECK(!e.pass);
      CHECK(e.ratio == "-1");
      ++minus_one;
    } else {
      CHECK(e.pass);  // ++ and -+ carry zeta48^{2n} = 1 at n = 24
    }
  }
  CHECK(minus_one == 2);

  auto c48 = periodicity_certificate(48, 25, 15);
  CHECK(c48.pass);

  // n = 2: the T-ratio on ++ is the primitive root zeta48^4
  auto c2 = periodicity_certificate(2, 25, 10);
  CHECK(!c2.pass);
  for (const auto& e : c2.entries)
    if (e.generator == "T" && e.sector == "++") CHECK(!e.pass);
}
