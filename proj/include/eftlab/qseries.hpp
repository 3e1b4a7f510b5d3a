#ifndef EFTLAB_QSERIES_HPP
#define EFTLAB_QSERIES_HPP

#include <complex>
#include <map>
#include <string>
#include <variant>

#include <gmpxx.h>

#include "eftlab/cyc48.hpp"

namespace eftlab {

// Coefficient rings, totally ordered by embedding: Int < Rat < Cyc.
enum class Ring { Int, Rat, Cyc };

Ring ring_join(Ring a, Ring b);
std::string ring_name(Ring r);

// Exact coefficient: an integer, a rational, or an element of Z[zeta48]
// (stored with rational entries so the Rat -> Cyc embedding is total).
class Coeff {
 public:
  Coeff() : v_(mpz_class(0)) {}
  explicit Coeff(mpz_class z) : v_(std::move(z)) {}
  // GMP arithmetic and comparisons are undefined on non-canonical rationals.
  explicit Coeff(mpq_class q) : v_(std::move(q)) {
    std::get<mpq_class>(v_).canonicalize();
  }
  explicit Coeff(Cyc48 c) : v_(std::move(c)) {}
  static Coeff from_long(long n) { return Coeff(mpz_class(n)); }

  Ring ring() const;
  bool is_zero() const;
  bool is_integer() const;
  bool is_nonnegative_integer() const;

  Coeff promoted(Ring target) const;
  mpq_class as_rational() const;  // requires ring() <= Rat
  const Cyc48& cyc() const;       // requires ring() == Cyc

  Coeff operator+(const Coeff& o) const;
  Coeff operator-(const Coeff& o) const;
  Coeff operator-() const;
  Coeff operator*(const Coeff& o) const;
  bool operator==(const Coeff& o) const;
  bool operator!=(const Coeff& o) const { return !(*this == o); }

  // Multiplicative inverse; throws std::domain_error when the coefficient is
  // not a unit in its ring (for Int that means values other than +-1).
  Coeff inverse() const;

  std::complex<double> to_complex() const;
  std::string to_string() const;

 private:
  std::variant<mpz_class, mpq_class, Cyc48> v_;
};

// Truncated Laurent series in q^{1/N} with exact coefficients. Exponents are
// k/denom with integer k; terms at exponent >= prec are unknown and absent.
// Stored zero coefficients are dropped. Immutable in spirit: all arithmetic
// returns fresh values.
class QSeries {
 public:
  QSeries() : denom_(1), prec_(0), ring_(Ring::Int) {}
  QSeries(long denom, mpq_class prec, Ring ring = Ring::Int);

  static QSeries zero(long denom, mpq_class prec, Ring ring = Ring::Int);
  static QSeries one(mpq_class prec);
  // c * q^{num/den}, prec as given.
  static QSeries monomial(Coeff c, long num, long den, mpq_class prec);

  long denom() const { return denom_; }
  const mpq_class& prec() const { return prec_; }
  Ring ring() const { return ring_; }
  const std::map<long, Coeff>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void set_term(long k, Coeff c);  // k is the numerator over denom()
  Coeff coeff_at(const mpq_class& exponent) const;

  // Exponent of the lowest stored term; prec when the series is zero.
  mpq_class order() const;

  QSeries with_denom(long new_denom) const;  // new_denom multiple of denom
  QSeries truncated(const mpq_class& new_prec) const;
  QSeries promoted(Ring target) const;

  QSeries operator+(const QSeries& o) const;
  QSeries operator-(const QSeries& o) const;
  QSeries operator-() const;
  QSeries operator*(const QSeries& o) const;
  QSeries pow(unsigned long n) const;
  bool operator==(const QSeries& o) const;
  bool operator!=(const QSeries& o) const { return !(*this == o); }

  // c * (this) and q^{num/den} * (this).
  QSeries scaled(const Coeff& c) const;
  QSeries shifted(long num, long den) const;

  // Exact division by an integer; throws if any coefficient fails to divide.
  QSeries divided_exact(const mpz_class& d) const;

  // Evaluate at q = exp(2*pi*i*tau); fractional powers are exp(2*pi*i*tau*e).
  std::complex<double> eval_at_tau(std::complex<double> tau) const;

  std::string to_json() const;
  static QSeries from_json(const std::string& text);
  std::string to_string(int max_terms = 12) const;

 private:
  long denom_;
  mpq_class prec_;
  Ring ring_;
  std::map<long, Coeff> terms_;
};

// Spec-level operation names. qs_mul dispatches to an OpenMP convolution for
// large operands; qs_mul_serial is the reference kept for testing.
QSeries qs_add(const QSeries& a, const QSeries& b);
QSeries qs_mul(const QSeries& a, const QSeries& b);
QSeries qs_mul_serial(const QSeries& a, const QSeries& b);

// Inverse up to prec; requires the leading coefficient to be a unit.
QSeries qs_inv(const QSeries& a);

// exponent e -> r*e, coefficients unchanged (tau -> r*tau on q-expansions).
QSeries qs_scale_exponent(const QSeries& a, const mpq_class& r);

// tau -> tau+1 on q^{1/48}-series: coefficient at k/48 picks up zeta48^k.
// Requires denom() | 48; the ring is promoted to Cyc.
QSeries t_transform(const QSeries& a);

// Thread cap honoring EFTLAB_THREADS (0 or unset = library default).
int effective_thread_count();

}  // namespace eftlab

#endif
