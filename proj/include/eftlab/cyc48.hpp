#ifndef EFTLAB_CYC48_HPP
#define EFTLAB_CYC48_HPP

#include <array>
#include <complex>
#include <string>

#include <gmpxx.h>

namespace eftlab {

// Element of Q[x]/Phi48(x), Phi48(x) = x^16 - x^8 + 1, with x |-> zeta48 =
// exp(2*pi*i/48). Elements are kept reduced (degree < 16), so identities like
// zeta48^24 = -1 hold as exact equalities of coefficient vectors. Integer
// elements are those with all denominators equal to 1.
class Cyc48 {
 public:
  Cyc48() = default;
  explicit Cyc48(const mpq_class& rational) { c_[0] = rational; }

  // zeta48^k for any integer k (reduced mod Phi48).
  static Cyc48 zeta_pow(long k);

  const mpq_class& coeff(int i) const { return c_[i]; }
  mpq_class& coeff(int i) { return c_[i]; }

  bool is_zero() const;
  bool is_rational() const;
  bool is_integer() const;

  Cyc48 operator+(const Cyc48& o) const;
  Cyc48 operator-(const Cyc48& o) const;
  Cyc48 operator-() const;
  Cyc48 operator*(const Cyc48& o) const;
  bool operator==(const Cyc48& o) const { return c_ == o.c_; }
  bool operator!=(const Cyc48& o) const { return !(*this == o); }

  // Multiplicative inverse in Q(zeta48); throws std::domain_error on zero.
  Cyc48 inverse() const;

  std::complex<double> to_complex() const;
  std::string to_string() const;

 private:
  // x * (this), reduced by x^16 = x^8 - 1.
  Cyc48 mul_x() const;

  std::array<mpq_class, 16> c_{};
};

}  // namespace eftlab

#endif
