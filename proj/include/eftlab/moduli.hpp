#ifndef EFTLAB_MODULI_HPP
#define EFTLAB_MODULI_HPP

#include <array>
#include <complex>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "eftlab/qseries.hpp"

namespace eftlab {

// Gaussian rational: exact complex number with rational real/imag parts.
struct GaussQ {
  mpq_class re, im;

  GaussQ() = default;
  // mpq_class(num, den) does not canonicalize, and GMP comparisons on
  // non-canonical rationals are undefined; normalize on entry.
  GaussQ(mpq_class r, mpq_class i) : re(std::move(r)), im(std::move(i)) {
    re.canonicalize();
    im.canonicalize();
  }

  GaussQ operator+(const GaussQ& o) const { return {re + o.re, im + o.im}; }
  GaussQ operator-(const GaussQ& o) const { return {re - o.re, im - o.im}; }
  GaussQ operator*(const GaussQ& o) const {
    return {re * o.re - im * o.im, re * o.im + im * o.re};
  }
  GaussQ operator/(const GaussQ& o) const;
  bool operator==(const GaussQ& o) const { return re == o.re && im == o.im; }

  std::complex<double> to_complex() const { return {re.get_d(), im.get_d()}; }
  std::string to_string() const;
  static GaussQ parse(const std::string& s);  // "re/den+im/den i" forms
};

struct SL2Z {
  mpz_class a, b, c, d;

  SL2Z(mpz_class a_, mpz_class b_, mpz_class c_, mpz_class d_);
  static SL2Z identity() { return {1, 0, 0, 1}; }
  static SL2Z S() { return {0, -1, 1, 0}; }
  static SL2Z T() { return {1, 1, 0, 1}; }

  SL2Z operator*(const SL2Z& o) const;
  bool operator==(const SL2Z& o) const {
    return a == o.a && b == o.b && c == o.c && d == o.d;
  }
};

struct PointedTorus {
  double ell;  // scale, > 0
  GaussQ tau;  // im > 0

  PointedTorus(double l, GaussQ t);
};

// Spin structure (s1, s2) on the torus, additively: + <-> 0, - <-> 1.
struct SpinStructure {
  int s1 = 0, s2 = 0;  // values in {0, 1}

  bool operator==(const SpinStructure& o) const {
    return s1 == o.s1 && s2 == o.s2;
  }
  std::string name() const;  // "++", "-+", "+-", "--"
  static SpinStructure from_name(const std::string& n);
  static std::array<SpinStructure, 4> all();
  int index() const { return s1 * 2 + s2; }  // ++=0, +-=1, -+=2, --=3
};

PointedTorus act_torus(const SL2Z& A, const PointedTorus& t);
GaussQ act_tau(const SL2Z& A, const GaussQ& tau);
SpinStructure act_spin(const SL2Z& A, const SpinStructure& s);

// Orbits of the four spin structures under SL2(Z) = <S, T>.
std::vector<std::vector<SpinStructure>> spin_orbits();

bool in_gamma0_2(const SL2Z& A);
bool stabilizes_minus_plus(const SL2Z& A);

// One q-series per spin structure; weight applies on the ++ sector only
// (the other three lines are trivialized, weight 0).
struct SectorSection {
  std::array<QSeries, 4> sector;  // indexed by SpinStructure::index()
  mpq_class weight = 0;           // modular weight on ++
};

struct EquivarianceEntry {
  std::string sector;
  double deviation = 0.0;
  bool pass = false;
  bool exact = false;  // true for T-checks done via t_transform
};

struct EquivarianceReport {
  std::string generator;
  std::vector<EquivarianceEntry> entries;
  double max_deviation = 0.0;
  bool pass = true;
  std::string to_json() const;
};

// Compares sec[A.s](A.tau) against (c tau + d)^{weight(s)} * sec[s](tau) at
// the sample points. When A == T and all four series have denom dividing 48,
// the comparison is additionally carried out exactly via t_transform.
EquivarianceReport check_section_equivariance(const SectorSection& sec,
                                              const SL2Z& A,
                                              const std::vector<PointedTorus>& samples,
                                              double tol);

std::vector<PointedTorus> default_equivariance_samples();

}  // namespace eftlab

#endif
