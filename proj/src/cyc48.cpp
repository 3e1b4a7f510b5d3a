#include "eftlab/cyc48.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace eftlab {

Cyc48 Cyc48::zeta_pow(long k) {
  k %= 48;
  if (k < 0) k += 48;
  Cyc48 r(mpq_class(1));
  for (long i = 0; i < k; ++i) r = r.mul_x();
  return r;
}

bool Cyc48::is_zero() const {
  for (const auto& q : c_)
    if (q != 0) return false;
  return true;
}

bool Cyc48::is_rational() const {
  for (int i = 1; i < 16; ++i)
    if (c_[i] != 0) return false;
  return true;
}

bool Cyc48::is_integer() const {
  return is_rational() && c_[0].get_den() == 1;
}

Cyc48 Cyc48::operator+(const Cyc48& o) const {
  Cyc48 r;
  for (int i = 0; i < 16; ++i) r.c_[i] = c_[i] + o.c_[i];
  return r;
}

Cyc48 Cyc48::operator-(const Cyc48& o) const {
  Cyc48 r;
  for (int i = 0; i < 16; ++i) r.c_[i] = c_[i] - o.c_[i];
  return r;
}

Cyc48 Cyc48::operator-() const {
  Cyc48 r;
  for (int i = 0; i < 16; ++i) r.c_[i] = -c_[i];
  return r;
}

Cyc48 Cyc48::mul_x() const {
  Cyc48 r;
  for (int i = 0; i < 15; ++i) r.c_[i + 1] = c_[i];
  // x^16 = x^8 - 1
  r.c_[8] += c_[15];
  r.c_[0] -= c_[15];
  return r;
}

Cyc48 Cyc48::operator*(const Cyc48& o) const {
  std::array<mpq_class, 31> prod{};
  for (int i = 0; i < 16; ++i) {
    if (c_[i] == 0) continue;
    for (int j = 0; j < 16; ++j) {
      if (o.c_[j] == 0) continue;
      prod[i + j] += c_[i] * o.c_[j];
    }
  }
  for (int d = 30; d >= 16; --d) {
    if (prod[d] == 0) continue;
    prod[d - 8] += prod[d];
    prod[d - 16] -= prod[d];
    prod[d] = 0;
  }
  Cyc48 r;
  for (int i = 0; i < 16; ++i) r.c_[i] = prod[i];
  return r;
}

Cyc48 Cyc48::inverse() const {
  if (is_zero()) throw std::domain_error("Cyc48: inverse of zero");
  if (is_rational()) return Cyc48(mpq_class(1) / c_[0]);
  // Solve M y = e_0 where M is the multiplication-by-*this matrix in the
  // power basis. 16x16 rational Gaussian elimination.
  std::array<std::array<mpq_class, 17>, 16> m{};
  Cyc48 col(mpq_class(1));
  for (int j = 0; j < 16; ++j) {
    Cyc48 prod = *this * col;
    for (int i = 0; i < 16; ++i) m[i][j] = prod.c_[i];
    col = col.mul_x();
  }
  m[0][16] = 1;
  for (int p = 0; p < 16; ++p) {
    int pivot = -1;
    for (int r = p; r < 16; ++r)
      if (m[r][p] != 0) {
        pivot = r;
        break;
      }
    if (pivot < 0) throw std::domain_error("Cyc48: singular inverse system");
    std::swap(m[p], m[pivot]);
    mpq_class inv = mpq_class(1) / m[p][p];
    for (int col2 = p; col2 <= 16; ++col2) m[p][col2] *= inv;
    for (int r = 0; r < 16; ++r) {
      if (r == p || m[r][p] == 0) continue;
      mpq_class f = m[r][p];
      for (int col2 = p; col2 <= 16; ++col2) m[r][col2] -= f * m[p][col2];
    }
  }
  Cyc48 y;
  for (int i = 0; i < 16; ++i) y.c_[i] = m[i][16];
  return y;
}

std::complex<double> Cyc48::to_complex() const {
  std::complex<double> z = 0.0;
  for (int i = 0; i < 16; ++i) {
    if (c_[i] == 0) continue;
    double angle = 2.0 * std::numbers::pi * i / 48.0;
    z += c_[i].get_d() * std::complex<double>(std::cos(angle), std::sin(angle));
  }
  return z;
}

std::string Cyc48::to_string() const {
  if (is_rational()) return c_[0].get_str();
  std::ostringstream os;
  bool first = true;
  for (int i = 0; i < 16; ++i) {
    if (c_[i] == 0) continue;
    if (!first) os << " + ";
    os << "(" << c_[i].get_str() << ")";
    if (i > 0) os << "*z^" << i;
    first = false;
  }
  if (first) os << "0";
  return os.str();
}

}  // namespace eftlab
