#ifndef EFTLAB_CLIFFORD_HPP
#define EFTLAB_CLIFFORD_HPP

#include <array>
#include <map>
#include <string>
#include <vector>

#include "eftlab/moduli.hpp"
#include "eftlab/qseries.hpp"

namespace eftlab {

// Exact polynomial in the formal symbol t = q^m.
struct QmPoly {
  std::map<long, mpq_class> c;

  static QmPoly scalar(mpq_class v);
  static QmPoly qm();  // the symbol itself

  QmPoly operator+(const QmPoly& o) const;
  QmPoly operator-(const QmPoly& o) const;
  QmPoly operator*(const QmPoly& o) const;
  bool operator==(const QmPoly& o) const;
  QmPoly scaled(const mpq_class& v) const;
  QmPoly substitute_one() const;  // formal q^m := 1
  std::string to_string() const;
};

using Mat2 = std::array<std::array<QmPoly, 2>, 2>;

Mat2 mat2_mul(const Mat2& a, const Mat2& b);
Mat2 mat2_add(const Mat2& a, const Mat2& b);
Mat2 mat2_identity();

// Convention parameters for Cl(H(C_m)) acting on the 2-dimensional module
// with basis {v0, w0}: sign of the relation xy + yx = sign.2w(x,y), which of
// e/f annihilates the vacuum, and the vacuum parity.
struct CliffordConvention {
  int sign = -1;          // +1 or -1
  bool vacuum_e = true;   // e.v0 = 0 (else f.v0 = 0)
  int v0_parity = 1;      // 0 even, 1 odd
};

// Representation matrices of e and f under the convention (w0 = f.v0 or e.v0).
Mat2 e_matrix(const CliffordConvention& cv);
Mat2 f_matrix(const CliffordConvention& cv);

// b = 1 + (1 - q^m) ef/2 under the convention.
Mat2 b_matrix(const CliffordConvention& cv);

QmPoly mat2_supertrace(const Mat2& m, int v0_parity);
QmPoly mat2_trace(const Mat2& m);

struct OracleEntry {
  CliffordConvention cv;
  bool relations_ok = false;  // e^2 = f^2 = 0, ef + fe = sign.2
  bool passes = false;        // str(b) = 1 - q^m and tr(b) = 1 + q^m
};

// All 8 parameterizations. Two of them pass; they present the same graded
// module in the two bases (w0 = f.v0 vs v0' = f.v0), so there is a unique
// passing isomorphism class. The adopted convention is the default
// CliffordConvention.
std::vector<OracleEntry> convention_oracle();

// The adopted 2x2 graded b_m: diagonal {q^m, 1}, v0 odd. m is carried for
// reporting; the matrix is in the formal symbol q^m.
struct BOperator {
  mpq_class m;
  Mat2 mat;
  int v0_parity = 1;

  QmPoly supertrace() const;  // 1 - q^m
  QmPoly trace() const;       // 1 + q^m
};

BOperator b_operator(const mpq_class& m);  // requires m > 0

struct SectorSeries {
  SpinStructure spin;
  long n = 0;        // even degree
  mpq_class cutoff;  // half-integer M
  QSeries series;    // in q^{1/48}
};

// Z_P row for (s1, s2): s2 picks integer vs half-integer modes and the
// prefactor q^{n/24} resp. q^{-n/48} (-+ also carries 2^{n/2}); s1 picks
// str (1 - q^m) vs tr (1 + q^m) per factor. Exact to prec; requires
// prec <= M and n even.
SectorSeries sector_series(const SpinStructure& s, long n,
                           const mpq_class& cutoff, const mpq_class& prec);

struct PeriodicityCertificate {
  long n = 0;
  struct Entry {
    std::string generator;  // "T" or "S"
    std::string sector;     // source sector
    std::string target;     // expected image sector
    bool exact = false;
    bool pass = false;
    std::string ratio;      // exact failure ratio for T-checks
    double deviation = 0.0; // numeric S-checks
  };
  std::vector<Entry> entries;
  bool pass = true;
  std::string to_json() const;
};

// Exact T-checks via t_transform (T fixes ++ and -+, swaps +- and --);
// numeric S-checks at the sample points within tol, using the sector swap
// (-,+) <-> (+,-) and the weight n/2 factor on ++.
PeriodicityCertificate periodicity_certificate(long n, const mpq_class& cutoff,
                                               const mpq_class& prec,
                                               double tol = 1e-6);

}  // namespace eftlab

#endif
