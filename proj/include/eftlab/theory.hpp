#ifndef EFTLAB_THEORY_HPP
#define EFTLAB_THEORY_HPP

#include <complex>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "eftlab/moduli.hpp"
#include "eftlab/qseries.hpp"

namespace eftlab {

enum class Grading { AllEven, AllOdd };

// Graded dimension data (V, lambda, rho) realizing an integral q-series:
// V = (+) V_k with V_k = C^{a_k}, the circle acting on V_k by q^k.
struct TheoryData {
  long pole = 0;    // N: lowest block is k = -N
  long trunc = 0;   // K: highest block
  std::vector<mpz_class> dims;  // a_k for k = -pole .. trunc
  Grading grading = Grading::AllEven;

  mpz_class dim_at(long k) const;
  long total_dim_capped(long cap_per_block) const;
  std::string to_json() const;
  static TheoryData from_json(const std::string& text);
};

struct SpinTheoryData {
  TheoryData plus_sector, minus_sector;
  bool flip_plus = false;

  std::string to_json() const;
  static SpinTheoryData from_json(const std::string& text);
};

// Rejects series with non-integer exponents or coefficients outside the
// nonnegative integers; the error names the offending exponent.
TheoryData build_from_series(const QSeries& f);

// Sparse vector in the truncated V, keyed by (block k, basis index i).
using BlockVec = std::map<std::pair<long, long>, std::complex<double>>;

// lambda((v_k), (w_k)) = sum <conj(v_k), w_k>: C-bilinear coordinate sum.
std::complex<double> lambda_pair(const TheoryData& th, const BlockVec& v,
                                 const BlockVec& w);

// rho(tau) = sum_k q^k sum_i e_i (x) e_i, presented blockwise: block k
// carries the canonical copairing scaled by q^k.
std::map<long, std::complex<double>> rho_block_scalars(const TheoryData& th,
                                                       std::complex<double> q);

// A(tau) = (id (x) lambda)(rho(tau) (x) id): multiplication by q^k on V_k.
struct AOperator {
  const TheoryData* th;
  std::complex<double> q;

  std::complex<double> block_scalar(long k) const;
  // Dense matrix on the capped/truncated V; throws std::length_error when
  // the total dimension exceeds max_dim (overflow guard).
  std::vector<std::vector<std::complex<double>>> dense(long max_dim) const;
};

AOperator a_operator(const TheoryData& th, std::complex<double> q);

// Exact partition series sum_k a_k q^k on the window [-pole, trunc].
QSeries partition(const TheoryData& th);

// Sector s picks V^{s2}; s1 = + takes the supertrace, s1 = - the trace.
QSeries spin_partition(const SpinTheoryData& sth, const SpinStructure& s);

// Optional dense override of rho used by negative fixtures: entries of an
// explicit rho matrix on the capped space, as exact rationals per (row,col).
struct RhoOverride {
  long dim = 0;
  std::map<std::pair<long, long>, mpq_class> entries;
};

struct ConditionReport {
  std::string condition;  // "a", "b", "c", "d"
  bool pass = false;
  bool exact = false;
  double deviation = 0.0;
  std::string detail;
};

struct VerifyReport {
  std::vector<ConditionReport> conditions;
  bool pass = true;
  std::string to_json() const;
};

// (a) symmetry and (b) gluing are exact; (c) boundary continuity and
// (d) SL2(Z)-equivariance of lambda(rho(tau)) are numeric within tol.
VerifyReport verify_conditions(const TheoryData& th,
                               const std::vector<PointedTorus>& samples,
                               double tol,
                               const std::optional<RhoOverride>& fixture = {});

// The four spin partitions assembled as a weight-0 sector section.
SectorSection spin_section(const SpinTheoryData& sth);

// Per-sector (a)-(c) checks plus S/T equivariance of the spin section.
VerifyReport verify_conditions(const SpinTheoryData& sth,
                               const std::vector<PointedTorus>& samples,
                               double tol);

}  // namespace eftlab

#endif
