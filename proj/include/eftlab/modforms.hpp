#ifndef EFTLAB_MODFORMS_HPP
#define EFTLAB_MODFORMS_HPP

#include <vector>

#include "eftlab/qseries.hpp"

namespace eftlab {

// f = sum_n c_n j^n as an integer linear combination of powers of j.
struct ModularFunctionSpec {
  std::vector<mpz_class> j_poly;  // c_0, c_1, ..., c_d
};

// Divisor power sum: sum of d^k over divisors d of n.
mpz_class sigma(unsigned k, unsigned long n);

// Weight-4 and weight-6 Eisenstein forms, normalized with constant term 1.
QSeries c4(const mpq_class& prec);
QSeries c6(const mpq_class& prec);

// delta = (c4^3 - c6^2)/1728 (exact integer series, starting at q);
// computed from the Eisenstein route and cross-checked against the eta
// product. A mismatch throws std::logic_error.
QSeries delta(const mpq_class& prec);
QSeries delta_inv(const mpq_class& prec);

// j = c4^3 * delta^{-1} (n = 1 normalization).
QSeries j_function(const mpq_class& prec);

QSeries eval_mf_spec(const ModularFunctionSpec& spec, const mpq_class& prec);

// Dedekind eta: q^{1/24} prod_{m>=1} (1 - q^m), denom 24.
QSeries eta(const mpq_class& prec);

}  // namespace eftlab

#endif
