#include "eftlab/modforms.hpp"

#include <stdexcept>

namespace eftlab {

mpz_class sigma(unsigned k, unsigned long n) {
  if (n == 0) throw std::invalid_argument("sigma: n must be >= 1");
  mpz_class sum = 0;
  for (unsigned long d = 1; d * d <= n; ++d) {
    if (n % d != 0) continue;
    mpz_class dk, ek;
    mpz_ui_pow_ui(dk.get_mpz_t(), d, k);
    sum += dk;
    unsigned long e = n / d;
    if (e != d) {
      mpz_ui_pow_ui(ek.get_mpz_t(), e, k);
      sum += ek;
    }
  }
  return sum;
}

namespace {
QSeries eisenstein(const mpq_class& prec, unsigned k, long factor) {
  if (prec < 1) throw std::invalid_argument("eisenstein: prec must be >= 1");
  QSeries s(1, prec);
  s.set_term(0, Coeff::from_long(1));
  for (long n = 1; mpq_class(n) < prec; ++n)
    s.set_term(n, Coeff(mpz_class(factor * sigma(k, n))));
  return s;
}
}  // namespace

QSeries c4(const mpq_class& prec) { return eisenstein(prec, 3, 240); }

QSeries c6(const mpq_class& prec) { return eisenstein(prec, 5, -504); }

QSeries eta(const mpq_class& prec) {
  // q^{1/24} prod (1 - q^m); factors beyond prec cannot alter the window.
  QSeries prod = QSeries::one(prec);
  for (long m = 1; mpq_class(m) < prec; ++m) {
    QSeries factor =
        QSeries::one(prec) + QSeries::monomial(Coeff::from_long(-1), m, 1, prec);
    prod = qs_mul(prod, factor);
  }
  return prod.shifted(1, 24).truncated(prec);
}

QSeries delta(const mpq_class& prec) {
  mpq_class work = prec;
  QSeries e4 = c4(work), e6 = c6(work);
  QSeries num = e4.pow(3) - e6.pow(2);
  QSeries d = num.divided_exact(1728);  // throws if not an integer series
  if (d.order() != 1)
    throw std::logic_error("delta: series does not start at q^1");
  // Independent route: the eta product. Capped so repeated calls stay cheap.
  mpq_class check_prec = std::min(work, mpq_class(30));
  QSeries via_eta = eta(check_prec).pow(24);
  if (!(d.truncated(check_prec) == via_eta))
    throw std::logic_error("delta: Eisenstein and eta routes disagree");
  return d;
}

QSeries delta_inv(const mpq_class& prec) {
  if (prec < 2) throw std::invalid_argument("delta_inv: prec must be >= 2");
  // delta has order 1, so inversion costs two orders of precision.
  return qs_inv(delta(prec + 2));
}

QSeries j_function(const mpq_class& prec) {
  if (prec < 2) throw std::invalid_argument("j_function: prec must be >= 2");
  mpq_class work = prec + 3;
  QSeries j = qs_mul(c4(work).pow(3), qs_inv(delta(work)));
  return j.truncated(prec);
}

QSeries eval_mf_spec(const ModularFunctionSpec& spec, const mpq_class& prec) {
  bool all_zero = true;
  for (const auto& c : spec.j_poly)
    if (c != 0) all_zero = false;
  if (all_zero || spec.j_poly.empty()) return QSeries::zero(1, prec);
  long d = static_cast<long>(spec.j_poly.size()) - 1;
  // j^n has a pole of order n; work at enough precision for the top power.
  mpq_class work = prec + 3 * d + 3;
  QSeries jq = j_function(work);
  QSeries acc = QSeries::zero(1, work);
  QSeries jpow = QSeries::one(work);
  for (size_t n = 0; n < spec.j_poly.size(); ++n) {
    if (spec.j_poly[n] != 0) acc = acc + jpow.scaled(Coeff(spec.j_poly[n]));
    if (n + 1 < spec.j_poly.size()) jpow = qs_mul(jpow, jq);
  }
  return acc.truncated(prec);
}

}  // namespace eftlab
