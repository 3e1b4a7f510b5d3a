#include "eftlab/qseries.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <nlohmann/json.hpp>

namespace eftlab {

using json = nlohmann::json;

Ring ring_join(Ring a, Ring b) { return a > b ? a : b; }

std::string ring_name(Ring r) {
  switch (r) {
    case Ring::Int:
      return "int";
    case Ring::Rat:
      return "rat";
    case Ring::Cyc:
      return "cyc48";
  }
  return "?";
}

int effective_thread_count() {
  int n = 1;
#ifdef _OPENMP
  n = omp_get_max_threads();
#endif
  if (const char* env = std::getenv("EFTLAB_THREADS")) {
    int cap = std::atoi(env);
    if (cap > 0 && cap < n) n = cap;
  }
  return n;
}

// ---------------------------------------------------------------------------
// Coeff

Ring Coeff::ring() const {
  if (std::holds_alternative<mpz_class>(v_)) return Ring::Int;
  if (std::holds_alternative<mpq_class>(v_)) return Ring::Rat;
  return Ring::Cyc;
}

bool Coeff::is_zero() const {
  switch (ring()) {
    case Ring::Int:
      return std::get<mpz_class>(v_) == 0;
    case Ring::Rat:
      return std::get<mpq_class>(v_) == 0;
    case Ring::Cyc:
      return std::get<Cyc48>(v_).is_zero();
  }
  return true;
}

bool Coeff::is_integer() const {
  switch (ring()) {
    case Ring::Int:
      return true;
    case Ring::Rat:
      return std::get<mpq_class>(v_).get_den() == 1;
    case Ring::Cyc:
      return std::get<Cyc48>(v_).is_integer();
  }
  return false;
}

bool Coeff::is_nonnegative_integer() const {
  if (!is_integer()) return false;
  return as_rational() >= 0;
}

Coeff Coeff::promoted(Ring target) const {
  if (target < ring())
    throw std::invalid_argument("Coeff: cannot demote ring");
  if (target == ring()) return *this;
  if (target == Ring::Rat) return Coeff(mpq_class(std::get<mpz_class>(v_)));
  // target == Cyc
  return Coeff(Cyc48(as_rational()));
}

mpq_class Coeff::as_rational() const {
  switch (ring()) {
    case Ring::Int:
      return mpq_class(std::get<mpz_class>(v_));
    case Ring::Rat:
      return std::get<mpq_class>(v_);
    case Ring::Cyc: {
      const Cyc48& c = std::get<Cyc48>(v_);
      if (!c.is_rational())
        throw std::domain_error("Coeff: non-rational cyclotomic");
      return c.coeff(0);
    }
  }
  return 0;
}

const Cyc48& Coeff::cyc() const { return std::get<Cyc48>(v_); }

namespace {
template <typename F>
Coeff binop(const Coeff& a, const Coeff& b, F f) {
  Ring r = ring_join(a.ring(), b.ring());
  Coeff pa = a.promoted(r), pb = b.promoted(r);
  switch (r) {
    case Ring::Int:
      return Coeff(mpz_class(f(pa.as_rational(), pb.as_rational()).get_num()));
    case Ring::Rat:
      return Coeff(f(pa.as_rational(), pb.as_rational()));
    case Ring::Cyc:
      break;
  }
  return Coeff();  // handled by callers for Cyc
}
}  // namespace

Coeff Coeff::operator+(const Coeff& o) const {
  Ring r = ring_join(ring(), o.ring());
  if (r == Ring::Cyc) return Coeff(promoted(r).cyc() + o.promoted(r).cyc());
  return binop(*this, o, [](const mpq_class& x, const mpq_class& y) { return mpq_class(x + y); });
}

Coeff Coeff::operator-(const Coeff& o) const {
  Ring r = ring_join(ring(), o.ring());
  if (r == Ring::Cyc) return Coeff(promoted(r).cyc() - o.promoted(r).cyc());
  return binop(*this, o, [](const mpq_class& x, const mpq_class& y) { return mpq_class(x - y); });
}

Coeff Coeff::operator-() const {
  switch (ring()) {
    case Ring::Int:
      return Coeff(mpz_class(-std::get<mpz_class>(v_)));
    case Ring::Rat:
      return Coeff(mpq_class(-std::get<mpq_class>(v_)));
    case Ring::Cyc:
      return Coeff(-std::get<Cyc48>(v_));
  }
  return Coeff();
}

Coeff Coeff::operator*(const Coeff& o) const {
  Ring r = ring_join(ring(), o.ring());
  if (r == Ring::Cyc) return Coeff(promoted(r).cyc() * o.promoted(r).cyc());
  if (r == Ring::Int)
    return Coeff(mpz_class(std::get<mpz_class>(v_) * std::get<mpz_class>(o.v_)));
  return Coeff(mpq_class(as_rational() * o.as_rational()));
}

bool Coeff::operator==(const Coeff& o) const {
  Ring r = ring_join(ring(), o.ring());
  if (r == Ring::Cyc) return promoted(r).cyc() == o.promoted(r).cyc();
  return as_rational() == o.as_rational();
}

Coeff Coeff::inverse() const {
  if (is_zero()) throw std::domain_error("Coeff: zero is not a unit");
  switch (ring()) {
    case Ring::Int: {
      const mpz_class& z = std::get<mpz_class>(v_);
      if (z != 1 && z != -1)
        throw std::domain_error("Coeff: integer is not a unit");
      return *this;
    }
    case Ring::Rat:
      return Coeff(mpq_class(1) / std::get<mpq_class>(v_));
    case Ring::Cyc:
      return Coeff(std::get<Cyc48>(v_).inverse());
  }
  return Coeff();
}

std::complex<double> Coeff::to_complex() const {
  switch (ring()) {
    case Ring::Int:
      return {std::get<mpz_class>(v_).get_d(), 0.0};
    case Ring::Rat:
      return {std::get<mpq_class>(v_).get_d(), 0.0};
    case Ring::Cyc:
      return std::get<Cyc48>(v_).to_complex();
  }
  return 0.0;
}

std::string Coeff::to_string() const {
  switch (ring()) {
    case Ring::Int:
      return std::get<mpz_class>(v_).get_str();
    case Ring::Rat:
      return std::get<mpq_class>(v_).get_str();
    case Ring::Cyc:
      return std::get<Cyc48>(v_).to_string();
  }
  return "0";
}

// ---------------------------------------------------------------------------
// QSeries

namespace {

// GMP comparisons are undefined on non-canonical rationals, so every
// exponent built as num/den must be reduced before use.
mpq_class frac(long num, long den) {
  mpq_class r(num, den);
  r.canonicalize();
  return r;
}

}  // namespace

QSeries::QSeries(long denom, mpq_class prec, Ring ring)
    : denom_(denom), prec_(std::move(prec)), ring_(ring) {
  if (denom_ <= 0) throw std::invalid_argument("QSeries: denom must be positive");
}

QSeries QSeries::zero(long denom, mpq_class prec, Ring ring) {
  return QSeries(denom, std::move(prec), ring);
}

QSeries QSeries::one(mpq_class prec) {
  QSeries s(1, std::move(prec));
  s.set_term(0, Coeff::from_long(1));
  return s;
}

QSeries QSeries::monomial(Coeff c, long num, long den, mpq_class prec) {
  if (den <= 0) throw std::invalid_argument("QSeries: monomial denominator");
  long g = std::gcd(std::abs(num), den);
  if (num == 0) g = den;
  QSeries s(den / g, std::move(prec), c.ring());
  s.set_term(num / g, std::move(c));
  return s;
}

void QSeries::set_term(long k, Coeff c) {
  if (frac(k, denom_) >= prec_)
    throw std::invalid_argument("QSeries: term at or beyond prec");
  ring_ = ring_join(ring_, c.ring());
  if (c.is_zero())
    terms_.erase(k);
  else
    terms_[k] = std::move(c);
}

Coeff QSeries::coeff_at(const mpq_class& exponent) const {
  mpq_class scaled = exponent * denom_;
  if (scaled.get_den() != 1) return Coeff();
  auto it = terms_.find(scaled.get_num().get_si());
  return it == terms_.end() ? Coeff() : it->second;
}

mpq_class QSeries::order() const {
  if (terms_.empty()) return prec_;
  mpq_class r(terms_.begin()->first, denom_);
  r.canonicalize();
  return r;
}

QSeries QSeries::with_denom(long new_denom) const {
  if (new_denom % denom_ != 0)
    throw std::invalid_argument("QSeries: new denom must be a multiple");
  long f = new_denom / denom_;
  QSeries r(new_denom, prec_, ring_);
  for (const auto& [k, c] : terms_) r.terms_[k * f] = c;
  return r;
}

QSeries QSeries::truncated(const mpq_class& new_prec) const {
  QSeries r(denom_, std::min(prec_, new_prec), ring_);
  for (const auto& [k, c] : terms_)
    if (frac(k, denom_) < r.prec_) r.terms_[k] = c;
  return r;
}

QSeries QSeries::promoted(Ring target) const {
  QSeries r(denom_, prec_, target);
  for (const auto& [k, c] : terms_) r.terms_[k] = c.promoted(target);
  return r;
}

namespace {
long lcm_long(long a, long b) { return a / std::gcd(a, b) * b; }
}  // namespace

QSeries QSeries::operator+(const QSeries& o) const { return qs_add(*this, o); }

QSeries QSeries::operator-(const QSeries& o) const { return qs_add(*this, -o); }

QSeries QSeries::operator-() const {
  QSeries r(denom_, prec_, ring_);
  for (const auto& [k, c] : terms_) r.terms_[k] = -c;
  return r;
}

QSeries QSeries::operator*(const QSeries& o) const { return qs_mul(*this, o); }

QSeries QSeries::pow(unsigned long n) const {
  QSeries acc = QSeries::one(prec_);
  QSeries base = *this;
  while (n > 0) {
    if (n & 1) acc = qs_mul(acc, base);
    n >>= 1;
    if (n) base = qs_mul(base, base);
  }
  return acc;
}

QSeries QSeries::scaled(const Coeff& c) const {
  QSeries r(denom_, prec_, ring_join(ring_, c.ring()));
  if (c.is_zero()) return r;
  for (const auto& [k, co] : terms_) {
    Coeff p = co * c;
    if (!p.is_zero()) r.terms_[k] = std::move(p);
  }
  return r;
}

QSeries QSeries::shifted(long num, long den) const {
  if (den <= 0) throw std::invalid_argument("QSeries: shift denominator");
  long nd = lcm_long(denom_, den);
  QSeries scaledUp = with_denom(nd);
  long kshift = num * (nd / den);
  QSeries r(nd, prec_ + frac(num, den), ring_);
  for (const auto& [k, c] : scaledUp.terms_) r.terms_[k + kshift] = c;
  return r;
}

QSeries QSeries::divided_exact(const mpz_class& d) const {
  if (d == 0) throw std::domain_error("QSeries: division by zero");
  QSeries r(denom_, prec_, ring_);
  for (const auto& [k, c] : terms_) {
    if (c.ring() == Ring::Int) {
      mpz_class num = c.as_rational().get_num();
      if (num % d != 0)
        throw std::domain_error("QSeries: inexact integer division at k=" +
                                std::to_string(k));
      r.terms_[k] = Coeff(mpz_class(num / d));
    } else {
      r.terms_[k] = c * Coeff(mpq_class(1, 1) / mpq_class(d));
    }
  }
  return r;
}

bool QSeries::operator==(const QSeries& o) const {
  long nd = lcm_long(denom_, o.denom_);
  QSeries a = with_denom(nd), b = o.with_denom(nd);
  mpq_class p = std::min(prec_, o.prec_);
  a = a.truncated(p);
  b = b.truncated(p);
  if (a.terms_.size() != b.terms_.size()) return false;
  for (const auto& [k, c] : a.terms_) {
    auto it = b.terms_.find(k);
    if (it == b.terms_.end() || !(it->second == c)) return false;
  }
  return true;
}

std::complex<double> QSeries::eval_at_tau(std::complex<double> tau) const {
  const std::complex<double> twopii(0.0, 2.0 * std::numbers::pi);
  std::complex<double> sum = 0.0;
  for (const auto& [k, c] : terms_) {
    std::complex<double> expo =
        std::exp(twopii * tau * (static_cast<double>(k) / denom_));
    sum += c.to_complex() * expo;
  }
  return sum;
}

QSeries qs_add(const QSeries& a, const QSeries& b) {
  long nd = std::lcm(a.denom(), b.denom());
  QSeries pa = a.with_denom(nd), pb = b.with_denom(nd);
  QSeries r(nd, std::min(a.prec(), b.prec()), ring_join(a.ring(), b.ring()));
  for (const auto& [k, c] : pa.terms())
    if (frac(k, nd) < r.prec()) r.set_term(k, c);
  for (const auto& [k, c] : pb.terms()) {
    if (frac(k, nd) >= r.prec()) continue;
    Coeff sum = r.coeff_at(frac(k, nd)) + c;
    r.set_term(k, std::move(sum));
  }
  return r;
}

namespace {

mpq_class mul_result_prec(const QSeries& a, const QSeries& b) {
  // min(prec) per the contract, sharpened so that unknown tails can never
  // leak into a reported term when an operand has a pole.
  mpq_class p = std::min(a.prec(), b.prec());
  if (!a.is_zero()) p = std::min(p, mpq_class(b.prec() + a.order()));
  if (!b.is_zero()) p = std::min(p, mpq_class(a.prec() + b.order()));
  return p;
}

struct FlatTerm {
  long k;
  const Coeff* c;
};

QSeries mul_impl(const QSeries& a, const QSeries& b, bool parallel) {
  long nd = std::lcm(a.denom(), b.denom());
  QSeries pa = a.with_denom(nd), pb = b.with_denom(nd);
  QSeries r(nd, mul_result_prec(a, b), ring_join(a.ring(), b.ring()));
  if (pa.terms().empty() || pb.terms().empty()) return r;

  std::vector<FlatTerm> ta, tb;
  ta.reserve(pa.terms().size());
  tb.reserve(pb.terms().size());
  for (const auto& [k, c] : pa.terms()) ta.push_back({k, &c});
  for (const auto& [k, c] : pb.terms()) tb.push_back({k, &c});

  mpq_class bound = r.prec() * nd;  // keys strictly below this
  auto key_ok = [&](long k) { return mpq_class(k) < bound; };

  std::map<long, Coeff> out;
  int nthreads = parallel ? effective_thread_count() : 1;
  if (nthreads <= 1 || ta.size() * tb.size() < 4096) {
    for (const auto& x : ta)
      for (const auto& y : tb) {
        long k = x.k + y.k;
        if (!key_ok(k)) continue;
        Coeff p = (*x.c) * (*y.c);
        auto it = out.find(k);
        if (it == out.end())
          out.emplace(k, std::move(p));
        else
          it->second = it->second + p;
      }
  } else {
    std::vector<std::map<long, Coeff>> partial(nthreads);
#ifdef _OPENMP
#pragma omp parallel for num_threads(nthreads) schedule(static)
#endif
    for (long i = 0; i < static_cast<long>(ta.size()); ++i) {
#ifdef _OPENMP
      auto& local = partial[omp_get_thread_num()];
#else
      auto& local = partial[0];
#endif
      for (const auto& y : tb) {
        long k = ta[i].k + y.k;
        if (!key_ok(k)) continue;
        Coeff p = (*ta[i].c) * (*y.c);
        auto it = local.find(k);
        if (it == local.end())
          local.emplace(k, std::move(p));
        else
          it->second = it->second + p;
      }
    }
    for (auto& local : partial)
      for (auto& [k, c] : local) {
        auto it = out.find(k);
        if (it == out.end())
          out.emplace(k, std::move(c));
        else
          it->second = it->second + c;
      }
  }
  for (auto& [k, c] : out)
    if (!c.is_zero()) r.set_term(k, std::move(c));
  return r;
}

}  // namespace

QSeries qs_mul(const QSeries& a, const QSeries& b) {
  return mul_impl(a, b, true);
}

QSeries qs_mul_serial(const QSeries& a, const QSeries& b) {
  return mul_impl(a, b, false);
}

QSeries qs_inv(const QSeries& a) {
  if (a.is_zero()) throw std::domain_error("qs_inv: zero series");
  auto lead = a.terms().begin();
  Coeff lead_inv = lead->second.inverse();  // throws on non-unit
  mpq_class e0 = a.order();
  // a = c q^{e0} (1 + g); known precision of the inverse is prec - 2 e0.
  mpq_class rprec = a.prec() - 2 * e0;
  QSeries unit = a.shifted(-lead->first, a.denom()).scaled(lead_inv);
  unit = unit.truncated(a.prec() - e0);
  QSeries g = unit - QSeries::one(unit.prec());
  QSeries acc = QSeries::one(unit.prec());
  QSeries term = QSeries::one(unit.prec());
  if (!g.is_zero()) {
    mpq_class gord = g.order();
    if (gord <= 0) throw std::domain_error("qs_inv: non-normalized unit part");
    mpq_class reach = gord;
    while (reach < unit.prec()) {
      term = qs_mul(term, -g);
      acc = acc + term;
      reach += gord;
    }
  }
  QSeries r = acc.scaled(lead_inv).shifted(-lead->first, a.denom());
  return r.truncated(rprec);
}

QSeries qs_scale_exponent(const QSeries& a, const mpq_class& r) {
  if (r <= 0) throw std::invalid_argument("qs_scale_exponent: r must be positive");
  mpz_class p = r.get_num(), q = r.get_den();
  long nd = a.denom() * q.get_si();
  QSeries out(nd, a.prec() * r, a.ring());
  for (const auto& [k, c] : a.terms())
    out.set_term(k * p.get_si(), c);
  // reduce the denominator where possible
  long g = nd;
  for (const auto& [k, c] : out.terms()) g = std::gcd(g, std::abs(k));
  if (g > 1 && !out.terms().empty()) {
    QSeries red(nd / g, out.prec(), out.ring());
    for (const auto& [k, c] : out.terms()) red.set_term(k / g, c);
    return red;
  }
  return out;
}

QSeries t_transform(const QSeries& a) {
  if (48 % a.denom() != 0)
    throw std::invalid_argument("t_transform: denom must divide 48");
  QSeries p = a.with_denom(48).promoted(Ring::Cyc);
  QSeries r(48, p.prec(), Ring::Cyc);
  for (const auto& [k, c] : p.terms()) {
    long kk = ((k % 48) + 48) % 48;
    r.set_term(k, Coeff(c.cyc() * Cyc48::zeta_pow(kk)));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Serialization

std::string QSeries::to_json() const {
  json j;
  j["denom"] = denom_;
  j["prec"] = prec_.get_str();
  j["ring"] = ring_name(ring_);
  json terms = json::array();
  for (const auto& [k, c] : terms_) {
    json entry = json::array();
    entry.push_back(k);
    if (c.ring() == Ring::Cyc && !c.cyc().is_rational()) {
      json arr = json::array();
      for (int i = 0; i < 16; ++i) arr.push_back(c.cyc().coeff(i).get_str());
      entry.push_back(arr);
    } else {
      entry.push_back(c.to_string());
    }
    terms.push_back(entry);
  }
  j["terms"] = std::move(terms);
  return j.dump();
}

QSeries QSeries::from_json(const std::string& text) {
  json j = json::parse(text);
  Ring ring = Ring::Int;
  std::string rn = j.at("ring").get<std::string>();
  if (rn == "rat")
    ring = Ring::Rat;
  else if (rn == "cyc48")
    ring = Ring::Cyc;
  else if (rn != "int")
    throw std::invalid_argument("QSeries: unknown ring tag " + rn);
  QSeries s(j.at("denom").get<long>(), mpq_class(j.at("prec").get<std::string>()),
            ring);
  for (const auto& entry : j.at("terms")) {
    long k = entry.at(0).get<long>();
    Coeff c;
    if (entry.at(1).is_array()) {
      Cyc48 cy;
      for (int i = 0; i < 16; ++i)
        cy.coeff(i) = mpq_class(entry.at(1).at(i).get<std::string>());
      c = Coeff(std::move(cy));
    } else {
      mpq_class q(entry.at(1).get<std::string>());
      c = (ring == Ring::Int) ? Coeff(mpz_class(q.get_num())) : Coeff(std::move(q));
    }
    s.set_term(k, std::move(c));
  }
  if (s.ring_ < ring) s.ring_ = ring;
  return s;
}

std::string QSeries::to_string(int max_terms) const {
  std::ostringstream os;
  int shown = 0;
  for (const auto& [k, c] : terms_) {
    if (shown++ >= max_terms) {
      os << " + ...";
      break;
    }
    if (shown > 1) os << " + ";
    os << "(" << c.to_string() << ")";
    if (k != 0) {
      os << "*q^(" << k;
      if (denom_ != 1) os << "/" << denom_;
      os << ")";
    }
  }
  if (terms_.empty()) os << "0";
  os << " + O(q^" << prec_.get_str() << ")";
  return os.str();
}

}  // namespace eftlab
