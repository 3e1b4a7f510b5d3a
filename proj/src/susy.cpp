#include "eftlab/susy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace eftlab {

using json = nlohmann::json;

namespace {

// sign of merging two ascending monomials: count transpositions needed to
// interleave mask b past the generators of a above each element
int merge_sign(unsigned a, unsigned b) {
  int swaps = 0;
  for (unsigned bit = b; bit; bit &= bit - 1) {
    unsigned j = static_cast<unsigned>(std::countr_zero(bit));
    // generators of a strictly above j must hop over theta_j
    swaps += std::popcount(a >> (j + 1));
  }
  return swaps % 2 == 0 ? 1 : -1;
}

GaussQ gneg(const GaussQ& v) { return GaussQ(-v.re, -v.im); }

}  // namespace

GrassmannElt GrassmannElt::scalar(GaussQ v) {
  GrassmannElt e;
  if (!(v == GaussQ(0, 0))) e.c[0] = std::move(v);
  return e;
}

GrassmannElt GrassmannElt::theta(int i) {
  if (i < 1 || i > 31) throw std::invalid_argument("theta index out of range");
  GrassmannElt e;
  e.c[1u << (i - 1)] = GaussQ(1, 0);
  return e;
}

GrassmannElt GrassmannElt::operator+(const GrassmannElt& o) const {
  GrassmannElt r = *this;
  for (const auto& [m, v] : o.c) {
    auto it = r.c.find(m);
    if (it == r.c.end()) {
      r.c[m] = v;
    } else {
      it->second = it->second + v;
      if (it->second == GaussQ(0, 0)) r.c.erase(it);
    }
  }
  return r;
}

GrassmannElt GrassmannElt::operator-(const GrassmannElt& o) const {
  GrassmannElt neg;
  for (const auto& [m, v] : o.c) neg.c[m] = gneg(v);
  return *this + neg;
}

GrassmannElt GrassmannElt::operator-() const {
  GrassmannElt r;
  for (const auto& [mask, v] : c) r.c[mask] = GaussQ{-v.re, -v.im};
  return r;
}

GrassmannElt GrassmannElt::operator*(const GrassmannElt& o) const {
  GrassmannElt r;
  for (const auto& [ma, va] : c)
    for (const auto& [mb, vb] : o.c) {
      if (ma & mb) continue;  // theta_i^2 = 0
      GaussQ term = va * vb;
      if (merge_sign(ma, mb) < 0) term = gneg(term);
      unsigned m = ma | mb;
      auto it = r.c.find(m);
      if (it == r.c.end())
        r.c[m] = term;
      else {
        it->second = it->second + term;
        if (it->second == GaussQ(0, 0)) r.c.erase(it);
      }
    }
  return r;
}

bool GrassmannElt::operator==(const GrassmannElt& o) const { return c == o.c; }

bool GrassmannElt::is_zero() const { return c.empty(); }

bool GrassmannElt::is_even() const {
  for (const auto& [m, v] : c)
    if (std::popcount(m) % 2 != 0) return false;
  return true;
}

bool GrassmannElt::is_odd() const {
  for (const auto& [m, v] : c)
    if (std::popcount(m) % 2 != 1) return false;
  return true;
}

GaussQ GrassmannElt::body() const {
  auto it = c.find(0);
  return it == c.end() ? GaussQ(0, 0) : it->second;
}

std::string GrassmannElt::to_string() const {
  if (c.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, v] : c) {
    if (!first) os << " + ";
    first = false;
    os << "(" << v.to_string() << ")";
    for (unsigned bit = m; bit; bit &= bit - 1)
      os << "*th" << std::countr_zero(bit) + 1;
  }
  return os.str();
}

SuperPoint::SuperPoint(GrassmannElt t, GrassmannElt tb, GrassmannElt th)
    : tau(std::move(t)), tau_bar(std::move(tb)), theta(std::move(th)) {
  if (!tau.is_even() || !tau_bar.is_even())
    throw std::invalid_argument("tau and tau_bar must be even");
  if (!theta.is_odd() && !theta.is_zero())
    throw std::invalid_argument("theta must be odd");
  GaussQ t0 = tau.body(), tb0 = tau_bar.body();
  if (!(tb0 == GaussQ(t0.re, -t0.im)))
    throw std::invalid_argument("reduced parts of tau, tau_bar must be conjugate");
}

SuperPoint super_mul(const SuperPoint& p1, const SuperPoint& p2) {
  return SuperPoint(p1.tau + p2.tau,
                    p1.tau_bar + p2.tau_bar + p1.theta * p2.theta,
                    p1.theta + p2.theta);
}

std::string BlockModel::to_json() const {
  json j;
  json arr = json::array();
  for (const auto& [k, pq] : blocks) {
    json b;
    b["a"] = k.a;
    b["b"] = k.b.get_str();
    b["even"] = pq.first;
    b["odd"] = pq.second;
    arr.push_back(b);
  }
  j["blocks"] = std::move(arr);
  return j.dump(2);
}

BlockModel BlockModel::from_json(const std::string& text) {
  json j = json::parse(text);
  BlockModel m;
  for (const auto& b : j.at("blocks")) {
    Key k;
    k.a = b.at("a").get<long>();
    k.b = mpq_class(b.at("b").get<std::string>());
    k.b.canonicalize();
    long p = b.at("even").get<long>(), q = b.at("odd").get<long>();
    if (p < 0 || q < 0) throw std::invalid_argument("negative dimension");
    m.blocks[k] = {p, q};
  }
  return m;
}

SemigroupPair build_pair(const BlockModel& m) {
  SemigroupPair sp;
  sp.model = m;
  for (const auto& [k, pq] : m.blocks) {
    if (k.b == 0) {
      sp.has_b0[k] = false;
      sp.b0_sq[k] = 0;  // B0 = 0 solves B0^2 = 0
      continue;
    }
    if (pq.first != pq.second) {
      // no invertible odd map between spaces of different dimension
      sp.obstructions.push_back(k);
      continue;
    }
    sp.has_b0[k] = true;
    sp.b0_sq[k] = k.b;  // offdiag(2 pi i b . I, I) squares to 2 pi i b . Id
  }
  return sp;
}

namespace {

std::complex<double> mu_ab(long a, const mpq_class& b, std::complex<double> tau) {
  const std::complex<double> twopii(0.0, 2.0 * std::numbers::pi);
  return std::exp(twopii * (static_cast<double>(a) * tau -
                            b.get_d() * std::conj(tau)));
}

}  // namespace

RelationReport check_relations(const SemigroupPair& sp,
                               const std::vector<std::complex<double>>& taus,
                               double tol) {
  RelationReport rep;
  for (const auto& [k, pq] : sp.model.blocks) {
    if (std::find(sp.obstructions.begin(), sp.obstructions.end(), k) !=
        sp.obstructions.end())
      continue;
    RelationReport::Entry aa{"AA", k.a, k.b.get_str(), true, false, 0.0};
    RelationReport::Entry ab{"AB", k.a, k.b.get_str(), true, false, 0.0};
    // dense 2x2 representative on C^{1|1}: A = mu.I, B = mu.B0 with
    // B0 = [[0, 2 pi i b],[1, 0]]
    const std::complex<double> twopii(0.0, 2.0 * std::numbers::pi);
    std::complex<double> b0_01 = sp.has_b0.at(k) ? twopii * k.b.get_d()
                                                 : std::complex<double>(0.0);
    std::complex<double> b0_10 = sp.has_b0.at(k) ? 1.0 : 0.0;
    for (size_t i = 0; i + 1 < taus.size(); ++i) {
      std::complex<double> t1 = taus[i], t2 = taus[i + 1];
      std::complex<double> m1 = mu_ab(k.a, k.b, t1), m2 = mu_ab(k.a, k.b, t2);
      std::complex<double> m12 = mu_ab(k.a, k.b, t1 + t2);
      double scale = std::max(1.0, std::abs(m12));
      aa.deviation = std::max(aa.deviation, std::abs(m1 * m2 - m12) / scale);
      // A(t1)B(t2) = B(t1)A(t2) = B(t1+t2), entrywise on the 2x2 model
      for (std::complex<double> e : {b0_01, b0_10}) {
        double es = scale * std::max(1.0, std::abs(e));
        ab.deviation = std::max(ab.deviation, std::abs(m1 * (m2 * e) - m12 * e) / es);
        ab.deviation = std::max(ab.deviation, std::abs((m1 * e) * m2 - m12 * e) / es);
      }
    }
    aa.pass = aa.deviation <= tol;
    ab.pass = ab.deviation <= tol;
    // BB = -dA/dtau_bar: with dmu/dtau_bar = -2 pi i b mu, both sides are
    // mu(t1+t2) times (B0^2 resp. 2 pi i b) — compare the rational multiples
    RelationReport::Entry bb{"BB", k.a, k.b.get_str(), true, true, 0.0};
    bb.pass = sp.b0_sq.at(k) == k.b;
    rep.entries.push_back(aa);
    rep.entries.push_back(ab);
    rep.entries.push_back(bb);
  }
  for (const auto& e : rep.entries) rep.pass = rep.pass && e.pass;
  return rep;
}

std::string RelationReport::to_json() const {
  json j;
  j["check"] = "semigroup-relations";
  j["status"] = pass ? "pass" : "fail";
  json arr = json::array();
  for (const auto& e : entries) {
    json je;
    je["relation"] = e.relation;
    je["a"] = e.a;
    je["b"] = e.b;
    je["status"] = e.pass ? "pass" : "fail";
    je["exact"] = e.exact;
    if (!e.exact) je["deviation"] = e.deviation;
    arr.push_back(je);
  }
  j["entries"] = std::move(arr);
  return j.dump(2);
}

SusyPartition partition_qexp(const BlockModel& m) {
  SusyPartition out;
  long max_a = 0;
  for (const auto& [k, pq] : m.blocks) max_a = std::max(max_a, k.a);
  QSeries s = QSeries::zero(1, mpq_class(max_a + 1));
  out.holomorphic = true;
  for (const auto& [k, pq] : m.blocks) {
    long sdim = pq.first - pq.second;
    if (k.b == 0) {
      if (sdim != 0) {
        mpq_class v = s.coeff_at(mpq_class(k.a)).as_rational() + sdim;
        s.set_term(k.a, Coeff(mpz_class(v.get_num())));
      }
    } else if (sdim != 0) {
      out.holomorphic = false;
      out.residue.push_back({k.a, k.b.get_str(), sdim});
    }
  }
  out.series = std::move(s);
  return out;
}

std::string SusyPartition::to_json() const {
  json j;
  j["series"] = json::parse(series.to_json());
  j["verdict"] = holomorphic ? "holomorphic" : "not supersymmetrizable";
  json arr = json::array();
  for (const auto& r : residue) {
    json jr;
    jr["a"] = r.a;
    jr["b"] = r.b;
    jr["sdim"] = r.sdim;
    arr.push_back(jr);
  }
  j["residue"] = std::move(arr);
  return j.dump(2);
}

std::complex<double> supertrace_a(const BlockModel& m, std::complex<double> tau) {
  std::complex<double> s = 0.0;
  for (const auto& [k, pq] : m.blocks)
    s += static_cast<double>(pq.first - pq.second) * mu_ab(k.a, k.b, tau);
  return s;
}

}  // namespace eftlab
