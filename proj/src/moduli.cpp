#include "eftlab/moduli.hpp"

#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace eftlab {

using json = nlohmann::json;

GaussQ GaussQ::operator/(const GaussQ& o) const {
  mpq_class n = o.re * o.re + o.im * o.im;
  if (n == 0) throw std::domain_error("GaussQ: division by zero");
  return {(re * o.re + im * o.im) / n, (im * o.re - re * o.im) / n};
}

std::string GaussQ::to_string() const {
  std::ostringstream os;
  os << re.get_str();
  if (im >= 0)
    os << "+" << im.get_str() << "i";
  else
    os << "-" << mpq_class(-im).get_str() << "i";
  return os.str();
}

GaussQ GaussQ::parse(const std::string& s) {
  std::string t;
  for (char ch : s)
    if (!std::isspace(static_cast<unsigned char>(ch))) t += ch;
  if (t.empty()) throw std::invalid_argument("GaussQ: empty string");
  // split at the last top-level '+'/'-' that is not a leading sign or part
  // of a denominator
  size_t split = std::string::npos;
  for (size_t i = 1; i < t.size(); ++i)
    if ((t[i] == '+' || t[i] == '-') && t[i - 1] != '/' && t[i - 1] != '+' &&
        t[i - 1] != '-')
      split = i;
  bool has_i = t.back() == 'i';
  if (!has_i) return {mpq_class(t), 0};
  std::string re_part, im_part;
  if (split == std::string::npos) {
    re_part = "0";
    im_part = t.substr(0, t.size() - 1);
  } else {
    re_part = t.substr(0, split);
    im_part = t.substr(split, t.size() - split - 1);
  }
  if (im_part.empty() || im_part == "+") im_part = "1";
  if (im_part == "-") im_part = "-1";
  if (im_part.size() > 1 && im_part[0] == '+') im_part.erase(0, 1);
  mpq_class re(re_part), im(im_part);
  re.canonicalize();
  im.canonicalize();
  return {re, im};
}

SL2Z::SL2Z(mpz_class a_, mpz_class b_, mpz_class c_, mpz_class d_)
    : a(std::move(a_)), b(std::move(b_)), c(std::move(c_)), d(std::move(d_)) {
  if (a * d - b * c != 1)
    throw std::invalid_argument("SL2Z: determinant must be 1");
}

SL2Z SL2Z::operator*(const SL2Z& o) const {
  return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c,
          c * o.b + d * o.d};
}

PointedTorus::PointedTorus(double l, GaussQ t) : ell(l), tau(std::move(t)) {
  if (!(ell > 0)) throw std::invalid_argument("PointedTorus: ell must be > 0");
  if (tau.im <= 0)
    throw std::invalid_argument("PointedTorus: tau must be in the upper half-plane");
}

std::string SpinStructure::name() const {
  std::string n;
  n += (s1 == 0 ? '+' : '-');
  n += (s2 == 0 ? '+' : '-');
  return n;
}

SpinStructure SpinStructure::from_name(const std::string& n) {
  if (n.size() != 2 || (n[0] != '+' && n[0] != '-') || (n[1] != '+' && n[1] != '-'))
    throw std::invalid_argument("SpinStructure: expected one of ++, +-, -+, --");
  return {n[0] == '-' ? 1 : 0, n[1] == '-' ? 1 : 0};
}

std::array<SpinStructure, 4> SpinStructure::all() {
  return {SpinStructure{0, 0}, SpinStructure{0, 1}, SpinStructure{1, 0},
          SpinStructure{1, 1}};
}

GaussQ act_tau(const SL2Z& A, const GaussQ& tau) {
  GaussQ num = GaussQ(mpq_class(A.a), 0) * tau + GaussQ(mpq_class(A.b), 0);
  GaussQ den = GaussQ(mpq_class(A.c), 0) * tau + GaussQ(mpq_class(A.d), 0);
  return num / den;
}

PointedTorus act_torus(const SL2Z& A, const PointedTorus& t) {
  std::complex<double> ctd =
      mpq_class(A.c).get_d() * t.tau.to_complex() + mpq_class(A.d).get_d();
  return PointedTorus(t.ell * std::abs(ctd), act_tau(A, t.tau));
}

SpinStructure act_spin(const SL2Z& A, const SpinStructure& s) {
  auto mod2 = [](const mpz_class& z) {
    return static_cast<int>(mpz_class(((z % 2) + 2) % 2).get_si());
  };
  return {(mod2(A.a) * s.s1 + mod2(A.b) * s.s2) % 2,
          (mod2(A.c) * s.s1 + mod2(A.d) * s.s2) % 2};
}

std::vector<std::vector<SpinStructure>> spin_orbits() {
  std::vector<std::vector<SpinStructure>> orbits;
  std::set<int> seen;
  for (const auto& s : SpinStructure::all()) {
    if (seen.count(s.index())) continue;
    std::vector<SpinStructure> orbit{s};
    std::set<int> members{s.index()};
    for (size_t i = 0; i < orbit.size(); ++i) {
      for (const SL2Z& g : {SL2Z::S(), SL2Z::T()}) {
        SpinStructure next = act_spin(g, orbit[i]);
        if (!members.count(next.index())) {
          members.insert(next.index());
          orbit.push_back(next);
        }
      }
    }
    for (int m : members) seen.insert(m);
    orbits.push_back(std::move(orbit));
  }
  return orbits;
}

bool in_gamma0_2(const SL2Z& A) { return A.c % 2 == 0; }

bool stabilizes_minus_plus(const SL2Z& A) {
  SpinStructure mp{1, 0};
  return act_spin(A, mp) == mp;
}

std::vector<PointedTorus> default_equivariance_samples() {
  return {PointedTorus(1.0, GaussQ(mpq_class(1, 10), mpq_class(6, 5))),
          PointedTorus(1.0, GaussQ(mpq_class(-3, 10), mpq_class(9, 10))),
          PointedTorus(1.0, GaussQ(mpq_class(9, 20), mpq_class(2)))};
}

EquivarianceReport check_section_equivariance(const SectorSection& sec,
                                              const SL2Z& A,
                                              const std::vector<PointedTorus>& samples,
                                              double tol) {
  EquivarianceReport report;
  {
    std::ostringstream os;
    os << "[" << A.a.get_str() << "," << A.b.get_str() << ";" << A.c.get_str()
       << "," << A.d.get_str() << "]";
    report.generator = os.str();
  }
  const double min_im = 0.45;
  for (const auto& s : SpinStructure::all()) {
    SpinStructure sp = act_spin(A, s);
    mpq_class weight = (s.index() == 0) ? sec.weight : mpq_class(0);
    EquivarianceEntry entry;
    entry.sector = s.name();
    for (const auto& sample : samples) {
      GaussQ tau_exact = sample.tau;
      GaussQ atau_exact = act_tau(A, tau_exact);
      std::complex<double> tau = tau_exact.to_complex();
      std::complex<double> atau = atau_exact.to_complex();
      if (tau.imag() < min_im || atau.imag() < min_im)
        throw std::domain_error(
            "check_section_equivariance: |q| too close to 1 for the series "
            "truncation; pick samples with larger im(tau)");
      std::complex<double> lhs = sec.sector[sp.index()].eval_at_tau(atau);
      std::complex<double> ctd =
          mpq_class(A.c).get_d() * tau + mpq_class(A.d).get_d();
      std::complex<double> cocycle =
          std::exp(weight.get_d() * std::log(ctd));
      std::complex<double> rhs = cocycle * sec.sector[s.index()].eval_at_tau(tau);
      double scale = std::max(1.0, std::abs(rhs));
      double dev = std::abs(lhs - rhs) / scale;
      entry.deviation = std::max(entry.deviation, dev);
    }
    entry.pass = entry.deviation <= tol;
    // T admits an exact series-level check when denominators divide 48.
    if (A == SL2Z::T() && 48 % sec.sector[s.index()].denom() == 0 &&
        48 % sec.sector[sp.index()].denom() == 0) {
      entry.exact = true;
      bool ok = t_transform(sec.sector[sp.index()]) ==
                sec.sector[s.index()].promoted(Ring::Cyc).with_denom(48);
      entry.pass = entry.pass && ok;
      if (!ok && entry.deviation == 0.0) entry.deviation = 1.0;
    }
    report.max_deviation = std::max(report.max_deviation, entry.deviation);
    report.pass = report.pass && entry.pass;
    report.entries.push_back(std::move(entry));
  }
  return report;
}

std::string EquivarianceReport::to_json() const {
  json j;
  j["check"] = "section-equivariance";
  j["generator"] = generator;
  j["max_deviation"] = max_deviation;
  j["status"] = pass ? "pass" : "fail";
  json arr = json::array();
  for (const auto& e : entries) {
    json je;
    je["sector"] = e.sector;
    je["deviation"] = e.deviation;
    je["exact"] = e.exact;
    je["status"] = e.pass ? "pass" : "fail";
    arr.push_back(je);
  }
  j["sectors"] = std::move(arr);
  return j.dump();
}

}  // namespace eftlab
