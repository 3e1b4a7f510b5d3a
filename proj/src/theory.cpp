#include "eftlab/theory.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace eftlab {

using json = nlohmann::json;

mpz_class TheoryData::dim_at(long k) const {
  if (k < -pole || k > trunc) return 0;
  return dims[static_cast<size_t>(k + pole)];
}

long TheoryData::total_dim_capped(long cap_per_block) const {
  long total = 0;
  for (const auto& d : dims) {
    mpz_class capped = d;
    if (cap_per_block > 0 && capped > cap_per_block) capped = cap_per_block;
    total += capped.get_si();
  }
  return total;
}

std::string TheoryData::to_json() const {
  json j;
  j["pole"] = pole;
  j["trunc"] = trunc;
  json d = json::array();
  for (const auto& a : dims) d.push_back(a.get_str());
  j["dims"] = std::move(d);
  j["grading"] = grading == Grading::AllEven ? "even" : "odd";
  return j.dump();
}

TheoryData TheoryData::from_json(const std::string& text) {
  json j = json::parse(text);
  TheoryData th;
  th.pole = j.at("pole").get<long>();
  th.trunc = j.at("trunc").get<long>();
  for (const auto& e : j.at("dims")) th.dims.emplace_back(e.get<std::string>());
  if (j.contains("grading") && j["grading"] == "odd") th.grading = Grading::AllOdd;
  if (static_cast<long>(th.dims.size()) != th.trunc + th.pole + 1)
    throw std::invalid_argument("TheoryData: dims length mismatch");
  return th;
}

namespace {

json sector_to_json(const TheoryData& th) {
  return json::parse(th.to_json());
}

TheoryData sector_from_json(const json& j) {
  return TheoryData::from_json(j.dump());
}

}  // namespace

std::string SpinTheoryData::to_json() const {
  json j;
  j["pole"] = plus_sector.pole;
  j["trunc"] = plus_sector.trunc;
  json d = json::array();
  for (const auto& a : plus_sector.dims) d.push_back(a.get_str());
  j["dims"] = std::move(d);
  j["sectors"]["plus"] = sector_to_json(plus_sector);
  j["sectors"]["minus"] = sector_to_json(minus_sector);
  j["flip_plus"] = flip_plus;
  return j.dump();
}

SpinTheoryData SpinTheoryData::from_json(const std::string& text) {
  json j = json::parse(text);
  SpinTheoryData sth;
  if (j.contains("sectors")) {
    sth.plus_sector = sector_from_json(j.at("sectors").at("plus"));
    sth.minus_sector = sector_from_json(j.at("sectors").at("minus"));
  } else {
    // plain theory data: both sectors carry the same graded space
    sth.plus_sector = TheoryData::from_json(text);
    sth.minus_sector = sth.plus_sector;
  }
  if (j.contains("flip_plus")) sth.flip_plus = j.at("flip_plus").get<bool>();
  return sth;
}

TheoryData build_from_series(const QSeries& f) {
  TheoryData th;
  mpq_class ord = f.is_zero() ? mpq_class(0) : f.order();
  if (ord.get_den() != 1 && !f.is_zero())
    throw std::invalid_argument("build_from_series: non-integer exponent " +
                                ord.get_str());
  for (const auto& [k, c] : f.terms()) {
    mpq_class expo(k, f.denom());
    expo.canonicalize();
    if (k % f.denom() != 0)
      throw std::invalid_argument("build_from_series: non-integer exponent " +
                                  expo.get_str());
    if (!c.is_nonnegative_integer())
      throw std::invalid_argument(
          "build_from_series: coefficient at exponent " + expo.get_str() +
          " is not a nonnegative integer: " + c.to_string());
  }
  long lowest = f.is_zero() ? 0 : ord.get_num().get_si();
  th.pole = lowest < 0 ? -lowest : 0;
  // the window extends to the last known exponent
  mpq_class top = f.prec() - mpq_class(1, f.denom());
  long highest = static_cast<long>(std::floor(top.get_d()));
  if (highest < -th.pole) highest = -th.pole;
  th.trunc = highest;
  th.dims.assign(static_cast<size_t>(th.trunc + th.pole + 1), 0);
  for (const auto& [k, c] : f.terms())
    th.dims[static_cast<size_t>(k / f.denom() + th.pole)] =
        c.as_rational().get_num();
  return th;
}

std::complex<double> lambda_pair(const TheoryData& th, const BlockVec& v,
                                 const BlockVec& w) {
  std::complex<double> sum = 0.0;
  for (const auto& [key, coeff] : v) {
    if (key.first < -th.pole || key.first > th.trunc) continue;
    auto it = w.find(key);
    if (it != w.end()) sum += coeff * it->second;
  }
  return sum;
}

std::map<long, std::complex<double>> rho_block_scalars(const TheoryData& th,
                                                       std::complex<double> q) {
  std::map<long, std::complex<double>> out;
  for (long k = -th.pole; k <= th.trunc; ++k)
    if (th.dim_at(k) > 0) out[k] = std::pow(q, static_cast<double>(k));
  return out;
}

std::complex<double> AOperator::block_scalar(long k) const {
  return std::pow(q, static_cast<double>(k));
}

std::vector<std::vector<std::complex<double>>> AOperator::dense(long max_dim) const {
  long total = 0;
  for (const auto& d : th->dims) {
    if (!d.fits_slong_p()) throw std::length_error("AOperator: block too large");
    total += d.get_si();
    if (total > max_dim) throw std::length_error("AOperator: dimension overflow");
  }
  std::vector<std::vector<std::complex<double>>> m(
      total, std::vector<std::complex<double>>(total, 0.0));
  long offset = 0;
  for (long k = -th->pole; k <= th->trunc; ++k) {
    long a = th->dim_at(k).get_si();
    for (long i = 0; i < a; ++i) m[offset + i][offset + i] = block_scalar(k);
    offset += a;
  }
  return m;
}

AOperator a_operator(const TheoryData& th, std::complex<double> q) {
  if (std::abs(q) <= 0.0 || std::abs(q) >= 1.0)
    throw std::invalid_argument("a_operator: need 0 < |q| < 1");
  return AOperator{&th, q};
}

QSeries partition(const TheoryData& th) {
  QSeries f(1, mpq_class(th.trunc + 1));
  for (long k = -th.pole; k <= th.trunc; ++k) {
    mpz_class a = th.dim_at(k);
    if (a != 0) f.set_term(k, Coeff(a));
  }
  return f;
}

QSeries spin_partition(const SpinTheoryData& sth, const SpinStructure& s) {
  const TheoryData& th = (s.s2 == 0) ? sth.plus_sector : sth.minus_sector;
  Grading g = th.grading;
  if (s.s2 == 0 && sth.flip_plus)
    g = (g == Grading::AllEven) ? Grading::AllOdd : Grading::AllEven;
  QSeries f = partition(th);
  // supertrace on the +s sectors; trace on the -s sectors
  bool supertrace = (s.s1 == 0);
  if (supertrace && g == Grading::AllOdd) return -f;
  return f;
}

namespace {

// Exact symbolic model of rho on a per-block capped basis: tensor entries
// rho_{(a),(b)} are polynomials in a formal q (exponent -> rational
// coefficient). The cap keeps the basis small; the canonical rho restricted
// to the capped basis is the canonical rho of the capped theory.
constexpr long kConditionCap = 3;

using Idx = std::pair<long, long>;  // (block k, basis index i)
using Poly1 = std::map<long, mpq_class>;

struct SymbolicRho {
  std::map<std::pair<Idx, Idx>, Poly1> entries;
};

std::vector<Idx> capped_basis(const TheoryData& th) {
  std::vector<Idx> basis;
  for (long k = -th.pole; k <= th.trunc; ++k) {
    mpz_class a = th.dim_at(k);
    long cap = a > kConditionCap ? kConditionCap : a.get_si();
    for (long i = 0; i < cap; ++i) basis.push_back({k, i});
  }
  return basis;
}

SymbolicRho canonical_rho(const TheoryData& th,
                          const std::optional<RhoOverride>& fixture) {
  SymbolicRho rho;
  if (fixture) {
    // fixture entries index the capped basis linearly
    auto basis = capped_basis(th);
    for (const auto& [key, val] : fixture->entries) {
      Idx a = basis.at(static_cast<size_t>(key.first));
      Idx b = basis.at(static_cast<size_t>(key.second));
      rho.entries[{a, b}][a.first] = val;
    }
    return rho;
  }
  for (const Idx& a : capped_basis(th)) rho.entries[{a, a}][a.first] = 1;
  return rho;
}

void prune(std::map<std::pair<Idx, Idx>, std::map<std::pair<long, long>, mpq_class>>& m) {
  for (auto it = m.begin(); it != m.end();) {
    for (auto jt = it->second.begin(); jt != it->second.end();)
      jt = (jt->second == 0) ? it->second.erase(jt) : std::next(jt);
    it = it->second.empty() ? m.erase(it) : std::next(it);
  }
}

ConditionReport check_symmetry(const TheoryData& th,
                               const std::optional<RhoOverride>& fixture) {
  ConditionReport r;
  r.condition = "a";
  r.exact = true;
  r.pass = true;
  SymbolicRho rho = canonical_rho(th, fixture);
  for (const auto& [key, poly] : rho.entries) {
    auto itT = rho.entries.find({key.second, key.first});
    Poly1 transposed = (itT == rho.entries.end()) ? Poly1{} : itT->second;
    if (transposed != poly) {
      r.pass = false;
      r.detail = "rho not braiding-invariant at block (" +
                 std::to_string(key.first.first) + "," +
                 std::to_string(key.second.first) + ")";
      return r;
    }
  }
  // lambda(e_a (x) e_b) = delta_ab is symmetric by inspection of the formula;
  // recheck it on the capped basis anyway.
  for (const Idx& a : capped_basis(th))
    for (const Idx& b : capped_basis(th)) {
      BlockVec va{{a, 1.0}}, vb{{b, 1.0}};
      if (lambda_pair(th, va, vb) != lambda_pair(th, vb, va)) {
        r.pass = false;
        r.detail = "lambda asymmetric";
        return r;
      }
    }
  r.detail = "rho and lambda symmetric on the capped basis (exact)";
  return r;
}

ConditionReport check_gluing(const TheoryData& th,
                             const std::optional<RhoOverride>& fixture) {
  ConditionReport r;
  r.condition = "b";
  r.exact = true;
  r.pass = true;
  // lhs_{a,d} = sum_{b} rho1_{a,b} rho2_{b,d} (lambda contracts the middle
  // pair with delta), a bivariate polynomial in (q1, q2). rhs is
  // rho(tau1+tau2): exponent pair (k, k) on the diagonal.
  SymbolicRho rho = canonical_rho(th, fixture);
  std::map<std::pair<Idx, Idx>, std::map<std::pair<long, long>, mpq_class>> lhs, rhs;
  for (const auto& [k1, p1] : rho.entries)
    for (const auto& [k2, p2] : rho.entries) {
      if (!(k1.second == k2.first)) continue;
      for (const auto& [e1, c1] : p1)
        for (const auto& [e2, c2] : p2) lhs[{k1.first, k2.second}][{e1, e2}] += c1 * c2;
    }
  for (const auto& [key, poly] : rho.entries)
    for (const auto& [e, c] : poly) rhs[key][{e, e}] += c;
  prune(lhs);
  prune(rhs);
  if (lhs != rhs) {
    r.pass = false;
    r.detail = "gluing: (id x lambda x id)(rho x rho) != rho(tau1+tau2)";
    return r;
  }
  r.detail = "gluing identity exact on the capped basis";
  return r;
}

ConditionReport check_boundary(const TheoryData& th, double tol) {
  ConditionReport r;
  r.condition = "c";
  r.exact = false;
  r.pass = true;
  // Blockwise continuity of tau -> A(tau) at im(tau) -> 0: q^k approaches
  // the rotation action e^{2 pi i x k}.
  // |q^k - e^{2 pi i x k}| ~ 2 pi |k| eps, so sample two heights and demand
  // both the scaled bound and the ~10x shrinkage that continuity implies.
  const std::complex<double> twopii(0.0, 2.0 * std::numbers::pi);
  long kmax = std::max(th.pole, th.trunc);
  double dev_hi = 0.0, dev_lo = 0.0;
  for (double x : {0.0, 0.3, 0.71}) {
    for (long k = -th.pole; k <= th.trunc; ++k) {
      if (th.dim_at(k) == 0) continue;
      std::complex<double> rotation = std::exp(twopii * x * double(k));
      auto dev_at = [&](double eps) {
        std::complex<double> tau(x, eps);
        return std::abs(std::exp(twopii * tau * double(k)) - rotation);
      };
      dev_hi = std::max(dev_hi, dev_at(1e-7));
      dev_lo = std::max(dev_lo, dev_at(1e-8));
    }
  }
  r.deviation = dev_lo;
  double bound = 2.0 * std::numbers::pi * double(kmax) * 1e-8 * 1.01 + tol;
  r.pass = dev_lo <= bound && dev_lo <= 0.2 * dev_hi;
  r.detail = "A(tau) blockwise limit onto the circle action";
  return r;
}

ConditionReport check_equivariance(const TheoryData& th,
                                   const std::vector<PointedTorus>& samples,
                                   double tol) {
  ConditionReport r;
  r.condition = "d";
  r.exact = false;
  QSeries f = partition(th);
  SectorSection sec;
  for (int i = 0; i < 4; ++i) sec.sector[i] = f;
  sec.weight = 0;
  bool pass = true;
  double dev = 0.0;
  for (const SL2Z& g : {SL2Z::S(), SL2Z::T()}) {
    auto rep = check_section_equivariance(sec, g, samples, tol);
    pass = pass && rep.pass;
    dev = std::max(dev, rep.max_deviation);
  }
  r.pass = pass;
  r.deviation = dev;
  r.detail = "lambda(rho(tau)) under S and T";
  return r;
}

}  // namespace

VerifyReport verify_conditions(const TheoryData& th,
                               const std::vector<PointedTorus>& samples,
                               double tol,
                               const std::optional<RhoOverride>& fixture) {
  VerifyReport report;
  report.conditions.push_back(check_symmetry(th, fixture));
  report.conditions.push_back(check_gluing(th, fixture));
  report.conditions.push_back(check_boundary(th, tol));
  report.conditions.push_back(check_equivariance(th, samples, tol));
  for (const auto& c : report.conditions) report.pass = report.pass && c.pass;
  return report;
}

SectorSection spin_section(const SpinTheoryData& sth) {
  SectorSection sec;
  for (const SpinStructure& s : SpinStructure::all())
    sec.sector[s.index()] = spin_partition(sth, s);
  sec.weight = 0;
  return sec;
}

VerifyReport verify_conditions(const SpinTheoryData& sth,
                               const std::vector<PointedTorus>& samples,
                               double tol) {
  VerifyReport report;
  auto has_dims = [](const TheoryData& th) {
    for (const auto& a : th.dims)
      if (a != 0) return true;
    return false;
  };
  auto add_sector = [&](const TheoryData& th, const char* tag) {
    if (!has_dims(th)) return;
    report.conditions.push_back(check_symmetry(th, {}));
    report.conditions.push_back(check_gluing(th, {}));
    report.conditions.push_back(check_boundary(th, tol));
    for (auto it = report.conditions.end() - 3; it != report.conditions.end();
         ++it)
      it->condition += tag;
  };
  add_sector(sth.plus_sector, "+");
  add_sector(sth.minus_sector, "-");
  // equivariance of the full spin section replaces the plain condition (d)
  SectorSection sec = spin_section(sth);
  ConditionReport d;
  d.condition = "d";
  d.exact = false;
  d.pass = true;
  for (const SL2Z& g : {SL2Z::S(), SL2Z::T()}) {
    auto rep = check_section_equivariance(sec, g, samples, tol);
    d.pass = d.pass && rep.pass;
    d.deviation = std::max(d.deviation, rep.max_deviation);
  }
  d.detail = "spin sector section under S and T";
  report.conditions.push_back(d);
  for (const auto& c : report.conditions) report.pass = report.pass && c.pass;
  return report;
}

std::string VerifyReport::to_json() const {
  json j;
  j["check"] = "realization-conditions";
  j["status"] = pass ? "pass" : "fail";
  json arr = json::array();
  for (const auto& c : conditions) {
    json jc;
    jc["condition"] = c.condition;
    jc["status"] = c.pass ? "pass" : "fail";
    jc["exact"] = c.exact;
    if (!c.exact) jc["deviation"] = c.deviation;
    jc["detail"] = c.detail;
    arr.push_back(jc);
  }
  j["conditions"] = std::move(arr);
  return j.dump();
}

}  // namespace eftlab
