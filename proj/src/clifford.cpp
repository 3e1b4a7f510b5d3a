#include "eftlab/clifford.hpp"

#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace eftlab {

using json = nlohmann::json;

QmPoly QmPoly::scalar(mpq_class v) {
  QmPoly p;
  if (v != 0) p.c[0] = std::move(v);
  return p;
}

QmPoly QmPoly::qm() {
  QmPoly p;
  p.c[1] = 1;
  return p;
}

QmPoly QmPoly::operator+(const QmPoly& o) const {
  QmPoly r = *this;
  for (const auto& [e, v] : o.c) {
    r.c[e] += v;
    if (r.c[e] == 0) r.c.erase(e);
  }
  return r;
}

QmPoly QmPoly::operator-(const QmPoly& o) const { return *this + o.scaled(-1); }

QmPoly QmPoly::operator*(const QmPoly& o) const {
  QmPoly r;
  for (const auto& [ea, va] : c)
    for (const auto& [eb, vb] : o.c) {
      r.c[ea + eb] += va * vb;
      if (r.c[ea + eb] == 0) r.c.erase(ea + eb);
    }
  return r;
}

bool QmPoly::operator==(const QmPoly& o) const { return c == o.c; }

QmPoly QmPoly::scaled(const mpq_class& v) const {
  QmPoly r;
  if (v == 0) return r;
  for (const auto& [e, w] : c) r.c[e] = w * v;
  return r;
}

QmPoly QmPoly::substitute_one() const {
  mpq_class s = 0;
  for (const auto& [e, v] : c) s += v;
  return scalar(s);
}

std::string QmPoly::to_string() const {
  if (c.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, v] : c) {
    if (!first) os << " + ";
    first = false;
    os << "(" << v.get_str() << ")";
    if (e == 1)
      os << "*q^m";
    else if (e > 1)
      os << "*q^(" << e << "m)";
  }
  return os.str();
}

Mat2 mat2_mul(const Mat2& a, const Mat2& b) {
  Mat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  return r;
}

Mat2 mat2_add(const Mat2& a, const Mat2& b) {
  Mat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = a[i][j] + b[i][j];
  return r;
}

Mat2 mat2_identity() {
  Mat2 r;
  r[0][0] = QmPoly::scalar(1);
  r[1][1] = QmPoly::scalar(1);
  return r;
}

// With vacuum_e: w0 = f.v0, so f = offdiag(0; 1) and e.w0 = e f v0 =
// (sign.2 - f e) v0 = sign.2 v0. With vacuum_f the roles swap.
Mat2 e_matrix(const CliffordConvention& cv) {
  Mat2 m;
  if (cv.vacuum_e)
    m[0][1] = QmPoly::scalar(2 * cv.sign);
  else
    m[1][0] = QmPoly::scalar(1);
  return m;
}

Mat2 f_matrix(const CliffordConvention& cv) {
  Mat2 m;
  if (cv.vacuum_e)
    m[1][0] = QmPoly::scalar(1);
  else
    m[0][1] = QmPoly::scalar(2 * cv.sign);
  return m;
}

Mat2 b_matrix(const CliffordConvention& cv) {
  Mat2 ef = mat2_mul(e_matrix(cv), f_matrix(cv));
  QmPoly half = QmPoly::scalar(mpq_class(1, 2)) *
                (QmPoly::scalar(1) - QmPoly::qm());
  Mat2 scaled;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) scaled[i][j] = ef[i][j] * half;
  return mat2_add(mat2_identity(), scaled);
}

QmPoly mat2_supertrace(const Mat2& m, int v0_parity) {
  // basis parities are (p, 1-p): v0 and the image of the odd generator
  QmPoly s0 = v0_parity == 0 ? m[0][0] : m[0][0].scaled(-1);
  QmPoly s1 = v0_parity == 0 ? m[1][1].scaled(-1) : m[1][1];
  return s0 + s1;
}

QmPoly mat2_trace(const Mat2& m) { return m[0][0] + m[1][1]; }

std::vector<OracleEntry> convention_oracle() {
  std::vector<OracleEntry> out;
  QmPoly one = QmPoly::scalar(1), t = QmPoly::qm();
  for (int sign : {+1, -1})
    for (bool vacuum_e : {true, false})
      for (int parity : {0, 1}) {
        OracleEntry entry;
        entry.cv = {sign, vacuum_e, parity};
        Mat2 e = e_matrix(entry.cv), f = f_matrix(entry.cv);
        Mat2 zero{};
        Mat2 anticomm = mat2_add(mat2_mul(e, f), mat2_mul(f, e));
        Mat2 expected{};
        expected[0][0] = QmPoly::scalar(2 * sign);
        expected[1][1] = QmPoly::scalar(2 * sign);
        entry.relations_ok = mat2_mul(e, e) == zero && mat2_mul(f, f) == zero &&
                             anticomm == expected;
        Mat2 b = b_matrix(entry.cv);
        entry.passes = entry.relations_ok &&
                       mat2_supertrace(b, parity) == one - t &&
                       mat2_trace(b) == one + t;
        out.push_back(entry);
      }
  return out;
}

BOperator b_operator(const mpq_class& m) {
  if (!(m > 0)) throw std::domain_error("b_operator requires m > 0");
  BOperator b;
  b.m = m;
  b.mat = b_matrix(CliffordConvention{});
  b.v0_parity = CliffordConvention{}.v0_parity;
  return b;
}

QmPoly BOperator::supertrace() const { return mat2_supertrace(mat, v0_parity); }
QmPoly BOperator::trace() const { return mat2_trace(mat); }

SectorSeries sector_series(const SpinStructure& s, long n,
                           const mpq_class& cutoff, const mpq_class& prec) {
  if (n <= 0 || n % 2 != 0)
    throw std::invalid_argument("sector_series: n must be a positive even integer");
  if (prec > cutoff)
    throw std::invalid_argument("sector_series: prec exceeds cutoff M");
  // prefactor q^{e0}: e0 = n/24 for integer modes, -n/48 for half-integer
  mpq_class e0 = s.s2 == 0 ? mpq_class(n, 24) : mpq_class(-n, 48);
  e0.canonicalize();  // GMP comparisons need reduced rationals
  e0.canonicalize();
  mpq_class work = prec + (e0 < 0 ? mpq_class(-e0) : mpq_class(0));
  // first omitted mode bounds the exact window of the product
  mpz_class mfloor;
  mpz_fdiv_q(mfloor.get_mpz_t(), cutoff.get_num_mpz_t(), cutoff.get_den_mpz_t());
  mpq_class first_omitted =
      s.s2 == 0 ? mpq_class(mfloor + 1)  // floor(M) + 1
                : [&] {
                    mpq_class m(1, 2);
                    while (m <= cutoff) m += 1;
                    return m;
                  }();
  if (work > first_omitted)
    throw std::invalid_argument("sector_series: cutoff M too small for prec");
  QSeries acc = QSeries::one(work).with_denom(48);
  mpq_class sgn = s.s1 == 0 ? -1 : 1;  // str: 1 - q^m; tr: 1 + q^m
  for (mpq_class m = s.s2 == 0 ? 1 : mpq_class(1, 2); m <= cutoff; m += 1) {
    if (m >= work) break;  // later factors cannot touch the window
    QSeries factor = QSeries::one(work).with_denom(48);
    mpq_class k48 = m * 48;
    factor.set_term(mpz_class(k48.get_num()).get_si(),
                    Coeff(mpz_class(sgn.get_num())));
    acc = acc * factor;
  }
  acc = acc.pow(static_cast<unsigned long>(n));
  mpq_class e048 = e0 * 48;
  acc = acc.shifted(mpz_class(e048.get_num()).get_si(), 48).truncated(prec);
  if (s.s1 == 1 && s.s2 == 0) {
    // the -+ sector's zero-mode factor 2^{n/2}
    mpz_class two_pow;
    mpz_ui_pow_ui(two_pow.get_mpz_t(), 2, static_cast<unsigned long>(n / 2));
    acc = acc.scaled(Coeff(two_pow));
  }
  SectorSeries out;
  out.spin = s;
  out.n = n;
  out.cutoff = cutoff;
  out.series = std::move(acc);
  return out;
}

namespace {

struct TCheck {
  std::string src, dst;
};

PeriodicityCertificate::Entry exact_t_entry(const QSeries& source,
                                            const QSeries& target,
                                            const std::string& src,
                                            const std::string& dst) {
  PeriodicityCertificate::Entry e;
  e.generator = "T";
  e.sector = src;
  e.target = dst;
  e.exact = true;
  QSeries lhs = t_transform(source);
  QSeries rhs = target.promoted(Ring::Cyc);
  if (lhs == rhs) {
    e.pass = true;
    e.ratio = "1";
    return e;
  }
  e.pass = false;
  // extract the constant ratio lhs = r.rhs when one exists
  mpq_class ord = rhs.order();
  Coeff num = lhs.coeff_at(ord), den = rhs.coeff_at(ord);
  try {
    Coeff r = num * den.inverse();
    if (lhs == rhs.scaled(r))
      e.ratio = r.to_string();
    else
      e.ratio = "(no constant ratio)";
  } catch (const std::domain_error&) {
    e.ratio = "(no constant ratio)";
  }
  return e;
}

}  // namespace

PeriodicityCertificate periodicity_certificate(long n, const mpq_class& cutoff,
                                               const mpq_class& prec,
                                               double tol) {
  PeriodicityCertificate cert;
  cert.n = n;
  std::array<QSeries, 4> sec;
  for (const SpinStructure& s : SpinStructure::all())
    sec[s.index()] = sector_series(s, n, cutoff, prec).series;
  auto S = [](const char* name) { return SpinStructure::from_name(name); };
  int pp = S("++").index(), pm = S("+-").index(), mp = S("-+").index(),
      mm = S("--").index();
  cert.entries.push_back(exact_t_entry(sec[pp], sec[pp], "++", "++"));
  cert.entries.push_back(exact_t_entry(sec[mp], sec[mp], "-+", "-+"));
  cert.entries.push_back(exact_t_entry(sec[pm], sec[mm], "+-", "--"));
  cert.entries.push_back(exact_t_entry(sec[mm], sec[pm], "--", "+-"));
  // numeric S-checks: (-1/tau) swaps +- and -+, fixes --; the ++ line
  // carries the eta weight factor (-i tau)^{n/2}
  struct SCheck {
    int src, dst;
    bool weighted;
    const char *sname, *dname;
  };
  std::vector<SCheck> checks = {{pm, mp, false, "+-", "-+"},
                                {mp, pm, false, "-+", "+-"},
                                {mm, mm, false, "--", "--"},
                                {pp, pp, true, "++", "++"}};
  // sample points kept near |tau| = 1 so that both tau and -1/tau have
  // imaginary part close to 1; otherwise the truncated series has not
  // converged at one of the two points and the comparison is meaningless
  const std::vector<std::complex<double>> s_samples = {
      {0.0, 1.0}, {0.2, 1.1}, {-0.25, 1.3}};
  for (const SCheck& ck : checks) {
    PeriodicityCertificate::Entry e;
    e.generator = "S";
    e.sector = ck.sname;
    e.target = ck.dname;
    e.exact = false;
    for (const std::complex<double>& tau : s_samples) {
      std::complex<double> stau = -1.0 / tau;
      std::complex<double> lhs = sec[ck.src].eval_at_tau(stau);
      std::complex<double> rhs = sec[ck.dst].eval_at_tau(tau);
      if (ck.weighted) {
        std::complex<double> mitau(tau.imag(), -tau.real());  // -i tau
        rhs *= std::pow(mitau, static_cast<double>(n / 2));
      }
      double scale = std::max(1.0, std::abs(rhs));
      e.deviation = std::max(e.deviation, std::abs(lhs - rhs) / scale);
    }
    e.pass = e.deviation <= tol;
    cert.entries.push_back(e);
  }
  for (const auto& e : cert.entries) cert.pass = cert.pass && e.pass;
  return cert;
}

std::string PeriodicityCertificate::to_json() const {
  json j;
  j["check"] = "periodicity";
  j["n"] = n;
  j["status"] = pass ? "pass" : "fail";
  json arr = json::array();
  for (const auto& e : entries) {
    json je;
    je["generator"] = e.generator;
    je["sector"] = e.sector;
    je["target"] = e.target;
    je["exact"] = e.exact;
    je["status"] = e.pass ? "pass" : "fail";
    if (e.exact)
      je["ratio"] = e.ratio;
    else
      je["deviation"] = e.deviation;
    arr.push_back(je);
  }
  j["entries"] = std::move(arr);
  return j.dump(2);
}

}  // namespace eftlab
