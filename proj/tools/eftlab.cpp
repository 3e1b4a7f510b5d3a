// eftlab: exact q-series, bordism words, spin moduli, supersymmetric
// cancellation, and the degree-48 periodicity certificate in one binary.
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 configuration error,
// 3 file I/O error.

#include <complex>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "eftlab/bordism.hpp"
#include "eftlab/cli.hpp"
#include "eftlab/clifford.hpp"
#include "eftlab/modforms.hpp"
#include "eftlab/moduli.hpp"
#include "eftlab/susy.hpp"
#include "eftlab/theory.hpp"

namespace {

using json = nlohmann::json;
using namespace eftlab;

constexpr int kExitPass = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitIoError = 3;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Writes to --out when given, else stdout.
void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
    if (text.empty() || text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw IoError("cannot write " + out_path);
  out << text;
  if (text.empty() || text.back() != '\n') out << '\n';
}

mpq_class parse_rational(const std::string& s) {
  mpq_class v(s);
  v.canonicalize();
  return v;
}

SL2Z parse_matrix(const std::string& s) {
  std::vector<mpz_class> e;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) e.emplace_back(tok);
  if (e.size() != 4)
    throw CLI::ValidationError("--matrix", "expected four integers a,b,c,d");
  return {e[0], e[1], e[2], e[3]};
}

SectorSection parse_section(const std::string& text) {
  json j = json::parse(text);
  SectorSection sec;
  if (j.contains("weight")) sec.weight = parse_rational(j.at("weight").get<std::string>());
  for (const SpinStructure& s : SpinStructure::all())
    sec.sector[s.index()] = QSeries::from_json(j.at("sectors").at(s.name()).dump());
  return sec;
}

ModularFunctionSpec parse_j_poly(const std::string& s) {
  ModularFunctionSpec spec;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) spec.j_poly.emplace_back(tok);
  if (spec.j_poly.empty())
    throw CLI::ValidationError("--from-j-poly", "expected c0,c1,...");
  return spec;
}

BlockModel demo_model() {
  BlockModel m;
  m.blocks[{-1, mpq_class(0)}] = {1, 0};
  m.blocks[{0, mpq_class(0)}] = {2, 1};
  m.blocks[{1, mpq_class(0)}] = {3, 0};
  m.blocks[{0, mpq_class(1, 2)}] = {2, 2};
  m.blocks[{2, mpq_class(3)}] = {1, 1};
  return m;
}

std::string susy_report(const BlockModel& m,
                        const std::vector<std::complex<double>>& taus,
                        double tol, bool* pass) {
  SemigroupPair sp = build_pair(m);
  json out;
  out["model"] = json::parse(m.to_json());
  if (!sp.ok()) {
    json obs = json::array();
    for (const auto& k : sp.obstructions)
      obs.push_back({{"a", k.a}, {"b", k.b.get_str()}});
    out["obstructions"] = std::move(obs);
    out["status"] = "obstructed";
    *pass = false;
    return out.dump(2);
  }
  auto rel = check_relations(sp, taus, tol);
  out["relations"] = json::parse(rel.to_json());
  auto zp = partition_qexp(m);
  out["partition"] = json::parse(zp.to_json());
  bool ok = rel.pass && zp.holomorphic;
  out["status"] = ok ? "pass" : "fail";
  *pass = ok;
  return out.dump(2);
}

int run(int argc, char** argv) {
  CLI::App app{"exact computations for 2d (super)Euclidean field theories"};
  app.require_subcommand(1);
  // global flags may follow the subcommand name
  auto sub = [](CLI::App* parent, const std::string& name,
                const std::string& desc) {
    CLI::App* s = parent->add_subcommand(name, desc);
    s->fallthrough();
    return s;
  };

  SuiteConfig cfg;
  std::string prec_str = "20", cutoff_str = "25";
  bool as_json = false;
  std::string out_path;
  app.add_option("--prec", prec_str, "series order")->capture_default_str();
  app.add_option("--cutoff", cutoff_str, "mode cutoff M")->capture_default_str();
  app.add_option("--trunc", cfg.trunc, "block truncation K")->capture_default_str();
  app.add_option("--tol", cfg.tol, "numeric tolerance")->capture_default_str();
  app.add_option("--seed", cfg.seed, "RNG seed")->capture_default_str();
  app.add_flag("--json", as_json, "machine-readable output");
  app.add_option("--out", out_path, "write output to FILE");

  // modforms show
  auto* modforms = sub(&app, "modforms", "modular form q-expansions");
  auto* show = sub(modforms, "show", "print a q-expansion");
  std::string form = "j";
  show->add_option("--form", form, "c4|c6|delta|delta-inv|j|eta")
      ->check(CLI::IsMember({"c4", "c6", "delta", "delta-inv", "j", "eta"}));

  // moduli
  auto* moduli = sub(&app, "moduli", "moduli of spin tori");
  auto* orbit = sub(moduli, "orbit-spin", "SL2(Z)-orbits of spin structures");
  auto* equiv = sub(moduli, "check-equivariance", "section equivariance");
  std::string section_path, matrix_str = "1,1,0,1";
  equiv->add_option("--section", section_path, "section file")->required();
  equiv->add_option("--matrix", matrix_str, "a,b,c,d");

  // bordism
  auto* bordism = sub(&app, "bordism", "bordism words and rewriting");
  auto* bnorm = sub(bordism, "normalize", "rewrite a word to normal form");
  std::string word_path;
  bnorm->add_option("--word", word_path, "word file")->required();
  auto* binv = sub(bordism, "check-invariance", "evaluation invariance");
  std::string btheory_path;
  binv->add_option("--theory", btheory_path, "theory file")->required();

  // theory
  auto* theory = sub(&app, "theory", "graded realizations");
  auto* tbuild = sub(theory, "build", "build theory data from a j-polynomial");
  std::string j_poly_str;
  tbuild->add_option("--from-j-poly", j_poly_str, "c0,c1,...")->required();
  auto* tverify = sub(theory, "verify", "check conditions (a)-(d)");
  std::string vtheory_path;
  tverify->add_option("--theory", vtheory_path, "theory file")->required();

  // susy
  auto* susy = sub(&app, "susy", "super semigroup models");
  auto* sdemo = sub(susy, "demo", "relations on a built-in model");
  auto* scheck = sub(susy, "check", "relations on a model file");
  std::string model_path;
  scheck->add_option("--model", model_path, "model file")->required();

  // periodicity
  auto* periodicity = sub(&app, "periodicity", "degree periodicity certificate");
  long n = 48;
  periodicity->add_option("--n", n, "power of the free fermion")->capture_default_str();

  // suite
  auto* suite = sub(&app, "suite", "verification suites");
  auto* srun = sub(suite, "run", "run a named suite");
  std::string suite_name = "all";
  std::vector<std::string> member = kSuiteNames;
  member.push_back("all");
  srun->add_option("name", suite_name, "suite name")
      ->check(CLI::IsMember(member));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and friends exit 0; anything else is a configuration error
    int code = app.exit(e);
    return code == 0 ? kExitPass : kExitConfigError;
  }

  cfg.prec = parse_rational(prec_str);
  cfg.cutoff = parse_rational(cutoff_str);
  bool pass = true;
  std::string text;

  if (*show) {
    QSeries f = form == "c4"        ? c4(cfg.prec)
                : form == "c6"      ? c6(cfg.prec)
                : form == "delta"   ? delta(cfg.prec)
                : form == "delta-inv" ? delta_inv(cfg.prec)
                : form == "eta"     ? eta(cfg.prec)
                                    : j_function(cfg.prec);
    text = as_json ? f.to_json() : f.to_string();
  } else if (*orbit) {
    json out = json::array();
    for (const auto& orb : spin_orbits()) {
      json o = json::array();
      for (const auto& s : orb) o.push_back(s.name());
      out.push_back(std::move(o));
    }
    text = as_json ? out.dump() : out.dump(2);
  } else if (*equiv) {
    SectorSection sec = parse_section(read_file(section_path));
    SL2Z A = parse_matrix(matrix_str);
    auto rep = check_section_equivariance(sec, A, default_equivariance_samples(), cfg.tol);
    pass = rep.pass;
    text = rep.to_json();
  } else if (*bnorm) {
    BordWord w = BordWord::from_json(read_file(word_path));
    auto tc = typecheck(w);
    if (!tc.ok) throw std::invalid_argument("ill-typed word: " + tc.message);
    auto nres = normalize(w);
    pass = nres.ok;
    json out;
    out["status"] = nres.ok ? "pass" : "fail";
    out["steps"] = nres.steps;
    if (nres.ok) out["word"] = json::parse(nres.word.to_json());
    else out["message"] = nres.message;
    text = out.dump(2);
  } else if (*binv) {
    TheoryData th = TheoryData::from_json(read_file(btheory_path));
    std::mt19937 rng(static_cast<unsigned>(cfg.seed));
    json checks = json::array();
    for (int t = 0; t < 20; ++t) {
      BordWord w = random_word(rng, 5);
      auto nres = normalize(w);
      json c;
      c["atoms"] = w.atom_count();
      if (!nres.ok) {
        c["status"] = "fail";
        c["message"] = nres.message;
        pass = false;
        checks.push_back(std::move(c));
        continue;
      }
      double dev = 0;
      try {
        auto e1 = evaluate(w, th, 4096);
        auto e2 = evaluate(nres.word, th, 4096);
        for (size_t i = 0; i < e1.matrix.size(); ++i)
          for (size_t k = 0; k < e1.matrix[i].size(); ++k)
            dev = std::max(dev, std::abs(e1.matrix[i][k] - e2.matrix[i][k]));
        c["oracle"] = "dense";
      } catch (const std::length_error&) {
        auto s1 = evaluate_structural(w, th);
        auto s2 = evaluate_structural(nres.word, th);
        if (s1.in_arity == 0 && s1.out_arity == 0)
          dev = std::abs(s1.scalar() - s2.scalar());
        c["oracle"] = "structural";
      }
      c["deviation"] = dev;
      c["status"] = dev <= cfg.tol ? "pass" : "fail";
      pass = pass && dev <= cfg.tol;
      checks.push_back(std::move(c));
    }
    json out;
    out["check"] = "evaluation-invariance";
    out["status"] = pass ? "pass" : "fail";
    out["words"] = std::move(checks);
    text = out.dump(2);
  } else if (*tbuild) {
    ModularFunctionSpec spec = parse_j_poly(j_poly_str);
    QSeries f = eval_mf_spec(spec, mpq_class(cfg.trunc) + 1);
    TheoryData th = build_from_series(f);
    text = th.to_json();
  } else if (*tverify) {
    SpinTheoryData sth = SpinTheoryData::from_json(read_file(vtheory_path));
    auto rep = verify_conditions(sth, default_equivariance_samples(), cfg.tol);
    pass = rep.pass;
    text = rep.to_json();
  } else if (*sdemo) {
    text = susy_report(demo_model(), {{0.1, 1.2}, {-0.3, 0.9}, {0.45, 2.0}},
                       cfg.tol, &pass);
  } else if (*scheck) {
    BlockModel m = BlockModel::from_json(read_file(model_path));
    text = susy_report(m, {{0.1, 1.2}, {-0.3, 0.9}, {0.45, 2.0}}, cfg.tol, &pass);
  } else if (*periodicity) {
    auto cert = periodicity_certificate(n, cfg.cutoff, cfg.prec, cfg.tol);
    pass = cert.pass;
    if (as_json) {
      text = cert.to_json();
    } else {
      std::ostringstream os;
      os << "periodicity certificate n = " << n << ": "
         << (cert.pass ? "pass" : "fail") << "\n";
      for (const auto& e : cert.entries) {
        os << "  " << e.generator << "  " << e.sector << " -> " << e.target
           << "  " << (e.pass ? "pass" : "fail");
        if (e.exact && !e.pass) os << "  ratio " << e.ratio;
        if (!e.exact) os << "  dev " << e.deviation;
        os << "\n";
      }
      text = os.str();
    }
  } else if (*srun) {
    auto reports = run_suite(suite_name, cfg);
    pass = all_pass(reports);
    text = as_json ? reports_to_json(reports) : reports_to_text(reports);
  }

  emit(out_path, text);
  return pass ? kExitPass : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIoError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
}
