#ifndef EFTLAB_CLI_HPP
#define EFTLAB_CLI_HPP

#include <string>
#include <vector>

#include <gmpxx.h>

namespace eftlab {

// One verification check. Exact checks carry no tolerance; numeric checks
// always carry tol and the maximum observed deviation.
struct Report {
  std::string check;
  std::string status;  // "pass" | "fail" | "error"
  bool exact = true;
  double tol = 0.0;
  double deviation = 0.0;
  std::string detail;
  long runtime_ms = 0;

  bool passed() const { return status == "pass"; }
};

struct SuiteConfig {
  mpq_class prec = 20;    // series order
  mpq_class cutoff = 25;  // mode cutoff M
  long trunc = 20;        // block truncation K
  double tol = 1e-6;
  unsigned long seed = 0;
};

extern const std::vector<std::string> kSuiteNames;  // excludes "all"

// Runs the named suite ("all" = every suite in kSuiteNames order).
// Reports are canonically ordered by check name. Throws
// std::invalid_argument for an unknown suite name.
std::vector<Report> run_suite(const std::string& name,
                              const SuiteConfig& cfg);

bool all_pass(const std::vector<Report>& reports);

// Deterministic JSON: runtime fields are excluded so identical seed and
// config give byte-identical output.
std::string reports_to_json(const std::vector<Report>& reports);
std::string reports_to_text(const std::vector<Report>& reports);

}  // namespace eftlab

#endif
