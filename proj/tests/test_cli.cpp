#include <doctest.h>

#include "eftlab/cli.hpp"

using namespace eftlab;

TEST_CASE("every suite passes with the default configuration") {
  SuiteConfig cfg;
  for (const std::string& name : kSuiteNames) {
    auto reports = run_suite(name, cfg);
    CHECK(!reports.empty());
    for (const auto& r : reports) {
      INFO(r.check << ": " << r.status << " " << r.detail);
      CHECK(r.passed());
    }
  }
}

TEST_CASE("unknown suite names are a configuration error") {
  SuiteConfig cfg;
  CHECK_THROWS_AS((void)run_suite("nope", cfg), std::invalid_argument);
}

TEST_CASE("report output is canonically ordered and deterministic") {
  SuiteConfig cfg;
  auto a = run_suite("relations", cfg);
  auto b = run_suite("relations", cfg);
  CHECK(reports_to_json(a) == reports_to_json(b));
  for (size_t i = 1; i < a.size(); ++i) CHECK(a[i - 1].check < a[i].check);
  // the human-readable form carries the same verdicts
  std::string text = reports_to_text(a);
  for (const auto& r : a) {
    CHECK(text.find(r.check) != std::string::npos);
  }
}

TEST_CASE("exact reports carry no tolerance, numeric ones always do") {
  SuiteConfig cfg;
  auto reports = run_suite("periodicity", cfg);
  for (const auto& r : reports) {
    if (r.exact) CHECK(r.tol == 0.0);
    else CHECK(r.tol > 0.0);
  }
}
