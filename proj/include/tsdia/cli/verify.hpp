#pragma once

#include <string>
#include <vector>

#include "tsdia/cli/config.hpp"

namespace tsdia::cli {

struct Check {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  std::string relation;  // "<=", ">=", "==" or "holds"
  bool pass = false;
};

struct VerifyReport {
  std::string suite;
  std::vector<Check> checks;
  Json data = Json::object();  // suite-specific tables
  bool pass() const;
};

const std::vector<std::string>& verify_suites();

/// Runs one named suite. Throws ConfigError for an unknown suite name.
VerifyReport run_suite(const std::string& suite);

Json to_json(const VerifyReport& r);

}  // namespace tsdia::cli
