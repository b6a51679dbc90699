#pragma once

#include <string>
#include <vector>

#include "alcsheaf/alcoves.hpp"

namespace alcsheaf::cli {

struct SuiteResult {
  std::string name;
  bool pass = true;
  int checks = 0;
  std::vector<std::string> failures;

  void expect(bool ok, const std::string& what) {
    ++checks;
    if (!ok) {
      pass = false;
      if (failures.size() < 20) failures.push_back(what);
    }
  }
};

struct SuiteConfig {
  int characteristic = 0;
  Weight lambda;
  int window = 1;
};

const std::vector<std::string>& suite_names();

/// Runs one named suite; "all" runs every suite. Throws std::invalid_argument
/// for unknown names.
std::vector<SuiteResult> run_suite(const AlcoveGeometry& g, const std::string& name, const SuiteConfig& config);

std::string to_json(const AlcoveGeometry& g, const SuiteConfig& config, const std::vector<SuiteResult>& results);

}  // namespace alcsheaf::cli
