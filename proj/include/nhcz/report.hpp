#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace nhcz {

/// Outcome of one check: named constants, exact-assertion verdicts, witnesses.
struct CheckReport {
  std::string check;
  /// Degenerate input; no ratio is meaningful.
  bool vacuous = false;
  /// No sampling was involved in any supremum.
  bool exact = true;
  std::map<std::string, double> values;
  /// Exact assertions evaluated by the check, by name.
  std::map<std::string, bool> assertions;
  nlohmann::json witness = nlohmann::json::object();
  std::vector<std::string> failures;

  void set(const std::string& name, double v) { values[name] = v; }
  double get(const std::string& name) const;
  /// Records an exact assertion and, on failure, a message.
  void assert_that(const std::string& name, bool ok, const std::string& message = {});
  bool passed() const;
  nlohmann::json to_json() const;
};

/// Non-finite doubles become strings in JSON ("inf", "-inf", "nan").
nlohmann::json finite_or_tag(double v);

}  // namespace nhcz
