#include "nhcz/report.hpp"

#include <cmath>

#include "nhcz/errors.hpp"

namespace nhcz {

double CheckReport::get(const std::string& name) const {
  const auto it = values.find(name);
  if (it == values.end()) throw ArgumentError("report '" + check + "' has no value '" + name + "'");
  return it->second;
}

void CheckReport::assert_that(const std::string& name, bool ok, const std::string& message) {
  auto [it, inserted] = assertions.emplace(name, ok);
  if (!inserted) it->second = it->second && ok;
  if (!ok) failures.push_back(message.empty() ? name : name + ": " + message);
}

bool CheckReport::passed() const {
  for (const auto& [name, ok] : assertions)
    if (!ok) return false;
  return true;
}

nlohmann::json finite_or_tag(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

nlohmann::json CheckReport::to_json() const {
  nlohmann::json j;
  j["check"] = check;
  j["vacuous"] = vacuous;
  j["exact"] = exact;
  j["passed"] = passed();
  nlohmann::json vals = nlohmann::json::object();
  for (const auto& [k, v] : values) vals[k] = finite_or_tag(v);
  j["values"] = vals;
  j["assertions"] = assertions;
  j["witness"] = witness;
  j["failures"] = failures;
  return j;
}

}  // namespace nhcz
