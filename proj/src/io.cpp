#include "nhcz/io.hpp"

#include <fstream>

#include "nhcz/errors.hpp"

namespace nhcz {

nlohmann::json to_json(const DiscreteSpace& space) {
  nlohmann::json j;
  if (space.has_coordinates()) {
    j["kind"] = "coords";
    j["dim"] = space.dimension();
    j["distance"] = to_string(space.distance_kind());
    j["points"] = space.coordinates();
  } else {
    j["kind"] = "matrix";
    j["n"] = space.size();
    const auto d = space.distance_matrix();
    j["dist"] = std::vector<double>(d.begin(), d.end());
  }
  const auto m = space.masses();
  j["masses"] = std::vector<double>(m.begin(), m.end());
  j["quasi_constant"] = space.quasi_constant();
  return j;
}

DiscreteSpace space_from_json(const nlohmann::json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    auto masses = j.at("masses").get<std::vector<double>>();
    const double a = j.value("quasi_constant", 1.0);
    if (kind == "coords") {
      auto points = j.at("points").get<std::vector<std::vector<double>>>();
      if (j.contains("dim")) {
        const auto dim = j.at("dim").get<std::size_t>();
        for (const auto& p : points)
          if (p.size() != dim) throw ArgumentError("point dimension differs from 'dim'");
      }
      const auto dk = distance_kind_from_string(j.value("distance", std::string("euclidean")));
      return DiscreteSpace::from_coordinates(std::move(points), std::move(masses), dk, a);
    }
    if (kind == "matrix") {
      auto dist = j.at("dist").get<std::vector<double>>();
      const std::size_t n = j.contains("n") ? j.at("n").get<std::size_t>() : masses.size();
      return DiscreteSpace::from_matrix(n, std::move(dist), std::move(masses), a);
    }
    throw ArgumentError("space kind must be 'coords' or 'matrix', got '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("malformed space document: ") + e.what());
  }
}

nlohmann::json to_json(const DominatingFunction& lambda) {
  nlohmann::json j;
  switch (lambda.family()) {
    case DominatingFunction::Family::PowerLaw:
      j["family"] = "power_law";
      break;
    case DominatingFunction::Family::FlooredPower:
      j["family"] = "floored_power";
      j["floors"] = lambda.floors();
      break;
    case DominatingFunction::Family::Custom:
      throw ArgumentError("custom dominating functions cannot be serialized");
  }
  j["c"] = lambda.scale();
  j["degree"] = lambda.degree();
  return j;
}

DominatingFunction lambda_from_json(const nlohmann::json& j, std::size_t point_count) {
  try {
    const std::string family = j.at("family").get<std::string>();
    const double c = j.at("c").get<double>();
    const double degree = j.at("degree").get<double>();
    if (family == "power_law") return DominatingFunction::power_law(c, degree);
    if (family == "floored_power") {
      if (j.contains("floors")) {
        auto floors = j.at("floors").get<std::vector<double>>();
        if (floors.size() != point_count) throw ArgumentError("one floor per point is required");
        return DominatingFunction::floored_power(c, degree, std::move(floors));
      }
      return DominatingFunction::floored_power(c, degree, j.at("floor").get<double>(), point_count);
    }
    throw ArgumentError("unknown dominating function family '" + family + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("malformed dominating function document: ") + e.what());
  }
}

FunctionOnSpace function_from_json(const nlohmann::json& j) {
  try {
    if (j.is_object()) return j.at("values").get<FunctionOnSpace>();
    return j.get<FunctionOnSpace>();
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("malformed function document: ") + e.what());
  }
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j, int indent) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(indent) << '\n';
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace nhcz
