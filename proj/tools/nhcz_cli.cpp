#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "nhcz/ball_index.hpp"
#include "nhcz/balls.hpp"
#include "nhcz/czdecomp.hpp"
#include "nhcz/czop.hpp"
#include "nhcz/errors.hpp"
#include "nhcz/fspaces.hpp"
#include "nhcz/harness.hpp"
#include "nhcz/io.hpp"
#include "nhcz/maximal.hpp"
#include "nhcz/pairs.hpp"

using nlohmann::json;
using namespace nhcz;

namespace {

/// A space file may be a bare space or a full scenario carrying its own lambda.
struct Setting {
  DiscreteSpace space;
  DominatingFunction lambda;
  std::string kernel = "antisymmetric-lambda";
  double kernel_m = 1.0;
};

Setting load_setting(const std::string& space_path, const std::string& lambda_path) {
  const json j = read_json_file(space_path);
  if (j.contains("space")) {
    auto s = scenario_from_json(j);
    Setting out{std::move(s.space), std::move(s.lambda), s.kernel_name, s.kernel_m};
    if (!lambda_path.empty()) out.lambda = lambda_from_json(read_json_file(lambda_path), out.space.size());
    return out;
  }
  if (lambda_path.empty()) throw ArgumentError("a bare space file needs --dominating");
  auto space = space_from_json(j);
  auto lambda = lambda_from_json(read_json_file(lambda_path), space.size());
  return Setting{std::move(space), std::move(lambda)};
}

void emit(const json& j, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << j.dump(2) << '\n';
  } else {
    write_json_file(out, j);
  }
}

DoublingParams params_for(const DominatingFunction& lambda, double beta0) {
  auto p = DoublingParams::standard(lambda);
  if (beta0 > 0.0) {
    p.beta0 = beta0;
    p.beta = beta0;
    p.check(lambda);
  }
  return p;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Calderon-Zygmund toolkit for non-doubling discrete metric measure spaces"};
  app.require_subcommand(1);
  std::size_t sample_cap = PairScanOptions{}.pair_cap;
  app.add_option("--sample-cap", sample_cap, "Pair budget per point before pair sums are sampled");

  std::string kind, out, space_path, lambda_path, f_path, op = "m", kernel_name, check, config_path;
  std::string format = "jsonl";
  std::size_t size = 64;
  std::uint64_t seed = 7;
  double rho = 5.0, p = 1.0, height = 0.0, beta0 = 0.0, eta = 0.5;

  auto* gen = app.add_subcommand("gen", "Generate a scenario");
  gen->add_option("--kind", kind, "Scenario kind")->required()->check(CLI::IsMember(scenario_kinds()));
  gen->add_option("--size", size, "Number of points");
  gen->add_option("--seed", seed, "Seed");
  gen->add_option("--out", out, "Output file (stdout if omitted)");

  auto* validate = app.add_subcommand("validate", "Check upper doubling and estimate geometric doubling");
  validate->add_option("--space", space_path, "Space or scenario file")->required();
  validate->add_option("--lambda,--dominating", lambda_path, "Dominating function file");

  auto* maximal = app.add_subcommand("maximal", "Evaluate a maximal operator");
  maximal->add_option("--space", space_path, "Space or scenario file")->required();
  maximal->add_option("--dominating", lambda_path, "Dominating function file");
  maximal->add_option("--f", f_path, "Function file")->required();
  maximal->add_option("--op", op, "Operator")->check(CLI::IsMember({"m", "n", "sharp", "mp"}));
  maximal->add_option("--rho", rho, "Dilation for m and mp");
  maximal->add_option("--p", p, "Exponent for mp");
  maximal->add_option("--beta0", beta0, "Doubling threshold for n and sharp");
  maximal->add_option("--out", out, "Output file");

  auto* cz = app.add_subcommand("czdecomp", "Calderon-Zygmund decomposition at a height");
  cz->add_option("--space", space_path, "Space or scenario file")->required();
  cz->add_option("--dominating", lambda_path, "Dominating function file");
  cz->add_option("--f", f_path, "Function file")->required();
  cz->add_option("--lambda", height, "Height")->required();
  cz->add_option("--p", p, "Exponent");
  cz->add_option("--beta0", beta0, "Doubling threshold");
  cz->add_option("--out", out, "Output file");

  auto* oper = app.add_subcommand("operator", "Singular integral checks");
  oper->add_option("--space", space_path, "Space or scenario file")->required();
  oper->add_option("--dominating", lambda_path, "Dominating function file");
  oper->add_option("--kernel", kernel_name, "Kernel name")->check(CLI::IsMember(kernel_names()));
  oper->add_option("--f", f_path, "Function file")->required();
  std::string b_path;
  oper->add_option("--b", b_path, "Multiplier for the commutator check (defaults to f)");
  oper->add_option("--check", check, "Check")
      ->required()
      ->check(CLI::IsMember({"weak11", "cotlar", "commutator", "rbmo-image"}));
  oper->add_option("--p", p, "Exponent for the commutator check");
  oper->add_option("--eta", eta, "Exponent for the Cotlar check");
  oper->add_option("--out", out, "Output file");

  auto* suite = app.add_subcommand("suite", "Run the verification suite");
  suite->add_option("--config", config_path, "Suite configuration file")->required();
  suite->add_option("--out", out, "Report file (stdout if omitted)");
  suite->add_option("--format", format, "Report format")->check(CLI::IsMember({"jsonl", "csv"}));
  bool timing = false;
  suite->add_flag("--timing", timing, "Include wall times in JSONL records");

  CLI11_PARSE(app, argc, argv);
  configure_threads_from_env();
  PairScanOptions pairs;
  pairs.pair_cap = sample_cap;

  try {
    if (*gen) {
      emit(to_json(generate(kind, size, seed)), out);
      return 0;
    }
    if (*validate) {
      const auto s = load_setting(space_path, lambda_path);
      const auto u = validate_upper_doubling(s.space, s.lambda);
      const auto g = validate_geometric_doubling(s.space);
      emit({{"upper_doubling",
             {{"passed", u.passed()},
              {"positive", u.positive},
              {"monotone", u.monotone},
              {"doubling", u.doubling},
              {"dominated", u.dominated},
              {"worst_ratio", u.worst_ratio},
              {"witness", {{"center", u.witness_center}, {"radius", u.witness_radius}}},
              {"comparability", u.comparability}}},
            {"geometric_doubling",
             {{"covering_number", g.covering_number},
              {"dimension", g.dimension},
              {"witness", {{"center", g.witness_center}, {"radius", g.witness_radius}}}}}},
           "");
      return u.passed() ? 0 : 1;
    }
    if (*suite) {
      auto cfg = SuiteConfig::from_json(read_json_file(config_path));
      if (app.count("--sample-cap")) cfg.pairs.pair_cap = sample_cap;
      const auto result = run_suite(cfg);
      const std::string text = format == "csv" ? result.to_csv() : result.to_jsonl(timing);
      if (out.empty() || out == "-") {
        std::cout << text;
      } else {
        std::ofstream os(out);
        if (!os) throw std::runtime_error("cannot open " + out);
        os << text;
        if (!os) throw std::runtime_error("write failed: " + out);
      }
      std::cerr << result.records.size() << " records, " << result.failed_count() << " failed\n";
      return result.passed() ? 0 : 1;
    }
    const auto s = load_setting(space_path, lambda_path);
    const auto f = function_from_json(read_json_file(f_path));
    check_function(s.space, f);
    const BallIndex index(s.space, s.lambda);
    if (*maximal) {
      MaximalResult r;
      if (op == "m") r = maximal_noncentered(index, f, rho);
      else if (op == "n") r = maximal_doubling(index, f, params_for(s.lambda, beta0));
      else if (op == "sharp") r = sharp_maximal(index, f, params_for(s.lambda, beta0), pairs);
      else r = maximal_p(index, f, p, rho);
      json w = json::array();
      for (const auto& b : r.witness) w.push_back({b.center, b.radius});
      emit({{"op", to_string(r.kind)}, {"values", r.values}, {"witness", w}, {"exact", r.exact}}, out);
      return 0;
    }
    if (*cz) {
      const auto dec = cz_decompose(index, f, height, p, params_for(s.lambda, beta0));
      const auto v = verify_cz(index, f, dec);
      json j = to_json(dec);
      j["verification"] = v.to_json();
      emit(j, out);
      return v.passed() ? 0 : 1;
    }
    if (*oper) {
      const auto kernel = make_kernel(kernel_name.empty() ? s.kernel : kernel_name, s.space, s.lambda,
                                      {{"m", s.kernel_m}});
      const auto params = DoublingParams::standard(s.lambda);
      CheckReport rep;
      if (check == "weak11") rep = weak11_check(s.space, kernel, f, {});
      else if (check == "cotlar") rep = cotlar_check(index, kernel, f, eta);
      else if (check == "rbmo-image") rep = rbmo_image_check(index, kernel, f, params, pairs);
      else {
        const auto b = b_path.empty() ? f : function_from_json(read_json_file(b_path));
        check_function(s.space, b);
        rep = commutator_pointwise_check(index, kernel, b, f, p, params, pairs);
      }
      emit(rep.to_json(), out);
      return rep.passed() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
