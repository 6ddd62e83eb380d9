// nilmix <command> --config <path> [--jobs N] [--precision BITS] [--seed S] [--out PATH]
//
// Exit codes: 0 success, 1 operational failure, 2 schema or invalid input,
// 3 budget exhausted, 4 falsification, 5 precision failure or undecided
// certificate.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "commands_algebra.hpp"
#include "commands_dynamics.hpp"
#include "context.hpp"

namespace {

using nilmix::cli::CommandResult;
using nilmix::cli::json;
using nilmix::cli::RunContext;
namespace cli = nilmix::cli;

struct Command {
  std::function<CommandResult(RunContext&)> run;
  bool tabular = false;  ///< defaults to CSV output
};

const std::map<std::string, Command>& commands() {
  static const std::map<std::string, Command> table = {
      {"spectrum", {cli::run_spectrum}},
      {"ergodic", {cli::run_ergodic}},
      {"anosov", {cli::run_anosov}},
      {"lyapunov-constant", {cli::run_lyapunov}},
      {"height", {cli::run_height}},
      {"linear-form", {cli::run_linear_form}},
      {"sunit-search", {cli::run_sunit}},
      {"mix-exact", {cli::run_mix_exact, true}},
      {"mix-mc", {cli::run_mix_mc, true}},
      {"shape", {cli::run_shape}},
      {"boxmap-check", {cli::run_boxmap}},
      {"cocycle", {cli::run_cocycle}},
  };
  return table;
}

json read_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw nilmix::io::SchemaError("cannot read config " + path);
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    throw nilmix::io::SchemaError(std::string("malformed JSON: ") + e.what());
  }
}

void emit(const std::string& out, const std::string& content) {
  if (out.empty()) std::cout << content;
  else nilmix::io::atomic_write(out, content);
}

std::uint64_t unsigned_field(const json& config, const char* key) {
  const json& v = config[key];
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0))
    throw nilmix::io::SchemaError(std::string(key) + " must be a nonnegative integer");
  return v.get<std::uint64_t>();
}

// Command names accepted for compatibility with existing configs.
std::string canonical_command(const std::string& name) { return name == "waldschmidt" ? "linear-form" : name; }

int run(const std::string& requested, const std::string& config_path, const std::string& out_path,
        std::optional<long> precision, std::optional<std::uint64_t> seed, unsigned jobs) {
  const std::string name = canonical_command(requested);
  auto it = commands().find(name);
  if (it == commands().end()) throw nilmix::io::SchemaError("unknown command '" + name + "'");
  json config = read_config(config_path);
  if (!config.is_object()) throw nilmix::io::SchemaError("config must be a JSON object");
  if (config.contains("command") &&
      (!config["command"].is_string() || canonical_command(config["command"].get<std::string>()) != name))
    throw nilmix::io::SchemaError("config is for command " + config["command"].dump());
  config["command"] = name;
  if (precision) config["precision"] = *precision;
  if (seed) config["seed"] = *seed;
  if (!config.contains("precision")) config["precision"] = 128;
  if (!config.contains("seed")) config["seed"] = 1;
  if (!config.contains("budget")) config["budget"] = 100'000'000;
  if (!config.contains("output")) config["output"] = json::object();
  if (!config["output"].contains("format")) config["output"]["format"] = it->second.tabular ? "csv" : "json";
  const std::string format = config["output"]["format"].get<std::string>();
  if (format != "json" && format != "csv") throw nilmix::io::SchemaError("output format must be json or csv");
  if (format == "csv" && !it->second.tabular) throw nilmix::io::SchemaError("command '" + name + "' has no CSV output");

  RunContext ctx;
  ctx.inputs = config.contains("inputs") ? config["inputs"] : json::object();
  if (!ctx.inputs.is_object()) throw nilmix::io::SchemaError("'inputs' must be an object");
  ctx.precision = nilmix::io::parse_long(config["precision"]);
  if (ctx.precision < 32) throw nilmix::io::SchemaError("precision must be at least 32 bits");
  ctx.seed = unsigned_field(config, "seed");
  ctx.budget = unsigned_field(config, "budget");
  ctx.jobs = jobs;

  CommandResult res = it->second.run(ctx);
  config["inputs"] = ctx.inputs;

  json doc = {{"command", name}, {"config", config}, {"status", res.status}, {"result", res.result}};
  if (!res.diagnostic.empty()) doc["diagnostic"] = res.diagnostic;
  if (format == "csv") {
    emit(out_path, *res.csv);
    // The resolved config and the structured result travel in a sidecar file.
    std::string side = doc.dump(2) + "\n";
    if (out_path.empty()) std::cerr << side;
    else nilmix::io::atomic_write(out_path + ".json", side);
  } else {
    emit(out_path, doc.dump(2) + "\n");
  }
  if (!res.diagnostic.empty()) std::cerr << "nilmix: " << res.diagnostic << "\n";
  return res.status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified experiments on toral and nilmanifold automorphism actions"};
  std::string command, config_path, out_path;
  unsigned jobs = 1;
  long precision = 0;
  std::uint64_t seed = 0;
  app.add_option("command", command, "Subcommand")->required();
  app.add_option("--config", config_path, "Experiment config (JSON)")->required();
  auto* jobs_opt = app.add_option("--jobs", jobs, "Worker threads; results do not depend on it")->check(CLI::PositiveNumber);
  auto* prec_opt = app.add_option("--precision", precision, "Working precision in bits");
  auto* seed_opt = app.add_option("--seed", seed, "Random seed");
  app.add_option("--out", out_path, "Output file (default: standard output)");
  (void)jobs_opt;
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : cli::kSchema;
  }
  try {
    return run(command, config_path, out_path, prec_opt->count() ? std::optional<long>(precision) : std::nullopt,
               seed_opt->count() ? std::optional<std::uint64_t>(seed) : std::nullopt, jobs);
  } catch (const nilmix::InvalidInput& e) {
    std::cerr << "nilmix: invalid input: " << e.what() << "\n";
    return cli::kSchema;
  } catch (const nilmix::UnsupportedInput& e) {
    std::cerr << "nilmix: unsupported input: " << e.what() << "\n";
    return cli::kSchema;
  } catch (const nilmix::DegenerateInstance& e) {
    std::cerr << "nilmix: degenerate instance: " << e.what() << "\n";
    return cli::kSchema;
  } catch (const json::exception& e) {
    std::cerr << "nilmix: schema violation: " << e.what() << "\n";
    return cli::kSchema;
  } catch (const nilmix::BudgetExceeded& e) {
    std::cerr << "nilmix: budget exhausted: " << e.what() << "\n";
    return cli::kBudget;
  } catch (const nilmix::Falsification& e) {
    std::cerr << "nilmix: falsification: " << e.what() << "\n";
    return cli::kFalsification;
  } catch (const nilmix::PrecisionExhausted& e) {
    std::cerr << "nilmix: precision exhausted: " << e.what() << "\n";
    return cli::kPrecision;
  } catch (const nilmix::Undecided& e) {
    std::cerr << "nilmix: undecided: " << e.what() << "\n";
    return cli::kPrecision;
  } catch (const std::exception& e) {
    std::cerr << "nilmix: error: " << e.what() << "\n";
    return cli::kOperational;
  }
}
