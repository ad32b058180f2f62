// conform: plan, run and inspect conformity tests against a target.
//
//   conform plan --sut sut.json --requirements reqs.json --plan plan.json
//                [--budget N] [--strategy DAC=tway:2] [--allow-reduced]
//                [--seed N]
//   conform run --plan plan.json --report report.json [--defect NAME[:p]]...
//               [--seed N]
//   conform verify-ca array.txt
//   conform gen-ca --domains 3,4,3 --t 2 [--seed N] [--out array.txt]
//
// Exit codes: 0 success / conformant, 1 non-conformant or coverage gap,
// 2 error (including infeasible plans and failed claim checks).

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "conform/conform.hpp"

namespace {

using conform::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw conform::ConfigError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw conform::ConfigError("cannot write '" + path + "'");
  out << text;
  if (!out) throw conform::ConfigError("write to '" + path + "' failed");
}

json read_json(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw conform::ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
}

std::uint64_t parse_seed(const std::string& text, const char* source) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(text, &used, 0);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || text.front() == '-')
    throw conform::ConfigError(std::string("bad seed from ") + source + ": '" +
                               text + "'");
  return v;
}

// --seed wins; CONFORM_SEED is the fallback.
std::optional<std::uint64_t> resolve_seed(const std::string& flag) {
  if (!flag.empty()) return parse_seed(flag, "--seed");
  if (const char* env = std::getenv("CONFORM_SEED"); env && *env)
    return parse_seed(env, "CONFORM_SEED");
  return std::nullopt;
}

std::vector<conform::Requirement> load_requirements(const std::string& path) {
  const auto j = read_json(path);
  const json& list = j.is_object() ? j.at("requirements") : j;
  try {
    return list.get<std::vector<conform::Requirement>>();
  } catch (const json::exception& e) {
    throw conform::ConfigError("malformed requirements in '" + path +
                               "': " + e.what());
  }
}

struct PlanArgs {
  std::string sut, requirements, out, budget = "inf", seed;
  std::vector<std::string> strategies;
  bool allow_reduced = false;
};

int cmd_plan(const PlanArgs& a) {
  const auto seed = resolve_seed(a.seed);
  if (!seed) {
    std::cerr << "error: a seed is required (--seed or CONFORM_SEED)\n";
    return 2;
  }
  const auto sut = read_json(a.sut).get<conform::SutSpec>();
  const auto reqs = load_requirements(a.requirements);

  conform::PlanningOptions opts;
  opts.allow_reduced = a.allow_reduced;
  if (a.budget != "inf" && a.budget != "unbounded")
    opts.budget = parse_seed(a.budget, "--budget");
  for (const auto& s : a.strategies) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0)
      throw conform::ConfigError("--strategy expects PROC=exh|tway:N, got '" +
                                 s + "'");
    opts.overrides[s.substr(0, eq)] = conform::parse_strategy(s.substr(eq + 1));
  }

  const auto plan = conform::build_plan(sut, reqs, opts, *seed);
  if (!plan) {
    std::cerr << "infeasible: no strategy selection fits budget "
              << a.budget << "\n";
    return 2;
  }
  write_file(a.out, conform::serialize_plan(*plan));
  std::cerr << "planned " << plan->procedures.size() << " procedures, time "
            << plan->plan.total_time << ", cost " << plan->plan.total_cost
            << "\n";
  for (const auto& id : plan->plan.order)
    std::cerr << "  " << id << "  "
              << conform::to_string(plan->plan.chosen.at(id).strategy) << "\n";
  return 0;
}

struct RunArgs {
  std::string plan, report, seed;
  std::vector<std::string> defects;
};

int cmd_run(const RunArgs& a) {
  conform::PlanFile plan;
  conform::DefectSet defects;
  std::optional<std::uint64_t> seed;
  try {
    plan = conform::parse_plan(read_file(a.plan));
    for (const auto& d : a.defects) defects.insert(conform::parse_defect(d));
    if (!a.seed.empty()) seed = parse_seed(a.seed, "--seed");
  } catch (const conform::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  auto result = conform::run_plan(plan, defects, seed);
  write_file(a.report, result.report.dump(2) + "\n");
  if (result.aborted()) {
    std::cerr << "aborted: " << result.error << "\n";
    return 2;
  }
  for (const auto& [id, passed] : result.verdict->per_procedure)
    std::cerr << (passed ? "  pass  " : "  FAIL  ") << id << "\n";
  std::cerr << (result.verdict->conformant ? "conformant" : "non-conformant")
            << "\n";
  return result.exit_code();
}

int cmd_verify_ca(const std::string& path) {
  conform::CoveringArray ca;
  try {
    ca = conform::parse_covering_array(read_file(path));
  } catch (const conform::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  const auto gap = conform::first_uncovered(ca);
  if (!gap) {
    std::cout << "coverage holds: " << ca.rows.size() << " rows, strength "
              << ca.strength << "\n";
    return 0;
  }
  std::cout << "uncovered:";
  for (std::size_t i = 0; i < gap->params.size(); ++i)
    std::cout << " p" << gap->params[i] << "=" << gap->values[i];
  std::cout << "\n";
  return 1;
}

int cmd_gen_ca(const std::string& domains_text, std::size_t t,
               const std::string& seed_flag, const std::string& out) {
  std::vector<std::size_t> domains;
  std::stringstream ss(domains_text);
  for (std::string item; std::getline(ss, item, ',');)
    domains.push_back(parse_seed(item, "--domains"));
  const auto seed = resolve_seed(seed_flag).value_or(0);
  write_file(out, conform::format_covering_array(
                      conform::generate_covering_array(domains, t, seed)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conformity testing of access-isolation, runtime and identity "
               "controls"};
  app.require_subcommand(1);

  PlanArgs plan_args;
  auto* plan = app.add_subcommand("plan", "Design, price and optimize a test plan");
  plan->add_option("--sut", plan_args.sut, "Target description (JSON)")->required();
  plan->add_option("--requirements", plan_args.requirements,
                   "Requirement list (JSON)")->required();
  plan->add_option("--plan", plan_args.out, "Output plan file ('-' for stdout)")
      ->required();
  plan->add_option("--budget", plan_args.budget, "Cost budget, or 'inf'");
  plan->add_option("--strategy", plan_args.strategies,
                   "Pin a strategy: PROC=exh|tway:N (repeatable)");
  plan->add_flag("--allow-reduced", plan_args.allow_reduced,
                 "Let the optimizer choose t-way strategies");
  plan->add_option("--seed", plan_args.seed, "Seed (default: $CONFORM_SEED)");

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Execute a plan and write the report");
  run->add_option("--plan", run_args.plan, "Plan file")->required();
  run->add_option("--report", run_args.report, "Report file ('-' for stdout)")
      ->required();
  run->add_option("--defect", run_args.defects,
                  "Inject a simulator defect NAME[:params] (repeatable)");
  run->add_option("--seed", run_args.seed, "Override the plan seed");

  std::string ca_path;
  auto* verify = app.add_subcommand("verify-ca", "Check a covering array file");
  verify->add_option("array", ca_path, "Covering array file")->required();

  std::string gen_domains, gen_seed, gen_out = "-";
  std::size_t gen_t = 2;
  auto* gen = app.add_subcommand("gen-ca", "Generate a covering array");
  gen->add_option("--domains", gen_domains, "Comma-separated domain sizes")
      ->required();
  gen->add_option("--t", gen_t, "Strength");
  gen->add_option("--seed", gen_seed, "Seed (default: $CONFORM_SEED or 0)");
  gen->add_option("--out", gen_out, "Output file ('-' for stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*plan) return cmd_plan(plan_args);
    if (*run) return cmd_run(run_args);
    if (*verify) return cmd_verify_ca(ca_path);
    if (*gen) return cmd_gen_ca(gen_domains, gen_t, gen_seed, gen_out);
  } catch (const conform::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
