#pragma once

// Plan files: the inspectable artifact between planning and running.
//
// A plan records the target configuration and claims, the requirements with
// their params, the designed procedures in execution order, the chosen
// strategy per procedure, and the seed every random choice derives from.

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "conform/core_model.hpp"
#include "conform/defects.hpp"
#include "conform/optimizer.hpp"
#include "conform/simulator.hpp"

namespace conform {

inline constexpr int kPlanSchemaVersion = 1;
inline constexpr int kReportSchemaVersion = 1;

struct SutSpec {
  std::string adapter = "simulator";
  std::set<std::string> claims;
  SimulatorConfig simulator;

  friend bool operator==(const SutSpec&, const SutSpec&) = default;
};

struct PlanningOptions {
  std::optional<std::uint64_t> budget;
  std::map<std::string, Strategy> overrides;
  bool allow_reduced = false;
  CostModel cost_model;
};

struct PlanFile {
  int schema_version = kPlanSchemaVersion;
  std::uint64_t seed = 0;
  SutSpec sut;
  std::vector<Requirement> requirements;
  bool allow_reduced = false;
  std::map<std::string, Strategy> overrides;
  DefectSet defects;
  std::vector<TestProcedure> procedures;  // execution order
  Plan plan;

  friend bool operator==(const PlanFile&, const PlanFile&) = default;
};

inline std::unique_ptr<Simulator> open_target(const SutSpec& spec,
                                              DefectSet defects,
                                              std::uint64_t seed) {
  if (spec.adapter != "simulator")
    throw ConfigError("adapter '" + spec.adapter +
                      "' is not available in this build");
  return create_sut(spec.simulator, std::move(defects), seed);
}

// Claim check, procedure design, pricing, optimization and combining.
// Throws ClaimCheckFailed / UnsupportedRequirement / InvalidRequirement;
// returns nullopt when no strategy selection fits the budget.
inline std::optional<PlanFile> build_plan(
    const SutSpec& sut, const std::vector<Requirement>& requirements,
    const PlanningOptions& options, std::uint64_t seed) {
  if (!claim_check(sut.claims, requirements)) {
    std::string missing;
    for (const auto& r : requirements)
      if (!sut.claims.contains(r.id)) missing += (missing.empty() ? "" : ", ") + r.id;
    throw ClaimCheckFailed("claim check failed: target does not claim " +
                           missing);
  }

  auto target = open_target(sut, {}, seed);
  const auto descriptor = SutDescriptor::of(*target);
  auto procedures = design_procedures(descriptor, requirements);
  if (auto coupling = design_audit_coupling(descriptor, procedures))
    procedures.push_back(std::move(*coupling));
  std::stable_sort(procedures.begin(), procedures.end(),
                   [](const TestProcedure& a, const TestProcedure& b) {
                     return execution_group(a.kind) < execution_group(b.kind);
                   });

  for (const auto& [id, _] : options.overrides)
    if (std::none_of(procedures.begin(), procedures.end(),
                     [&](const TestProcedure& p) { return p.id == id; }))
      throw InvalidRequirement("strategy override for unknown procedure '" +
                               id + "'");

  std::vector<std::vector<StrategyOption>> groups;
  for (const auto& p : procedures) {
    auto priced = price_strategies(p, options.cost_model, seed);
    std::vector<StrategyOption> kept;
    auto ov = options.overrides.find(p.id);
    for (auto& o : priced) {
      const bool keep =
          ov != options.overrides.end()
              ? o.strategy == ov->second
              : (options.allow_reduced ||
                 o.strategy.kind == Strategy::Kind::Exhaustive);
      if (keep) kept.push_back(std::move(o));
    }
    if (kept.empty())
      throw InvalidRequirement("strategy '" + to_string(ov->second) +
                               "' is not available for procedure '" + p.id +
                               "'");
    groups.push_back(std::move(kept));
  }

  auto plan = optimize_plan(groups, options.budget, options.cost_model);
  if (!plan) return std::nullopt;

  PlanFile out;
  out.seed = seed;
  out.sut = sut;
  out.requirements = requirements;
  out.allow_reduced = options.allow_reduced;
  out.overrides = options.overrides;
  out.procedures = std::move(procedures);
  out.plan = combine_procedures(std::move(*plan)).plan;
  return out;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------
inline void to_json(json& j, const SutSpec& s) {
  j = json{{"adapter", s.adapter}, {"claims", s.claims}, {"simulator", s.simulator}};
}

inline void from_json(const json& j, SutSpec& s) {
  if (!j.is_object()) throw ConfigError("sut section must be an object");
  SutSpec out;
  try {
    out.adapter = j.value("adapter", out.adapter);
    out.claims = j.value("claims", std::set<std::string>{});
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed sut section: ") + e.what());
  }
  out.simulator = j.value("simulator", json::object()).get<SimulatorConfig>();
  s = std::move(out);
}

inline void to_json(json& j, const PlanFile& p) {
  json overrides = json::object();
  for (const auto& [id, s] : p.overrides) overrides[id] = to_string(s);
  json defects = json::array();
  for (const auto& d : p.defects) defects.push_back(format_defect(d));
  j = json{{"schema_version", p.schema_version},
           {"seed", p.seed},
           {"sut", p.sut},
           {"requirements", p.requirements},
           {"allow_reduced", p.allow_reduced},
           {"strategy_overrides", overrides},
           {"defects", defects},
           {"procedures", p.procedures},
           {"plan", p.plan}};
}

inline PlanFile parse_plan(const json& j) {
  try {
    if (!j.is_object()) throw PlanFormatError("plan must be a JSON object");
    PlanFile p;
    p.schema_version = j.at("schema_version").get<int>();
    if (p.schema_version != kPlanSchemaVersion)
      throw PlanFormatError("unsupported plan schema_version " +
                            std::to_string(p.schema_version));
    if (!j.contains("seed")) throw PlanFormatError("plan has no seed");
    p.seed = j.at("seed").get<std::uint64_t>();
    p.sut = j.at("sut").get<SutSpec>();
    p.requirements = j.at("requirements").get<std::vector<Requirement>>();
    p.allow_reduced = j.value("allow_reduced", false);
    for (const auto& [id, s] : j.value("strategy_overrides", json::object()).items())
      p.overrides[id] = parse_strategy(s.get<std::string>());
    for (const auto& d : j.value("defects", json::array()))
      p.defects.insert(parse_defect(d.get<std::string>()));
    p.procedures = j.at("procedures").get<std::vector<TestProcedure>>();
    p.plan = j.at("plan").get<Plan>();

    std::vector<std::string> ids;
    for (const auto& proc : p.procedures) ids.push_back(proc.id);
    if (ids != p.plan.order)
      throw PlanFormatError("plan order does not match the procedure list");
    for (const auto& proc : p.procedures)
      if (p.plan.chosen.at(proc.id).kind != proc.kind)
        throw PlanFormatError("strategy kind mismatch for '" + proc.id + "'");
    return p;
  } catch (const json::exception& e) {
    throw PlanFormatError(std::string("malformed plan: ") + e.what());
  } catch (const PlanFormatError&) {
    throw;
  } catch (const Error& e) {
    throw PlanFormatError(std::string("invalid plan: ") + e.what());
  }
}

inline PlanFile parse_plan(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw PlanFormatError(std::string("plan is not valid JSON: ") + e.what());
  }
  return parse_plan(j);
}

inline std::string serialize_plan(const PlanFile& p) {
  return json(p).dump(2) + "\n";
}

}  // namespace conform
