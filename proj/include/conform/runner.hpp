#pragma once

// Executes a plan against a fresh target and assembles the report.

#include <nlohmann/json.hpp>

#include <chrono>
#include <ctime>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "conform/method_access.hpp"
#include "conform/method_identity.hpp"
#include "conform/method_runtime.hpp"
#include "conform/plan_file.hpp"

namespace conform {

struct RunResult {
  json report;
  std::optional<ConformityVerdict> verdict;  // nullopt when aborted
  std::string error;

  bool aborted() const { return !verdict.has_value(); }
  // 0 conformant, 1 non-conformant, 2 aborted.
  int exit_code() const {
    if (!verdict) return 2;
    return verdict->conformant ? 0 : 1;
  }
};

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(
      std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace detail {

inline std::optional<CoveringArray> reduced_array(const TestProcedure& p,
                                                  const Strategy& s,
                                                  std::uint64_t seed) {
  if (s.kind != Strategy::Kind::TWay) return std::nullopt;
  if (!is_reducible(p.kind))
    throw PlanFormatError("procedure '" + p.id + "' cannot run t-way");
  return strategy_array(p, s.strength, seed);
}

inline ProcedureVerdict execute(SutAdapter& sut, const TestProcedure& p,
                                const Strategy& s, std::uint64_t seed,
                                std::span<const ProcedureVerdict> prior) {
  const auto ca = reduced_array(p, s, seed);
  const CoveringArray* rows = ca ? &*ca : nullptr;
  switch (p.kind) {
    case MethodKind::Dac:
      return run_dac_test(sut, access_fixture(p.params), p.id, rows);
    case MethodKind::DeviceMatching:
      return run_device_matching_test(sut, access_fixture(p.params), p.id,
                                      rows);
    case MethodKind::Mac:
      return run_mac_test(sut, label_fixture(p.params), p.id, rows);
    case MethodKind::CarrierOutput:
      return run_carrier_output_test(sut, label_fixture(p.params), p.id, rows);
    case MethodKind::MemoryClean:
      return run_memory_cleaning_test(sut, memory_fixture(p.params), seed,
                                      p.id);
    case MethodKind::ModuleIsolation:
      return run_isolation_test(sut, isolation_fixture(p.params), p.id);
    case MethodKind::IdentAuth:
      return run_auth_test(sut, accounts_fixture(p.params), seed, p.id);
    case MethodKind::Integrity:
      return run_integrity_test(sut, integrity_fixture(p.params), p.id);
    case MethodKind::AuditCoupling: {
      std::set<std::string> coupled;
      for (const auto& id : p.params.value("coupled", json::array()))
        coupled.insert(id.get<std::string>());
      std::vector<ProcedureVerdict> hosts;
      for (const auto& v : prior)
        if (coupled.contains(v.procedure_id())) hosts.push_back(v);
      return run_audit_coupling_check(sut, hosts, p.id);
    }
  }
  throw PlanFormatError("unknown procedure kind for '" + p.id + "'");
}

// Plan echo for the report: account passwords become digests.
inline json redacted_echo(json j) {
  if (j.is_object()) {
    if (j.contains("pwd") && j.at("pwd").is_string()) {
      j["pwd_digest"] = redact(j.at("pwd").get<std::string>());
      j.erase("pwd");
    }
    for (auto& [key, value] : j.items()) value = redacted_echo(std::move(value));
  } else if (j.is_array()) {
    for (auto& value : j) value = redacted_echo(std::move(value));
  }
  return j;
}

inline json procedure_section(const TestProcedure& p,
                              const StrategyOption& option,
                              const ProcedureVerdict& v,
                              std::uint64_t consumed_time) {
  json workflow = json::array();
  for (const auto& step : p.workflow)
    workflow.push_back({{"action", step.action},
                        {"description", step.description},
                        {"fills", step.fills},
                        {"status", "done"}});
  json section{{"id", p.id},
               {"requirement_id", p.requirement_id},
               {"kind", to_string(p.kind)},
               {"purpose", p.purpose},
               {"workflow", std::move(workflow)},
               {"strategy", to_string(option.strategy)},
               {"planned_probes", option.probe_count},
               {"attempts", v.attempts()},
               {"time_estimate", option.time},
               {"time_consumed", consumed_time},
               {"registered", v.registered()},
               {"criterion", p.criterion},
               {"passed", v.passed()},
               {"discrepancies", v.discrepancies()}};
  if (v.registered().contains("coverage_fraction"))
    section["coverage_fraction"] = v.registered().at("coverage_fraction");
  return section;
}

}  // namespace detail

// Runs every procedure in plan order. `extra_defects` are injected on top of
// those recorded in the plan; `seed_override` replaces the plan seed for the
// target and sentinel/trial generation (covering arrays stay on the plan
// seed so the probed rows match what was priced).
inline RunResult run_plan(const PlanFile& plan, const DefectSet& extra_defects = {},
                          std::optional<std::uint64_t> seed_override = {}) {
  DefectSet defects = plan.defects;
  defects.insert(extra_defects.begin(), extra_defects.end());
  const std::uint64_t seed = seed_override.value_or(plan.seed);

  json defect_names = json::array();
  for (const auto& d : defects) defect_names.push_back(format_defect(d));

  RunResult result;
  result.report = json{{"schema_version", kReportSchemaVersion},
                       {"generated_at", utc_timestamp()},
                       {"status", "running"},
                       {"run_seed", seed},
                       {"defects", defect_names},
                       {"plan", detail::redacted_echo(plan)},
                       {"procedures", json::array()}};

  std::vector<ProcedureVerdict> verdicts;
  std::uint64_t consumed_time = 0, consumed_cost = 0;
  try {
    auto sut = open_target(plan.sut, defects, seed);
    for (const auto& p : plan.procedures) {
      const auto& option = plan.plan.chosen.at(p.id);
      auto v = detail::execute(*sut, p, option.strategy, plan.seed, verdicts);
      const auto& m = plan.plan.model;
      const std::uint64_t probes =
          option.strategy.kind == Strategy::Kind::Combined ? 0 : v.attempts();
      const auto t = detail::add(detail::mul(probes, m.probe_time),
                                 m.overhead_time);
      const auto c = detail::add(detail::mul(v.attempts(), m.probe_cost),
                                 m.overhead_cost);
      consumed_time = detail::add(consumed_time, t);
      consumed_cost = detail::add(consumed_cost, c);
      result.report["procedures"].push_back(
          detail::procedure_section(p, option, v, t));
      verdicts.push_back(std::move(v));
    }
    auto verdict = evaluate_conformity(verdicts, plan.procedures);
    json per = json::array();
    for (const auto& [id, passed] : verdict.per_procedure)
      per.push_back({{"id", id}, {"passed", passed}});
    result.report["conformity"] = {{"per_procedure", std::move(per)},
                                   {"conformant", verdict.conformant}};
    result.verdict = std::move(verdict);
    result.report["status"] = "complete";
  } catch (const Error& e) {
    result.error = e.what();
    result.report["status"] = "aborted";
    result.report["error"] = result.error;
  }
  result.report["totals"] = {
      {"time_consumed", consumed_time},
      {"time_estimate", plan.plan.total_time},
      {"cost_consumed", consumed_cost},
      {"cost_estimate", plan.plan.total_cost},
      {"budget", plan.plan.budget ? json(*plan.plan.budget) : json(nullptr)}};
  return result;
}

// Report text with the generation timestamp removed; equal for reruns of the
// same plan and seed.
inline std::string report_fingerprint(json report) {
  report.erase("generated_at");
  return report.dump();
}

}  // namespace conform
