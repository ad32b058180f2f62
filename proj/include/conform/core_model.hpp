#pragma once

// Requirements, test procedures, verdicts, and the conformity conjunction.
//
// A conformity assessment is planned (claim_check, design_procedures), run
// (one ProcedureVerdict per procedure, produced by the method executors) and
// analysed (evaluate_conformity). The target conforms iff every procedure
// passed.

#include <nlohmann/json.hpp>

#include <algorithm>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "conform/errors.hpp"
#include "conform/fixtures.hpp"

namespace conform {

using json = nlohmann::json;

struct Requirement {
  std::string id;
  MethodKind kind = MethodKind::Dac;
  json params = json::object();

  friend bool operator==(const Requirement&, const Requirement&) = default;
};

inline void to_json(json& j, const Requirement& r) {
  j = json{{"id", r.id}, {"kind", to_string(r.kind)}, {"params", r.params}};
}

inline void from_json(const json& j, Requirement& r) {
  r.id = j.at("id").get<std::string>();
  const auto kind_name = j.value("kind", r.id);
  auto kind = method_kind_from_string(kind_name);
  if (!kind || !is_requirement_kind(*kind))
    throw InvalidRequirement("unknown requirement kind '" + kind_name + "'");
  r.kind = *kind;
  r.params = j.value("params", json::object());
}

struct WorkflowStep {
  std::string action;
  std::string description;
  std::vector<std::string> fills;  // registered-result slots this step writes

  friend bool operator==(const WorkflowStep&, const WorkflowStep&) = default;
};

struct Criterion {
  std::string predicate;  // machine-readable id, interpreted by the executor
  std::string statement;

  friend bool operator==(const Criterion&, const Criterion&) = default;
};

struct TestProcedure {
  std::string id;
  std::string requirement_id;
  MethodKind kind = MethodKind::Dac;
  std::string purpose;
  std::vector<WorkflowStep> workflow;
  std::vector<std::string> registered_results_schema;
  Criterion criterion;
  json params = json::object();  // resolved fixture

  friend bool operator==(const TestProcedure&, const TestProcedure&) = default;
};

struct Discrepancy {
  std::string expected;
  std::string actual;
  std::string locus;

  friend bool operator==(const Discrepancy&, const Discrepancy&) = default;
};

// F_C(target, procedure) plus the evidence behind it.
class ProcedureVerdict {
 public:
  ProcedureVerdict(std::string procedure_id, bool passed, json registered,
                   std::vector<Discrepancy> discrepancies,
                   std::size_t attempts = 0)
      : procedure_id_(std::move(procedure_id)),
        passed_(passed),
        registered_(std::move(registered)),
        discrepancies_(std::move(discrepancies)),
        attempts_(attempts) {
    if (passed_ != discrepancies_.empty())
      throw InvalidVerdict("verdict for '" + procedure_id_ +
                           "': passed must hold iff there are no "
                           "discrepancies");
    if (!registered_.is_object()) registered_ = json::object();
  }

  // Derives `passed` from the discrepancy list.
  static ProcedureVerdict from_comparison(std::string procedure_id,
                                          json registered,
                                          std::vector<Discrepancy> found,
                                          std::size_t attempts) {
    const bool ok = found.empty();
    return ProcedureVerdict(std::move(procedure_id), ok, std::move(registered),
                            std::move(found), attempts);
  }

  const std::string& procedure_id() const { return procedure_id_; }
  bool passed() const { return passed_; }
  const json& registered() const { return registered_; }
  const std::vector<Discrepancy>& discrepancies() const {
    return discrepancies_;
  }
  // Standard operations (probes, trials, adapter actions) performed.
  std::size_t attempts() const { return attempts_; }

 private:
  std::string procedure_id_;
  bool passed_;
  json registered_;
  std::vector<Discrepancy> discrepancies_;
  std::size_t attempts_;
};

struct ConformityVerdict {
  std::vector<std::pair<std::string, bool>> per_procedure;
  bool conformant = false;
};

// ---------------------------------------------------------------------------
// Planning
// ---------------------------------------------------------------------------

// True iff the target claims every requirement under test.
inline bool claim_check(const std::set<std::string>& spec_claims,
                        std::span<const Requirement> requirements) {
  return std::all_of(requirements.begin(), requirements.end(),
                     [&](const Requirement& r) {
                       return spec_claims.contains(r.id);
                     });
}

namespace detail {

struct Template {
  std::string purpose;
  std::vector<WorkflowStep> workflow;
  std::vector<std::string> slots;
  Criterion criterion;
};

inline Template method_template(MethodKind kind) {
  switch (kind) {
    case MethodKind::Dac:
    case MethodKind::DeviceMatching: {
      const bool dev = kind == MethodKind::DeviceMatching;
      const std::string objs = dev ? "input/output devices" : "test objects";
      return {
          dev ? "Check that user-to-device access matches the configured "
                "device access matrix."
              : "Check that discretionary access isolation enforces the "
                "configured access matrix.",
          {{"create_fixture",
            "Create test subjects and " + objs + " and fix the rights "
            "universe.",
            {"subjects", "objects", "rights"}},
           {"adjust_rights", "Configure the access matrix on the target.",
            {"access_matrix"}},
           {"probe_access",
            "Attempt every (subject, object, right) access and record whether "
            "it was granted.",
            {"probe_records"}},
           {"compare",
            "Compare observed outcomes with the rights in the access matrix.",
            {"probe_records"}}},
          {"subjects", "objects", "rights", "access_matrix", "probe_records"},
          {"dac_outcomes_match_matrix",
           "Observed access outcomes coincide with the access matrix for "
           "every probed (subject, object, right)."}};
    }
    case MethodKind::Mac:
    case MethodKind::CarrierOutput: {
      const bool car = kind == MethodKind::CarrierOutput;
      return {
          car ? "Check that input/output to alienated carriers obeys the "
                "label rules."
              : "Check that mandatory access control enforces the label "
                "rules.",
          {{"create_fixture",
            car ? "Create test subjects and alienated carrier objects."
                : "Create test subjects and objects.",
            {"subjects", "objects"}},
           {"label_subjects", "Assign classification labels to subjects.",
            {"labels"}},
           {"label_objects", "Assign classification labels to objects.",
            {"labels"}},
           {"probe_read_write",
            "Attempt read and write for every (subject, object) pair.",
            {"probe_records"}},
           {"check_rules",
            "Check outcomes against: read iff subject level >= object level; "
            "write iff object level >= subject level.",
            {"probe_records"}}},
          {"subjects", "objects", "labels", "probe_records"},
          {"mac_outcomes_match_label_rules",
           "Every observed read/write outcome agrees with the label rules."}};
    }
    case MethodKind::MemoryClean:
      return {"Check that released memory no longer contains prior data.",
              {{"adjust_cleaning", "Record the target's wipe configuration.",
                {"wipe_configuration", "areas"}},
               {"place", "Place a unique sentinel into each memory area.",
                {"sentinels"}},
               {"locate", "Locate each sentinel before release.",
                {"pre_release_found"}},
               {"release", "Release each area through the target.",
                {"areas"}},
               {"scan", "Search each area for its sentinel after release.",
                {"post_release_found"}}},
              {"wipe_configuration", "areas", "sentinels",
               "pre_release_found", "post_release_found"},
              {"no_sentinel_after_release",
               "No sentinel is found in any area after release."}};
    case MethodKind::ModuleIsolation:
      return {"Check that process address spaces are isolated between users "
              "and real memory is not reachable.",
              {{"spawn", "Run processes on behalf of different users.",
                {"processes"}},
               {"own_access", "Access each process's memory as its owner.",
                {"attempts"}},
               {"cross_access",
                "Access each process's memory as every other user.",
                {"attempts"}},
               {"real_memory", "Attempt access to real (physical) memory.",
                {"attempts"}}},
              {"processes", "attempts"},
              {"isolation_holds",
               "Own-process access succeeds; no cross-user or real-memory "
               "access occurs."}};
    case MethodKind::IdentAuth:
      return {"Check identification and authentication decisions.",
              {{"register", "Create the test accounts.", {"accounts"}},
               {"login_trials",
                "Attempt logins with registered/unregistered ids and "
                "true/false passwords.",
                {"trials"}},
               {"analyse", "Compare login outcomes with account membership.",
                {"trials"}}},
              {"accounts", "trials"},
              {"auth_matches_accounts",
               "Registered id with its password is admitted; any unregistered "
               "id or wrong password is refused."}};
    case MethodKind::Integrity:
      return {"Check that the integrity control detects modified files.",
              {{"identify_files", "Identify the protected file set.",
                {"f_issh"}},
               {"tamper", "Modify the chosen files.", {"f_mod", "patches"}},
               {"check", "Trigger the target's integrity check.",
                {"flagged"}},
               {"analyse", "Compare flagged files with modified files.",
                {"flagged"}}},
              {"f_issh", "f_mod", "patches", "flagged"},
              {"flagged_equals_modified",
               "The flagged set equals the modified set: no miss, no false "
               "alarm."}};
    case MethodKind::AuditCoupling:
      return {"Check that the audit log records every access and login "
              "attempt made by the coupled procedures, with the user id.",
              {{"fetch_audit", "Fetch the target's audit log.",
                {"audit_records"}},
               {"match", "Match every prior attempt to an audit record.",
                {"audit_matches", "unmatched"}}},
              {"audit_records", "audit_matches", "unmatched"},
              {"every_attempt_audited",
               "Every prior attempt has a matching audit record and every "
               "login record names the user id."}};
  }
  return {};
}

}  // namespace detail

inline TestProcedure instantiate_procedure(const Requirement& r,
                                           const SutDescriptor& sut) {
  for (auto c : required_capabilities(r.kind))
    if (!sut.capabilities.contains(c))
      throw UnsupportedRequirement(
          "requirement '" + r.id + "' (" + std::string(to_string(r.kind)) +
          ") needs the '" + std::string(to_string(c)) +
          "' capability, which the target lacks");
  auto t = detail::method_template(r.kind);
  return TestProcedure{r.id,
                       r.id,
                       r.kind,
                       std::move(t.purpose),
                       std::move(t.workflow),
                       std::move(t.slots),
                       std::move(t.criterion),
                       resolve_params(r.kind, r.params, sut)};
}

// One procedure per requirement, in requirement order.
inline std::vector<TestProcedure> design_procedures(
    const SutDescriptor& sut, std::span<const Requirement> requirements) {
  std::set<std::string> ids;
  for (const auto& r : requirements) {
    if (r.id.empty()) throw InvalidRequirement("requirement without id");
    if (!ids.insert(r.id).second)
      throw InvalidRequirement("duplicate requirement id '" + r.id + "'");
  }
  std::vector<TestProcedure> out;
  out.reserve(requirements.size());
  for (const auto& r : requirements) out.push_back(instantiate_procedure(r, sut));
  return out;
}

inline constexpr std::string_view kAuditCouplingId = "AUDIT_COUPLING";

// The audit-coupling procedure that accompanies identification testing.
// Returns nullopt when no IDENT_AUTH procedure is designed.
inline std::optional<TestProcedure> design_audit_coupling(
    const SutDescriptor& sut, std::span<const TestProcedure> designed) {
  auto ident = std::find_if(designed.begin(), designed.end(),
                            [](const TestProcedure& p) {
                              return p.kind == MethodKind::IdentAuth;
                            });
  if (ident == designed.end()) return std::nullopt;
  for (const auto& p : designed)
    if (p.id == kAuditCouplingId)
      throw InvalidRequirement("procedure id '" + p.id + "' is reserved");
  if (!sut.capabilities.contains(Capability::Audit))
    throw UnsupportedRequirement(
        "audit coupling needs the 'audit' capability, which the target lacks");

  json coupled = json::array();
  std::size_t records = 0;
  for (const auto& p : designed) {
    if (!is_audit_host(p.kind)) continue;
    coupled.push_back(p.id);
    records += exhaustive_probe_count(p.kind, p.params);
  }
  auto t = detail::method_template(MethodKind::AuditCoupling);
  return TestProcedure{std::string(kAuditCouplingId),
                       ident->requirement_id,
                       MethodKind::AuditCoupling,
                       std::move(t.purpose),
                       std::move(t.workflow),
                       std::move(t.slots),
                       std::move(t.criterion),
                       json{{"coupled", coupled},
                            {"expected_records", records}}};
}

// ---------------------------------------------------------------------------
// Analysis
// ---------------------------------------------------------------------------

// Conjunction over verdicts; `designed` must be covered exactly once.
inline ConformityVerdict evaluate_conformity(
    std::span<const ProcedureVerdict> verdicts,
    std::span<const TestProcedure> designed) {
  std::map<std::string, int> seen;
  for (const auto& v : verdicts) ++seen[v.procedure_id()];
  for (const auto& p : designed) {
    auto it = seen.find(p.id);
    if (it == seen.end())
      throw IncompleteResults("procedure '" + p.id + "' has no verdict");
    if (it->second != 1)
      throw IncompleteResults("procedure '" + p.id +
                              "' has more than one verdict");
  }
  if (verdicts.size() != designed.size())
    throw IncompleteResults("verdicts do not match the designed procedures");
  if (verdicts.empty())
    throw IncompleteResults("no verdicts to evaluate");

  ConformityVerdict out;
  out.conformant = true;
  for (const auto& v : verdicts) {
    out.per_procedure.emplace_back(v.procedure_id(), v.passed());
    out.conformant = out.conformant && v.passed();
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------
inline void to_json(json& j, const WorkflowStep& s) {
  j = json{{"action", s.action},
           {"description", s.description},
           {"fills", s.fills}};
}
inline void from_json(const json& j, WorkflowStep& s) {
  s.action = j.at("action").get<std::string>();
  s.description = j.value("description", std::string());
  s.fills = j.at("fills").get<std::vector<std::string>>();
}

inline void to_json(json& j, const Criterion& c) {
  j = json{{"predicate", c.predicate}, {"statement", c.statement}};
}
inline void from_json(const json& j, Criterion& c) {
  c.predicate = j.at("predicate").get<std::string>();
  c.statement = j.value("statement", std::string());
}

inline void to_json(json& j, const TestProcedure& p) {
  j = json{{"id", p.id},
           {"requirement_id", p.requirement_id},
           {"kind", to_string(p.kind)},
           {"purpose", p.purpose},
           {"workflow", p.workflow},
           {"registered_results_schema", p.registered_results_schema},
           {"criterion", p.criterion},
           {"params", p.params}};
}
inline void from_json(const json& j, TestProcedure& p) {
  p.id = j.at("id").get<std::string>();
  p.requirement_id = j.at("requirement_id").get<std::string>();
  auto kind = method_kind_from_string(j.at("kind").get<std::string>());
  if (!kind) throw InvalidRequirement("unknown procedure kind");
  p.kind = *kind;
  p.purpose = j.value("purpose", std::string());
  p.workflow = j.at("workflow").get<std::vector<WorkflowStep>>();
  p.registered_results_schema =
      j.at("registered_results_schema").get<std::vector<std::string>>();
  p.criterion = j.at("criterion").get<Criterion>();
  p.params = j.value("params", json::object());
}

inline void to_json(json& j, const Discrepancy& d) {
  j = json{{"expected", d.expected}, {"actual", d.actual}, {"locus", d.locus}};
}

}  // namespace conform
