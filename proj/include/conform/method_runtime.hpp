#pragma once

// Executors for memory cleaning and module (process) isolation.

#include <set>
#include <string>
#include <vector>

#include "conform/core_model.hpp"
#include "conform/sut.hpp"

namespace conform {

// Per area: place a sentinel, locate it, release the area, scan again.
// The procedure passes iff no sentinel survives its release. A sentinel that
// cannot be located before release is a fixture fault and is thrown
// (SentinelNotPlaced), not reported as non-conformance.
inline ProcedureVerdict run_memory_cleaning_test(
    SutAdapter& sut, const std::vector<MemoryArea>& areas,
    std::uint64_t run_seed, const std::string& procedure_id = "MEMORY_CLEAN") {
  require_capability(sut, Capability::Memory, procedure_id);
  if (areas.empty()) throw FixtureError("memory cleaning needs >= 1 area");

  const auto target_areas = sut.memory_areas();
  std::vector<Sentinel> sentinels;
  std::set<std::string> distinct;
  for (const auto& a : areas) {
    auto known = std::find_if(target_areas.begin(), target_areas.end(),
                              [&](const MemoryArea& t) { return t.id == a.id; });
    if (known == target_areas.end())
      throw UnknownArea("target has no memory area '" + a.id + "'");
    auto s = gen_sentinel(a.id, run_seed);
    if (s.bytes.size() < kSentinelLength || s.bytes.size() > known->size)
      throw FixtureError("sentinel does not fit area '" + a.id + "'");
    if (!distinct.insert(s.bytes).second)
      throw FixtureError("sentinel collision across areas");
    sentinels.push_back(std::move(s));
  }

  json registered{{"wipe_configuration", sut.wipe_configuration()},
                  {"areas", areas},
                  {"sentinels", json::object()},
                  {"pre_release_found", json::object()},
                  {"post_release_found", json::object()}};
  std::vector<Discrepancy> found;
  for (auto& s : sentinels) {
    registered["sentinels"][s.area_id] = redact(s.bytes);
    sut.mem_place(s.area_id, s.bytes);
    s.location = sut.mem_locate(s.area_id, s.bytes);
    registered["pre_release_found"][s.area_id] = true;
    sut.mem_release(s.area_id);
    const bool present = sut.mem_scan(s.area_id, s.bytes);
    registered["post_release_found"][s.area_id] = present;
    if (present)
      found.push_back({"sentinel absent after release",
                       "sentinel present after release",
                       "area " + s.area_id});
  }
  return ProcedureVerdict::from_comparison(procedure_id, std::move(registered),
                                           std::move(found),
                                           4 * sentinels.size());
}

// Own-process access must succeed; cross-user and real-memory access must
// not.
inline ProcedureVerdict run_isolation_test(
    SutAdapter& sut, const IsolationFixture& fixture,
    const std::string& procedure_id = "MODULE_ISOLATION") {
  fixture.validate();
  require_capability(sut, Capability::Processes, procedure_id);

  struct Proc {
    Pid pid;
    std::string owner;
  };
  std::vector<Proc> procs;
  json processes = json::array();
  for (const auto& u : fixture.users) {
    for (std::size_t i = 0; i < fixture.processes_per_user; ++i) {
      procs.push_back({sut.spawn(u), u});
      processes.push_back(
          {{"pid", procs.back().pid.value}, {"owner", u}});
    }
  }

  json attempts = json::array();
  std::vector<Discrepancy> found;
  auto record = [&](std::string kind, const std::string& actor,
                    std::string target, bool expected, bool actual) {
    attempts.push_back({{"kind", kind},
                        {"actor", actor},
                        {"target", target},
                        {"expected", expected},
                        {"actual", actual}});
    if (expected != actual)
      found.push_back({expected ? "granted" : "denied",
                       actual ? "granted" : "denied",
                       kind + " " + actor + " -> " + target});
  };

  for (const auto& p : procs)
    record("own", p.owner, pid_target(p.pid), true,
           sut.own_access(p.pid).granted);
  for (const auto& u : fixture.users)
    for (const auto& p : procs)
      if (p.owner != u)
        record("cross", u, pid_target(p.pid), false,
               sut.cross_access(u, p.pid).granted);
  if (fixture.include_real_memory_check)
    for (const auto& u : fixture.users)
      record("real_memory", u, std::string(audit_ops::kRealMemory), false,
             sut.real_memory_access(u).granted);

  const auto count = attempts.size();
  json registered{{"processes", std::move(processes)},
                  {"attempts", std::move(attempts)}};
  return ProcedureVerdict::from_comparison(procedure_id, std::move(registered),
                                           std::move(found), count);
}

}  // namespace conform
