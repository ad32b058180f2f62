#pragma once

// Executors for identification/authentication, audit coupling, and
// integrity control.

#include <map>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "conform/core_model.hpp"
#include "conform/sut.hpp"

namespace conform {

inline ProcedureVerdict run_auth_test(
    SutAdapter& sut, const std::vector<Account>& accounts,
    std::uint64_t run_seed, const std::string& procedure_id = "IDENT_AUTH") {
  require_capability(sut, Capability::Auth, procedure_id);
  auto trials = gen_auth_trials(accounts, sut.alphabet(), run_seed);

  json usr = json::array();
  for (const auto& a : accounts) {
    sut.auth_register(a.id, a.pwd);
    usr.push_back({{"id", a.id}, {"pwd_digest", redact(a.pwd)}});
  }

  json records = json::array();
  std::vector<Discrepancy> found;
  for (auto& t : trials) {
    t.actual = sut.auth_login(t.id, t.pwd);
    records.push_back({{"id", t.id},
                       {"pwd_digest", redact(t.pwd)},
                       {"category", to_string(t.category)},
                       {"expected", t.expected},
                       {"actual", *t.actual}});
    if (*t.actual != t.expected)
      found.push_back({t.expected ? "admitted" : "refused",
                       *t.actual ? "admitted" : "refused",
                       std::string(to_string(t.category)) + " " + t.id});
  }
  json registered{{"accounts", std::move(usr)}, {"trials", std::move(records)}};
  return ProcedureVerdict::from_comparison(procedure_id, std::move(registered),
                                           std::move(found), trials.size());
}

struct AuditedAttempt {
  std::string procedure_id;
  std::string user;
  std::string operation;
  std::string target;
  bool granted = false;
};

// Attempts a prior verdict registered, in the audit encoding of sut.hpp.
// Verdicts without probe or trial records contribute nothing.
inline std::vector<AuditedAttempt> audited_attempts(
    const ProcedureVerdict& v) {
  std::vector<AuditedAttempt> out;
  const auto& reg = v.registered();
  if (reg.contains("probe_records")) {
    for (const auto& r : reg.at("probe_records")) {
      const auto op = r.contains("right") ? r.at("right").get<std::string>()
                                          : r.at("mode").get<std::string>();
      out.push_back({v.procedure_id(), r.at("subject").get<std::string>(), op,
                     r.at("object").get<std::string>(),
                     r.at("actual").get<bool>()});
    }
  }
  if (reg.contains("trials")) {
    for (const auto& t : reg.at("trials"))
      out.push_back({v.procedure_id(), t.at("id").get<std::string>(),
                     std::string(audit_ops::kLogin),
                     std::string(audit_ops::kLoginTarget),
                     t.at("actual").get<bool>()});
  }
  return out;
}

// Every attempt of the prior procedures must have a matching audit record
// (user, operation, target, outcome; order-insensitive multiset matching),
// and every login record must name the user id.
inline ProcedureVerdict run_audit_coupling_check(
    SutAdapter& sut, std::span<const ProcedureVerdict> prior,
    const std::string& procedure_id = std::string(kAuditCouplingId)) {
  require_capability(sut, Capability::Audit, procedure_id);
  const auto log = sut.fetch_audit();

  using Key = std::tuple<std::string, std::string, std::string, bool>;
  std::map<Key, std::vector<std::uint64_t>> pool;
  for (const auto& r : log)
    pool[{r.user_id, r.operation, r.target, r.granted}].push_back(r.seq);

  json matches = json::array();
  json unmatched = json::array();
  std::vector<Discrepancy> found;
  std::size_t attempts = 0;
  for (const auto& v : prior) {
    for (const auto& a : audited_attempts(v)) {
      ++attempts;
      json entry{{"procedure", a.procedure_id},
                 {"user", a.user},
                 {"operation", a.operation},
                 {"target", a.target},
                 {"outcome", a.granted ? "granted" : "denied"}};
      auto it = pool.find({a.user, a.operation, a.target, a.granted});
      if (it != pool.end() && !it->second.empty()) {
        entry["seq"] = it->second.front();
        it->second.erase(it->second.begin());
        matches.push_back(std::move(entry));
      } else {
        found.push_back({"audit record", "missing",
                         a.procedure_id + ": " + a.user + " " + a.operation +
                             " " + a.target + " " +
                             (a.granted ? "granted" : "denied")});
        unmatched.push_back(std::move(entry));
      }
    }
  }
  for (const auto& r : log) {
    if (r.operation == audit_ops::kLogin && r.user_id.empty())
      found.push_back({"login record names the user id", "user id missing",
                       "audit seq " + std::to_string(r.seq)});
  }

  json registered{{"audit_records", log.size()},
                  {"audit_matches", std::move(matches)},
                  {"unmatched", std::move(unmatched)}};
  return ProcedureVerdict::from_comparison(procedure_id, std::move(registered),
                                           std::move(found), attempts);
}

// Tampers the chosen files, triggers the target's integrity check, and
// requires flagged == modified. Patches are reverted afterwards so the
// fixture can be reused.
inline ProcedureVerdict run_integrity_test(
    SutAdapter& sut, const IntegrityFixture& fixture,
    const std::string& procedure_id = "INTEGRITY") {
  fixture.validate();
  require_capability(sut, Capability::Files, procedure_id);
  const auto listed = sut.file_list();
  const std::set<std::string> on_target(listed.begin(), listed.end());
  for (const auto& f : fixture.files)
    if (!on_target.contains(f))
      throw UnknownFile("fixture file '" + f + "' not on the target");

  std::set<std::string> modified;
  std::vector<std::pair<std::string, FilePatch>> applied;
  json patches = json::object();
  for (const auto& [file, mutation] : fixture.mutations) {
    auto patch = sut.file_tamper(file, mutation);
    if (patch.changes_content()) modified.insert(file);
    patches[file] = patch;
    applied.emplace_back(file, std::move(patch));
  }
  const auto flagged = sut.file_check();
  for (auto it = applied.rbegin(); it != applied.rend(); ++it)
    sut.file_restore(it->first, it->second);

  std::vector<Discrepancy> found;
  for (const auto& f : modified)
    if (!flagged.contains(f))
      found.push_back({"flagged", "not flagged (missed violation)", f});
  for (const auto& f : flagged)
    if (!modified.contains(f))
      found.push_back({"not flagged", "flagged (false alarm)", f});

  json registered{{"f_issh", fixture.files},
                  {"f_mod", modified},
                  {"patches", std::move(patches)},
                  {"flagged", flagged}};
  return ProcedureVerdict::from_comparison(procedure_id, std::move(registered),
                                           std::move(found),
                                           fixture.mutations.size() + 1);
}

}  // namespace conform
