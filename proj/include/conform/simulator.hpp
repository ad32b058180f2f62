#pragma once

// Reference simulator: an in-memory security kernel implementing SutAdapter.
//
// With an empty DefectSet it behaves exactly as every method's oracle
// predicts. Each injected defect breaks one documented behavior and nothing
// else, which is what lets the test suite measure detection power against a
// known-non-conformant target.

#include <fnmatch.h>

#include <cmath>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "conform/defects.hpp"
#include "conform/digest.hpp"
#include "conform/sut.hpp"

namespace conform {

struct SimulatorConfig {
  int label_levels = 4;
  std::vector<MemoryArea> memory_areas{{"A", "short_term", 256},
                                       {"B", "drive_partition", 512},
                                       {"C", "external_carrier", 256}};
  std::map<std::string, std::string> files{
      {"f1", "# access daemon configuration\nmode=strict\n"},
      {"f2", "# audit configuration\nsink=local\nretention=90\n"},
      {"f3", "\x7f" "ELF module: authd v1.4\n"},
      {"f4", "# integrity daemon\nperiod=60\n"},
  };
  std::string alphabet{kDefaultAlphabet};
  bool audit = true;
  CapabilitySet disabled;

  friend bool operator==(const SimulatorConfig&,
                         const SimulatorConfig&) = default;
};

inline void to_json(json& j, const SimulatorConfig& c) {
  json disabled = json::array();
  for (auto cap : c.disabled) disabled.push_back(to_string(cap));
  j = json{{"label_levels", c.label_levels},
           {"memory_areas", c.memory_areas},
           {"files", c.files},
           {"alphabet", c.alphabet},
           {"audit", c.audit},
           {"disabled_capabilities", disabled}};
}

inline void from_json(const json& j, SimulatorConfig& c) {
  if (!j.is_object()) throw ConfigError("simulator config must be an object");
  try {
    SimulatorConfig out;
    out.label_levels = j.value("label_levels", out.label_levels);
    if (j.contains("memory_areas"))
      out.memory_areas = j.at("memory_areas").get<std::vector<MemoryArea>>();
    if (j.contains("files"))
      out.files = j.at("files").get<std::map<std::string, std::string>>();
    out.alphabet = j.value("alphabet", out.alphabet);
    out.audit = j.value("audit", out.audit);
    for (const auto& name : j.value("disabled_capabilities", json::array()))
      out.disabled.insert(capability_from_string(name.get<std::string>()));
    c = std::move(out);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed simulator config: ") + e.what());
  } catch (const FixtureError& e) {
    throw ConfigError(std::string("malformed simulator config: ") + e.what());
  }
}

class Simulator final : public SutAdapter {
 public:
  Simulator(SimulatorConfig config, DefectSet defects, std::uint64_t seed)
      : config_(std::move(config)), defects_(std::move(defects)) {
    validate_config();
    if (config_.label_levels > 0) caps_.insert(Capability::Labels);
    if (!config_.memory_areas.empty()) caps_.insert(Capability::Memory);
    if (!config_.files.empty()) caps_.insert(Capability::Files);
    if (!config_.alphabet.empty()) caps_.insert(Capability::Auth);
    if (config_.audit) caps_.insert(Capability::Audit);
    caps_.insert(Capability::AccessControl);
    caps_.insert(Capability::Processes);
    for (auto c : config_.disabled) caps_.erase(c);

    for (const auto& a : config_.memory_areas)
      memory_.emplace(a.id, AreaState{std::string(a.size, '\0'), 0, {}});
    for (const auto& [name, content] : config_.files) {
      files_[name] = content;
      baseline_[name] = sha256_hex(content);
    }
    for (const auto& d : defects_) {
      if (d.kind == DefectKind::AuditDropEvents) {
        drop_fraction_ = d.fraction;
        auto eng = make_engine(seed, "audit-drop");
        drop_phase_ = unit_interval(eng);
      }
    }
  }

  const SimulatorConfig& config() const { return config_; }
  const DefectSet& defects() const { return defects_; }

  // Number of audit records the AUDIT_DROP_EVENTS defect has suppressed.
  // Simulator-only introspection, not part of the adapter contract.
  std::size_t dropped_records() const { return dropped_; }

  const CapabilitySet& capabilities() const override { return caps_; }

  // -- access control -------------------------------------------------------
  void setup_access(std::span<const std::string> subjects,
                    std::span<const std::string> objects,
                    const AccessMatrix& matrix) override {
    require(Capability::AccessControl);
    if (subjects.size() != matrix.subjects().size() ||
        objects.size() != matrix.objects().size())
      throw DimensionMismatch(
          "matrix is " + std::to_string(matrix.subjects().size()) + "x" +
          std::to_string(matrix.objects().size()) + " but fixture has " +
          std::to_string(subjects.size()) + " subjects and " +
          std::to_string(objects.size()) + " objects");
    for (std::size_t s = 0; s < subjects.size(); ++s) {
      dac_subjects_.insert(subjects[s]);
      for (std::size_t o = 0; o < objects.size(); ++o) {
        dac_objects_.insert(objects[o]);
        auto& cell = dac_policy_[{subjects[s], objects[o]}];
        cell.clear();
        for (std::size_t r : matrix.cell(s, o))
          cell.insert(matrix.rights()[r]);
      }
    }
  }

  AttemptOutcome probe_access(std::string_view subject,
                              std::string_view object,
                              std::string_view right) override {
    require(Capability::AccessControl);
    const std::string s(subject), o(object), r(right);
    if (!dac_subjects_.contains(s))
      throw UnknownPrincipal("unknown subject '" + s + "'");
    if (!dac_objects_.contains(o))
      throw UnknownObject("unknown object '" + o + "'");
    auto it = dac_policy_.find({s, o});
    bool granted = it != dac_policy_.end() && it->second.contains(r);
    std::string detail = granted ? "right held" : "right not held";
    for (const auto& d : defects_) {
      if (d.subject != s || d.object != o || d.right != r) continue;
      if (d.kind == DefectKind::DacGrantExtra) granted = true;
      if (d.kind == DefectKind::DacDenyGranted) granted = false;
    }
    emit(s, r, o, granted);
    return {granted, detail};
  }

  // -- labels ---------------------------------------------------------------
  int label_levels() const override { return config_.label_levels; }

  void set_labels(const std::map<std::string, int>& subject_labels,
                  const std::map<std::string, int>& object_labels) override {
    require(Capability::Labels);
    auto check = [&](const auto& labels) {
      for (const auto& [name, rank] : labels)
        if (rank < 1 || rank > config_.label_levels)
          throw UnknownLabelRank("label rank " + std::to_string(rank) +
                                 " for '" + name + "' outside [1.." +
                                 std::to_string(config_.label_levels) + "]");
    };
    check(subject_labels);
    check(object_labels);
    for (const auto& [n, r] : subject_labels) subject_rank_[n] = r;
    for (const auto& [n, r] : object_labels) object_rank_[n] = r;
  }

  AttemptOutcome probe_labeled(std::string_view subject,
                               std::string_view object,
                               MacMode mode) override {
    require(Capability::Labels);
    auto s = subject_rank_.find(std::string(subject));
    if (s == subject_rank_.end())
      throw UnknownPrincipal("unlabeled subject '" + std::string(subject) +
                             "'");
    auto o = object_rank_.find(std::string(object));
    if (o == object_rank_.end())
      throw UnknownObject("unlabeled object '" + std::string(object) + "'");
    bool granted = mode == MacMode::Read ? s->second <= o->second
                                         : o->second <= s->second;
    if (mode == MacMode::Read && has_defect(DefectKind::MacAllowReadUp))
      granted = true;
    if (mode == MacMode::Write && has_defect(DefectKind::MacAllowWriteDown))
      granted = true;
    emit(s->first, std::string(to_string(mode)), o->first, granted);
    return {granted, granted ? "label rule satisfied" : "label rule violated"};
  }

  // -- memory ---------------------------------------------------------------
  std::vector<MemoryArea> memory_areas() const override {
    return has(Capability::Memory) ? config_.memory_areas
                                   : std::vector<MemoryArea>{};
  }

  json wipe_configuration() const override {
    json areas = json::array();
    for (const auto& a : config_.memory_areas) areas.push_back(a);
    return json{{"policy", "zeroize-on-release"}, {"areas", areas}};
  }

  MemoryLocation mem_place(std::string_view area,
                           std::string_view sentinel) override {
    auto& st = area_state(area);
    if (st.cursor + sentinel.size() > st.bytes.size())
      throw FixtureError("memory area '" + std::string(area) +
                         "' has no room for the sentinel");
    MemoryLocation loc{std::string(area), st.cursor, sentinel.size()};
    st.bytes.replace(st.cursor, sentinel.size(), sentinel);
    st.cursor += sentinel.size();
    st.placed.insert(std::string(sentinel));
    return loc;
  }

  MemoryLocation mem_locate(std::string_view area,
                            std::string_view sentinel) override {
    auto& st = area_state(area);
    const auto pos = st.bytes.find(sentinel);
    if (!st.placed.contains(std::string(sentinel)) ||
        pos == std::string::npos)
      throw SentinelNotPlaced("sentinel not placed in area '" +
                              std::string(area) + "'");
    return {std::string(area), pos, sentinel.size()};
  }

  void mem_release(std::string_view area) override {
    auto& st = area_state(area);
    bool wipe = true;
    for (const auto& d : defects_)
      if (d.kind == DefectKind::MemNoWipe && d.area == area) wipe = false;
    if (wipe) std::fill(st.bytes.begin(), st.bytes.end(), '\0');
    st.cursor = 0;
    st.placed.clear();
  }

  bool mem_scan(std::string_view area, std::string_view sentinel) override {
    return area_state(area).bytes.find(sentinel) != std::string::npos;
  }

  // -- processes ------------------------------------------------------------
  Pid spawn(std::string_view user) override {
    require(Capability::Processes);
    if (user.empty()) throw UnknownPrincipal("process owner must be named");
    Pid pid{next_pid_++};
    owners_[pid] = std::string(user);
    return pid;
  }

  AttemptOutcome own_access(Pid pid) override {
    const auto& owner = owner_of(pid);
    emit(owner, std::string(audit_ops::kProcessAccess), pid_target(pid), true);
    return {true, "own address space"};
  }

  AttemptOutcome cross_access(std::string_view actor, Pid target) override {
    const auto& owner = owner_of(target);
    bool granted = owner == actor || has_defect(DefectKind::IsolationLeak);
    emit(std::string(actor), std::string(audit_ops::kProcessAccess),
         pid_target(target), granted);
    return {granted, granted ? "address space reachable"
                             : "foreign address space isolated"};
  }

  AttemptOutcome real_memory_access(std::string_view actor) override {
    require(Capability::Processes);
    bool granted = has_defect(DefectKind::RealMemExposed);
    emit(std::string(actor), std::string(audit_ops::kRealMemory),
         std::string(audit_ops::kRealMemory), granted);
    return {granted, granted ? "physical memory mapped"
                             : "physical memory not accessible"};
  }

  // -- auth -----------------------------------------------------------------
  std::string alphabet() const override { return config_.alphabet; }

  void auth_register(std::string_view id, std::string_view pwd) override {
    require(Capability::Auth);
    check_alphabet(id, pwd);
    accounts_[std::string(id)] = std::string(pwd);
  }

  bool auth_login(std::string_view id, std::string_view pwd) override {
    require(Capability::Auth);
    check_alphabet(id, pwd);
    auto it = accounts_.find(std::string(id));
    bool ok = it != accounts_.end() && it->second == pwd;
    if (has_defect(DefectKind::AuthAcceptAnyPassword)) ok = true;
    if (has_defect(DefectKind::AuthRejectValid)) ok = false;
    emit(std::string(id), std::string(audit_ops::kLogin),
         std::string(audit_ops::kLoginTarget), ok);
    return ok;
  }

  // -- files ----------------------------------------------------------------
  std::vector<std::string> file_list() const override {
    if (!has(Capability::Files)) return {};
    std::vector<std::string> names;
    for (const auto& [name, _] : files_) names.push_back(name);
    return names;
  }

  FilePatch file_tamper(std::string_view file,
                        const FileMutation& mutation) override {
    auto& content = file_content(file);
    auto patch = plan_patch(content, mutation);
    content = apply_patch(std::move(content), patch);
    return patch;
  }

  void file_restore(std::string_view file, const FilePatch& patch) override {
    auto& content = file_content(file);
    content = apply_patch(std::move(content), invert(patch));
  }

  std::set<std::string> file_check() override {
    require(Capability::Files);
    std::set<std::string> flagged;
    for (const auto& [name, content] : files_) {
      const bool tampered = sha256_hex(content) != baseline_.at(name);
      bool flag = tampered;
      for (const auto& d : defects_) {
        if (!glob_match(d.pattern, name)) continue;
        if (d.kind == DefectKind::IntegrityMiss) flag = false;
        if (d.kind == DefectKind::IntegrityFalseAlarm && !tampered) flag = true;
      }
      if (flag) flagged.insert(name);
    }
    emit(std::string(audit_ops::kSystemUser),
         std::string(audit_ops::kIntegrityCheck), "files", true);
    return flagged;
  }

  // -- audit ----------------------------------------------------------------
  std::vector<AuditRecord> fetch_audit() const override {
    if (!has(Capability::Audit)) return {};
    return audit_;
  }

 private:
  struct AreaState {
    std::string bytes;
    std::size_t cursor = 0;
    std::set<std::string> placed;
  };

  void validate_config() const {
    if (config_.label_levels < 0)
      throw ConfigError("label_levels must be >= 0");
    std::set<std::string> ids;
    for (const auto& a : config_.memory_areas) {
      if (a.id.empty()) throw ConfigError("memory area without id");
      if (!ids.insert(a.id).second)
        throw ConfigError("duplicate memory area '" + a.id + "'");
      if (!area_kinds().contains(a.kind))
        throw ConfigError("unknown memory area kind '" + a.kind + "'");
    }
    for (const auto& d : defects_)
      if (d.kind == DefectKind::MemNoWipe && !ids.contains(d.area))
        throw ConfigError("MEM_NO_WIPE names unknown area '" + d.area + "'");
  }

  void require(Capability c) const {
    if (!has(c))
      throw UnsupportedRequirement("simulator configured without '" +
                                   std::string(to_string(c)) + "'");
  }

  bool has_defect(DefectKind k) const {
    for (const auto& d : defects_)
      if (d.kind == k) return true;
    return false;
  }

  static bool glob_match(const std::string& pattern, const std::string& name) {
    return !pattern.empty() &&
           ::fnmatch(pattern.c_str(), name.c_str(), 0) == 0;
  }

  AreaState& area_state(std::string_view area) {
    require(Capability::Memory);
    auto it = memory_.find(std::string(area));
    if (it == memory_.end())
      throw UnknownArea("unknown memory area '" + std::string(area) + "'");
    return it->second;
  }

  const std::string& owner_of(Pid pid) const {
    if (!has(Capability::Processes))
      throw UnsupportedRequirement("simulator configured without 'processes'");
    auto it = owners_.find(pid);
    if (it == owners_.end())
      throw UnknownPid("unknown pid " + std::to_string(pid.value));
    return it->second;
  }

  std::string& file_content(std::string_view file) {
    require(Capability::Files);
    auto it = files_.find(std::string(file));
    if (it == files_.end())
      throw UnknownFile("unknown file '" + std::string(file) + "'");
    return it->second;
  }

  void check_alphabet(std::string_view id, std::string_view pwd) const {
    if (!within_alphabet(id, config_.alphabet) ||
        !within_alphabet(pwd, config_.alphabet))
      throw AlphabetViolation("credentials leave the configured alphabet");
  }

  // Every emission consumes a sequence number; AUDIT_DROP_EVENTS(f) drops a
  // deterministic subset of exactly floor(n*f + phase) of the first n
  // emissions, the phase being drawn once from the run seed.
  void emit(std::string user, std::string op, std::string target,
            bool granted) {
    if (!has(Capability::Audit)) return;
    ++emitted_;
    const std::uint64_t seq = emitted_;
    if (drop_fraction_ > 0.0) {
      const auto before = std::floor(static_cast<double>(emitted_ - 1) *
                                         drop_fraction_ + drop_phase_);
      const auto after = std::floor(static_cast<double>(emitted_) *
                                        drop_fraction_ + drop_phase_);
      if (after > before) {
        ++dropped_;
        return;
      }
    }
    audit_.push_back(
        {seq, std::move(user), std::move(op), std::move(target), granted});
  }

  SimulatorConfig config_;
  const DefectSet defects_;
  CapabilitySet caps_;

  std::set<std::string> dac_subjects_;
  std::set<std::string> dac_objects_;
  std::map<std::pair<std::string, std::string>, std::set<std::string>>
      dac_policy_;

  std::map<std::string, int> subject_rank_;
  std::map<std::string, int> object_rank_;

  std::map<std::string, AreaState, std::less<>> memory_;

  std::map<Pid, std::string> owners_;
  std::uint64_t next_pid_ = 1000;

  std::map<std::string, std::string> accounts_;

  std::map<std::string, std::string> files_;
  std::map<std::string, std::string> baseline_;

  std::vector<AuditRecord> audit_;
  std::uint64_t emitted_ = 0;
  std::size_t dropped_ = 0;
  double drop_fraction_ = 0.0;
  double drop_phase_ = 0.0;
};

inline std::unique_ptr<Simulator> create_sut(SimulatorConfig config,
                                             DefectSet defects,
                                             std::uint64_t seed) {
  return std::make_unique<Simulator>(std::move(config), std::move(defects),
                                     seed);
}

}  // namespace conform
