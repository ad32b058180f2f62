#pragma once

// Adapter contract for a system under test.
//
// Every test method drives its target exclusively through SutAdapter. The
// built-in Simulator (simulator.hpp) is the default implementation; a real
// product is plugged in by implementing the same virtuals. A handle is
// single-threaded: calls must be externally serialized.
//
// Audit encoding. Adapters that claim Capability::Audit must emit exactly one
// AuditRecord per probe_access, probe_labeled, auth_login, process access
// attempt and file_check, using the operation/target strings in audit_ops.
// The audit-coupling check matches records on (user, operation, target,
// outcome) with these encodings.

#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "conform/access_model.hpp"
#include "conform/identity_model.hpp"
#include "conform/runtime_model.hpp"

namespace conform {

enum class Capability {
  AccessControl,
  Labels,
  Memory,
  Processes,
  Auth,
  Files,
  Audit,
};

inline std::string_view to_string(Capability c) {
  switch (c) {
    case Capability::AccessControl: return "access-control";
    case Capability::Labels: return "labels";
    case Capability::Memory: return "memory";
    case Capability::Processes: return "processes";
    case Capability::Auth: return "auth";
    case Capability::Files: return "files";
    case Capability::Audit: return "audit";
  }
  return "?";
}

inline Capability capability_from_string(std::string_view s) {
  for (auto c : {Capability::AccessControl, Capability::Labels,
                 Capability::Memory, Capability::Processes, Capability::Auth,
                 Capability::Files, Capability::Audit})
    if (to_string(c) == s) return c;
  throw ConfigError("unknown capability '" + std::string(s) + "'");
}

using CapabilitySet = std::set<Capability>;

struct AttemptOutcome {
  bool granted = false;
  std::string detail;
};

struct AuditRecord {
  std::uint64_t seq = 0;
  std::string user_id;
  std::string operation;
  std::string target;
  bool granted = false;

  friend bool operator==(const AuditRecord&, const AuditRecord&) = default;
};

namespace audit_ops {
inline constexpr std::string_view kLogin = "login";
inline constexpr std::string_view kLoginTarget = "auth";
inline constexpr std::string_view kProcessAccess = "process_access";
inline constexpr std::string_view kRealMemory = "real_memory";
inline constexpr std::string_view kIntegrityCheck = "integrity_check";
inline constexpr std::string_view kSystemUser = "system";
// DAC probes use the right name as operation and the object as target;
// MAC probes use to_string(MacMode).
}  // namespace audit_ops

struct Pid {
  std::uint64_t value = 0;
  friend auto operator<=>(const Pid&, const Pid&) = default;
};

inline std::string pid_target(Pid p) { return "pid:" + std::to_string(p.value); }

class SutAdapter {
 public:
  virtual ~SutAdapter() = default;

  virtual const CapabilitySet& capabilities() const = 0;
  bool has(Capability c) const { return capabilities().contains(c); }

  // Discretionary access control.
  virtual void setup_access(std::span<const std::string> subjects,
                            std::span<const std::string> objects,
                            const AccessMatrix& matrix) = 0;
  virtual AttemptOutcome probe_access(std::string_view subject,
                                      std::string_view object,
                                      std::string_view right) = 0;

  // Mandatory access control.
  virtual int label_levels() const = 0;
  virtual void set_labels(const std::map<std::string, int>& subject_labels,
                          const std::map<std::string, int>& object_labels) = 0;
  virtual AttemptOutcome probe_labeled(std::string_view subject,
                                       std::string_view object,
                                       MacMode mode) = 0;

  // Memory.
  virtual std::vector<MemoryArea> memory_areas() const = 0;
  virtual json wipe_configuration() const = 0;
  virtual MemoryLocation mem_place(std::string_view area,
                                   std::string_view sentinel) = 0;
  virtual MemoryLocation mem_locate(std::string_view area,
                                    std::string_view sentinel) = 0;
  virtual void mem_release(std::string_view area) = 0;
  virtual bool mem_scan(std::string_view area, std::string_view sentinel) = 0;

  // Processes.
  virtual Pid spawn(std::string_view user) = 0;
  virtual AttemptOutcome own_access(Pid pid) = 0;
  virtual AttemptOutcome cross_access(std::string_view actor, Pid target) = 0;
  virtual AttemptOutcome real_memory_access(std::string_view actor) = 0;

  // Identification and authentication.
  virtual std::string alphabet() const = 0;
  virtual void auth_register(std::string_view id, std::string_view pwd) = 0;
  virtual bool auth_login(std::string_view id, std::string_view pwd) = 0;

  // Integrity control.
  virtual std::vector<std::string> file_list() const = 0;
  virtual FilePatch file_tamper(std::string_view file,
                                const FileMutation& mutation) = 0;
  virtual void file_restore(std::string_view file, const FilePatch& patch) = 0;
  virtual std::set<std::string> file_check() = 0;

  // Audit.
  virtual std::vector<AuditRecord> fetch_audit() const = 0;
};

inline void require_capability(const SutAdapter& sut, Capability c,
                               std::string_view who) {
  if (!sut.has(c))
    throw UnsupportedRequirement(std::string(who) + " needs the '" +
                                 std::string(to_string(c)) +
                                 "' capability, which the target lacks");
}

}  // namespace conform
