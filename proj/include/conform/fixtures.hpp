#pragma once

// Method kinds, SUT descriptors and per-kind fixture parameters.
//
// Requirement params are JSON so plans stay inspectable. resolve_params fills
// defaults from the SUT descriptor and validates against the kind's schema;
// the typed accessors below are what executors consume.

#include <nlohmann/json.hpp>

#include <array>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "conform/access_model.hpp"
#include "conform/identity_model.hpp"
#include "conform/runtime_model.hpp"
#include "conform/sut.hpp"

namespace conform {

enum class MethodKind {
  Dac,
  Mac,
  MemoryClean,
  ModuleIsolation,
  IdentAuth,
  Integrity,
  DeviceMatching,
  CarrierOutput,
  AuditCoupling,  // procedure-only: derived from IDENT_AUTH, never claimed
};

inline constexpr std::array<std::pair<MethodKind, std::string_view>, 9>
    kMethodNames{{
        {MethodKind::Dac, "DAC"},
        {MethodKind::Mac, "MAC"},
        {MethodKind::MemoryClean, "MEMORY_CLEAN"},
        {MethodKind::ModuleIsolation, "MODULE_ISOLATION"},
        {MethodKind::IdentAuth, "IDENT_AUTH"},
        {MethodKind::Integrity, "INTEGRITY"},
        {MethodKind::DeviceMatching, "DEVICE_MATCHING"},
        {MethodKind::CarrierOutput, "CARRIER_OUTPUT"},
        {MethodKind::AuditCoupling, "AUDIT_COUPLING"},
    }};

inline std::string_view to_string(MethodKind k) {
  for (const auto& [kind, name] : kMethodNames)
    if (kind == k) return name;
  return "?";
}

inline std::optional<MethodKind> method_kind_from_string(std::string_view s) {
  for (const auto& [kind, name] : kMethodNames)
    if (name == s) return kind;
  return std::nullopt;
}

inline bool is_requirement_kind(MethodKind k) {
  return k != MethodKind::AuditCoupling;
}

// Access and auth procedures whose attempts the audit log must account for.
inline bool is_audit_host(MethodKind k) {
  return k == MethodKind::Dac || k == MethodKind::DeviceMatching ||
         k == MethodKind::Mac || k == MethodKind::CarrierOutput ||
         k == MethodKind::IdentAuth;
}

// Reduced (t-way) strategies apply only to the access-matrix and label loops.
inline bool is_reducible(MethodKind k) {
  return k == MethodKind::Dac || k == MethodKind::DeviceMatching ||
         k == MethodKind::Mac || k == MethodKind::CarrierOutput;
}

// Execution order group: access, runtime, identity, then audit coupling.
inline int execution_group(MethodKind k) {
  switch (k) {
    case MethodKind::Dac:
    case MethodKind::DeviceMatching:
    case MethodKind::Mac:
    case MethodKind::CarrierOutput: return 0;
    case MethodKind::MemoryClean:
    case MethodKind::ModuleIsolation: return 1;
    case MethodKind::IdentAuth:
    case MethodKind::Integrity: return 2;
    case MethodKind::AuditCoupling: return 3;
  }
  return 3;
}

inline CapabilitySet required_capabilities(MethodKind k) {
  switch (k) {
    case MethodKind::Dac:
    case MethodKind::DeviceMatching: return {Capability::AccessControl};
    case MethodKind::Mac:
    case MethodKind::CarrierOutput: return {Capability::Labels};
    case MethodKind::MemoryClean: return {Capability::Memory};
    case MethodKind::ModuleIsolation: return {Capability::Processes};
    case MethodKind::IdentAuth: return {Capability::Auth, Capability::Audit};
    case MethodKind::Integrity: return {Capability::Files};
    case MethodKind::AuditCoupling: return {Capability::Audit};
  }
  return {};
}

// What procedure design needs to know about the target.
struct SutDescriptor {
  CapabilitySet capabilities;
  int label_levels = 0;
  std::vector<MemoryArea> memory_areas;
  std::vector<std::string> files;
  std::string alphabet;

  static SutDescriptor of(const SutAdapter& sut) {
    SutDescriptor d;
    d.capabilities = sut.capabilities();
    if (sut.has(Capability::Labels)) d.label_levels = sut.label_levels();
    d.memory_areas = sut.memory_areas();
    d.files = sut.file_list();
    if (sut.has(Capability::Auth)) d.alphabet = sut.alphabet();
    return d;
  }
};

// ---------------------------------------------------------------------------
// Default fixtures
// ---------------------------------------------------------------------------
namespace fixtures {

inline std::vector<std::string> numbered(std::string_view prefix, int n) {
  std::vector<std::string> v;
  for (int i = 1; i <= n; ++i) v.push_back(std::string(prefix) + std::to_string(i));
  return v;
}

// 3 subjects x 4 objects x 3 rights; right r held on (s, o) iff s+o+r is even
// (0-based), so roughly half of the 36 triples are granted.
inline AccessMatrix default_dac() {
  AccessMatrix m(numbered("S", 3), numbered("O", 4), numbered("R", 3));
  for (std::size_t s = 0; s < 3; ++s)
    for (std::size_t o = 0; o < 4; ++o)
      for (std::size_t r = 0; r < 3; ++r)
        if ((s + o + r) % 2 == 0) m.grant(s, o, r);
  return m;
}

inline AccessMatrix default_device_matching() {
  AccessMatrix m({"U1", "U2"}, {"DEV1", "DEV2"}, {"read", "write"},
                 ObjectClass::Device);
  m.grant(0, 0, 0);
  m.grant(0, 0, 1);
  m.grant(0, 1, 0);
  m.grant(1, 1, 1);
  return m;
}

inline MacFixture default_mac(int levels) {
  MacFixture f;
  f.subjects = {"S1", "S2"};
  f.objects = {"O1", "O2"};
  f.lattice = LabelLattice(std::max(levels, 2));
  f.labels.subject_labels = {{"S1", 1}, {"S2", 2}};
  f.labels.object_labels = {{"O1", 1}, {"O2", 2}};
  return f;
}

// One carrier between two subjects' levels, so both a read-up and a
// write-down pair exist.
inline MacFixture default_carrier_output(int levels) {
  MacFixture f;
  f.subjects = {"S1", "S2"};
  f.objects = {"CARRIER1"};
  f.lattice = LabelLattice(std::max(levels, 3));
  f.labels.subject_labels = {{"S1", 1}, {"S2", 3}};
  f.labels.object_labels = {{"CARRIER1", 2}};
  f.object_class = ObjectClass::Carrier;
  return f;
}

inline IsolationFixture default_isolation() {
  return IsolationFixture({"u1", "u2"}, 1, true);
}

inline std::vector<Account> default_accounts() {
  return {{"alice", "pw1"}, {"bob", "pw2"}};
}

inline IntegrityFixture default_integrity(const std::vector<std::string>& files) {
  IntegrityFixture f;
  f.files = files;
  if (files.size() >= 3) {
    f.mutations[files[1]] = {MutationKind::Substitute, 0, "XX"};
    f.mutations[files[2]] = {MutationKind::Truncate, 4, {}};
  } else if (!files.empty()) {
    f.mutations[files[0]] = {MutationKind::Substitute, 0, "XX"};
  }
  return f;
}

}  // namespace fixtures

// ---------------------------------------------------------------------------
// Typed views of resolved params
// ---------------------------------------------------------------------------
inline AccessMatrix access_fixture(const json& params) {
  return params.at("access_matrix").get<AccessMatrix>();
}

inline MacFixture label_fixture(const json& params) {
  return params.at("labels").get<MacFixture>();
}

inline std::vector<MemoryArea> memory_fixture(const json& params) {
  return params.at("areas").get<std::vector<MemoryArea>>();
}

inline IsolationFixture isolation_fixture(const json& params) {
  return params.get<IsolationFixture>();
}

inline std::vector<Account> accounts_fixture(const json& params) {
  return params.at("accounts").get<std::vector<Account>>();
}

inline IntegrityFixture integrity_fixture(const json& params) {
  return params.get<IntegrityFixture>();
}

// Fill defaults and validate params for `kind` against the descriptor.
// Throws InvalidRequirement on schema violations.
inline json resolve_params(MethodKind kind, const json& params,
                           const SutDescriptor& sut) {
  const json in = params.is_null() ? json::object() : params;
  if (!in.is_object())
    throw InvalidRequirement("params for " + std::string(to_string(kind)) +
                             " must be an object");
  try {
    switch (kind) {
      case MethodKind::Dac:
      case MethodKind::DeviceMatching: {
        const bool device = kind == MethodKind::DeviceMatching;
        AccessMatrix m =
            in.contains("access_matrix")
                ? in.at("access_matrix").get<AccessMatrix>()
                : (device ? fixtures::default_device_matching()
                          : fixtures::default_dac());
        if (device && m.object_class() != ObjectClass::Device) {
          json j = m;
          j["object_class"] = "device";
          m = j.get<AccessMatrix>();
        }
        if (m.subjects().empty() || m.rights().empty() ||
            (!device && m.objects().empty()))
          throw InvalidRequirement(
              std::string(to_string(kind)) +
              " needs >= 1 subject, object and right");
        return json{{"access_matrix", m}};
      }
      case MethodKind::Mac:
      case MethodKind::CarrierOutput: {
        const bool carrier = kind == MethodKind::CarrierOutput;
        MacFixture f =
            in.contains("labels")
                ? in.at("labels").get<MacFixture>()
                : (carrier ? fixtures::default_carrier_output(sut.label_levels)
                           : fixtures::default_mac(sut.label_levels));
        if (carrier) f.object_class = ObjectClass::Carrier;
        if (f.subjects.empty() || (!carrier && f.objects.empty()))
          throw InvalidRequirement(std::string(to_string(kind)) +
                                   " needs >= 1 subject and object");
        if (sut.capabilities.contains(Capability::Labels) &&
            f.lattice.levels > sut.label_levels)
          throw InvalidRequirement(
              "fixture lattice has " + std::to_string(f.lattice.levels) +
              " levels but the target supports " +
              std::to_string(sut.label_levels));
        return json{{"labels", f}};
      }
      case MethodKind::MemoryClean: {
        std::vector<MemoryArea> areas;
        if (in.contains("areas")) {
          for (const auto& id : in.at("areas")) {
            const auto name = id.get<std::string>();
            auto it = std::find_if(
                sut.memory_areas.begin(), sut.memory_areas.end(),
                [&](const MemoryArea& a) { return a.id == name; });
            if (it == sut.memory_areas.end())
              throw InvalidRequirement("unknown memory area '" + name + "'");
            areas.push_back(*it);
          }
        } else {
          areas = sut.memory_areas;
        }
        if (areas.empty() && sut.capabilities.contains(Capability::Memory))
          throw InvalidRequirement("MEMORY_CLEAN needs >= 1 area");
        return json{{"areas", areas}};
      }
      case MethodKind::ModuleIsolation: {
        IsolationFixture f = in.empty() ? fixtures::default_isolation()
                                        : in.get<IsolationFixture>();
        return json(f);
      }
      case MethodKind::IdentAuth: {
        auto accounts = in.contains("accounts")
                            ? in.at("accounts").get<std::vector<Account>>()
                            : fixtures::default_accounts();
        if (accounts.empty())
          throw InvalidRequirement("IDENT_AUTH needs >= 1 account");
        std::set<std::string> ids;
        for (const auto& a : accounts) {
          if (!ids.insert(a.id).second)
            throw InvalidRequirement("duplicate account '" + a.id + "'");
          if (!sut.alphabet.empty() && (!within_alphabet(a.id, sut.alphabet) ||
                                        !within_alphabet(a.pwd, sut.alphabet)))
            throw InvalidRequirement("account '" + a.id +
                                     "' leaves the target alphabet");
        }
        return json{{"accounts", accounts}};
      }
      case MethodKind::Integrity: {
        IntegrityFixture f = in.contains("files")
                                 ? in.get<IntegrityFixture>()
                                 : fixtures::default_integrity(sut.files);
        return json(f);
      }
      case MethodKind::AuditCoupling:
        return in;
    }
  } catch (const InvalidRequirement&) {
    throw;
  } catch (const json::exception& e) {
    throw InvalidRequirement("params for " + std::string(to_string(kind)) +
                             ": " + e.what());
  } catch (const Error& e) {
    throw InvalidRequirement("params for " + std::string(to_string(kind)) +
                             ": " + e.what());
  }
  return in;
}

// Probe-dimension domains of a reducible procedure: (subjects, objects,
// rights) for DAC-like loops, (subjects, objects) for label loops.
inline std::vector<std::size_t> probe_domains(MethodKind kind,
                                              const json& params) {
  switch (kind) {
    case MethodKind::Dac:
    case MethodKind::DeviceMatching: {
      auto m = access_fixture(params);
      return {m.subjects().size(), m.objects().size(), m.rights().size()};
    }
    case MethodKind::Mac:
    case MethodKind::CarrierOutput: {
      auto f = label_fixture(params);
      return {f.subjects.size(), f.objects.size()};
    }
    default:
      return {};
  }
}

// Standard operations an exhaustive run performs.
inline std::size_t exhaustive_probe_count(MethodKind kind, const json& params) {
  switch (kind) {
    case MethodKind::Dac:
    case MethodKind::DeviceMatching:
      return access_fixture(params).probe_space();
    case MethodKind::Mac:
    case MethodKind::CarrierOutput: {
      auto f = label_fixture(params);
      return 2 * f.subjects.size() * f.objects.size();
    }
    case MethodKind::MemoryClean:
      return 4 * memory_fixture(params).size();  // place, locate, release, scan
    case MethodKind::ModuleIsolation: {
      auto f = isolation_fixture(params);
      const auto users = f.users.size();
      const auto procs = users * f.processes_per_user;
      return procs + procs * (users - 1) +
             (f.include_real_memory_check ? users : 0);
    }
    case MethodKind::IdentAuth:
      return 2 * accounts_fixture(params).size() + 1;
    case MethodKind::Integrity: {
      auto f = integrity_fixture(params);
      return f.mutations.size() + 1;  // tampers, then one check
    }
    case MethodKind::AuditCoupling:
      return params.value("expected_records", std::size_t{0});
  }
  return 0;
}

}  // namespace conform
