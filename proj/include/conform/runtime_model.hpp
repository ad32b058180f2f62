#pragma once

// Fixture types for the memory-cleaning and module-isolation methods.

#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "conform/digest.hpp"
#include "conform/errors.hpp"

namespace conform {

using json = nlohmann::json;

inline constexpr std::size_t kSentinelLength = 16;
inline constexpr std::string_view kSentinelAlphabet =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";

// Area kind is descriptive only; the simulator treats all kinds alike.
inline const std::set<std::string>& area_kinds() {
  static const std::set<std::string> kinds{"short_term", "drive_partition",
                                           "external_carrier"};
  return kinds;
}

struct MemoryArea {
  std::string id;
  std::string kind = "short_term";
  std::size_t size = 0;

  friend bool operator==(const MemoryArea&, const MemoryArea&) = default;
};

struct MemoryLocation {
  std::string area;
  std::size_t offset = 0;
  std::size_t length = 0;

  friend bool operator==(const MemoryLocation&,
                         const MemoryLocation&) = default;
};

struct Sentinel {
  std::string area_id;
  std::string bytes;
  std::optional<MemoryLocation> location;
};

// Deterministic in (area_id, run_seed).
inline Sentinel gen_sentinel(const std::string& area_id,
                             std::uint64_t run_seed) {
  auto eng = make_engine(run_seed, "sentinel/" + area_id);
  return Sentinel{area_id,
                  random_string(eng, kSentinelAlphabet, kSentinelLength),
                  std::nullopt};
}

struct IsolationFixture {
  std::vector<std::string> users;
  std::size_t processes_per_user = 1;
  bool include_real_memory_check = true;

  IsolationFixture() = default;
  IsolationFixture(std::vector<std::string> u, std::size_t per_user,
                   bool real_memory)
      : users(std::move(u)),
        processes_per_user(per_user),
        include_real_memory_check(real_memory) {
    validate();
  }

  void validate() const {
    if (users.size() < 2)
      throw FixtureError("isolation fixture needs at least two users");
    if (std::set<std::string>(users.begin(), users.end()).size() !=
        users.size())
      throw FixtureError("isolation fixture has duplicate users");
    if (processes_per_user < 1)
      throw FixtureError("isolation fixture needs >= 1 process per user");
  }

  friend bool operator==(const IsolationFixture&,
                         const IsolationFixture&) = default;
};

inline void to_json(json& j, const MemoryArea& a) {
  j = json{{"id", a.id}, {"kind", a.kind}, {"size", a.size}};
}

inline void from_json(const json& j, MemoryArea& a) {
  a.id = j.at("id").get<std::string>();
  a.kind = j.value("kind", std::string("short_term"));
  a.size = j.at("size").get<std::size_t>();
  if (a.id.empty()) throw FixtureError("memory area without id");
  if (!area_kinds().contains(a.kind))
    throw FixtureError("unknown memory area kind '" + a.kind + "'");
}

inline void to_json(json& j, const IsolationFixture& f) {
  j = json{{"users", f.users},
           {"processes_per_user", f.processes_per_user},
           {"include_real_memory_check", f.include_real_memory_check}};
}

inline void from_json(const json& j, IsolationFixture& f) {
  f = IsolationFixture(j.at("users").get<std::vector<std::string>>(),
                       j.value("processes_per_user", std::size_t{1}),
                       j.value("include_real_memory_check", true));
}

}  // namespace conform
