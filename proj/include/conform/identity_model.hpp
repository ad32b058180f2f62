#pragma once

// Fixture types for identification/authentication and integrity control.

#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "conform/digest.hpp"
#include "conform/errors.hpp"

namespace conform {

using json = nlohmann::json;

inline constexpr std::string_view kDefaultAlphabet =
    "abcdefghijklmnopqrstuvwxyz0123456789";

inline bool within_alphabet(std::string_view s, std::string_view alphabet) {
  return !s.empty() && s.find_first_not_of(alphabet) == std::string_view::npos;
}

struct Account {
  std::string id;
  std::string pwd;

  friend bool operator==(const Account&, const Account&) = default;
};

enum class TrialCategory { RegOk, RegBadPw, UnregAnyPw };

inline std::string_view to_string(TrialCategory c) {
  switch (c) {
    case TrialCategory::RegOk: return "REG_OK";
    case TrialCategory::RegBadPw: return "REG_BADPW";
    case TrialCategory::UnregAnyPw: return "UNREG_ANYPW";
  }
  return "REG_OK";
}

struct AuthTrial {
  std::string id;
  std::string pwd;
  bool expected = false;
  std::optional<bool> actual;
  TrialCategory category = TrialCategory::RegOk;

  friend bool operator==(const AuthTrial&, const AuthTrial&) = default;
};

// Account-membership indicator: the model value of a login attempt.
inline bool expected_auth(const std::vector<Account>& accounts,
                          std::string_view id, std::string_view pwd) {
  for (const auto& a : accounts)
    if (a.id == id) return a.pwd == pwd;
  return false;
}

// One REG_OK and one REG_BADPW trial per account, then a single UNREG_ANYPW
// trial with an id no account uses.
inline std::vector<AuthTrial> gen_auth_trials(
    const std::vector<Account>& accounts, std::string_view alphabet,
    std::uint64_t run_seed) {
  if (accounts.empty()) throw FixtureError("auth trials need >= 1 account");
  if (alphabet.empty()) throw AlphabetViolation("empty alphabet");
  std::set<std::string> ids;
  for (const auto& a : accounts) {
    if (!within_alphabet(a.id, alphabet) || !within_alphabet(a.pwd, alphabet))
      throw AlphabetViolation("account '" + a.id + "' leaves the alphabet");
    if (!ids.insert(a.id).second)
      throw FixtureError("duplicate account id '" + a.id + "'");
  }

  auto eng = make_engine(run_seed, "auth-trials");
  auto fresh = [&](std::size_t length, auto&& rejected) {
    for (std::size_t len = length;; ++len) {
      for (int attempt = 0; attempt < 64; ++attempt) {
        auto s = random_string(eng, alphabet, len);
        if (!rejected(s)) return s;
      }
    }
  };

  std::vector<AuthTrial> trials;
  trials.reserve(accounts.size() * 2 + 1);
  for (const auto& a : accounts) {
    trials.push_back({a.id, a.pwd, true, std::nullopt, TrialCategory::RegOk});
    auto bad = fresh(a.pwd.size(),
                     [&](const std::string& s) { return s == a.pwd; });
    trials.push_back(
        {a.id, std::move(bad), false, std::nullopt, TrialCategory::RegBadPw});
  }
  auto unreg_id =
      fresh(8, [&](const std::string& s) { return ids.contains(s); });
  auto any_pwd = fresh(8, [](const std::string&) { return false; });
  trials.push_back({std::move(unreg_id), std::move(any_pwd), false,
                    std::nullopt, TrialCategory::UnregAnyPw});

  for (const auto& t : trials) {
    if (!within_alphabet(t.id, alphabet) || !within_alphabet(t.pwd, alphabet))
      throw AlphabetViolation("generated trial leaves the alphabet");
    if (t.expected != expected_auth(accounts, t.id, t.pwd))
      throw Error("auth trial generator produced an inconsistent trial");
  }
  return trials;
}

// ---------------------------------------------------------------------------
// Integrity
// ---------------------------------------------------------------------------
enum class MutationKind { Substitute, Truncate, Replace };

inline std::string_view to_string(MutationKind k) {
  switch (k) {
    case MutationKind::Substitute: return "substitute";
    case MutationKind::Truncate: return "truncate";
    case MutationKind::Replace: return "replace";
  }
  return "substitute";
}

inline MutationKind mutation_kind_from_string(std::string_view s) {
  if (s == "substitute") return MutationKind::Substitute;
  if (s == "truncate") return MutationKind::Truncate;
  if (s == "replace") return MutationKind::Replace;
  throw FixtureError("unknown mutation kind '" + std::string(s) + "'");
}

// Substitute: overwrite bytes at offset. Truncate: cut the file to `offset`
// bytes. Replace: swap the whole content for `bytes`.
struct FileMutation {
  MutationKind kind = MutationKind::Substitute;
  std::size_t offset = 0;
  std::string bytes;

  friend bool operator==(const FileMutation&, const FileMutation&) = default;
};

// The splice a mutation actually performed: content[offset, offset+old.size())
// was replaced by new_bytes. Applying invert(patch) restores the file.
struct FilePatch {
  std::size_t offset = 0;
  std::string old_bytes;
  std::string new_bytes;

  bool changes_content() const { return old_bytes != new_bytes; }

  friend bool operator==(const FilePatch&, const FilePatch&) = default;
};

inline FilePatch plan_patch(std::string_view content, const FileMutation& m) {
  switch (m.kind) {
    case MutationKind::Substitute: {
      if (m.offset > content.size())
        throw FixtureError("substitution offset past end of file");
      const auto n = std::min(m.bytes.size(), content.size() - m.offset);
      return {m.offset, std::string(content.substr(m.offset, n)), m.bytes};
    }
    case MutationKind::Truncate:
      if (m.offset > content.size())
        throw FixtureError("truncation length exceeds file size");
      return {m.offset, std::string(content.substr(m.offset)), {}};
    case MutationKind::Replace:
      return {0, std::string(content), m.bytes};
  }
  return {};
}

inline std::string apply_patch(std::string content, const FilePatch& p) {
  if (p.offset > content.size() ||
      content.compare(p.offset, p.old_bytes.size(), p.old_bytes) != 0)
    throw FixtureError("patch does not match file content");
  content.replace(p.offset, p.old_bytes.size(), p.new_bytes);
  return content;
}

inline FilePatch invert(const FilePatch& p) {
  return {p.offset, p.new_bytes, p.old_bytes};
}

struct IntegrityFixture {
  std::vector<std::string> files;                  // F_ISSH
  std::map<std::string, FileMutation> mutations;   // chosen F_MOD

  void validate() const {
    std::set<std::string> known(files.begin(), files.end());
    if (known.size() != files.size())
      throw FixtureError("integrity fixture lists a file twice");
    for (const auto& [name, _] : mutations)
      if (!known.contains(name))
        throw FixtureError("mutated file '" + name + "' not in file set");
  }

  friend bool operator==(const IntegrityFixture&,
                         const IntegrityFixture&) = default;
};

inline void to_json(json& j, const Account& a) {
  j = json{{"id", a.id}, {"pwd", a.pwd}};
}
inline void from_json(const json& j, Account& a) {
  a.id = j.at("id").get<std::string>();
  a.pwd = j.at("pwd").get<std::string>();
}

inline void to_json(json& j, const FileMutation& m) {
  j = json{{"kind", to_string(m.kind)}, {"offset", m.offset}};
  if (m.kind != MutationKind::Truncate) j["bytes"] = m.bytes;
}
inline void from_json(const json& j, FileMutation& m) {
  m.kind = mutation_kind_from_string(j.at("kind").get<std::string>());
  m.offset = j.value("offset", std::size_t{0});
  m.bytes = j.value("bytes", std::string());
  if (m.kind == MutationKind::Substitute && m.bytes.empty())
    throw FixtureError("substitution needs replacement bytes");
}

inline void to_json(json& j, const FilePatch& p) {
  j = json{{"offset", p.offset},
           {"old_digest", redact(p.old_bytes)},
           {"new_digest", redact(p.new_bytes)},
           {"old_length", p.old_bytes.size()},
           {"new_length", p.new_bytes.size()}};
}

inline void to_json(json& j, const IntegrityFixture& f) {
  j = json{{"files", f.files}, {"mutations", f.mutations}};
}
inline void from_json(const json& j, IntegrityFixture& f) {
  IntegrityFixture out;
  out.files = j.at("files").get<std::vector<std::string>>();
  out.mutations = j.value("mutations", std::map<std::string, FileMutation>{});
  out.validate();
  f = std::move(out);
}

}  // namespace conform
