#pragma once

// Fixture types and pure oracles for the access-isolation methods:
// discretionary (access matrix) and mandatory (ordered classification labels).
//
// Label encoding: rank 1 is the HIGHEST level and rank k the lowest, so
// "level(a) >= level(b)" is written rank_a <= rank_b. Every comparison in the
// harness goes through LabelLattice::dominates to keep that in one place.

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "conform/errors.hpp"

namespace conform {

using json = nlohmann::json;

// Tag distinguishing the parent methods from their variants
// (user-device matching, alienated-carrier output).
enum class ObjectClass { Data, Device, Carrier };

inline std::string_view to_string(ObjectClass c) {
  switch (c) {
    case ObjectClass::Data: return "data";
    case ObjectClass::Device: return "device";
    case ObjectClass::Carrier: return "carrier";
  }
  return "data";
}

inline ObjectClass object_class_from_string(std::string_view s) {
  if (s == "data") return ObjectClass::Data;
  if (s == "device") return ObjectClass::Device;
  if (s == "carrier") return ObjectClass::Carrier;
  throw FixtureError("unknown object class '" + std::string(s) + "'");
}

enum class MacMode { Read, Write };

inline std::string_view to_string(MacMode m) {
  return m == MacMode::Read ? "read" : "write";
}

// ---------------------------------------------------------------------------
// AccessMatrix: cells[i][j] is the set of right indices subject i holds on
// object j.
// ---------------------------------------------------------------------------
class AccessMatrix {
 public:
  AccessMatrix() = default;

  AccessMatrix(std::vector<std::string> subjects,
               std::vector<std::string> objects,
               std::vector<std::string> rights,
               ObjectClass object_class = ObjectClass::Data)
      : subjects_(std::move(subjects)),
        objects_(std::move(objects)),
        rights_(std::move(rights)),
        object_class_(object_class),
        cells_(subjects_.size() * objects_.size()) {
    check_unique(subjects_, "subject");
    check_unique(objects_, "object");
    check_unique(rights_, "right");
  }

  const std::vector<std::string>& subjects() const { return subjects_; }
  const std::vector<std::string>& objects() const { return objects_; }
  const std::vector<std::string>& rights() const { return rights_; }
  ObjectClass object_class() const { return object_class_; }

  std::size_t probe_space() const {
    return subjects_.size() * objects_.size() * rights_.size();
  }

  const std::set<std::size_t>& cell(std::size_t s, std::size_t o) const {
    check_index(s, o, 0, /*check_right=*/false);
    return cells_[s * objects_.size() + o];
  }

  void grant(std::size_t s, std::size_t o, std::size_t r) {
    check_index(s, o, r, true);
    cells_[s * objects_.size() + o].insert(r);
  }

  void revoke(std::size_t s, std::size_t o, std::size_t r) {
    check_index(s, o, r, true);
    cells_[s * objects_.size() + o].erase(r);
  }

  void grant_all() {
    for (auto& c : cells_)
      for (std::size_t r = 0; r < rights_.size(); ++r) c.insert(r);
  }

  bool has(std::size_t s, std::size_t o, std::size_t r) const {
    check_index(s, o, r, true);
    return cells_[s * objects_.size() + o].contains(r);
  }

  std::size_t subject_index(std::string_view name) const {
    return index_of(subjects_, name, "subject");
  }
  std::size_t object_index(std::string_view name) const {
    return index_of(objects_, name, "object");
  }
  std::size_t right_index(std::string_view name) const {
    return index_of(rights_, name, "right");
  }

  friend bool operator==(const AccessMatrix&, const AccessMatrix&) = default;

 private:
  static void check_unique(const std::vector<std::string>& v,
                           std::string_view what) {
    std::set<std::string> seen;
    for (const auto& x : v) {
      if (x.empty())
        throw FixtureError("empty " + std::string(what) + " name");
      if (!seen.insert(x).second)
        throw FixtureError("duplicate " + std::string(what) + " '" + x + "'");
    }
  }

  static std::size_t index_of(const std::vector<std::string>& v,
                              std::string_view name, std::string_view what) {
    auto it = std::find(v.begin(), v.end(), name);
    if (it == v.end())
      throw IndexOutOfRange("unknown " + std::string(what) + " '" +
                            std::string(name) + "'");
    return static_cast<std::size_t>(it - v.begin());
  }

  void check_index(std::size_t s, std::size_t o, std::size_t r,
                   bool check_right) const {
    if (s >= subjects_.size() || o >= objects_.size() ||
        (check_right && r >= rights_.size()))
      throw IndexOutOfRange("access matrix index out of range");
  }

  std::vector<std::string> subjects_;
  std::vector<std::string> objects_;
  std::vector<std::string> rights_;
  ObjectClass object_class_ = ObjectClass::Data;
  std::vector<std::set<std::size_t>> cells_;
};

// Configured-rights indicator: true iff right r is in m_so.
inline bool expected_dac(const AccessMatrix& matrix, std::size_t subject,
                         std::size_t object, std::size_t right) {
  return matrix.has(subject, object, right);
}

// ---------------------------------------------------------------------------
// Labels
// ---------------------------------------------------------------------------
struct LabelLattice {
  int levels = 1;

  explicit LabelLattice(int k = 1) : levels(k) {
    if (k < 1) throw FixtureError("label lattice needs at least one level");
  }

  bool contains(int rank) const { return rank >= 1 && rank <= levels; }

  void require(int rank) const {
    if (!contains(rank))
      throw UnknownLabelRank("label rank " + std::to_string(rank) +
                             " outside [1.." + std::to_string(levels) + "]");
  }

  // level(a) >= level(b)
  bool dominates(int a, int b) const {
    require(a);
    require(b);
    return a <= b;
  }

  friend bool operator==(const LabelLattice&, const LabelLattice&) = default;
};

// F_S and F_O.
struct LabelAssignment {
  std::map<std::string, int> subject_labels;
  std::map<std::string, int> object_labels;

  friend bool operator==(const LabelAssignment&,
                         const LabelAssignment&) = default;
};

// Read allowed iff the subject's level dominates the object's; write allowed
// iff the object's level dominates the subject's.
inline bool expected_mac(const LabelLattice& lattice, int subject_rank,
                         int object_rank, MacMode mode) {
  return mode == MacMode::Read ? lattice.dominates(subject_rank, object_rank)
                               : lattice.dominates(object_rank, subject_rank);
}

struct MacFixture {
  std::vector<std::string> subjects;
  std::vector<std::string> objects;
  LabelLattice lattice;
  LabelAssignment labels;
  ObjectClass object_class = ObjectClass::Data;

  // Totality over the fixture and rank range.
  void validate() const {
    for (const auto& s : subjects) {
      auto it = labels.subject_labels.find(s);
      if (it == labels.subject_labels.end())
        throw FixtureError("subject '" + s + "' has no label");
      lattice.require(it->second);
    }
    for (const auto& o : objects) {
      auto it = labels.object_labels.find(o);
      if (it == labels.object_labels.end())
        throw FixtureError("object '" + o + "' has no label");
      lattice.require(it->second);
    }
  }

  friend bool operator==(const MacFixture&, const MacFixture&) = default;
};

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------
inline json matrix_cells_json(const AccessMatrix& m) {
  json rows = json::array();
  for (std::size_t s = 0; s < m.subjects().size(); ++s) {
    json row = json::array();
    for (std::size_t o = 0; o < m.objects().size(); ++o) {
      json cell = json::array();
      for (std::size_t r : m.cell(s, o)) cell.push_back(m.rights()[r]);
      row.push_back(std::move(cell));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline void to_json(json& j, const AccessMatrix& m) {
  j = json{{"subjects", m.subjects()},
           {"objects", m.objects()},
           {"rights", m.rights()},
           {"object_class", to_string(m.object_class())},
           {"matrix", matrix_cells_json(m)}};
}

inline void from_json(const json& j, AccessMatrix& m) {
  AccessMatrix out(j.at("subjects").get<std::vector<std::string>>(),
                   j.at("objects").get<std::vector<std::string>>(),
                   j.at("rights").get<std::vector<std::string>>(),
                   object_class_from_string(j.value("object_class", "data")));
  const auto& rows = j.at("matrix");
  if (!rows.is_array() || rows.size() != out.subjects().size())
    throw DimensionMismatch("matrix row count does not match subjects");
  for (std::size_t s = 0; s < rows.size(); ++s) {
    if (!rows[s].is_array() || rows[s].size() != out.objects().size())
      throw DimensionMismatch("matrix column count does not match objects");
    for (std::size_t o = 0; o < rows[s].size(); ++o) {
      for (const auto& r : rows[s][o]) {
        const auto name = r.get<std::string>();
        auto it = std::find(out.rights().begin(), out.rights().end(), name);
        if (it == out.rights().end())
          throw FixtureError("right '" + name + "' not in rights universe");
        out.grant(s, o, static_cast<std::size_t>(it - out.rights().begin()));
      }
    }
  }
  m = std::move(out);
}

inline void to_json(json& j, const MacFixture& f) {
  j = json{{"subjects", f.subjects},
           {"objects", f.objects},
           {"levels", f.lattice.levels},
           {"object_class", to_string(f.object_class)},
           {"labels",
            {{"subjects", f.labels.subject_labels},
             {"objects", f.labels.object_labels}}}};
}

inline void from_json(const json& j, MacFixture& f) {
  MacFixture out;
  out.subjects = j.at("subjects").get<std::vector<std::string>>();
  out.objects = j.at("objects").get<std::vector<std::string>>();
  out.lattice = LabelLattice(j.at("levels").get<int>());
  out.object_class = object_class_from_string(j.value("object_class", "data"));
  const auto& labels = j.at("labels");
  out.labels.subject_labels =
      labels.at("subjects").get<std::map<std::string, int>>();
  out.labels.object_labels =
      labels.at("objects").get<std::map<std::string, int>>();
  out.validate();
  f = std::move(out);
}

}  // namespace conform
