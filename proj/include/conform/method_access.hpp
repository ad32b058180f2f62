#pragma once

// Executors for the access-isolation methods: discretionary access (and its
// user-device matching variant) and mandatory access (and its alienated
// carrier variant).
//
// Expected values come only from the fixture (expected_dac / expected_mac);
// the target supplies the actual values. A reduced run probes the rows of a
// covering array instead of the full product but keeps the same oracle.

#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "conform/core_model.hpp"
#include "conform/covering_array.hpp"
#include "conform/sut.hpp"

namespace conform {

namespace detail {

inline std::string granted_word(bool g) { return g ? "granted" : "denied"; }

inline void check_rows(const CoveringArray& ca,
                       const std::vector<std::size_t>& domains) {
  if (ca.domains != domains)
    throw DimensionMismatch("covering array domains do not match the fixture");
  for (const auto& r : ca.rows) {
    if (r.size() != domains.size())
      throw DimensionMismatch("covering array row has the wrong width");
    for (std::size_t p = 0; p < r.size(); ++p)
      if (r[p] >= domains[p])
        throw DimensionMismatch("covering array row outside the fixture");
  }
}

inline json strategy_slots(const CoveringArray* reduced,
                           std::size_t distinct_probed, std::size_t space) {
  const double fraction =
      space == 0 ? 1.0
                 : static_cast<double>(distinct_probed) /
                       static_cast<double>(space);
  return json{{"strategy", reduced ? "tway:" + std::to_string(reduced->strength)
                                   : std::string("exh")},
              {"coverage_fraction", fraction}};
}

inline ProcedureVerdict run_access_matrix(SutAdapter& sut,
                                          const AccessMatrix& matrix,
                                          const std::string& procedure_id,
                                          const CoveringArray* reduced) {
  require_capability(sut, Capability::AccessControl, procedure_id);
  const auto& S = matrix.subjects();
  const auto& O = matrix.objects();
  const auto& R = matrix.rights();

  std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> triples;
  if (reduced) {
    check_rows(*reduced, {S.size(), O.size(), R.size()});
    for (const auto& r : reduced->rows) triples.emplace_back(r[0], r[1], r[2]);
  } else {
    for (std::size_t s = 0; s < S.size(); ++s)
      for (std::size_t o = 0; o < O.size(); ++o)
        for (std::size_t r = 0; r < R.size(); ++r) triples.emplace_back(s, o, r);
  }

  sut.setup_access(S, O, matrix);

  json records = json::array();
  std::vector<Discrepancy> found;
  for (const auto& [s, o, r] : triples) {
    const bool expected = expected_dac(matrix, s, o, r);
    const bool actual = sut.probe_access(S[s], O[o], R[r]).granted;
    records.push_back({{"subject", S[s]},
                       {"object", O[o]},
                       {"right", R[r]},
                       {"expected", expected},
                       {"actual", actual}});
    if (expected != actual)
      found.push_back({granted_word(expected), granted_word(actual),
                       "(" + S[s] + "," + O[o] + "," + R[r] + ")"});
  }

  const std::set<std::tuple<std::size_t, std::size_t, std::size_t>> distinct(
      triples.begin(), triples.end());
  json registered{{"subjects", S},
                  {"objects", O},
                  {"object_class", to_string(matrix.object_class())},
                  {"rights", R},
                  {"access_matrix", matrix_cells_json(matrix)},
                  {"probe_records", std::move(records)}};
  registered.update(
      strategy_slots(reduced, distinct.size(), matrix.probe_space()));
  return ProcedureVerdict::from_comparison(procedure_id, std::move(registered),
                                           std::move(found), triples.size());
}

}  // namespace detail

// Probes every (subject, object, right) triple, or the rows of `reduced`.
inline ProcedureVerdict run_dac_test(SutAdapter& sut,
                                     const AccessMatrix& matrix,
                                     const std::string& procedure_id = "DAC",
                                     const CoveringArray* reduced = nullptr) {
  return detail::run_access_matrix(sut, matrix, procedure_id, reduced);
}

// Same loop with device objects.
inline ProcedureVerdict run_device_matching_test(
    SutAdapter& sut, const AccessMatrix& matrix,
    const std::string& procedure_id = "DEVICE_MATCHING",
    const CoveringArray* reduced = nullptr) {
  if (matrix.object_class() == ObjectClass::Device)
    return detail::run_access_matrix(sut, matrix, procedure_id, reduced);
  json j = matrix;
  j["object_class"] = "device";
  return detail::run_access_matrix(sut, j.get<AccessMatrix>(), procedure_id,
                                   reduced);
}

namespace detail {

inline ProcedureVerdict run_label_rules(SutAdapter& sut, const MacFixture& f,
                                        const std::string& procedure_id,
                                        const CoveringArray* reduced) {
  require_capability(sut, Capability::Labels, procedure_id);
  f.validate();

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  if (reduced) {
    check_rows(*reduced, {f.subjects.size(), f.objects.size()});
    for (const auto& r : reduced->rows) pairs.emplace_back(r[0], r[1]);
  } else {
    for (std::size_t s = 0; s < f.subjects.size(); ++s)
      for (std::size_t o = 0; o < f.objects.size(); ++o) pairs.emplace_back(s, o);
  }

  std::map<std::string, int> subject_labels, object_labels;
  for (const auto& s : f.subjects)
    subject_labels[s] = f.labels.subject_labels.at(s);
  for (const auto& o : f.objects) object_labels[o] = f.labels.object_labels.at(o);
  sut.set_labels(subject_labels, object_labels);

  json records = json::array();
  std::vector<Discrepancy> found;
  for (const auto& [si, oi] : pairs) {
    const auto& s = f.subjects[si];
    const auto& o = f.objects[oi];
    for (auto mode : {MacMode::Read, MacMode::Write}) {
      const bool expected =
          expected_mac(f.lattice, subject_labels[s], object_labels[o], mode);
      const bool actual = sut.probe_labeled(s, o, mode).granted;
      records.push_back({{"subject", s},
                         {"object", o},
                         {"mode", to_string(mode)},
                         {"expected", expected},
                         {"actual", actual}});
      if (expected != actual)
        found.push_back({granted_word(expected), granted_word(actual),
                         "(" + s + "," + o + "," +
                             std::string(to_string(mode)) + ")"});
    }
  }

  const std::set<std::pair<std::size_t, std::size_t>> distinct(pairs.begin(),
                                                               pairs.end());
  json registered{{"subjects", f.subjects},
                  {"objects", f.objects},
                  {"object_class", to_string(f.object_class)},
                  {"labels",
                   {{"levels", f.lattice.levels},
                    {"subjects", subject_labels},
                    {"objects", object_labels}}},
                  {"probe_records", std::move(records)}};
  registered.update(strategy_slots(reduced, distinct.size(),
                                   f.subjects.size() * f.objects.size()));
  return ProcedureVerdict::from_comparison(procedure_id, std::move(registered),
                                           std::move(found), 2 * pairs.size());
}

}  // namespace detail

// Probes read and write for every (subject, object) pair, or the pairs
// listed by `reduced`.
inline ProcedureVerdict run_mac_test(SutAdapter& sut,
                                     const MacFixture& fixture,
                                     const std::string& procedure_id = "MAC",
                                     const CoveringArray* reduced = nullptr) {
  return detail::run_label_rules(sut, fixture, procedure_id, reduced);
}

inline ProcedureVerdict run_carrier_output_test(
    SutAdapter& sut, MacFixture fixture,
    const std::string& procedure_id = "CARRIER_OUTPUT",
    const CoveringArray* reduced = nullptr) {
  fixture.object_class = ObjectClass::Carrier;
  return detail::run_label_rules(sut, fixture, procedure_id, reduced);
}

}  // namespace conform
