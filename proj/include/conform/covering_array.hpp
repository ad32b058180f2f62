#pragma once

// t-way covering arrays for reduced probe strategies.
//
// Construction is greedy, one row at a time: every candidate tuple of the
// full product is scored by the number of still-uncovered t-combinations it
// would cover and the best one is appended. Ties go to the first best
// candidate in a cyclic scan starting at a seeded offset. No optimality is
// claimed; verify_coverage is an independent checker.
//
// Text format (one index tuple per line, comma separated):
//   # domains: 2,2,2
//   # strength: 2
//   0,0,0
//   0,1,1

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "conform/digest.hpp"
#include "conform/errors.hpp"

namespace conform {

using Row = std::vector<std::size_t>;

struct CoveringArray {
  std::vector<std::size_t> domains;
  std::size_t strength = 0;
  std::vector<Row> rows;

  friend bool operator==(const CoveringArray&, const CoveringArray&) = default;
};

// Candidate-space ceiling for the greedy generator.
inline constexpr std::size_t kMaxCandidateTuples = std::size_t{1} << 22;

namespace detail {

inline void for_each_subset(std::size_t n, std::size_t t, auto&& fn) {
  if (t > n) return;
  std::vector<std::size_t> idx(t);
  for (std::size_t i = 0; i < t; ++i) idx[i] = i;
  while (true) {
    fn(static_cast<const std::vector<std::size_t>&>(idx));
    std::size_t i = t;
    while (i > 0 && idx[i - 1] == n - t + (i - 1)) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < t; ++j) idx[j] = idx[j - 1] + 1;
  }
}

inline std::size_t checked_product(const std::vector<std::size_t>& v) {
  std::size_t p = 1;
  for (auto d : v) {
    if (d != 0 && p > SIZE_MAX / d) throw Overflow("product overflows");
    p *= d;
  }
  return p;
}

inline void validate_shape(const std::vector<std::size_t>& domains,
                           std::size_t t) {
  if (domains.empty() || t < 1 || t > domains.size())
    throw InvalidStrength("strength " + std::to_string(t) +
                          " outside [1.." + std::to_string(domains.size()) +
                          "]");
  for (auto d : domains)
    if (d < 1) throw InvalidStrength("domain sizes must be >= 1");
}

// Mixed-radix decode of a product index (first parameter most significant).
inline void decode(std::size_t index, const std::vector<std::size_t>& domains,
                   Row& out) {
  for (std::size_t p = domains.size(); p-- > 0;) {
    out[p] = index % domains[p];
    index /= domains[p];
  }
}

struct SubsetTable {
  std::vector<std::size_t> params;
  std::vector<std::size_t> strides;
  std::vector<char> covered;

  std::size_t index_of(const Row& row) const {
    std::size_t i = 0;
    for (std::size_t k = 0; k < params.size(); ++k)
      i += row[params[k]] * strides[k];
    return i;
  }
};

inline std::vector<SubsetTable> subset_tables(
    const std::vector<std::size_t>& domains, std::size_t t) {
  std::vector<SubsetTable> tables;
  for_each_subset(domains.size(), t, [&](const std::vector<std::size_t>& s) {
    SubsetTable tab;
    tab.params = s;
    tab.strides.resize(t);
    std::size_t stride = 1;
    for (std::size_t k = t; k-- > 0;) {
      tab.strides[k] = stride;
      stride *= domains[s[k]];
    }
    tab.covered.assign(stride, 0);
    tables.push_back(std::move(tab));
  });
  return tables;
}

}  // namespace detail

inline CoveringArray exhaustive_array(const std::vector<std::size_t>& domains,
                                      std::size_t t) {
  detail::validate_shape(domains, t);
  const auto total = detail::checked_product(domains);
  CoveringArray ca{domains, t, {}};
  ca.rows.reserve(total);
  Row row(domains.size());
  for (std::size_t i = 0; i < total; ++i) {
    detail::decode(i, domains, row);
    ca.rows.push_back(row);
  }
  return ca;
}

inline CoveringArray generate_covering_array(
    const std::vector<std::size_t>& domains, std::size_t t,
    std::uint64_t seed) {
  detail::validate_shape(domains, t);
  if (t == domains.size()) return exhaustive_array(domains, t);

  const auto candidates = detail::checked_product(domains);
  if (candidates > kMaxCandidateTuples)
    throw CoveringArrayTooLarge(
        "greedy covering array over " + std::to_string(candidates) +
        " candidate tuples exceeds the limit");

  auto tables = detail::subset_tables(domains, t);
  std::size_t uncovered = 0;
  for (const auto& tab : tables) uncovered += tab.covered.size();
  const std::size_t max_score = tables.size();

  auto eng = make_engine(seed, "covering-array");
  CoveringArray ca{domains, t, {}};
  Row row(domains.size()), best_row(domains.size());
  while (uncovered > 0) {
    const std::size_t start = pick_index(eng, candidates);
    std::size_t best_score = 0;
    for (std::size_t i = 0; i < candidates; ++i) {
      detail::decode((start + i) % candidates, domains, row);
      std::size_t score = 0;
      for (const auto& tab : tables) score += !tab.covered[tab.index_of(row)];
      if (score > best_score) {
        best_score = score;
        best_row = row;
        if (score == max_score) break;
      }
    }
    for (auto& tab : tables) {
      auto& c = tab.covered[tab.index_of(best_row)];
      if (!c) {
        c = 1;
        --uncovered;
      }
    }
    ca.rows.push_back(best_row);
  }
  return ca;
}

struct UncoveredCombination {
  std::vector<std::size_t> params;
  std::vector<std::size_t> values;
};

// First (parameter subset, value tuple) no row covers, in lexicographic
// subset/value order; nullopt when the array has full t-way coverage.
// Malformed rows (wrong width, out-of-domain values) cover nothing.
inline std::optional<UncoveredCombination> first_uncovered(
    const CoveringArray& ca) {
  const auto& d = ca.domains;
  if (d.empty() || ca.strength < 1 || ca.strength > d.size())
    return UncoveredCombination{};
  std::vector<const Row*> valid;
  for (const auto& r : ca.rows) {
    bool ok = r.size() == d.size();
    for (std::size_t p = 0; ok && p < r.size(); ++p) ok = r[p] < d[p];
    if (ok) valid.push_back(&r);
  }
  std::optional<UncoveredCombination> found;
  detail::for_each_subset(d.size(), ca.strength,
                          [&](const std::vector<std::size_t>& s) {
    if (found) return;
    std::set<std::vector<std::size_t>> seen;
    for (const Row* r : valid) {
      std::vector<std::size_t> key;
      for (auto p : s) key.push_back((*r)[p]);
      seen.insert(std::move(key));
    }
    std::vector<std::size_t> sub_domains;
    for (auto p : s) sub_domains.push_back(d[p]);
    const auto total = detail::checked_product(sub_domains);
    if (seen.size() == total) return;
    std::vector<std::size_t> values(s.size());
    for (std::size_t i = 0; i < total; ++i) {
      detail::decode(i, sub_domains, values);
      if (!seen.contains(values)) {
        found = UncoveredCombination{s, values};
        return;
      }
    }
  });
  return found;
}

inline bool verify_coverage(const CoveringArray& ca) {
  return !first_uncovered(ca).has_value();
}

// Largest product over any t parameters: no t-way array can be smaller.
inline std::size_t row_lower_bound(std::vector<std::size_t> domains,
                                   std::size_t t) {
  std::sort(domains.begin(), domains.end(), std::greater<>());
  std::size_t p = 1;
  for (std::size_t i = 0; i < t && i < domains.size(); ++i) p *= domains[i];
  return p;
}

// ---------------------------------------------------------------------------
// Text format
// ---------------------------------------------------------------------------
namespace detail {
inline std::string join(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s.push_back(',');
    s += std::to_string(v[i]);
  }
  return s;
}

inline std::vector<std::size_t> parse_indices(const std::string& text) {
  std::vector<std::size_t> out;
  std::size_t i = 0;
  while (i <= text.size()) {
    auto j = text.find(',', i);
    if (j == std::string::npos) j = text.size();
    std::string tok = text.substr(i, j - i);
    tok.erase(0, tok.find_first_not_of(" \t"));
    tok.erase(tok.find_last_not_of(" \t\r") + 1);
    if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
      throw PlanFormatError("bad index '" + tok + "'");
    out.push_back(std::stoull(tok));
    i = j + 1;
  }
  return out;
}
}  // namespace detail

inline std::string format_covering_array(const CoveringArray& ca) {
  std::string out = "# domains: " + detail::join(ca.domains) + "\n" +
                    "# strength: " + std::to_string(ca.strength) + "\n";
  for (const auto& r : ca.rows) out += detail::join(r) + "\n";
  return out;
}

inline CoveringArray parse_covering_array(const std::string& text) {
  CoveringArray ca;
  bool have_domains = false, have_strength = false;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      if (line[0] == '#') {
        const auto colon = line.find(':');
        if (colon == std::string::npos) continue;
        std::string key = line.substr(1, colon - 1);
        key.erase(0, key.find_first_not_of(' '));
        key.erase(key.find_last_not_of(' ') + 1);
        const std::string value = line.substr(colon + 1);
        if (key == "domains") {
          ca.domains = detail::parse_indices(value);
          have_domains = true;
        } else if (key == "strength") {
          auto v = detail::parse_indices(value);
          if (v.size() != 1) throw PlanFormatError("bad strength");
          ca.strength = v[0];
          have_strength = true;
        }
        continue;
      }
      ca.rows.push_back(detail::parse_indices(line));
    } catch (const PlanFormatError& e) {
      throw PlanFormatError("line " + std::to_string(lineno) + ": " +
                            e.what());
    }
  }
  if (!have_domains || !have_strength)
    throw PlanFormatError("missing '# domains:' or '# strength:' header");
  if (ca.domains.empty() || ca.strength < 1 ||
      ca.strength > ca.domains.size())
    throw PlanFormatError("strength outside [1..parameter count]");
  for (auto dsz : ca.domains)
    if (dsz < 1) throw PlanFormatError("domain sizes must be >= 1");
  for (const auto& r : ca.rows) {
    if (r.size() != ca.domains.size())
      throw PlanFormatError("row width does not match domains");
    for (std::size_t p = 0; p < r.size(); ++p)
      if (r[p] >= ca.domains[p])
        throw PlanFormatError("row value outside its domain");
  }
  return ca;
}

}  // namespace conform
