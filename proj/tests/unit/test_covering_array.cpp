#include <gtest/gtest.h>

#include "support.hpp"

using namespace conform;

namespace {

// Reference coverage check: enumerate every t-subset of parameters and every
// value tuple over it, then look for a row carrying it.
bool brute_force_covers(const std::vector<std::size_t>& d, std::size_t t,
                        const std::vector<Row>& rows) {
  const std::size_t n = d.size();
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != t) continue;
    std::vector<std::size_t> params;
    for (std::size_t p = 0; p < n; ++p)
      if (mask & (1u << p)) params.push_back(p);
    std::size_t combos = 1;
    for (auto p : params) combos *= d[p];
    for (std::size_t c = 0; c < combos; ++c) {
      std::vector<std::size_t> vals(params.size());
      std::size_t rest = c;
      for (std::size_t i = params.size(); i-- > 0;) {
        vals[i] = rest % d[params[i]];
        rest /= d[params[i]];
      }
      bool hit = false;
      for (const auto& r : rows) {
        bool all = true;
        for (std::size_t i = 0; i < params.size() && all; ++i)
          all = r[params[i]] == vals[i];
        if (all) {
          hit = true;
          break;
        }
      }
      if (!hit) return false;
    }
  }
  return true;
}

std::size_t product(const std::vector<std::size_t>& d) {
  std::size_t p = 1;
  for (auto x : d) p *= x;
  return p;
}

}  // namespace

TEST(CoveringArray, FullStrengthIsExhaustive) {
  auto ca = generate_covering_array({2, 2, 2}, 3, 1);
  EXPECT_EQ(ca.rows.size(), 8u);
  EXPECT_TRUE(verify_coverage(ca));
}

TEST(CoveringArray, PairwiseBinaryMinimumIsFourByExhaustiveSearch) {
  const std::vector<std::size_t> d{2, 2, 2};
  const auto full = exhaustive_array(d, 3).rows;
  std::size_t minimum = full.size();
  for (std::uint32_t mask = 1; mask < (1u << full.size()); ++mask) {
    std::vector<Row> pick;
    for (std::size_t i = 0; i < full.size(); ++i)
      if (mask & (1u << i)) pick.push_back(full[i]);
    if (pick.size() < minimum && brute_force_covers(d, 2, pick))
      minimum = pick.size();
  }
  EXPECT_EQ(minimum, 4u);

  auto ca = generate_covering_array(d, 2, 7);
  EXPECT_TRUE(verify_coverage(ca));
  EXPECT_GE(ca.rows.size(), minimum);
}

TEST(CoveringArray, FourTernaryPairwiseBounds) {
  auto ca = generate_covering_array({3, 3, 3, 3}, 2, 7);
  EXPECT_TRUE(verify_coverage(ca));
  EXPECT_GE(ca.rows.size(), 9u);
  EXPECT_LE(ca.rows.size(), 81u);
}

TEST(CoveringArray, DacFixturePairwiseBounds) {
  auto ca = generate_covering_array({3, 4, 3}, 2, 7);
  EXPECT_TRUE(verify_coverage(ca));
  EXPECT_GE(ca.rows.size(), 12u);
  EXPECT_LE(ca.rows.size(), 36u);
}

TEST(CoveringArray, SeedDeterminism) {
  EXPECT_EQ(generate_covering_array({3, 4, 2, 3}, 2, 11).rows,
            generate_covering_array({3, 4, 2, 3}, 2, 11).rows);
}

TEST(CoveringArray, InvalidStrengthRejected) {
  EXPECT_THROW(generate_covering_array({2, 2}, 3, 0), InvalidStrength);
  EXPECT_THROW(generate_covering_array({2, 2}, 0, 0), InvalidStrength);
  EXPECT_THROW(generate_covering_array({}, 1, 0), InvalidStrength);
}

TEST(CoveringArray, MonotoneInStrength) {
  const std::vector<std::size_t> d{3, 2, 4, 2, 3};
  std::size_t prev = 0;
  for (std::size_t t = 1; t <= d.size(); ++t) {
    const auto rows = generate_covering_array(d, t, 3).rows.size();
    EXPECT_GE(rows, prev) << "t=" << t;
    prev = rows;
  }
  EXPECT_EQ(prev, product(d));
}

TEST(CoveringArray, AgreesWithBruteForceOracle) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto eng = make_engine(seed, "ca-test");
    std::vector<std::size_t> d(2 + pick_index(eng, 3));
    for (auto& x : d) x = 1 + pick_index(eng, 3);
    const std::size_t t = 1 + pick_index(eng, d.size());
    auto ca = generate_covering_array(d, t, seed);
    EXPECT_TRUE(brute_force_covers(d, t, ca.rows));
    // Dropping rows either keeps coverage or both checkers see the gap.
    for (std::size_t drop = 0; drop < ca.rows.size(); ++drop) {
      auto cut = ca;
      cut.rows.erase(cut.rows.begin() + static_cast<std::ptrdiff_t>(drop));
      EXPECT_EQ(verify_coverage(cut), brute_force_covers(d, t, cut.rows));
    }
  }
}

TEST(VerifyCoverage, ExhaustiveAlwaysCovers) {
  for (std::size_t t = 1; t <= 3; ++t)
    EXPECT_TRUE(verify_coverage(exhaustive_array({2, 3, 2}, t)));
}

TEST(VerifyCoverage, DeletedRowLeavesPairUncovered) {
  CoveringArray ca{{2, 2, 2}, 2, {{0, 0, 0}, {0, 1, 1}, {1, 0, 1}, {1, 1, 0}}};
  ASSERT_TRUE(verify_coverage(ca));
  ca.rows.pop_back();
  auto gap = first_uncovered(ca);
  ASSERT_TRUE(gap);
  EXPECT_EQ(gap->params, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(gap->values, (std::vector<std::size_t>{1, 1}));
}

TEST(VerifyCoverage, SingleValuedDomains) {
  EXPECT_TRUE(verify_coverage(CoveringArray{{1, 1}, 1, {{0, 0}}}));
}

TEST(RowLowerBound, LargestTWiseProduct) {
  EXPECT_EQ(row_lower_bound({3, 4, 3}, 2), 12u);
  EXPECT_EQ(row_lower_bound({2, 5, 3, 4}, 3), 60u);
}

TEST(CoveringArrayText, RoundTrip) {
  auto ca = generate_covering_array({3, 4, 3}, 2, 5);
  auto back = parse_covering_array(format_covering_array(ca));
  EXPECT_EQ(back.domains, ca.domains);
  EXPECT_EQ(back.strength, ca.strength);
  EXPECT_EQ(back.rows, ca.rows);
}

TEST(CoveringArrayText, MalformedRejected) {
  for (const char* text :
       {"", "0,1\n", "# domains: 2,2\n0,1\n", "# strength: 2\n0,1\n",
        "# domains: 2,2\n# strength: 2\n0,x\n", "# domains: 2,2\n# strength: 2\n0,1,1\n",
        "# domains: 2,2\n# strength: 2\n0,2\n", "# domains: 2,2\n# strength: 3\n"})
    EXPECT_THROW(parse_covering_array(text), PlanFormatError) << text;
}
