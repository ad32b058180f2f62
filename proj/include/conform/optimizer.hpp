#pragma once

// Test-plan optimization: the time model, per-procedure strategy pricing,
// the cost-bounded time-minimization program, and procedure combining.
//
// The decision variable is the strategy of each procedure. optimize_plan
// picks exactly one priced option per procedure, minimizing total time with
// total cost <= budget (a multiple-choice knapsack, solved exactly by a
// dynamic program over cost).

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "conform/core_model.hpp"
#include "conform/covering_array.hpp"

namespace conform {

using json = nlohmann::json;

struct CostModel {
  std::uint64_t probe_time = 1;
  std::uint64_t probe_cost = 1;
  std::uint64_t overhead_time = 0;  // per procedure
  std::uint64_t overhead_cost = 0;  // per procedure

  friend bool operator==(const CostModel&, const CostModel&) = default;
};

inline constexpr std::size_t kMinStrength = 2;
inline constexpr std::size_t kMaxStrength = 6;

struct Strategy {
  enum class Kind { Exhaustive, TWay, Combined };
  Kind kind = Kind::Exhaustive;
  std::size_t strength = 0;  // TWay only
  std::string with;          // Combined only: host procedure id

  static Strategy exhaustive() { return {}; }
  static Strategy tway(std::size_t t) {
    if (t < kMinStrength || t > kMaxStrength)
      throw InvalidStrength("t-way strength must be in [2..6]");
    return {Kind::TWay, t, {}};
  }
  static Strategy combined(std::string host) {
    return {Kind::Combined, 0, std::move(host)};
  }

  friend bool operator==(const Strategy&, const Strategy&) = default;
};

inline std::string to_string(const Strategy& s) {
  switch (s.kind) {
    case Strategy::Kind::Exhaustive: return "exh";
    case Strategy::Kind::TWay: return "tway:" + std::to_string(s.strength);
    case Strategy::Kind::Combined: return "combined:" + s.with;
  }
  return "exh";
}

inline Strategy parse_strategy(std::string_view text) {
  if (text == "exh" || text == "exhaustive") return Strategy::exhaustive();
  if (text.starts_with("tway:")) {
    const auto digits = text.substr(5);
    if (digits.empty() ||
        digits.find_first_not_of("0123456789") != std::string_view::npos)
      throw InvalidStrength("bad t-way strength in '" + std::string(text) +
                            "'");
    return Strategy::tway(std::stoul(std::string(digits)));
  }
  if (text.starts_with("combined:") && text.size() > 9)
    return Strategy::combined(std::string(text.substr(9)));
  throw PlanFormatError("unknown strategy '" + std::string(text) + "'");
}

struct StrategyOption {
  std::string procedure_id;
  MethodKind kind = MethodKind::Dac;
  Strategy strategy;
  std::uint64_t time = 0;
  std::uint64_t cost = 0;
  std::uint64_t probe_count = 0;

  friend bool operator==(const StrategyOption&,
                         const StrategyOption&) = default;
};

struct Plan {
  std::vector<std::string> order;  // execution order
  std::map<std::string, StrategyOption> chosen;
  std::uint64_t total_time = 0;
  std::uint64_t total_cost = 0;
  std::optional<std::uint64_t> budget;  // nullopt: unbounded
  CostModel model;

  friend bool operator==(const Plan&, const Plan&) = default;
};

namespace detail {
inline std::uint64_t mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r = 0;
  if (__builtin_mul_overflow(a, b, &r)) throw Overflow("time/cost overflow");
  return r;
}
inline std::uint64_t add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r = 0;
  if (__builtin_add_overflow(a, b, &r)) throw Overflow("time/cost overflow");
  return r;
}
}  // namespace detail

// tau * n * v^w + n * overhead. Overflow is reported, never wrapped.
inline std::uint64_t estimate_time(std::uint64_t n, std::uint64_t v,
                                   std::uint64_t w, const CostModel& model) {
  std::uint64_t pow = 1;
  if (v <= 1) {
    pow = (w > 0) ? v : 1;
  } else {
    for (std::uint64_t i = 0; i < w; ++i) pow = detail::mul(pow, v);
  }
  return detail::add(detail::mul(detail::mul(model.probe_time, n), pow),
                     detail::mul(n, model.overhead_time));
}

// Mixed-domain form: v^w generalizes to the product of the factor domains.
inline std::uint64_t estimate_time(std::uint64_t n,
                                   std::span<const std::size_t> domains,
                                   const CostModel& model) {
  std::uint64_t prod = 1;
  for (auto d : domains) prod = detail::mul(prod, d);
  return detail::add(detail::mul(detail::mul(model.probe_time, n), prod),
                     detail::mul(n, model.overhead_time));
}

inline StrategyOption make_option(const TestProcedure& p, Strategy s,
                                  std::uint64_t probes,
                                  const CostModel& model) {
  return {p.id,
          p.kind,
          std::move(s),
          detail::add(detail::mul(probes, model.probe_time),
                      model.overhead_time),
          detail::add(detail::mul(probes, model.probe_cost),
                      model.overhead_cost),
          probes};
}

// Probes executed per covering-array row: DAC rows are whole triples, label
// rows are (subject, object) pairs probed for both read and write.
inline std::uint64_t probes_per_row(MethodKind k) {
  return (k == MethodKind::Mac || k == MethodKind::CarrierOutput) ? 2 : 1;
}

// Covering array backing a t-way run of a reducible procedure.
inline CoveringArray strategy_array(const TestProcedure& p, std::size_t t,
                                    std::uint64_t seed) {
  return generate_covering_array(probe_domains(p.kind, p.params), t, seed);
}

inline std::vector<StrategyOption> price_strategies(
    const TestProcedure& procedure, const CostModel& model,
    std::uint64_t seed = 0) {
  std::vector<StrategyOption> out;
  out.push_back(make_option(procedure, Strategy::exhaustive(),
                            exhaustive_probe_count(procedure.kind,
                                                   procedure.params),
                            model));
  if (!is_reducible(procedure.kind)) return out;
  const auto domains = probe_domains(procedure.kind, procedure.params);
  if (std::any_of(domains.begin(), domains.end(),
                  [](std::size_t d) { return d == 0; }))
    return out;  // empty fixture: nothing to reduce
  const auto t_max = std::min(kMaxStrength, domains.size());
  for (std::size_t t = kMinStrength; t <= t_max; ++t) {
    const auto rows = strategy_array(procedure, t, seed).rows.size();
    out.push_back(make_option(procedure, Strategy::tway(t),
                              rows * probes_per_row(procedure.kind), model));
  }
  return out;
}

inline void recompute_totals(Plan& plan) {
  plan.total_time = 0;
  plan.total_cost = 0;
  for (const auto& id : plan.order) {
    const auto& o = plan.chosen.at(id);
    plan.total_time = detail::add(plan.total_time, o.time);
    plan.total_cost = detail::add(plan.total_cost, o.cost);
  }
}

// Largest cost range the exact DP will tabulate.
inline constexpr std::uint64_t kMaxBudgetCells = std::uint64_t{1} << 24;

// Exactly one option per group minimizing total time subject to total cost
// <= budget. Ties: lower total cost, then the earliest option of each group
// taken in lexicographic procedure-id order. Groups are identified by their
// options' procedure_id and the plan keeps the input group order.
// Returns nullopt when no selection fits the budget.
inline std::optional<Plan> optimize_plan(
    std::span<const std::vector<StrategyOption>> groups,
    std::optional<std::uint64_t> budget, const CostModel& model = {}) {
  std::vector<std::size_t> by_id(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].empty())
      throw InvalidRequirement("procedure without strategy options");
    by_id[g] = g;
  }
  std::sort(by_id.begin(), by_id.end(), [&](std::size_t a, std::size_t b) {
    return groups[a].front().procedure_id < groups[b].front().procedure_id;
  });

  std::uint64_t min_sum = 0, max_sum = 0;
  for (const auto& g : groups) {
    std::uint64_t lo = std::numeric_limits<std::uint64_t>::max(), hi = 0;
    for (const auto& o : g) {
      lo = std::min(lo, o.cost);
      hi = std::max(hi, o.cost);
    }
    min_sum = detail::add(min_sum, lo);
    max_sum = detail::add(max_sum, hi);
  }
  if (budget && *budget < min_sum) return std::nullopt;
  const std::uint64_t cap = budget ? std::min(*budget, max_sum) : max_sum;
  if (cap >= kMaxBudgetCells)
    throw Overflow("cost range too large for the exact plan optimizer");

  struct Cell {
    std::uint64_t time;
    std::uint64_t cost;
    bool operator<(const Cell& o) const {
      return time != o.time ? time < o.time : cost < o.cost;
    }
    bool operator==(const Cell&) const = default;
  };
  constexpr Cell kNone{std::numeric_limits<std::uint64_t>::max(),
                       std::numeric_limits<std::uint64_t>::max()};
  const std::size_t width = static_cast<std::size_t>(cap) + 1;
  const std::size_t n = groups.size();

  // best[i][b]: lexicographically smallest (time, cost) for groups
  // by_id[i..n) using total cost <= b.
  std::vector<std::vector<Cell>> best(n + 1, std::vector<Cell>(width, kNone));
  std::fill(best[n].begin(), best[n].end(), Cell{0, 0});
  for (std::size_t i = n; i-- > 0;) {
    const auto& g = groups[by_id[i]];
    for (std::size_t b = 0; b < width; ++b) {
      Cell acc = kNone;
      for (const auto& o : g) {
        if (o.cost > b) continue;
        const Cell& rest = best[i + 1][b - o.cost];
        if (rest == kNone) continue;
        Cell c{detail::add(o.time, rest.time), o.cost + rest.cost};
        if (c < acc) acc = c;
      }
      best[i][b] = acc;
    }
  }
  if (best[0][cap] == kNone) return std::nullopt;

  Plan plan;
  plan.budget = budget;
  plan.model = model;
  std::size_t b = static_cast<std::size_t>(cap);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& g = groups[by_id[i]];
    for (const auto& o : g) {
      if (o.cost > b) continue;
      const Cell& rest = best[i + 1][b - o.cost];
      if (rest == kNone) continue;
      if (Cell{o.time + rest.time, o.cost + rest.cost} == best[i][b]) {
        plan.chosen[o.procedure_id] = o;
        b -= o.cost;
        break;
      }
    }
  }
  for (const auto& g : groups) plan.order.push_back(g.front().procedure_id);
  recompute_totals(plan);
  return plan;
}

struct CombineResult {
  Plan plan;
  bool nothing_to_combine = false;
};

// Runs the audit-coupling procedure on the audit stream of the last access
// or auth procedure in the plan: its probe time drops to zero while its fixed
// overhead remains. Idempotent.
inline CombineResult combine_procedures(Plan plan) {
  std::optional<std::string> audit, host;
  for (const auto& id : plan.order) {
    const auto& o = plan.chosen.at(id);
    if (o.kind == MethodKind::AuditCoupling) audit = id;
    if (is_audit_host(o.kind)) host = id;
  }
  if (!audit || !host) return {std::move(plan), true};
  auto& opt = plan.chosen.at(*audit);
  if (opt.strategy.kind != Strategy::Kind::Combined) {
    opt.strategy = Strategy::combined(*host);
    opt.time = plan.model.overhead_time;
    recompute_totals(plan);
  }
  return {std::move(plan), false};
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------
inline void to_json(json& j, const CostModel& m) {
  j = json{{"probe_time", m.probe_time},
           {"probe_cost", m.probe_cost},
           {"overhead_time", m.overhead_time},
           {"overhead_cost", m.overhead_cost}};
}
inline void from_json(const json& j, CostModel& m) {
  CostModel d;
  m.probe_time = j.value("probe_time", d.probe_time);
  m.probe_cost = j.value("probe_cost", d.probe_cost);
  m.overhead_time = j.value("overhead_time", d.overhead_time);
  m.overhead_cost = j.value("overhead_cost", d.overhead_cost);
}

inline void to_json(json& j, const StrategyOption& o) {
  j = json{{"procedure_id", o.procedure_id},
           {"kind", to_string(o.kind)},
           {"strategy", to_string(o.strategy)},
           {"time", o.time},
           {"cost", o.cost},
           {"probe_count", o.probe_count}};
}
inline void from_json(const json& j, StrategyOption& o) {
  o.procedure_id = j.at("procedure_id").get<std::string>();
  auto kind = method_kind_from_string(j.at("kind").get<std::string>());
  if (!kind) throw PlanFormatError("unknown procedure kind in plan");
  o.kind = *kind;
  o.strategy = parse_strategy(j.at("strategy").get<std::string>());
  o.time = j.at("time").get<std::uint64_t>();
  o.cost = j.at("cost").get<std::uint64_t>();
  o.probe_count = j.at("probe_count").get<std::uint64_t>();
}

inline void to_json(json& j, const Plan& p) {
  json chosen = json::array();
  for (const auto& id : p.order) chosen.push_back(p.chosen.at(id));
  j = json{{"chosen", chosen},
           {"total_time", p.total_time},
           {"total_cost", p.total_cost},
           {"budget", p.budget ? json(*p.budget) : json(nullptr)},
           {"cost_model", p.model}};
}
inline void from_json(const json& j, Plan& p) {
  Plan out;
  for (const auto& o : j.at("chosen")) {
    auto opt = o.get<StrategyOption>();
    out.order.push_back(opt.procedure_id);
    if (!out.chosen.emplace(opt.procedure_id, opt).second)
      throw PlanFormatError("procedure '" + opt.procedure_id +
                            "' chosen twice");
  }
  out.total_time = j.at("total_time").get<std::uint64_t>();
  out.total_cost = j.at("total_cost").get<std::uint64_t>();
  if (j.contains("budget") && !j.at("budget").is_null())
    out.budget = j.at("budget").get<std::uint64_t>();
  out.model = j.value("cost_model", CostModel{});
  const auto declared_time = out.total_time, declared_cost = out.total_cost;
  recompute_totals(out);
  if (declared_time != out.total_time || declared_cost != out.total_cost)
    throw PlanFormatError("plan totals do not match chosen options");
  if (out.budget && out.total_cost > *out.budget)
    throw PlanFormatError("plan exceeds its budget");
  p = std::move(out);
}

}  // namespace conform
