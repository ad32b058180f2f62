// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria (0 when all pass).
//
// Usage: acceptance [path-to-conform-cli] [scratch-dir]
// Criterion 8 drives the CLI when its path is given, the library otherwise.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <conform/conform.hpp>

using namespace conform;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

std::vector<Requirement> all_requirements() {
  std::vector<Requirement> out;
  for (const char* id : {"DAC", "DEVICE_MATCHING", "MAC", "CARRIER_OUTPUT",
                         "MEMORY_CLEAN", "MODULE_ISOLATION", "IDENT_AUTH",
                         "INTEGRITY"})
    out.push_back(json{{"id", id}}.get<Requirement>());
  return out;
}

SutSpec full_sut() {
  SutSpec s;
  for (const auto& r : all_requirements()) s.claims.insert(r.id);
  return s;
}

PlanFile plan_with(PlanningOptions o = {}, std::uint64_t seed = 7) {
  auto p = build_plan(full_sut(), all_requirements(), o, seed);
  if (!p) throw std::runtime_error("full plan unexpectedly infeasible");
  return *p;
}

const json* section(const json& report, const std::string& id) {
  for (const auto& s : report.at("procedures"))
    if (s.at("id") == id) return &s;
  return nullptr;
}

// -- 1 ----------------------------------------------------------------------
Outcome conformant_end_to_end() {
  Outcome o;
  const auto plan = plan_with();
  o.require(plan.procedures.size() == 9, "expected 8 procedures + coupling");
  auto r = run_plan(plan);
  o.require(!r.aborted(), "run aborted: " + r.error);
  if (!o.ok) return o;
  o.require(r.exit_code() == 0, "exit code not 0");
  for (const auto& s : r.report.at("procedures"))
    o.require(s.at("passed").get<bool>(),
              s.at("id").get<std::string>() + " did not pass");
  const json* dac = section(r.report, "DAC");
  o.require(dac && dac->at("attempts") == 36 &&
                dac->at("registered").at("probe_records").size() == 36,
            "DAC section does not record 36 probes");
  return o;
}

// -- 2 ----------------------------------------------------------------------
struct DefectCase {
  std::string defect;
  std::set<std::string> failing;
  std::function<bool(const std::string& proc, const Discrepancy&)> in_scope;
};

bool locus_is(const Discrepancy& d, const std::string& want) {
  return d.locus == want;
}
bool locus_starts(const Discrepancy& d, const std::string& prefix) {
  return d.locus.rfind(prefix, 0) == 0;
}

std::vector<DefectCase> defect_cases(const PlanFile& plan) {
  // Label rules are applied to the fixtures the plan actually carries.
  std::map<std::string, MacFixture> labels;
  for (const auto& p : plan.procedures)
    if (p.kind == MethodKind::Mac || p.kind == MethodKind::CarrierOutput)
      labels[p.id] = label_fixture(p.params);
  auto label_scope = [labels](MacMode mode) {
    return [labels, mode](const std::string& proc, const Discrepancy& d) {
      const auto& f = labels.at(proc);
      for (const auto& s : f.subjects)
        for (const auto& o : f.objects) {
          const int rs = f.labels.subject_labels.at(s);
          const int ro = f.labels.object_labels.at(o);
          const bool violating = mode == MacMode::Read ? rs > ro : ro > rs;
          if (violating && d.locus == "(" + s + "," + o + "," +
                                          std::string(to_string(mode)) + ")")
            return true;
        }
      return false;
    };
  };
  return {
      {"DAC_GRANT_EXTRA:S2,O3,R1", {"DAC"},
       [](auto&, auto& d) { return locus_is(d, "(S2,O3,R1)") && d.actual == "granted"; }},
      {"DAC_DENY_GRANTED:S1,O1,R1", {"DAC"},
       [](auto&, auto& d) { return locus_is(d, "(S1,O1,R1)") && d.actual == "denied"; }},
      {"MAC_ALLOW_READ_UP", {"MAC", "CARRIER_OUTPUT"}, label_scope(MacMode::Read)},
      {"MAC_ALLOW_WRITE_DOWN", {"MAC", "CARRIER_OUTPUT"}, label_scope(MacMode::Write)},
      {"MEM_NO_WIPE:B", {"MEMORY_CLEAN"},
       [](auto&, auto& d) { return locus_is(d, "area B"); }},
      {"ISOLATION_LEAK", {"MODULE_ISOLATION"},
       [](auto&, auto& d) { return locus_starts(d, "cross "); }},
      {"REAL_MEM_EXPOSED", {"MODULE_ISOLATION"},
       [](auto&, auto& d) { return locus_starts(d, "real_memory "); }},
      {"AUTH_ACCEPT_ANY_PASSWORD", {"IDENT_AUTH"},
       [](auto&, auto& d) {
         return locus_starts(d, "REG_BADPW ") || locus_starts(d, "UNREG_ANYPW ");
       }},
      {"AUTH_REJECT_VALID", {"IDENT_AUTH"},
       [](auto&, auto& d) { return locus_starts(d, "REG_OK "); }},
      {"INTEGRITY_MISS:f2", {"INTEGRITY"},
       [](auto&, auto& d) { return locus_is(d, "f2"); }},
      {"INTEGRITY_FALSE_ALARM:f1", {"INTEGRITY"},
       [](auto&, auto& d) { return locus_is(d, "f1"); }},
      {"AUDIT_DROP_EVENTS:0.2", {"AUDIT_COUPLING"},
       [](auto&, auto& d) { return d.actual == "missing"; }},
  };
}

Outcome defect_detection_matrix() {
  Outcome o;
  const auto plan = plan_with();
  const auto cases = defect_cases(plan);
  o.require(cases.size() == kDefectNames.size(), "not every defect kind covered");
  std::set<DefectKind> kinds;
  for (const auto& c : cases) {
    const auto defect = parse_defect(c.defect);
    kinds.insert(defect.kind);
    auto r = run_plan(plan, {defect});
    o.require(!r.aborted(), c.defect + ": run aborted: " + r.error);
    if (!o.ok) return o;
    o.require(r.exit_code() == 1, c.defect + ": run not non-conformant");
    for (const auto& s : r.report.at("procedures")) {
      const auto id = s.at("id").get<std::string>();
      const bool should_fail = c.failing.contains(id);
      o.require(s.at("passed").get<bool>() != should_fail,
                c.defect + ": unexpected verdict for " + id);
      for (const auto& dj : s.at("discrepancies")) {
        const Discrepancy d{dj.at("expected"), dj.at("actual"), dj.at("locus")};
        o.require(c.in_scope(id, d),
                  c.defect + ": discrepancy outside scope in " + id + ": " + d.locus);
      }
    }
  }
  o.require(kinds.size() == 12, "defect kinds not distinct");
  return o;
}

// -- 3 ----------------------------------------------------------------------
Outcome mac_oracle_equivalence() {
  Outcome o;
  const int k = 4;
  const LabelLattice lattice(k);
  auto sut = create_sut({}, {}, 7);
  o.require(sut->label_levels() >= k, "simulator has fewer than 4 levels");
  std::map<std::string, int> subjects, objects;
  for (int r = 1; r <= k; ++r) {
    subjects["S" + std::to_string(r)] = r;
    objects["O" + std::to_string(r)] = r;
  }
  sut->set_labels(subjects, objects);
  int pairs = 0, probes = 0;
  for (int rs = 1; rs <= k; ++rs)
    for (int ro = 1; ro <= k; ++ro) {
      ++pairs;
      // Levels: rank 1 is the highest, so level = k + 1 - rank.
      const int ms = k + 1 - rs, mo = k + 1 - ro;
      const bool read = ms >= mo, write = mo >= ms;
      o.require(expected_mac(lattice, rs, ro, MacMode::Read) == read,
                "read rule mismatch");
      o.require(expected_mac(lattice, rs, ro, MacMode::Write) == write,
                "write rule mismatch");
      const auto s = "S" + std::to_string(rs), ob = "O" + std::to_string(ro);
      o.require(sut->probe_labeled(s, ob, MacMode::Read).granted == read,
                "simulator read disagrees at " + s + "," + ob);
      o.require(sut->probe_labeled(s, ob, MacMode::Write).granted == write,
                "simulator write disagrees at " + s + "," + ob);
      probes += 2;
    }
  o.require(pairs == 16 && probes == 32, "pair/probe count");
  return o;
}

// -- 4 ----------------------------------------------------------------------
Outcome covering_array_soundness() {
  Outcome o;
  std::size_t instances = 0;
  for (std::size_t n = 1; n <= 5; ++n) {
    std::vector<std::size_t> d(n, 1);
    while (true) {
      std::size_t exhaustive = 1;
      for (auto x : d) exhaustive *= x;
      for (std::size_t t = 1; t <= std::min<std::size_t>(6, n); ++t) {
        const auto ca = generate_covering_array(d, t, instances);
        ++instances;
        if (!verify_coverage(ca) || ca.rows.size() < row_lower_bound(d, t) ||
            ca.rows.size() > exhaustive) {
          std::ostringstream msg;
          msg << "domains";
          for (auto x : d) msg << " " << x;
          msg << " t=" << t << " rows=" << ca.rows.size();
          o.require(false, msg.str());
          return o;
        }
      }
      std::size_t p = 0;
      while (p < n && ++d[p] > 4) d[p++] = 1;
      if (p == n) break;
    }
  }
  o.detail = std::to_string(instances) + " arrays";
  return o;
}

// -- 5 ----------------------------------------------------------------------
Outcome optimizer_exactness() {
  Outcome o;
  std::size_t infeasible = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto eng = make_engine(seed, "acceptance/optimizer");
    std::vector<std::vector<StrategyOption>> groups(1 + pick_index(eng, 4));
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const auto n = 1 + pick_index(eng, 4);
      for (std::size_t i = 0; i < n; ++i) {
        StrategyOption opt;
        opt.procedure_id = "P" + std::to_string(g);
        opt.time = pick_index(eng, 101);
        opt.cost = pick_index(eng, 101);
        groups[g].push_back(opt);
      }
    }
    const std::uint64_t budget = pick_index(eng, 4 * 100 + 1);

    std::optional<std::uint64_t> best;
    std::vector<std::size_t> pick(groups.size(), 0);
    while (true) {
      std::uint64_t t = 0, c = 0;
      for (std::size_t g = 0; g < groups.size(); ++g) {
        t += groups[g][pick[g]].time;
        c += groups[g][pick[g]].cost;
      }
      if (c <= budget && (!best || t < *best)) best = t;
      std::size_t g = 0;
      while (g < groups.size() && ++pick[g] == groups[g].size()) pick[g++] = 0;
      if (g == groups.size()) break;
    }

    const auto plan = optimize_plan(groups, budget);
    o.require(plan.has_value() == best.has_value(),
              "feasibility disagrees at seed " + std::to_string(seed));
    if (plan && best)
      o.require(plan->total_time == *best && plan->total_cost <= budget,
                "optimum disagrees at seed " + std::to_string(seed));
    if (!best) ++infeasible;
  }
  if (o.ok) o.detail = "200 instances, " + std::to_string(infeasible) + " infeasible";
  return o;
}

// -- 6 ----------------------------------------------------------------------
Outcome time_model() {
  Outcome o;
  o.require(estimate_time(6, 2, 3, CostModel{}) == 48, "estimate_time(6,2,3) != 48");
  for (const CostModel m : {CostModel{}, CostModel{1, 1, 5, 2}}) {
    const auto plan = plan_with({});
    const auto& dac = *std::find_if(plan.procedures.begin(), plan.procedures.end(),
                                    [](const auto& p) { return p.id == "DAC"; });
    const auto exh = price_strategies(dac, m).front();
    o.require(exh.strategy == Strategy::exhaustive() && exh.probe_count == 36 &&
                  exh.time == 36 * m.probe_time + m.overhead_time,
              "exhaustive DAC time is not 36 probe units plus overhead");
  }
  return o;
}

// -- 7 ----------------------------------------------------------------------
Outcome reduction_visibility() {
  Outcome o;
  PlanningOptions opts;
  opts.overrides["DAC"] = Strategy::tway(2);
  const auto plan = plan_with(opts);
  auto r = run_plan(plan);
  const json* dac = section(r.report, "DAC");
  o.require(dac != nullptr, "no DAC section");
  if (!o.ok) return o;
  const auto probes = dac->at("attempts").get<std::size_t>();
  o.require(probes >= 12 && probes <= 36, "probe count outside [12, 36]");
  o.require(dac->at("strategy") == "tway:2", "strategy not recorded");
  o.require(dac->contains("coverage_fraction") &&
                dac->at("coverage_fraction").get<double>() > 0.0 &&
                dac->at("coverage_fraction").get<double>() <= 1.0,
            "coverage fraction not recorded");
  o.require(dac->at("passed").get<bool>(), "reduced run failed without defect");

  // Flip one executed, denied triple and expect the reduced run to catch it.
  std::optional<Defect> defect;
  for (const auto& rec : dac->at("registered").at("probe_records"))
    if (!rec.at("expected").get<bool>()) {
      defect = Defect::dac_grant_extra(rec.at("subject"), rec.at("object"),
                                       rec.at("right"));
      break;
    }
  o.require(defect.has_value(), "no denied triple probed");
  if (!o.ok) return o;
  auto bad = run_plan(plan, {*defect});
  const json* dac2 = section(bad.report, "DAC");
  o.require(dac2 && !dac2->at("passed").get<bool>(),
            "defect on a probed triple not detected");
  o.detail = std::to_string(probes) + " probes, coverage " +
             std::to_string(dac->at("coverage_fraction").get<double>());
  return o;
}

// -- 8 ----------------------------------------------------------------------
std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism(const std::string& cli, const std::filesystem::path& dir) {
  Outcome o;
  const auto plan = plan_with();
  const DefectSet defects{Defect::audit_drop_events(0.3),
                          Defect::mem_no_wipe("A")};
  if (cli.empty()) {
    o.require(report_fingerprint(run_plan(plan, defects).report) ==
                  report_fingerprint(run_plan(plan, defects).report),
              "library reports differ");
    o.detail = "library only";
    return o;
  }
  std::filesystem::create_directories(dir);
  const auto plan_path = dir / "determinism-plan.json";
  std::ofstream(plan_path) << serialize_plan(plan);
  std::vector<json> reports;
  for (int i = 0; i < 2; ++i) {
    const auto report = dir / ("determinism-report-" + std::to_string(i) + ".json");
    const std::string cmd = "\"" + cli + "\" run --plan \"" + plan_path.string() +
                            "\" --report \"" + report.string() +
                            "\" --defect AUDIT_DROP_EVENTS:0.3 --defect MEM_NO_WIPE:A"
                            " 2>/dev/null";
    const int rc = std::system(cmd.c_str());
    o.require(WIFEXITED(rc) && WEXITSTATUS(rc) == 1, "cli run exit code not 1");
    reports.push_back(json::parse(slurp(report)));
  }
  if (!o.ok) return o;
  o.require(reports[0].contains("generated_at"), "timestamp field missing");
  o.require(report_fingerprint(reports[0]) == report_fingerprint(reports[1]),
            "reports differ beyond the timestamp");
  // Byte-level: blank the timestamp and compare the raw files.
  auto blank = [](std::string text) {
    const auto k = text.find("\"generated_at\"");
    const auto q1 = text.find('"', text.find(':', k) + 1);
    const auto q2 = text.find('"', q1 + 1);
    return text.replace(q1, q2 - q1 + 1, "\"\"");
  };
  o.require(blank(slurp(dir / "determinism-report-0.json")) ==
                blank(slurp(dir / "determinism-report-1.json")),
            "report bytes differ beyond the timestamp");
  o.detail = "via CLI";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  const std::filesystem::path scratch =
      argc > 2 ? std::filesystem::path(argv[2])
               : std::filesystem::temp_directory_path() / "conform-acceptance";

  struct Criterion {
    int number;
    std::string name;
    double limit_seconds;  // 0: no limit
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "conformant end-to-end", 5, conformant_end_to_end},
      {2, "defect detection matrix", 60, defect_detection_matrix},
      {3, "MAC oracle equivalence", 0, mac_oracle_equivalence},
      {4, "covering-array soundness", 30, covering_array_soundness},
      {5, "optimizer exactness", 10, optimizer_exactness},
      {6, "time-model check", 0, time_model},
      {7, "reduction trade-off visibility", 0, reduction_visibility},
      {8, "report determinism", 0, [&] { return determinism(cli, scratch); }},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    if (out.ok && c.limit_seconds > 0 && secs >= c.limit_seconds)
      out = {false, "took " + std::to_string(secs) + " s"};
    std::printf("%s criterion %d: %s (%.2f s%s%s)\n", out.ok ? "PASS" : "FAIL",
                c.number, c.name.c_str(), secs, out.detail.empty() ? "" : "; ",
                out.detail.c_str());
    if (!out.ok) ++failed;
  }
  return failed;
}
