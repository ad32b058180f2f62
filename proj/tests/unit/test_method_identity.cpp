#include <gtest/gtest.h>

#include "support.hpp"

using namespace conform;

namespace {

std::map<std::string, int> category_counts(const std::vector<AuthTrial>& t) {
  std::map<std::string, int> out;
  for (const auto& x : t) ++out[std::string(to_string(x.category))];
  return out;
}

std::set<std::string> discrepancy_categories(const ProcedureVerdict& v) {
  std::set<std::string> out;
  for (const auto& d : v.discrepancies())
    out.insert(d.locus.substr(0, d.locus.find(' ')));
  return out;
}

IntegrityFixture f2_f3_fixture() {
  IntegrityFixture f;
  f.files = {"f1", "f2", "f3", "f4"};
  f.mutations["f2"] = {MutationKind::Substitute, 0, "XX"};
  f.mutations["f3"] = {MutationKind::Truncate, 4, {}};
  return f;
}

}  // namespace

TEST(GenAuthTrials, CountsPerCategory) {
  auto t = gen_auth_trials(fixtures::default_accounts(), kDefaultAlphabet, 7);
  ASSERT_EQ(t.size(), 5u);
  auto c = category_counts(t);
  EXPECT_EQ(c["REG_OK"], 2);
  EXPECT_EQ(c["REG_BADPW"], 2);
  EXPECT_EQ(c["UNREG_ANYPW"], 1);
}

TEST(GenAuthTrials, Deterministic) {
  const auto a = fixtures::default_accounts();
  EXPECT_EQ(gen_auth_trials(a, kDefaultAlphabet, 7),
            gen_auth_trials(a, kDefaultAlphabet, 7));
  EXPECT_NE(gen_auth_trials(a, kDefaultAlphabet, 7),
            gen_auth_trials(a, kDefaultAlphabet, 8));
}

TEST(GenAuthTrials, ExpectationsFollowAccountMembership) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto a = fixtures::default_accounts();
    for (const auto& t : gen_auth_trials(a, "abcdeilopw0123", seed)) {
      EXPECT_EQ(t.expected, expected_auth(a, t.id, t.pwd));
      EXPECT_TRUE(within_alphabet(t.id, "abcdeilopw0123"));
      EXPECT_TRUE(within_alphabet(t.pwd, "abcdeilopw0123"));
      EXPECT_EQ(t.expected, t.category == TrialCategory::RegOk);
    }
  }
}

TEST(GenAuthTrials, AlphabetViolationRejected) {
  EXPECT_THROW(gen_auth_trials({{"Alice", "pw1"}}, kDefaultAlphabet, 7),
               AlphabetViolation);
}

TEST(RunAuth, ConformantAllTrialsMatch) {
  auto sut = testsupport::sim();
  auto v = run_auth_test(*sut, fixtures::default_accounts(), 7);
  EXPECT_TRUE(v.passed());
  EXPECT_EQ(v.attempts(), 5u);
  EXPECT_EQ(v.registered().at("trials").size(), 5u);
}

TEST(RunAuth, AcceptAnyPasswordScope) {
  auto sut = testsupport::sim({Defect::simple(DefectKind::AuthAcceptAnyPassword)});
  auto v = run_auth_test(*sut, fixtures::default_accounts(), 7);
  EXPECT_FALSE(v.passed());
  EXPECT_EQ(v.discrepancies().size(), 3u);
  EXPECT_EQ(discrepancy_categories(v),
            (std::set<std::string>{"REG_BADPW", "UNREG_ANYPW"}));
}

TEST(RunAuth, RejectValidScope) {
  auto sut = testsupport::sim({Defect::simple(DefectKind::AuthRejectValid)});
  auto v = run_auth_test(*sut, fixtures::default_accounts(), 7);
  EXPECT_EQ(v.discrepancies().size(), 2u);
  EXPECT_EQ(discrepancy_categories(v), std::set<std::string>{"REG_OK"});
}

TEST(RunAuth, PasswordsNeverRaw) {
  auto sut = testsupport::sim();
  const auto accounts = fixtures::default_accounts();
  auto v = run_auth_test(*sut, accounts, 7);
  const auto dump = v.registered().dump();
  for (const auto& t : gen_auth_trials(accounts, kDefaultAlphabet, 7))
    EXPECT_EQ(dump.find("\"" + t.pwd + "\""), std::string::npos);
}

TEST(AuditCoupling, DacPlusAuthMatchesEveryAttempt) {
  auto sut = testsupport::sim();
  std::vector<ProcedureVerdict> prior;
  prior.push_back(run_dac_test(*sut, fixtures::default_dac()));
  prior.push_back(run_auth_test(*sut, fixtures::default_accounts(), 7));
  auto v = run_audit_coupling_check(*sut, prior);
  EXPECT_TRUE(v.passed());
  EXPECT_EQ(v.registered().at("audit_matches").size(), 41u);
  EXPECT_EQ(v.attempts(), 41u);
}

TEST(AuditCoupling, DroppedRecordsBecomeUnmatched) {
  auto sut = testsupport::sim({Defect::audit_drop_events(0.2)}, 7);
  std::vector<ProcedureVerdict> prior;
  prior.push_back(run_dac_test(*sut, fixtures::default_dac()));
  prior.push_back(run_auth_test(*sut, fixtures::default_accounts(), 7));
  auto v = run_audit_coupling_check(*sut, prior);
  EXPECT_FALSE(v.passed());
  EXPECT_GT(sut->dropped_records(), 0u);
  EXPECT_EQ(v.registered().at("unmatched").size(), sut->dropped_records());
}

TEST(AuditCoupling, EmptyPriorIsVacuous) {
  auto sut = testsupport::sim();
  auto v = run_audit_coupling_check(*sut, {});
  EXPECT_TRUE(v.passed());
  EXPECT_TRUE(v.registered().at("audit_matches").empty());
}

TEST(AuditCoupling, MacProbesAreCoupledToo) {
  auto sut = testsupport::sim();
  std::vector<ProcedureVerdict> prior{run_mac_test(*sut, fixtures::default_mac(4))};
  auto v = run_audit_coupling_check(*sut, prior);
  EXPECT_TRUE(v.passed());
  EXPECT_EQ(v.registered().at("audit_matches").size(), 8u);
}

TEST(AuditCoupling, NeedsAuditCapability) {
  SimulatorConfig cfg;
  cfg.audit = false;
  auto sut = create_sut(cfg, {}, 7);
  EXPECT_THROW(run_audit_coupling_check(*sut, {}), UnsupportedRequirement);
}

TEST(FilePatch, InvertRestoresContent) {
  const std::string c = "hello world";
  for (const auto& m : {FileMutation{MutationKind::Substitute, 6, "there"},
                        FileMutation{MutationKind::Truncate, 5, {}},
                        FileMutation{MutationKind::Replace, 0, "bye"}}) {
    auto p = plan_patch(c, m);
    EXPECT_EQ(apply_patch(apply_patch(c, p), invert(p)), c);
  }
}

TEST(FilePatch, IdentitySubstitutionChangesNothing) {
  auto p = plan_patch("abc", {MutationKind::Substitute, 0, "ab"});
  EXPECT_FALSE(p.changes_content());
}

TEST(RunIntegrity, ConformantFlagsExactlyModified) {
  auto sut = testsupport::sim();
  auto v = run_integrity_test(*sut, f2_f3_fixture());
  EXPECT_TRUE(v.passed());
  EXPECT_EQ(v.registered().at("flagged"), json::array({"f2", "f3"}));
  EXPECT_TRUE(sut->file_check().empty()) << "files restored after the run";
}

TEST(RunIntegrity, MissDefectNamesFile) {
  auto sut = testsupport::sim({Defect::integrity_miss("f2")});
  auto v = run_integrity_test(*sut, f2_f3_fixture());
  EXPECT_FALSE(v.passed());
  EXPECT_EQ(v.registered().at("flagged"), json::array({"f3"}));
  ASSERT_EQ(v.discrepancies().size(), 1u);
  EXPECT_EQ(v.discrepancies()[0].locus, "f2");
  EXPECT_NE(v.discrepancies()[0].actual.find("missed"), std::string::npos);
}

TEST(RunIntegrity, FalseAlarmDefectNamesFile) {
  auto sut = testsupport::sim({Defect::integrity_false_alarm("f1")});
  auto v = run_integrity_test(*sut, f2_f3_fixture());
  ASSERT_EQ(v.discrepancies().size(), 1u);
  EXPECT_EQ(v.discrepancies()[0].locus, "f1");
}

TEST(RunIntegrity, NoMutationsNothingFlagged) {
  IntegrityFixture f;
  f.files = {"f1", "f2", "f3", "f4"};
  auto sut = testsupport::sim();
  auto v = run_integrity_test(*sut, f);
  EXPECT_TRUE(v.passed());
  EXPECT_TRUE(v.registered().at("flagged").empty());
}

TEST(RunIntegrity, UnknownFileRejected) {
  IntegrityFixture f;
  f.files = {"f1", "nope"};
  auto sut = testsupport::sim();
  EXPECT_THROW(run_integrity_test(*sut, f), UnknownFile);
}
