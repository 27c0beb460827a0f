#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include "qmadapt/cli.hpp"
#include "support.hpp"

using namespace qmtest;

namespace {

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
  json doc() const { return json::parse(out); }
};

CliResult cli_run(std::vector<std::string> args) {
  args.insert(args.begin(), "qm-adapt");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliResult r;
  r.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string fx(const char* name) { return fixture(name).string(); }

// Tailors the embedded scenario into a fresh session directory.
std::string tailored_session(const TempDir& dir) {
  std::string out = (dir / "session").string();
  CliResult r = cli_run({"tailor", fx("pool/embedded-reference.qm.json"), fx("target.goal.json"), "--out", out});
  EXPECT_EQ(r.code, 0) << r.err;
  return out;
}

}  // namespace

TEST(Cli, ValidateExitCodes) {
  CliResult clean = cli_run({"validate", fx("documentation-after.qm.json")});
  EXPECT_EQ(clean.code, 0) << clean.out;
  EXPECT_NE(clean.out.find("0 violation(s)"), std::string::npos);

  CliResult mid = cli_run({"validate", fx("documentation-mid.qm.json"), "--json"});
  EXPECT_EQ(mid.code, 1);
  json doc = mid.doc();
  EXPECT_FALSE(doc["consistent"].get<bool>());
  std::set<std::string> targets;
  for (const auto& v : doc["violations"]) targets.insert(v["target"]);
  // The open tasks after the documentation ADD target exactly these.
  EXPECT_EQ(targets, (std::set<std::string>{"IE1", "IE2", "M1"}));

  EXPECT_EQ(cli_run({"validate", fx("documentation-mid.qm.json"), "--purpose", "specification"}).code, 1);
  EXPECT_EQ(cli_run({"validate", "/nonexistent/x.qm.json"}).code, 2);
  EXPECT_EQ(cli_run({"validate", fx("documentation-after.qm.json"), "--purpose", "admiration"}).code, 2);
  EXPECT_EQ(cli_run({}).code, 2);
  EXPECT_EQ(cli_run({"frobnicate"}).code, 2);
}

TEST(Cli, RankTableAndJson) {
  CliResult text = cli_run({"rank", fx("target.goal.json"), fx("pool")});
  EXPECT_EQ(text.code, 0) << text.err;
  EXPECT_NE(text.out.find("embedded-reference"), std::string::npos);
  EXPECT_NE(text.out.find("0.8333"), std::string::npos);
  EXPECT_LT(text.out.find("embedded-reference"), text.out.find("web-reference"));

  CliResult js = cli_run({"rank", fx("target.goal.json"), fx("pool"), "--json"});
  ASSERT_EQ(js.code, 0);
  json doc = js.doc();
  EXPECT_EQ(doc["ranked"][0]["modelId"], "embedded-reference");
  EXPECT_EQ(doc["ranked"][0]["fitness"]["total"]["exact"], "5/6");
  EXPECT_EQ(doc["ranked"][0]["fitness"]["perParameter"]["focus"]["exact"], "2/3");

  CliResult weighted = cli_run({"rank", fx("target.goal.json"), fx("pool"), "--json", "--weights",
                          "object=0,purpose=0,viewpoint=0,context=0,focus=1"});
  ASSERT_EQ(weighted.code, 0) << weighted.err;
  EXPECT_EQ(weighted.doc()["ranked"][0]["fitness"]["total"]["exact"], "2/3");
  EXPECT_EQ(cli_run({"rank", fx("target.goal.json"), fx("pool"), "--weights", "focus"}).code, 2);
}

TEST(Cli, RankUsesPoolFromEnvironment) {
  ::setenv("QM_ADAPT_POOL", fx("pool").c_str(), 1);
  CliResult r = cli_run({"rank", fx("target.goal.json"), "--json"});
  ::unsetenv("QM_ADAPT_POOL");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.doc()["ranked"].size(), 2u);
  EXPECT_EQ(cli_run({"rank", fx("target.goal.json")}).code, 2);
}

TEST(Cli, TailorDryRunMatchesGolden) {
  CliResult r = cli_run({"tailor", fx("pool/embedded-reference.qm.json"), fx("target.goal.json"), "--dry-run", "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, read_file(fixture("golden/embedded-tailoring.report.json")));

  CliResult no10 = cli_run({"tailor", fx("pool/embedded-reference.qm.json"), fx("target.goal.json"), "--dry-run",
                      "--json", "--no-tr10"});
  json with = r.doc(), without = no10.doc();
  EXPECT_EQ(without["counts"]["TR10"], 0);
  with["actions"].erase(with["actions"].size() - 1);
  with["counts"]["TR10"] = 0;
  EXPECT_EQ(with, without);

  CliResult text = cli_run({"tailor", fx("pool/embedded-reference.qm.json"), fx("target.goal.json"), "--dry-run"});
  EXPECT_NE(text.out.find("TR7  add-stub  QualityAspect  Usability"), std::string::npos) << text.out;
}

TEST(Cli, TailorUsageErrors) {
  TempDir dir("cli");
  EXPECT_EQ(cli_run({"tailor", fx("pool/embedded-reference.qm.json"), fx("target.goal.json")}).code, 2);
  EXPECT_EQ(cli_run({"tailor", fx("pool/embedded-reference.qm.json"), fx("target.goal.json"), "--dry-run", "--out",
                     (dir / "x").string()})
                .code,
            2);
  // A model without an embedded goal cannot serve as reference.
  EXPECT_EQ(cli_run({"tailor", fx("documentation-before.qm.json"), fx("target.goal.json"), "--dry-run"}).code, 2);
}

TEST(Cli, TailorWritesSessionDirectory) {
  TempDir dir("cli");
  std::string session = tailored_session(dir);
  for (const char* f : {"initial.qm.json", "model.qm.json", "goal.goal.json", "session.session.jsonl", "tasks.json",
                        "report.json"}) {
    EXPECT_TRUE(std::filesystem::exists(std::filesystem::path(session) / f)) << f;
  }
  EXPECT_EQ(read_file(std::filesystem::path(session) / "initial.qm.json"),
            read_file(fixture("pool/embedded-reference.qm.json")));
  json report = load_json(std::filesystem::path(session) / "report.json");
  EXPECT_FALSE(report["seededTasks"].empty());
  Session s = restore_session(session);
  // Every seeded task is still open unless a later action of the plan made it obsolete.
  ASSERT_EQ(s.tasks().size(), report["seededTasks"].size());
  for (const auto& t : s.tasks()) {
    EXPECT_TRUE(t.status == TaskStatus::Open || t.status == TaskStatus::Obsolete) << t.id;
  }
  EXPECT_EQ(s.log().size(), report["actions"].size());
}

TEST(Cli, TasksListCompleteWaive) {
  TempDir dir("cli");
  std::string session = tailored_session(dir);
  std::size_t logged = restore_session(session).log().size();
  CliResult list = cli_run({"tasks", session, "--json"});
  ASSERT_EQ(list.code, 0) << list.err;
  json open = list.doc();
  ASSERT_FALSE(open.empty());
  std::string review, orphan;
  for (const auto& t : open) {
    if (t["templateId"] == "review.flag") review = t["id"];
    if (t["templateId"] == "factor.del.orphan-property") orphan = t["id"];
  }
  ASSERT_FALSE(review.empty());
  ASSERT_FALSE(orphan.empty());

  CliResult waive = cli_run({"tasks", session, "waive", review, "--note", "no assembler measures yet"});
  EXPECT_EQ(waive.code, 0) << waive.err;
  EXPECT_NE(waive.out.find("waived: " + review), std::string::npos);

  write_file(dir / "ops.json", json{{"ops", json::array({{{"opType", "DEL"}, {"kind", "Property"},
                                                          {"target", "P3"}}})}}
                                   .dump());
  CliResult done = cli_run({"tasks", session, "--json", "complete", orphan, "--ops", (dir / "ops.json").string()});
  ASSERT_EQ(done.code, 0) << done.err;
  json rec = done.doc()["record"];
  EXPECT_EQ(rec["action"], "complete");
  EXPECT_EQ(rec["taskId"], orphan);

  CliResult all = cli_run({"tasks", session, "--json", "list", "--all"});
  std::map<std::string, std::string> status;
  for (const auto& t : all.doc()) status[t["id"]] = t["status"];
  EXPECT_EQ(status[review], "waived");
  EXPECT_EQ(status[orphan], "completed");
  EXPECT_EQ(restore_session(session).log().size(), logged + 2);

  EXPECT_EQ(cli_run({"tasks", session, "complete", "T999"}).code, 1);
  EXPECT_EQ(cli_run({"tasks", session, "complete", orphan}).code, 1);
  EXPECT_EQ(cli_run({"tasks", session, "waive", review}).code, 2);
  EXPECT_EQ(cli_run({"tasks", (dir / "missing").string()}).code, 2);
}

TEST(Cli, AuditReport) {
  CliResult text = cli_run({"audit", "--base", fx("documentation-before.qm.json"), "--adapted",
                      fx("documentation-after.qm.json"), "--gold", fx("documentation.gold.json"), "--minutes", "4"});
  ASSERT_EQ(text.code, 0) << text.err;
  EXPECT_NE(text.out.find("completeness  1  (1.0000)"), std::string::npos) << text.out;
  EXPECT_NE(text.out.find("efficiency    3/2  (1.5000 elements/min)"), std::string::npos) << text.out;

  CliResult js = cli_run({"audit", "--base", fx("documentation-before.qm.json"), "--adapted",
                    fx("documentation-mid.qm.json"), "--gold", fx("documentation.gold.json"), "--json"});
  ASSERT_EQ(js.code, 0);
  json doc = js.doc();
  EXPECT_EQ(doc["completeness"]["exact"], "1/3");
  EXPECT_TRUE(doc["efficiency"].is_null());
  EXPECT_EQ(doc["missedEntries"].size(), 4u);

  EXPECT_EQ(cli_run({"audit", "--base", fx("documentation-before.qm.json"), "--adapted",
                     fx("documentation-after.qm.json"), "--gold", fx("documentation.gold.json"), "--minutes", "0"})
                .code,
            2);
  EXPECT_EQ(cli_run({"audit", "--base", fx("documentation-before.qm.json")}).code, 2);
}

TEST(Cli, VersionAndHelp) {
  CliResult v = cli_run({"--version"});
  EXPECT_EQ(v.code, 0);
  EXPECT_NE(v.out.find("qm-adapt"), std::string::npos);
  EXPECT_EQ(cli_run({"--help"}).code, 0);
}
