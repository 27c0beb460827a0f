#include <gtest/gtest.h>

#include "support.hpp"

using namespace qmtest;

namespace {

using Sig = std::vector<std::pair<std::string, std::string>>;

Session doc_session() { return Session(fixture_model("documentation-before.qm.json"), evaluation_goal()); }

const char* kRule1 = "Grade 1 above 30% comment density, 5 below 5%.";
const char* kRule2 = "Grade 1 above 40% comment density, 5 below 10%.";

// Runs the documentation example in the order the tasks are described.
Session doc_complete() {
  Session s = doc_session();
  s.apply(doc_add_m1());
  s.complete("T1", doc_ops_a());
  s.complete("T3", doc_ops_uses("IE1"));
  s.complete("T4", doc_ops_uses("IE2"));
  s.complete("T5", doc_ops_rule("IE1", kRule1));
  s.complete("T6", doc_ops_rule("IE2", kRule2));
  return s;
}

// Property p -> factor f -> impact i (evaluated by ie) on a leaf aspect.
QualityModel chain_model() {
  QualityModel m = QualityModel::create("chain");
  m.insert(K::QualityAspect, {{"id", "qa"}, {"name", "Reliability"}, {"description", "d"}});
  m.insert(K::EntityType, {{"id", "et"}, {"name", "Source code"}, {"description", "d"}});
  m.insert(K::Property, {{"id", "p"}, {"name", "Documentation"}, {"description", "d"}});
  m.insert(K::Factor, {{"id", "f"}, {"name", "f"}, {"description", "d"}, {"entityType", "et"}, {"property", "p"}});
  m.insert(K::Impact, {{"id", "i"}, {"factor", "f"}, {"qualityAspect", "qa"}, {"justification", "j"}});
  m.insert(K::ImpactEvaluation, {{"id", "ie"}, {"impact", "i"}, {"evaluationRule", "r"}});
  return m;
}

std::vector<std::string> templates_of(const std::vector<Consequence>& cs) {
  std::vector<std::string> out;
  for (const auto& c : cs) out.push_back(c.templateId + " " + c.target.str());
  return out;
}

}  // namespace

TEST(DocumentationCascade, InitialAddOpensTasksAToD) {
  Session s = doc_session();
  EXPECT_TRUE(s.open_tasks().empty());
  const LogRecord& rec = s.apply(doc_add_m1());
  EXPECT_EQ(rec.createdElement, ElementId("M1"));
  EXPECT_EQ(open_signature(s), (Sig{{"measure.add.name-rule", "M1"},
                                    {"measure.add.evaluation", "M1"},
                                    {"factor.mod.isQuantified", "IE1"},
                                    {"factor.mod.isQuantified", "IE2"}}));
  EXPECT_EQ(open_task_ids(s), (std::vector<std::string>{"T1", "T2", "T3", "T4"}));
  EXPECT_EQ(s.model().get<Factor>(ElementId("F1")).isQuantified, IdSet{ElementId("M1")});
  EXPECT_NE(s.task("T1").text.find("Provide name and measurement rule"), std::string::npos);
}

TEST(DocumentationCascade, WiringIntoIE1AlsoCompletesB) {
  Session s = doc_session();
  s.apply(doc_add_m1());
  s.complete("T1", doc_ops_a());
  EXPECT_EQ(open_task_ids(s), (std::vector<std::string>{"T2", "T3", "T4"}));
  const LogRecord& rec = s.complete("T3", doc_ops_uses("IE1"));
  EXPECT_EQ(rec.completedTasks, (std::vector<std::string>{"T2", "T3"}));
  EXPECT_EQ(rec.spawnedTasks, std::vector<std::string>{"T5"});
  EXPECT_EQ(s.task("T2").status, TaskStatus::Completed);
  EXPECT_EQ(s.task("T2").resolution, (json{{"auto", true}}));
  EXPECT_EQ(s.task("T5").templateId, "impactEvaluation.mod.uses");
  EXPECT_EQ(s.task("T5").target, "IE1");
  EXPECT_NE(s.task("T5").text.find("considers all used measures"), std::string::npos);
  EXPECT_EQ(open_signature(s), (Sig{{"factor.mod.isQuantified", "IE2"}, {"impactEvaluation.mod.uses", "IE1"}}));
}

TEST(DocumentationCascade, RuleUpdateOpensNothing) {
  Session s = doc_session();
  s.apply(doc_add_m1());
  s.complete("T1", doc_ops_a());
  s.complete("T3", doc_ops_uses("IE1"));
  const LogRecord& rec = s.complete("T5", doc_ops_rule("IE1", kRule1));
  EXPECT_TRUE(rec.spawnedTasks.empty());
}

TEST(DocumentationCascade, AllTasksDoneLeavesConsistentModel) {
  Session s = doc_complete();
  EXPECT_TRUE(s.open_tasks().empty());
  EXPECT_TRUE(validate(s.model(), Purpose::Evaluation).empty());
  EXPECT_EQ(canonical_model_bytes(s.model()), read_file(fixture("documentation-after.qm.json")));
  EXPECT_FALSE(s.model().get<Measure>(ElementId("M1")).stub);
}

TEST(DocumentationCascade, MidStateMatchesFixture) {
  Session s = doc_session();
  s.apply(doc_add_m1());
  EXPECT_EQ(canonical_model_bytes(s.model()), read_file(fixture("documentation-mid.qm.json")));
}

TEST(DocumentationCascade, ReplayMatchesGoldenSession) {
  Session s = doc_complete();
  const auto dir = fixture("golden/documentation-session");
  EXPECT_EQ(session_log_text(s), read_file(dir / "session.session.jsonl"));
  EXPECT_EQ(canonical_dump(tasks_to_json(s.tasks())), read_file(dir / "tasks.json"));
  Session restored = restore_session(dir);
  EXPECT_EQ(canonical_model_bytes(restored.model()), read_file(dir / "model.qm.json"));
  EXPECT_EQ(tasks_to_json(restored.tasks()), tasks_to_json(s.tasks()));
}

TEST(ApplyOperation, PropertyDeleteCascades) {
  Session s(chain_model(), evaluation_goal());
  const LogRecord& rec = s.apply(Operation::del(K::Property, ElementId("p")));
  std::vector<std::string> chain;
  for (const auto& a : rec.autoConsequences) chain.push_back(a.trigger.str() + ">" + a.target.str());
  EXPECT_EQ(chain, (std::vector<std::string>{"p>f", "f>i", "i>ie"}));
  for (const char* id : {"p", "f", "i", "ie"}) EXPECT_FALSE(s.model().contains(ElementId(id))) << id;
  EXPECT_TRUE(integrity_violations(s.model()).empty());
  // The replacement task for the evaluation is moot: its impact is gone too.
  for (const auto& t : s.tasks()) EXPECT_NE(t.templateId, "impactEvaluation.del.replace");
  std::set<std::string> open;
  for (const auto* t : s.open_tasks()) open.insert(t->templateId + " " + t->target);
  EXPECT_TRUE(open.count("factor.del.orphan-entity-type et"));
  EXPECT_TRUE(open.count("impact.del.orphan-aspect qa"));
  EXPECT_FALSE(has_duplicate_open_tasks(s));
}

TEST(ApplyOperation, IntegrityErrorLeavesSessionUnchanged) {
  Session s = doc_session();
  std::string before = canonical_model_bytes(s.model());
  EXPECT_THROW(s.apply(Operation::add(K::Measure, {{"name", "x"}, {"quantifies", {"ghost"}}})), Error);
  EXPECT_THROW(s.apply(Operation::del(K::Measure, ElementId("F1"))), KindError);
  EXPECT_THROW(s.apply(Operation::del(K::Factor, ElementId("nope"))), NotFoundError);
  EXPECT_EQ(canonical_model_bytes(s.model()), before);
  EXPECT_TRUE(s.log().empty());
  EXPECT_TRUE(s.tasks().empty());
}

TEST(ApplyOperation, SameModTwiceDoesNotDuplicate) {
  Session s = doc_session();
  s.apply(doc_add_m1());
  auto op = Operation::mod(K::Measure, ElementId("M1"), "measurementRule", FieldChange::set("lines"));
  s.apply(op);
  std::size_t open = s.open_tasks().size();
  const LogRecord& rec = s.apply(op);
  EXPECT_TRUE(rec.spawnedTasks.empty());
  EXPECT_EQ(s.open_tasks().size(), open);
  EXPECT_FALSE(has_duplicate_open_tasks(s));
}

TEST(ApplyOperation, DeletedTargetMakesTaskObsolete) {
  Session s = doc_session();
  s.apply(doc_add_m1());
  const LogRecord& rec = s.apply(Operation::del(K::Measure, ElementId("M1")));
  EXPECT_EQ(rec.obsoletedTasks, (std::vector<std::string>{"T1", "T2"}));
  EXPECT_EQ(s.task("T1").status, TaskStatus::Obsolete);
}

TEST(CompleteTask, ErrorsAndEmptyCompletion) {
  Session s = doc_session();
  s.apply(doc_add_m1());
  EXPECT_THROW(s.complete("T99", {}), NotFoundError);
  // Mandatory obligation still unmet.
  EXPECT_THROW(s.complete("T1", {}), Error);
  EXPECT_EQ(s.task("T1").status, TaskStatus::Open);
  s.complete("T1", doc_ops_a());
  EXPECT_THROW(s.complete("T1", {}), TaskStateError);
  EXPECT_THROW(s.waive("T1", "late"), TaskStateError);
  // T3 has no predicate; an empty completion just closes it.
  std::string before = canonical_model_bytes(s.model());
  const LogRecord& rec = s.complete("T3", {});
  EXPECT_EQ(rec.completedTasks, std::vector<std::string>{"T3"});
  EXPECT_EQ(canonical_model_bytes(s.model()), before);
}

TEST(CompleteTask, FailingOpAbortsAtomically) {
  Session s = doc_session();
  s.apply(doc_add_m1());
  std::string before = canonical_model_bytes(s.model());
  std::vector<Operation> ops = doc_ops_a();
  ops.push_back(Operation::del(K::Factor, ElementId("ghost")));
  EXPECT_THROW(s.complete("T1", ops), NotFoundError);
  EXPECT_EQ(canonical_model_bytes(s.model()), before);
  EXPECT_EQ(s.task("T1").status, TaskStatus::Open);
  EXPECT_EQ(s.log().size(), 1u);
}

TEST(WaiveTask, NoteRequiredAndTerminal) {
  Session s = doc_session();
  s.apply(doc_add_m1());
  EXPECT_THROW(s.waive("T3", "  "), InputError);
  s.waive("T3", "impacts intentionally ungrouped");
  EXPECT_EQ(s.task("T3").status, TaskStatus::Waived);
  EXPECT_EQ(s.log().back().note, "impacts intentionally ungrouped");
  s.apply(Operation::del(K::ImpactEvaluation, ElementId("IE1")));
  EXPECT_EQ(s.task("T3").status, TaskStatus::Waived);
}

TEST(Replay, EmptyLog) {
  QualityModel m = fixture_model("documentation-before.qm.json");
  Session s = replay(m, evaluation_goal(), {});
  EXPECT_EQ(s.model(), m);
  EXPECT_TRUE(s.tasks().empty());
}

TEST(Replay, ReproducesSession) {
  Session s = doc_complete();
  Session r = replay(s.initial_model(), s.goal(), s.log());
  EXPECT_EQ(session_log_text(r), session_log_text(s));
  EXPECT_EQ(canonical_model_bytes(r.model()), canonical_model_bytes(s.model()));
}

TEST(Replay, TamperedStepIsReported) {
  Session s = doc_complete();
  std::vector<LogRecord> log = s.log();
  log[2].ops[0] = Operation::mod(K::ImpactEvaluation, ElementId("IE2"), "uses", FieldChange::add(json::array({"M1"})));
  try {
    replay(s.initial_model(), s.goal(), log);
    FAIL() << "replay accepted a tampered log";
  } catch (const ReplayError& e) {
    EXPECT_EQ(e.step(), 3u);
  }
  log = s.log();
  log[4].modelHashAfter = "sha256:00";
  try {
    replay(s.initial_model(), s.goal(), log);
    FAIL() << "replay accepted a tampered hash";
  } catch (const ReplayError& e) {
    EXPECT_EQ(e.step(), 5u);
  }
}

TEST(Replay, LogRecordsRoundTrip) {
  Session s = doc_complete();
  for (const auto& rec : s.log()) {
    EXPECT_EQ(log_record_to_json(log_record_from_json(log_record_to_json(rec))), log_record_to_json(rec));
  }
}

TEST(ConsequencesOf, EntityTypeWithFactorsAndChild) {
  QualityModel m = QualityModel::create("et");
  m.insert(K::EntityType, {{"id", "et"}, {"name", "Source code"}});
  m.insert(K::EntityType, {{"id", "child"}, {"name", "Class"}, {"parent", "et"}});
  m.insert(K::Property, {{"id", "p"}, {"name", "p"}});
  m.insert(K::Factor, {{"id", "f1"}, {"name", "f1"}, {"entityType", "et"}, {"property", "p"}});
  m.insert(K::Factor, {{"id", "f2"}, {"name", "f2"}, {"entityType", "et"}, {"property", "p"}});
  auto cs = consequences_of(m, evaluation_goal(), Operation::del(K::EntityType, ElementId("et")));
  std::vector<std::string> consistency;
  for (const auto& c : cs) {
    if (c.flavor == Flavor::Consistency) consistency.push_back(c.templateId + " " + c.target.str());
  }
  EXPECT_EQ(consistency, (std::vector<std::string>{"entityType.del.factors f1", "entityType.del.factors f2",
                                                   "entityType.del.children child"}));
  EXPECT_EQ(cs[0].suggested.front().type, OpType::DEL);
}

TEST(ConsequencesOf, MeasureAdd) {
  QualityModel m = fixture_model("documentation-before.qm.json");
  auto cs = consequences_of(m, evaluation_goal(), Operation::add(K::Measure, {{"name", "m"}}));
  auto got = templates_of(cs);
  ASSERT_GE(got.size(), 3u);
  EXPECT_EQ(cs[0].text, "Provide name and measurement rule.");
  std::set<std::string> ids;
  for (const auto& c : cs) ids.insert(c.templateId);
  EXPECT_TRUE(ids.count("measure.add.name-rule"));
  EXPECT_TRUE(ids.count("measure.add.factor"));
  EXPECT_TRUE(ids.count("measure.add.evaluation"));
}

TEST(ConsequencesOf, LooseMeasureDeleteHasNone) {
  QualityModel m = fixture_model("documentation-before.qm.json");
  m.insert(K::Measure, {{"id", "loose"}, {"name", "x"}, {"measurementRule", "r"}});
  EXPECT_TRUE(consequences_of(m, evaluation_goal(), Operation::del(K::Measure, ElementId("loose"))).empty());
}

TEST(ConsequencesOf, DoesNotChangeModel) {
  QualityModel m = fixture_model("documentation-after.qm.json");
  std::string before = canonical_model_bytes(m);
  consequences_of(m, evaluation_goal(), Operation::del(K::Factor, ElementId("F1")));
  consequences_of(m, evaluation_goal(), doc_ops_rule("IE1", "x").front());
  EXPECT_EQ(canonical_model_bytes(m), before);
}
