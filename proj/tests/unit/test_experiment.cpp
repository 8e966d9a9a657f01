#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "draftbench/experiment.hpp"
#include "draftbench/mock_backend.hpp"

using namespace draftbench;
namespace fs = std::filesystem;

namespace {

const fs::path kCorpus = fs::path(DRAFTBENCH_TEST_FIXTURES) / "corpus10.jsonl";

class CountingBackend : public Backend {
public:
    std::atomic<std::size_t> calls{0};
    BackendReply send(const CompletionRequest& r) override {
        ++calls;
        return mock_.send(r);
    }

private:
    MockBackend mock_{PromptLibrary::builtin()};
};

RunConfig config(const std::string& name) {
    RunConfig c;
    c.corpus_path = kCorpus;
    c.strategies = {StrategyId::cot, StrategyId::baseline_cod, StrategyId::hierarchical_cod};
    c.phase = Phase::small();
    c.seed = 5;
    c.out_dir = fs::temp_directory_path() / ("draftbench_exp_" + name);
    fs::remove_all(c.out_dir);
    return c;
}

std::vector<std::string> lines_of(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::string> out;
    for (std::string line; std::getline(in, line);)
        if (!line.empty()) out.push_back(line);
    return out;
}

void write_lines(const fs::path& p, const std::vector<std::string>& lines, const std::string& tail = "") {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    for (const auto& l : lines) out << l << "\n";
    out << tail;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("config validation") {
    RunConfig c = config("validate");
    CHECK_NOTHROW(c.validate());
    auto bad = c;
    bad.strategies.clear();
    CHECK_THROWS_AS(bad.validate(), RunError);
    bad = c;
    bad.strategies = {StrategyId::cot, StrategyId::cot};
    CHECK_THROWS_AS(bad.validate(), RunError);
    bad = c;
    bad.temperature = 3;
    CHECK_THROWS_AS(bad.validate(), RunError);
    bad = c;
    bad.max_concurrent = 0;
    CHECK_THROWS_AS(bad.validate(), RunError);
    bad = c;
    bad.quality_subset = 11;
    CHECK_THROWS_AS(bad.validate(), RunError);
    bad = c;
    bad.out_dir.clear();
    CHECK_THROWS_AS(bad.validate(), RunError);
    CHECK(c.effective_replay_dir() == c.out_dir / "replay");
}

TEST_CASE("json config overrides") {
    RunConfig base = config("json");
    auto c = run_config_from_json(R"({"strategies":["standard","cot"],"seed":9,"phase":"medium","temperature":0.2})", base);
    CHECK(c.strategies == std::vector<StrategyId>{StrategyId::standard, StrategyId::cot});
    CHECK(c.seed == 9);
    CHECK(c.phase.name == PhaseName::medium);
    CHECK(c.temperature == 0.2);
    CHECK(c.corpus_path == base.corpus_path);
    CHECK_THROWS_AS(run_config_from_json(R"({"sede":1})", base), RunError);
    CHECK_THROWS_AS(run_config_from_json(R"({"strategies":"cot,nope"})", base), Error);
    auto again = run_config_from_json(run_config_to_json(c), RunConfig{});
    CHECK(again.strategies == c.strategies);
    CHECK(again.seed == c.seed);
    CHECK(again.out_dir == c.out_dir);
}

TEST_CASE("run record json round trip") {
    RunRecord r;
    r.completion.task_id = "t";
    r.completion.strategy = StrategyId::iterative_cod;
    r.completion.request_hash = {"ab"};
    r.steps_compliant = false;
    r.step_violations = 2;
    r.extraction = ExtractionSource::fenced_block;
    r.patch_file = "patches/t.iterative_cod.patch";
    r.status = RecordStatus::parse_error;
    r.diagnostics = "why";
    auto back = run_record_from_json(run_record_to_json(r));
    CHECK(back.completion == r.completion);
    CHECK(back.step_violations == 2);
    CHECK_FALSE(back.steps_compliant);
    CHECK(back.patch_file == r.patch_file);
    CHECK_FALSE(back.quality_ref.has_value());
    CHECK(back.status == RecordStatus::parse_error);
}

TEST_CASE("every pair is recorded once and resume skips them") {
    RunConfig c = config("resume");
    auto first = std::make_shared<CountingBackend>();
    RunServices services;
    services.backend = first;
    const RunSummary s = run_experiment(c, services);
    CHECK(s.pairs == 30);
    CHECK(s.completed == 30);
    CHECK(s.failed == 0);
    CHECK(first->calls == 30);

    auto records = load_run_records(s.run_dir);
    REQUIRE(records.size() == 30);
    std::set<std::pair<std::string, StrategyId>> pairs;
    for (const auto& r : records) {
        pairs.insert({r.completion.task_id, r.completion.strategy});
        CHECK(r.completion.token_source == TokenSource::provider_reported);
        if (r.patch_file) CHECK(fs::exists(s.run_dir / *r.patch_file));
    }
    CHECK(pairs.size() == 30);

    auto second = std::make_shared<CountingBackend>();
    services.backend = second;
    const RunSummary again = run_experiment(c, services);
    CHECK(again.skipped == 30);
    CHECK(second->calls == 0);

    // Drop four records and tear the tail of a fifth.
    auto lines = lines_of(s.run_dir / "records.jsonl");
    std::vector<std::string> kept(lines.begin(), lines.end() - 5);
    write_lines(s.run_dir / "records.jsonl", kept, lines.back().substr(0, lines.back().size() / 2));
    auto third = std::make_shared<CountingBackend>();
    services.backend = third;
    const RunSummary resumed = run_experiment(c, services);
    CHECK(third->calls == 5);
    CHECK(resumed.skipped == 25);
    CHECK(load_run_records(s.run_dir).size() == 30);
    fs::remove_all(c.out_dir);
}

TEST_CASE("changed config refuses to resume") {
    RunConfig c = config("mismatch");
    run_experiment(c);
    c.temperature = 0.1;
    CHECK_THROWS_AS(run_experiment(c), RunError);
    fs::remove_all(c.out_dir);
}

TEST_CASE("failures are logged and do not stop the run") {
    class Flaky : public Backend {
    public:
        std::atomic<int> n{0};
        BackendReply send(const CompletionRequest& r) override {
            if (++n % 4 == 0) throw GatewayError(GatewayErrorKind::transport, "boom");
            return mock_.send(r);
        }
        MockBackend mock_{PromptLibrary::builtin()};
    };
    RunConfig c = config("flaky");
    c.max_concurrent = 1;
    RunServices services;
    services.backend = std::make_shared<Flaky>();
    auto s = run_experiment(c, services);
    CHECK(s.failed > 0);
    CHECK(s.completed + s.failed == 30);
    CHECK(lines_of(s.run_dir / "errors.jsonl").size() == s.failed);
    CHECK(load_run_records(s.run_dir).size() == s.completed);
    fs::remove_all(c.out_dir);
}

TEST_CASE("scoring is seeded and reports are stable") {
    RunConfig c = config("score");
    c.strategies = {StrategyId::standard, StrategyId::cot, StrategyId::baseline_cod};
    auto s = run_experiment(c);
    CHECK_THROWS_AS(score_run(s.run_dir, 11, 1), SampleSizeError);
    auto q = score_run(s.run_dir, 4, 1);
    CHECK(q.selected_tasks.size() == 4);
    CHECK(q.judge_errors == 0);
    CHECK(q.judged > 0);
    auto again = score_run(s.run_dir, 4, 1);
    CHECK(again.selected_tasks == q.selected_tasks);
    CHECK(again.judged == 0);

    auto bundle = report_run(s.run_dir);
    CHECK(bundle.quality_csv.has_value());
    CHECK(bundle.combined_csv.has_value());
    const std::string eff = slurp(s.run_dir / "report" / "efficiency.csv");
    report_run(s.run_dir);
    CHECK(slurp(s.run_dir / "report" / "efficiency.csv") == eff);

    auto other = compare_run(s.run_dir, StrategyId::standard);
    CHECK(other.efficiency_csv.find("token_pct_vs_standard") != std::string::npos);
    fs::remove_all(c.out_dir);
}

TEST_CASE("a run without the baseline still reports efficiency") {
    RunConfig c = config("nocot");
    c.strategies = {StrategyId::baseline_cod, StrategyId::iterative_cod};
    auto s = run_experiment(c);
    auto bundle = report_run(s.run_dir);
    CHECK(bundle.efficiency_csv.find("token_pct_vs") == std::string::npos);
    CHECK_FALSE(bundle.warnings.empty());
    CHECK(fs::exists(s.run_dir / "report" / "efficiency.csv"));
    fs::remove_all(c.out_dir);
}

}
