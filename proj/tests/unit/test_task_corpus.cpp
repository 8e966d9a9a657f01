#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "draftbench/task_corpus.hpp"

using namespace draftbench;

namespace {

std::string task_line(const std::string& id, const std::string& statement = "Something breaks") {
    return R"({"task_id":")" + id + R"(","repo":"org/repo","problem_statement":")" + statement +
           R"(","code_context":[{"file_path":"a.py","snippet":"x = 1\n"}],"category":"bug_fix","language_tag":"python"})";
}

std::vector<TaskRecord> corpus_of(std::size_t n) {
    std::vector<TaskRecord> out;
    for (std::size_t i = 0; i < n; ++i) {
        TaskRecord t;
        t.task_id = "task-" + std::to_string(i);
        t.repo = "org/repo";
        t.problem_statement = "problem " + std::to_string(i);
        out.push_back(t);
    }
    return out;
}

}  // namespace

TEST_SUITE("task_corpus") {

TEST_CASE("two well-formed lines load in file order") {
    std::istringstream in(task_line("b-2") + "\n" + task_line("a-1") + "\n");
    auto corpus = parse_corpus(in);
    REQUIRE(corpus.size() == 2);
    CHECK(corpus[0].task_id == "b-2");
    CHECK(corpus[1].task_id == "a-1");
    CHECK(corpus[0].category == TaskCategory::bug_fix);
    CHECK(corpus[0].code_context.at(0).snippet == "x = 1\n");
}

TEST_CASE("empty file gives an empty corpus") {
    const auto path = std::filesystem::temp_directory_path() / "draftbench_empty_corpus.jsonl";
    std::ofstream(path).close();
    CHECK(load_corpus(path).empty());
    std::filesystem::remove(path);
}

TEST_CASE("missing file is an error") {
    CHECK_THROWS_AS(load_corpus("/nonexistent/corpus.jsonl"), CorpusError);
}

TEST_CASE("duplicate task_id names the id") {
    std::istringstream in(task_line("django-1") + "\n" + task_line("django-1") + "\n");
    try {
        parse_corpus(in);
        FAIL("expected a duplicate error");
    } catch (const CorpusError& e) {
        CHECK(std::string(e.what()).find("django-1") != std::string::npos);
        CHECK(e.line() == 2);
    }
}

TEST_CASE("malformed line reports its line number") {
    std::istringstream in(task_line("a") + "\n\n{not json\n");
    try {
        parse_corpus(in);
        FAIL("expected a parse error");
    } catch (const CorpusError& e) {
        CHECK(e.line() == 3);
    }
}

TEST_CASE("schema violations") {
    CHECK_THROWS_AS(parse_task(R"({"task_id":"","repo":"r","problem_statement":"p"})"), CorpusError);
    CHECK_THROWS_AS(parse_task(R"({"task_id":"x","repo":"r","problem_statement":"  "})"), CorpusError);
    CHECK_THROWS_AS(parse_task(R"({"task_id":"x","repo":"r","problem_statement":"p","code_context":[{"file_path":""}]})"),
                    CorpusError);
    CHECK_THROWS_AS(parse_task(R"({"task_id":"x","repo":"r","problem_statement":"p","category":"nope"})"), CorpusError);
    CHECK_THROWS_AS(parse_task(R"({"repo":"r","problem_statement":"p"})"), CorpusError);
}

TEST_CASE("serialize then load is the identity") {
    TaskRecord t;
    t.task_id = "t\"1";
    t.repo = "r";
    t.problem_statement = "multi\nline \"quoted\" ünïcode";
    t.code_context = {{"a/b.py", "def f():\n\treturn 1\n"}, {"c.py", ""}};
    t.gold_patch = "--- a/x\n+++ b/x\n";
    t.category = TaskCategory::performance;
    t.language_tag = "python";
    TaskRecord u = t;
    u.task_id = "second";
    u.gold_patch.reset();
    std::vector<TaskRecord> corpus{t, u};
    std::istringstream in(serialize_corpus(corpus));
    CHECK(parse_corpus(in) == corpus);
}

TEST_CASE("phase sizes are ordered") {
    CHECK(*Phase::small().sample_size < *Phase::medium().sample_size);
    CHECK_FALSE(Phase::full().sample_size.has_value());
    CHECK(Phase::from_name("medium").name == PhaseName::medium);
    CHECK_THROWS(Phase::from_name("huge"));
}

TEST_CASE("300 tasks, small phase gives 10 distinct tasks") {
    auto corpus = corpus_of(300);
    auto sample = sample_phase(corpus, Phase::small(), 42);
    CHECK(sample.size() == 10);
    std::set<std::string> ids;
    for (const auto& t : sample) ids.insert(t.task_id);
    CHECK(ids.size() == 10);
    CHECK(sample_phase(corpus, Phase::medium(), 42).size() == 50);
    CHECK(sample_phase(corpus, Phase::full(), 42).size() == 300);
}

TEST_CASE("too small a corpus is an explicit error") {
    auto corpus = corpus_of(8);
    CHECK_THROWS_AS(sample_phase(corpus, Phase::small(), 1), SampleSizeError);
    CHECK_THROWS_AS(sample_phase(std::vector<TaskRecord>{}, Phase::full(), 1), SampleSizeError);
}

TEST_CASE("sampling is a deterministic subset kept in corpus order") {
    auto corpus = corpus_of(120);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto a = sample_phase(corpus, Phase::medium(), seed);
        auto b = sample_phase(corpus, Phase::medium(), seed);
        CHECK(serialize_corpus(a) == serialize_corpus(b));
        std::size_t last = 0;
        bool first = true;
        std::set<std::string> ids;
        for (const auto& t : a) {
            const std::size_t idx = std::stoul(t.task_id.substr(5));
            CHECK((first || idx > last));
            first = false;
            last = idx;
            ids.insert(t.task_id);
        }
        CHECK(ids.size() == a.size());
    }
    CHECK(serialize_corpus(sample_phase(corpus, Phase::small(), 1)) !=
          serialize_corpus(sample_phase(corpus, Phase::small(), 2)));
}

TEST_CASE("sample_indices is uniform enough") {
    std::vector<int> hits(20, 0);
    for (std::uint64_t seed = 0; seed < 2000; ++seed) {
        for (auto i : sample_indices(20, 5, seed)) ++hits[i];
    }
    // Expected 500 per index.
    for (int h : hits) CHECK((h > 400 && h < 600));
}

}
