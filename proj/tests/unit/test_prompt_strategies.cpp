#include <doctest.h>

#include <random>
#include <set>

#include "draftbench/prompt_strategies.hpp"
#include "support/reference_values.hpp"

using namespace draftbench;

namespace {

TaskRecord sample_task() {
    TaskRecord t;
    t.task_id = "django__django-11001";
    t.repo = "django/django";
    t.problem_statement = "list_display and list_editable overlap is not rejected.";
    t.code_context = {{"django/contrib/admin/checks.py", "def _check_list_editable(self, obj):\n    return []\n"}};
    t.category = TaskCategory::bug_fix;
    return t;
}

}  // namespace

TEST_SUITE("prompt_strategies") {

TEST_CASE("schemas") {
    CHECK(section_schema(StrategyId::standard).sections.empty());
    const auto cot = section_schema(StrategyId::cot);
    REQUIRE(cot.sections.size() == 1);
    CHECK_FALSE(cot.sections[0].max_steps.has_value());
    CHECK_FALSE(cot.sections[0].words_per_step_limit.has_value());

    const auto h = section_schema(StrategyId::hierarchical_cod);
    REQUIRE(h.sections.size() == 3);
    CHECK(*h.sections[0].max_steps == 1);
    CHECK(*h.sections[1].max_steps == 2);
    CHECK(*h.sections[2].max_steps == 3);

    const auto it = section_schema(StrategyId::iterative_cod);
    REQUIRE(it.sections.size() == 3);
    CHECK(it.sections[0].label == "Initial draft");
    CHECK(it.sections[1].label == "Assessment");
    CHECK(it.sections[2].label == "Refinement");

    for (StrategyId s : kAllStrategies) {
        if (s == StrategyId::standard || s == StrategyId::cot) continue;
        for (const auto& sec : section_schema(s).sections) CHECK(*sec.words_per_step_limit == kDraftWordLimit);
    }
}

TEST_CASE("task block is identical across strategies") {
    const TaskRecord t = sample_task();
    const std::string expected = render_task_block(t);
    std::set<std::string> systems;
    for (StrategyId s : kAllStrategies) {
        const RenderedPrompt p = render_prompt(s, t);
        CHECK(p.task_block == expected);
        CHECK(p.strategy == s);
        CHECK(p.user_text().ends_with(expected));
        systems.insert(p.system_text);
    }
    CHECK(systems.size() == kAllStrategies.size());
    CHECK(expected.find(t.problem_statement) != std::string::npos);
    CHECK(expected.find("File: django/contrib/admin/checks.py") != std::string::npos);
}

TEST_CASE("standard carries no step instructions, baseline carries the limit") {
    const auto& lib = PromptLibrary::builtin();
    const std::string& standard = lib.system_text(StrategyId::standard);
    CHECK(standard.find("words") == std::string::npos);
    CHECK(standard.find("step") == std::string::npos);
    CHECK(lib.system_text(StrategyId::baseline_cod).find("5 words") != std::string::npos);
}

TEST_CASE("unknown few-shot set") {
    CHECK_THROWS_AS(render_prompt(StrategyId::cot, sample_task(), "no_such_set"), TemplateError);
}

TEST_CASE("custom library overrides builtin text") {
    PromptLibrary lib = PromptLibrary::builtin();
    lib.set_system_text(StrategyId::cot, "think");
    lib.set_few_shot("other", StrategyId::cot, "example");
    const auto p = render_prompt(StrategyId::cot, sample_task(), "other", lib);
    CHECK(p.system_text == "think");
    CHECK(p.few_shot_block.find("example") != std::string::npos);
    CHECK(lib.has_few_shot_set("other"));
}

TEST_CASE("parses the worked examples") {
    auto b = parse_response(StrategyId::baseline_cod, refvals::kBaselineExample);
    REQUIRE(b.sections.size() == 1);
    CHECK(b.sections[0].steps.size() == 5);
    CHECK(b.sections[0].steps[0] == "Find validation method");
    CHECK(b.solution_text.find("[code patch]") != std::string::npos);
    CHECK_FALSE(b.solution_empty);

    auto h = parse_response(StrategyId::hierarchical_cod, refvals::kHierarchicalExample);
    REQUIRE(h.sections.size() == 3);
    CHECK(h.sections[2].steps.size() == 3);
    CHECK(h.sections[2].steps[2] == "Test with edge cases");

    auto s = parse_response(StrategyId::structured_cod, refvals::kStructuredExample);
    CHECK(s.sections[1].steps == std::vector<std::string>{"admin/options.py"});

    auto i = parse_response(StrategyId::iterative_cod, refvals::kIterativeExample);
    CHECK(i.sections[0].steps.size() == 3);
    CHECK(i.sections[1].steps.size() == 1);
    CHECK(i.sections[2].steps.size() == 2);

    auto c = parse_response(StrategyId::code_specific_cod, refvals::kCodeSpecificExample);
    CHECK(c.sections[3].steps == std::vector<std::string>{"Multiple list combinations needed"});
}

TEST_CASE("missing section is named") {
    const std::string text =
        "Problem understanding: List validation logic error\n"
        "Problem diagnosis: Missing intersection check\n"
        "Modification strategy: Add set operation condition\n"
        "\nSolution:\n[code patch]\n";
    try {
        parse_response(StrategyId::structured_cod, text);
        FAIL("expected a parse error");
    } catch (const ResponseParseError& e) {
        CHECK(std::string(e.what()).find("File location") != std::string::npos);
        CHECK(e.partial().sections.size() == 4);
    }
}

TEST_CASE("standard response") {
    auto t = parse_response(StrategyId::standard, "Solution:\n--- a/x\n+++ b/x\n");
    CHECK(t.sections.empty());
    CHECK(t.solution_text.find("--- a/x") != std::string::npos);
    CHECK_THROWS_AS(parse_response(StrategyId::baseline_cod, "no structure here"), ResponseParseError);
}

TEST_CASE("aliases are accepted") {
    auto h = parse_response(StrategyId::hierarchical_cod,
                            "L1:\n- Fix logic\nL2:\n- Find code\nL3:\n- Add check\nSolution:\nx\n");
    CHECK(h.sections[0].label == "L1 (Strategy Layer)");
    CHECK(h.sections[1].steps == std::vector<std::string>{"Find code"});
}

TEST_CASE("solution_section takes the last marker") {
    auto s = solution_section("Solution: first\nmore\nSolution:\nsecond\n");
    REQUIRE(s.has_value());
    CHECK(s->find("second") != std::string_view::npos);
    CHECK(s->find("first") == std::string_view::npos);
    CHECK_FALSE(solution_section("nothing").has_value());
}

TEST_CASE("count_words") {
    CHECK(count_words("Find validation method") == 3);
    CHECK(count_words("Add set intersection operation") == 4);
    CHECK(count_words("add a set intersection check here now") == 7);
    CHECK(count_words("") == 0);
    CHECK(count_words("  spaced   out  ") == 2);
    CHECK(count_words("Use `list_display` value") == 3);
    CHECK(count_words("Check read-only fields") == 3);
    CHECK(count_words("Done , ok") == 2);
}

TEST_CASE("worked examples are compliant") {
    for (auto [s, text] : {std::pair{StrategyId::baseline_cod, refvals::kBaselineExample},
                           std::pair{StrategyId::structured_cod, refvals::kStructuredExample},
                           std::pair{StrategyId::hierarchical_cod, refvals::kHierarchicalExample},
                           std::pair{StrategyId::iterative_cod, refvals::kIterativeExample},
                           std::pair{StrategyId::code_specific_cod, refvals::kCodeSpecificExample}}) {
        auto v = validate_step_limits(parse_response(s, text));
        CHECK(v.compliant);
        CHECK(v.violations.empty());
        CHECK(v.step_overflows.empty());
    }
}

TEST_CASE("one long step is reported exactly") {
    ReasoningTrace t = parse_response(StrategyId::baseline_cod, refvals::kBaselineExample);
    t.sections[0].steps[3] = "add a set intersection check here now";
    auto v = validate_step_limits(t);
    CHECK_FALSE(v.compliant);
    REQUIRE(v.violations.size() == 1);
    CHECK(v.violations[0] == StepViolation{"Thinking steps", 3, 7});
    CHECK(v.word_counts[0][3] == 7);
}

TEST_CASE("cot steps are never violations") {
    ReasoningTrace t;
    t.strategy = StrategyId::cot;
    t.sections = {{"Reasoning", {std::string(400, 'a') + " b c d e f g h i j k"}}};
    CHECK(validate_step_limits(t).compliant);
}

TEST_CASE("overflow is informational") {
    ReasoningTrace t = parse_response(StrategyId::baseline_cod, refvals::kBaselineExample);
    t.sections[0].steps.push_back("One more step");
    auto v = validate_step_limits(t);
    CHECK(v.compliant);
    REQUIRE(v.step_overflows.size() == 1);
    CHECK(v.step_overflows[0] == StepCountOverflow{"Thinking steps", 6, 5});
}

TEST_CASE("removing a violating step lowers the count by one") {
    std::mt19937_64 rng(7);
    const std::vector<std::string> words = {"a", "check", "list", "admin", "field", "guard", "set", "fix"};
    for (int trial = 0; trial < 200; ++trial) {
        ReasoningTrace t;
        t.strategy = StrategyId::baseline_cod;
        TraceSection sec{"Thinking steps", {}};
        const int n = 1 + static_cast<int>(rng() % 8);
        for (int i = 0; i < n; ++i) {
            std::string step;
            const int w = 1 + static_cast<int>(rng() % 9);
            for (int k = 0; k < w; ++k) step += (k ? " " : "") + words[rng() % words.size()];
            sec.steps.push_back(step);
        }
        t.sections.push_back(sec);
        auto before = validate_step_limits(t);
        for (std::size_t i = 0; i < t.sections[0].steps.size(); ++i) {
            const bool violating = before.word_counts[0][i] > kDraftWordLimit;
            ReasoningTrace u = t;
            u.sections[0].steps.erase(u.sections[0].steps.begin() + static_cast<long>(i));
            auto after = validate_step_limits(u);
            CHECK(after.violations.size() == before.violations.size() - (violating ? 1 : 0));
        }
    }
}

}
