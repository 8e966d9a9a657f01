#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "draftbench/error.hpp"
#include "draftbench/patch.hpp"
#include "draftbench/strategy.hpp"
#include "draftbench/task_corpus.hpp"

namespace draftbench {

class Gateway;

enum class Dimension { correctness, compatibility, security, performance, test_coverage, maintainability };

inline constexpr std::array<Dimension, 6> kAllDimensions = {
    Dimension::correctness, Dimension::compatibility,  Dimension::security,
    Dimension::performance, Dimension::test_coverage, Dimension::maintainability,
};

struct SubComponent {
    std::string_view name;
    int weight;
};

/// Sub-component names and integer weights; each dimension's weights sum to 10.
inline constexpr std::array<std::array<SubComponent, 3>, 6> kRubric = {{
    {{{"problem_resolution", 3}, {"functionality_completeness", 4}, {"edge_case_handling", 3}}},
    {{{"integration_with_existing_code", 4},
      {"non_disruption_of_existing_functions", 3},
      {"compliance_with_project_standards", 3}}},
    {{{"no_new_security_risks", 4},
      {"adherence_to_security_best_practices", 3},
      {"input_validation_completeness", 3}}},
    {{{"algorithm_efficiency", 3}, {"resource_usage_optimization", 4}, {"no_performance_degradation", 3}}},
    {{{"inclusion_of_necessary_tests", 5}, {"test_comprehensiveness", 3}, {"edge_case_testing", 2}}},
    {{{"code_readability", 3}, {"comment_completeness", 4}, {"adherence_to_code_style", 3}}},
}};

/// Contribution of each dimension to the overall score; sums to 1.
inline constexpr std::array<double, 6> kOverallWeights = {0.25, 0.15, 0.15, 0.15, 0.10, 0.20};

namespace detail {
constexpr bool rubric_weights_sum_to_ten() {
    for (const auto& dim : kRubric) {
        int sum = 0;
        for (const auto& sub : dim) sum += sub.weight;
        if (sum != 10) return false;
    }
    return true;
}
constexpr bool overall_weights_sum_to_one() {
    double sum = 0.0;
    for (double w : kOverallWeights) sum += w;
    return sum > 1.0 - 1e-12 && sum < 1.0 + 1e-12;
}
}  // namespace detail

static_assert(detail::rubric_weights_sum_to_ten());
static_assert(detail::overall_weights_sum_to_one());

std::string_view dimension_name(Dimension d);
std::optional<Dimension> parse_dimension(std::string_view name);
constexpr std::size_t index_of(Dimension d) { return static_cast<std::size_t>(d); }

/// Runtime weight audit; the CLI checks it at startup.
bool audit_weights();

/// 18 sub-component values in [0, 1], indexed [dimension][sub-component].
struct SubScores {
    std::array<std::array<double, 3>, 6> values{};

    double at(Dimension d, std::size_t sub) const { return values[index_of(d)][sub]; }
    bool operator==(const SubScores&) const = default;
};

/// Dimension scores in [0, 10].
struct DimensionScores {
    std::array<double, 6> values{};

    double operator[](Dimension d) const { return values[index_of(d)]; }
    double& operator[](Dimension d) { return values[index_of(d)]; }
    bool operator==(const DimensionScores&) const = default;
};

class QualityRangeError : public Error {
public:
    using Error::Error;
};

/// Weighted sum of the three sub-components. Throws QualityRangeError
/// when an input lies outside [0, 1].
double score_dimension(Dimension d, std::span<const double, 3> subs);
DimensionScores score_dimensions(const SubScores& subs);
double overall_quality(const DimensionScores& d);

struct QualityReport {
    DimensionScores dimensions;
    double overall = 0.0;
    std::string judge_rationale;
    std::string task_id;
    StrategyId strategy = StrategyId::standard;
};

QualityReport make_quality_report(const SubScores& subs, std::string rationale, std::string task_id,
                                  StrategyId strategy);

std::string quality_report_to_json(const QualityReport& report);
QualityReport quality_report_from_json(std::string_view json);

/// The six rubric questions, one per line, numbered.
std::string_view rubric_questions();
std::string judge_system_text();
std::string build_judge_prompt(const TaskRecord& task, const UnifiedDiff& patch);

class JudgeParseError : public Error {
public:
    using Error::Error;
};

/// Reads "dimension.subcomponent: value" lines. Unknown labels are ignored;
/// missing, duplicated, unparsable or out-of-range values are errors.
SubScores parse_judge_response(std::string_view text);

/// Response lines that are not part of the score block.
std::string extract_rationale(std::string_view text);

/// Asks a gateway-backed model to score a patch. One re-ask with a stricter
/// format reminder on unparsable output, then JudgeParseError.
class Judge {
public:
    Judge(Gateway& gateway, std::string provider_id, std::string model_id, double temperature = 0.0);

    QualityReport assess(const TaskRecord& task, const UnifiedDiff& patch, StrategyId strategy);

private:
    Gateway& gateway_;
    std::string provider_id_;
    std::string model_id_;
    double temperature_;
};

}  // namespace draftbench
