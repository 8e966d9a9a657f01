#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "draftbench/error.hpp"
#include "draftbench/llm_gateway.hpp"
#include "draftbench/strategy.hpp"

namespace draftbench {

class MetricsError : public Error {
public:
    using Error::Error;
};

struct Summary {
    double mean = 0.0;
    double median = 0.0;
};

/// Mean and median. Values are sorted first, so the result does not depend
/// on input order. Even counts take the mean of the two middle values.
Summary summarize(std::span<const double> values);

/// Mean exceeds median by more than this fraction.
inline constexpr double kRightSkewThreshold = 0.10;

struct EfficiencyStats {
    StrategyId strategy = StrategyId::standard;
    std::size_t n = 0;
    double avg_tokens = 0.0;
    double median_tokens = 0.0;
    double avg_latency_s = 0.0;
    double median_latency_s = 0.0;
    bool tokens_right_skewed = false;
};

/// Requires a non-empty, single-strategy, provider-reported record set.
EfficiencyStats aggregate(std::span<const CompletionRecord> records);

/// Same statistics over approximated token counts; used only for the
/// annotated column of the efficiency table.
EfficiencyStats aggregate_approximated(std::span<const CompletionRecord> records);

// All percentages are full precision; rounding happens at rendering.
double token_ratio(double variant_avg_tokens, double cot_avg_tokens);
double token_savings(double variant_avg_tokens, double cot_avg_tokens);
double latency_ratio(double variant_avg_s, double cot_avg_s);
double quality_retention(double variant_quality, double cot_quality);
double quality_efficiency_index(double savings_pct, double retention_pct);

struct ComparativeMetrics {
    double token_ratio_pct = 0.0;
    double token_savings_pct = 0.0;
    double latency_ratio_pct = 0.0;
    std::optional<double> quality_retention_pct;
    std::optional<double> quality_efficiency_index;
};

ComparativeMetrics compare_to_baseline(const EfficiencyStats& variant, const EfficiencyStats& baseline,
                                       std::optional<double> variant_quality = std::nullopt,
                                       std::optional<double> baseline_quality = std::nullopt);

struct CorrelationResult {
    double r = 0.0;
    std::size_t n = 0;
};

/// Pearson coefficient with population standard deviations.
/// Throws MetricsError on length mismatch, n < 2 or zero variance.
CorrelationResult pearson(std::span<const double> xs, std::span<const double> ys);

}  // namespace draftbench
