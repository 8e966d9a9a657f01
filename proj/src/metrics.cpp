#include "draftbench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace draftbench {

Summary summarize(std::span<const double> values) {
    if (values.empty()) throw MetricsError("cannot summarize an empty sample");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    double sum = 0.0;
    for (double v : sorted) sum += v;
    const std::size_t n = sorted.size();
    const double median = n % 2 ? sorted[n / 2] : (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;
    return {sum / static_cast<double>(n), median};
}

namespace {

EfficiencyStats aggregate_source(std::span<const CompletionRecord> records, TokenSource source) {
    if (records.empty()) throw MetricsError("cannot aggregate an empty record set");
    const StrategyId strategy = records.front().strategy;
    std::vector<double> tokens, latency;
    tokens.reserve(records.size());
    latency.reserve(records.size());
    for (const auto& r : records) {
        if (r.strategy != strategy) {
            throw MetricsError("records mix strategies '" + std::string(strategy_name(strategy)) + "' and '" +
                               std::string(strategy_name(r.strategy)) + "'");
        }
        if (r.token_source != source) {
            throw MetricsError("record for task '" + r.task_id + "' has " +
                               std::string(token_source_name(r.token_source)) + " token counts; expected " +
                               std::string(token_source_name(source)));
        }
        tokens.push_back(static_cast<double>(r.completion_tokens));
        latency.push_back(r.latency_ms / 1000.0);
    }
    const Summary t = summarize(tokens);
    const Summary l = summarize(latency);
    EfficiencyStats stats;
    stats.strategy = strategy;
    stats.n = records.size();
    stats.avg_tokens = t.mean;
    stats.median_tokens = t.median;
    stats.avg_latency_s = l.mean;
    stats.median_latency_s = l.median;
    stats.tokens_right_skewed = t.mean > t.median * (1.0 + kRightSkewThreshold);
    return stats;
}

void require_baseline(double baseline, const char* what) {
    if (!(baseline > 0.0)) throw MetricsError(std::string(what) + " baseline must be positive");
}

}  // namespace

EfficiencyStats aggregate(std::span<const CompletionRecord> records) {
    return aggregate_source(records, TokenSource::provider_reported);
}

EfficiencyStats aggregate_approximated(std::span<const CompletionRecord> records) {
    return aggregate_source(records, TokenSource::approximated);
}

double token_ratio(double variant_avg_tokens, double cot_avg_tokens) {
    require_baseline(cot_avg_tokens, "token");
    return variant_avg_tokens / cot_avg_tokens * 100.0;
}

double token_savings(double variant_avg_tokens, double cot_avg_tokens) {
    return 100.0 - token_ratio(variant_avg_tokens, cot_avg_tokens);
}

double latency_ratio(double variant_avg_s, double cot_avg_s) {
    require_baseline(cot_avg_s, "latency");
    return variant_avg_s / cot_avg_s * 100.0;
}

double quality_retention(double variant_quality, double cot_quality) {
    require_baseline(cot_quality, "quality");
    return variant_quality / cot_quality * 100.0;
}

double quality_efficiency_index(double savings_pct, double retention_pct) { return savings_pct * retention_pct / 100.0; }

ComparativeMetrics compare_to_baseline(const EfficiencyStats& variant, const EfficiencyStats& baseline,
                                       std::optional<double> variant_quality, std::optional<double> baseline_quality) {
    ComparativeMetrics m;
    m.token_ratio_pct = token_ratio(variant.avg_tokens, baseline.avg_tokens);
    m.token_savings_pct = 100.0 - m.token_ratio_pct;
    m.latency_ratio_pct = latency_ratio(variant.avg_latency_s, baseline.avg_latency_s);
    if (variant_quality && baseline_quality) {
        m.quality_retention_pct = quality_retention(*variant_quality, *baseline_quality);
        m.quality_efficiency_index = quality_efficiency_index(m.token_savings_pct, *m.quality_retention_pct);
    }
    return m;
}

CorrelationResult pearson(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) {
        throw MetricsError("pearson: series lengths differ (" + std::to_string(xs.size()) + " vs " +
                           std::to_string(ys.size()) + ")");
    }
    const std::size_t n = xs.size();
    if (n < 2) throw MetricsError("pearson: need at least two points");
    auto finite = [](double v) { return std::isfinite(v); };
    if (!std::all_of(xs.begin(), xs.end(), finite) || !std::all_of(ys.begin(), ys.end(), finite)) {
        throw MetricsError("pearson: series contain non-finite values");
    }
    // Centred sums in exact rational arithmetic. r^2 reduced to lowest terms
    // depends only on the data up to any affine map, so the single rounding
    // at the end gives bit-identical r for transformed inputs.
    mpq_class mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += mpq_class(xs[i]);
        my += mpq_class(ys[i]);
    }
    mx /= static_cast<unsigned long>(n);
    my /= static_cast<unsigned long>(n);
    mpq_class sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const mpq_class dx = mpq_class(xs[i]) - mx;
        const mpq_class dy = mpq_class(ys[i]) - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sgn(sxx) == 0 || sgn(syy) == 0) throw MetricsError("pearson: a series has zero variance");
    mpq_class r2 = sxy * sxy / (sxx * syy);
    r2.canonicalize();
    mpf_class root(r2, 256);
    root = sqrt(root);
    const double r = std::min(root.get_d(), 1.0);
    return {sgn(sxy) < 0 ? -r : r, n};
}

}  // namespace draftbench
