#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "draftbench/error.hpp"
#include "draftbench/metrics.hpp"
#include "draftbench/quality.hpp"
#include "draftbench/strategy.hpp"

namespace draftbench {

class ReportError : public Error {
public:
    using Error::Error;
};

using StrategyValue = std::pair<StrategyId, double>;

struct NormalizedSeries {
    std::string metric;
    std::vector<StrategyValue> values;  // in [0, 10], input order
    bool inverted = false;
    /// All inputs equal; every value maps to the 5.0 midpoint.
    bool degenerate = false;
};

/// (v - min) / (max - min) * 10, or 10 minus that when invert is set.
NormalizedSeries minmax_normalize(std::string metric, std::span<const StrategyValue> values, bool invert);

/// variant / baseline * 100.
double normalized_efficiency(double variant_metric, double cot_metric);

struct StrategyQuality {
    StrategyId strategy = StrategyId::standard;
    std::size_t n = 0;
    DimensionScores dimensions;
    double overall = 0.0;
};

/// Per-dimension and overall means over one strategy's reports.
StrategyQuality average_quality(std::span<const QualityReport> reports);

struct ManifestInfo {
    std::string config_hash;
    std::string corpus_hash;
    std::uint64_t seed = 0;
    std::string phase;
    std::string started_at;
    std::string finished_at;
    std::size_t task_count = 0;
    std::size_t record_count = 0;
};

struct ReportInputs {
    /// Strategies the run declared, in report order.
    std::vector<StrategyId> strategies;
    std::vector<EfficiencyStats> efficiency;
    /// Optional annotated column from approximated token counts.
    std::vector<EfficiencyStats> approximated;
    /// Empty when the quality subset has not been scored.
    std::vector<StrategyQuality> quality;
    StrategyId baseline = StrategyId::cot;
    ManifestInfo manifest;
};

struct ReportBundle {
    std::string efficiency_csv;
    std::optional<std::string> quality_csv;
    std::optional<std::string> combined_csv;
    std::string radar_jsonl;
    std::string manifest;
    /// Fixed-width rendering of the same tables, for standard output.
    std::string formatted;
    std::vector<std::string> warnings;
};

/// Pure rendering. Byte-identical output for identical inputs.
ReportBundle build_reports(const ReportInputs& inputs);

/// build_reports() plus writing efficiency.csv, quality.csv, combined.csv,
/// radar.json-lines, manifest and tables.txt into report_dir. Stale quality
/// files from earlier renderings are removed when quality is absent.
ReportBundle emit_reports(const ReportInputs& inputs, const std::filesystem::path& report_dir);

}  // namespace draftbench
