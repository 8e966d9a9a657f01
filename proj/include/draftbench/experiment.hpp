#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "draftbench/error.hpp"
#include "draftbench/llm_gateway.hpp"
#include "draftbench/patch.hpp"
#include "draftbench/prompt_strategies.hpp"
#include "draftbench/report.hpp"
#include "draftbench/strategy.hpp"
#include "draftbench/task_corpus.hpp"

namespace draftbench {

class RunError : public Error {
public:
    using Error::Error;
};

struct RunConfig {
    std::filesystem::path corpus_path;
    std::vector<StrategyId> strategies{kAllStrategies.begin(), kAllStrategies.end()};
    Phase phase = Phase::small();
    std::uint64_t seed = 0;
    std::string provider = "mock";
    /// Overrides the builtin provider table (base URL, kind, key variable).
    std::optional<ProviderConfig> provider_config;
    std::string model = "mock-1";
    double temperature = kDefaultTemperature;
    std::size_t max_output_tokens = 4096;
    bool replay = false;
    /// Defaults to <out_dir>/replay.
    std::optional<std::filesystem::path> replay_dir;
    std::size_t max_concurrent = 4;
    std::optional<std::size_t> quality_subset;
    std::filesystem::path out_dir;
    std::string few_shot_set{kDefaultFewShotSet};
    std::optional<std::filesystem::path> prompts_dir;

    /// Throws RunError when the configuration is unusable.
    void validate() const;
    std::filesystem::path effective_replay_dir() const;
};

/// Keys present in json replace the corresponding fields of base.
RunConfig run_config_from_json(std::string_view json, RunConfig base = {});
std::string run_config_to_json(const RunConfig& config);

enum class RecordStatus { ok, parse_error, no_patch, judge_error };

std::string_view record_status_name(RecordStatus s);

/// One line of records.jsonl: a completed (task, strategy) pair.
struct RunRecord {
    CompletionRecord completion;
    bool steps_compliant = true;
    std::size_t step_violations = 0;
    std::size_t step_overflows = 0;
    ExtractionSource extraction = ExtractionSource::none;
    std::optional<std::string> patch_file;
    std::optional<std::string> quality_ref;
    RecordStatus status = RecordStatus::ok;
    std::string diagnostics;
};

std::string run_record_to_json(const RunRecord& record);
RunRecord run_record_from_json(std::string_view json);

/// Reads records.jsonl. A torn final line from an interrupted run is ignored.
std::vector<RunRecord> load_run_records(const std::filesystem::path& run_dir);

/// Dependencies the pipeline would otherwise build from the configuration.
struct RunServices {
    /// Replaces the provider backend (tests, custom adapters).
    std::shared_ptr<Backend> backend;
    /// Replaces the network transport of HTTP providers.
    std::shared_ptr<Transport> transport;
    /// Replaces the retry sleep; tests pass a no-op.
    std::function<void(std::chrono::milliseconds)> sleep;
};

struct RunSummary {
    std::filesystem::path run_dir;
    std::size_t pairs = 0;
    std::size_t skipped = 0;
    std::size_t completed = 0;
    std::size_t failed = 0;
    std::size_t backend_calls = 0;
};

/// Renders, completes, parses, validates and extracts every (task, strategy)
/// pair. Pairs already present in records.jsonl are skipped; failures are
/// logged to errors.jsonl and do not stop the run.
RunSummary run_experiment(const RunConfig& config, const RunServices& services = {});

struct ScoreSummary {
    std::vector<std::string> selected_tasks;
    std::size_t judged = 0;
    std::size_t skipped = 0;
    std::size_t judge_errors = 0;
};

/// Judges every patched record of a seeded, strategy-paired task subset.
ScoreSummary score_run(const std::filesystem::path& run_dir, std::size_t subset_size, std::uint64_t seed,
                       const RunServices& services = {});

/// Aggregates the run and writes <run_dir>/report/. Needs no corpus and no network.
ReportBundle report_run(const std::filesystem::path& run_dir);

/// Same tables against an arbitrary baseline; nothing is written.
ReportBundle compare_run(const std::filesystem::path& run_dir, StrategyId baseline);

}  // namespace draftbench
