#include "draftbench/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "draftbench/metrics.hpp"
#include "draftbench/mock_backend.hpp"
#include "draftbench/quality.hpp"
#include "text_util.hpp"

namespace draftbench {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Configuration

void RunConfig::validate() const {
    if (corpus_path.empty()) throw RunError("run config needs a corpus path");
    if (out_dir.empty()) throw RunError("run config needs an output directory");
    if (strategies.empty()) throw RunError("run config declares no strategies");
    std::set<StrategyId> unique(strategies.begin(), strategies.end());
    if (unique.size() != strategies.size()) throw RunError("run config repeats a strategy");
    if (provider.empty()) throw RunError("run config needs a provider");
    if (model.empty()) throw RunError("run config needs a model");
    if (provider_config && provider_config->id != provider) {
        throw RunError("provider config id '" + provider_config->id + "' differs from provider '" + provider + "'");
    }
    if (!(temperature >= 0.0 && temperature <= 2.0)) throw RunError("temperature must lie in [0, 2]");
    if (max_output_tokens == 0) throw RunError("max_output_tokens must be positive");
    if (max_concurrent == 0) throw RunError("max_concurrent must be positive");
    if (quality_subset) {
        if (*quality_subset == 0) throw RunError("quality subset size must be positive");
        if (phase.sample_size && *quality_subset > *phase.sample_size) {
            throw RunError("quality subset of " + std::to_string(*quality_subset) + " exceeds the " +
                           std::string(phase_name(phase.name)) + " phase size of " +
                           std::to_string(*phase.sample_size));
        }
    }
    if (few_shot_set.empty()) throw RunError("few-shot set name is empty");
}

fs::path RunConfig::effective_replay_dir() const { return replay_dir ? *replay_dir : out_dir / "replay"; }

namespace {

std::string_view provider_kind_name(ProviderKind k) {
    switch (k) {
        case ProviderKind::openai_compatible: return "openai_compatible";
        case ProviderKind::anthropic: return "anthropic";
        case ProviderKind::mock: return "mock";
    }
    return "unknown";
}

json provider_to_json(const ProviderConfig& p) {
    json obj;
    obj["id"] = p.id;
    obj["kind"] = std::string(provider_kind_name(p.kind));
    obj["base_url"] = p.base_url;
    obj["api_key_env"] = p.api_key_env;
    obj["timeout_ms"] = p.timeout.count();
    return obj;
}

json optional_path(const std::optional<fs::path>& p) { return p ? json(p->string()) : json(nullptr); }

json config_object(const RunConfig& c) {
    json obj;
    obj["corpus"] = c.corpus_path.string();
    json strategies = json::array();
    for (StrategyId s : c.strategies) strategies.push_back(std::string(strategy_name(s)));
    obj["strategies"] = strategies;
    obj["phase"] = std::string(phase_name(c.phase.name));
    obj["seed"] = c.seed;
    obj["provider"] = c.provider;
    obj["provider_config"] = c.provider_config ? provider_to_json(*c.provider_config) : json(nullptr);
    obj["model"] = c.model;
    obj["temperature"] = c.temperature;
    obj["max_output_tokens"] = c.max_output_tokens;
    obj["replay"] = c.replay;
    obj["replay_dir"] = optional_path(c.replay_dir);
    obj["max_concurrent"] = c.max_concurrent;
    obj["quality_subset"] = c.quality_subset ? json(*c.quality_subset) : json(nullptr);
    obj["out"] = c.out_dir.string();
    obj["few_shot_set"] = c.few_shot_set;
    obj["prompts_dir"] = optional_path(c.prompts_dir);
    return obj;
}

// Fields that decide what gets asked of the model. Execution settings such as
// the output directory or the concurrency bound are left out.
std::string config_hash(const RunConfig& c) {
    json obj = config_object(c);
    for (const char* key : {"corpus", "replay", "replay_dir", "max_concurrent", "quality_subset", "out", "prompts_dir"}) {
        obj.erase(key);
    }
    return detail::sha256_hex(obj.dump());
}

}  // namespace

std::string run_config_to_json(const RunConfig& config) { return config_object(config).dump(2); }

RunConfig run_config_from_json(std::string_view text, RunConfig base) {
    json obj;
    try {
        obj = json::parse(text);
    } catch (const json::exception& e) {
        throw RunError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!obj.is_object()) throw RunError("config must be a JSON object");
    RunConfig c = std::move(base);
    auto opt_path = [](const json& v) -> std::optional<fs::path> {
        if (v.is_null()) return std::nullopt;
        return fs::path(v.get<std::string>());
    };
    try {
        for (const auto& [key, v] : obj.items()) {
            if (key == "corpus") {
                c.corpus_path = v.get<std::string>();
            } else if (key == "strategies") {
                if (v.is_string()) {
                    c.strategies = parse_strategy_list(v.get<std::string>());
                } else {
                    std::string joined;
                    for (const auto& s : v) joined += (joined.empty() ? "" : ",") + s.get<std::string>();
                    c.strategies = parse_strategy_list(joined);
                }
            } else if (key == "phase") {
                c.phase = Phase::from_name(v.get<std::string>());
            } else if (key == "seed") {
                c.seed = v.get<std::uint64_t>();
            } else if (key == "provider") {
                c.provider = v.get<std::string>();
            } else if (key == "provider_config") {
                if (v.is_null()) {
                    c.provider_config.reset();
                } else {
                    c.provider_config = provider_from_json(v.dump());
                    if (!obj.contains("provider")) c.provider = c.provider_config->id;
                }
            } else if (key == "model") {
                c.model = v.get<std::string>();
            } else if (key == "temperature") {
                c.temperature = v.get<double>();
            } else if (key == "max_output_tokens") {
                c.max_output_tokens = v.get<std::size_t>();
            } else if (key == "replay") {
                c.replay = v.get<bool>();
            } else if (key == "replay_dir") {
                c.replay_dir = opt_path(v);
            } else if (key == "max_concurrent") {
                c.max_concurrent = v.get<std::size_t>();
            } else if (key == "quality_subset") {
                c.quality_subset = v.is_null() ? std::nullopt : std::optional<std::size_t>(v.get<std::size_t>());
            } else if (key == "out") {
                c.out_dir = v.get<std::string>();
            } else if (key == "few_shot_set") {
                c.few_shot_set = v.get<std::string>();
            } else if (key == "prompts_dir") {
                c.prompts_dir = opt_path(v);
            } else {
                throw RunError("unknown config key '" + key + "'");
            }
        }
    } catch (const json::exception& e) {
        throw RunError(std::string("bad config value: ") + e.what());
    }
    return c;
}

// ---------------------------------------------------------------------------
// Records

std::string_view record_status_name(RecordStatus s) {
    switch (s) {
        case RecordStatus::ok: return "ok";
        case RecordStatus::parse_error: return "parse_error";
        case RecordStatus::no_patch: return "no_patch";
        case RecordStatus::judge_error: return "judge_error";
    }
    return "unknown";
}

namespace {

RecordStatus parse_status(std::string_view s) {
    for (RecordStatus st : {RecordStatus::ok, RecordStatus::parse_error, RecordStatus::no_patch,
                            RecordStatus::judge_error}) {
        if (record_status_name(st) == s) return st;
    }
    throw RunError("unknown record status '" + std::string(s) + "'");
}

}  // namespace

std::string run_record_to_json(const RunRecord& r) {
    json obj;
    obj["completion"] = json::parse(completion_record_to_json(r.completion));
    obj["steps_compliant"] = r.steps_compliant;
    obj["step_violations"] = r.step_violations;
    obj["step_overflows"] = r.step_overflows;
    obj["extraction"] = std::string(extraction_source_name(r.extraction));
    obj["patch_file"] = r.patch_file ? json(*r.patch_file) : json(nullptr);
    obj["quality_ref"] = r.quality_ref ? json(*r.quality_ref) : json(nullptr);
    obj["status"] = std::string(record_status_name(r.status));
    obj["diagnostics"] = r.diagnostics;
    return obj.dump();
}

RunRecord run_record_from_json(std::string_view text) {
    try {
        const json obj = json::parse(text);
        RunRecord r;
        r.completion = completion_record_from_json(obj.at("completion").dump());
        r.steps_compliant = obj.at("steps_compliant").get<bool>();
        r.step_violations = obj.at("step_violations").get<std::size_t>();
        r.step_overflows = obj.value("step_overflows", std::size_t{0});
        auto source = parse_extraction_source(obj.at("extraction").get<std::string>());
        if (!source) throw RunError("unknown extraction source");
        r.extraction = *source;
        if (const auto& p = obj.at("patch_file"); !p.is_null()) r.patch_file = p.get<std::string>();
        if (const auto& q = obj.at("quality_ref"); !q.is_null()) r.quality_ref = q.get<std::string>();
        r.status = parse_status(obj.at("status").get<std::string>());
        r.diagnostics = obj.value("diagnostics", std::string{});
        return r;
    } catch (const json::exception& e) {
        throw RunError(std::string("malformed run record: ") + e.what());
    } catch (const Error& e) {
        throw RunError(std::string("malformed run record: ") + e.what());
    }
}

namespace {

struct LoadedRecords {
    std::vector<RunRecord> records;
    /// Bytes of records.jsonl that hold complete, parseable lines.
    std::size_t valid_bytes = 0;
    bool torn = false;
};

LoadedRecords read_records(const fs::path& run_dir) {
    LoadedRecords out;
    const fs::path file = run_dir / "records.jsonl";
    std::error_code ec;
    if (!fs::exists(file, ec)) return out;
    const std::string content = detail::read_file(file);
    std::size_t pos = 0, line_no = 0;
    while (pos < content.size()) {
        std::size_t end = content.find('\n', pos);
        const bool last = end == std::string::npos;
        const std::string_view line(content.data() + pos, (last ? content.size() : end) - pos);
        ++line_no;
        if (!detail::trim(line).empty()) {
            try {
                if (last) throw RunError("no terminating newline");
                out.records.push_back(run_record_from_json(line));
            } catch (const RunError& e) {
                // Only the final line may be torn by an interrupted writer.
                bool only_tail = last || detail::trim(std::string_view(content).substr(end + 1)).empty();
                if (!only_tail) {
                    throw RunError(file.string() + " line " + std::to_string(line_no) + ": " + e.what());
                }
                out.torn = true;
                return out;
            }
        }
        if (last) break;
        pos = end + 1;
        out.valid_bytes = pos;
    }
    return out;
}

}  // namespace

std::vector<RunRecord> load_run_records(const fs::path& run_dir) { return read_records(run_dir).records; }

// ---------------------------------------------------------------------------
// Run

namespace {

std::string pair_key(std::string_view task_id, StrategyId s) {
    return std::string(task_id) + '\x1f' + std::string(strategy_name(s));
}

std::string artifact_name(std::string_view task_id, StrategyId s, std::string_view ext) {
    return detail::safe_file_component(task_id) + "." + std::string(strategy_name(s)) + std::string(ext);
}

std::shared_ptr<Backend> make_backend(const RunConfig& config, const RunServices& services,
                                      const PromptLibrary& library) {
    if (services.backend) return services.backend;
    ProviderConfig provider = config.provider_config ? *config.provider_config : builtin_provider(config.provider);
    if (provider.kind == ProviderKind::mock) return std::make_shared<MockBackend>(library);
    std::shared_ptr<Transport> transport = services.transport;
    if (!transport) transport = std::make_shared<HttplibTransport>();
    const char* key = std::getenv(provider.api_key_env.c_str());
    return std::make_shared<HttpBackend>(provider, transport, key ? key : "");
}

PromptLibrary load_library(const RunConfig& config) {
    return config.prompts_dir ? PromptLibrary::load_directory(*config.prompts_dir) : PromptLibrary::builtin();
}

std::unique_ptr<Gateway> make_gateway(const RunConfig& config, const RunServices& services,
                                      const PromptLibrary& library) {
    GatewayOptions options;
    options.mode = config.replay ? GatewayMode::replay : GatewayMode::live;
    options.max_in_flight = static_cast<std::ptrdiff_t>(config.max_concurrent);
    options.jitter_seed = config.seed;
    options.sleep = services.sleep;
    auto store = std::make_shared<ReplayStore>(config.effective_replay_dir());
    return std::make_unique<Gateway>(options, make_backend(config, services, library), store);
}

/// Single writer for an append-only JSON-lines file.
class LineLog {
public:
    explicit LineLog(const fs::path& file) : out_(file, std::ios::app | std::ios::binary) {
        if (!out_) throw RunError("cannot open " + file.string() + " for appending");
    }
    void append(const std::string& line) {
        std::lock_guard lock(mutex_);
        out_ << line << '\n';
        out_.flush();
        if (!out_) throw RunError("write failed");
    }

private:
    std::mutex mutex_;
    std::ofstream out_;
};

struct RunState {
    json meta;
    fs::path file;
};

RunState open_run_dir(const RunConfig& config, const std::string& corpus_hash,
                      std::span<const TaskRecord> tasks) {
    const fs::path dir = config.out_dir;
    std::error_code ec;
    fs::create_directories(dir / "patches", ec);
    if (!ec) fs::create_directories(dir / "quality", ec);
    if (ec) throw RunError("output directory " + dir.string() + " is not writable: " + ec.message());

    RunState state;
    state.file = dir / "config.json";
    const std::string hash = config_hash(config);
    if (fs::exists(state.file)) {
        json previous = json::parse(detail::read_file(state.file));
        if (previous.value("config_hash", std::string{}) != hash) {
            throw RunError("run directory " + dir.string() + " holds a run with a different configuration");
        }
        if (previous.value("corpus_hash", std::string{}) != corpus_hash) {
            throw RunError("run directory " + dir.string() + " was started on a different task sample");
        }
        state.meta = std::move(previous);
        state.meta["config"] = config_object(config);
    } else {
        state.meta["config"] = config_object(config);
        state.meta["config_hash"] = hash;
        state.meta["corpus_hash"] = corpus_hash;
        state.meta["started_at"] = utc_timestamp();
        state.meta["finished_at"] = nullptr;
        detail::write_file_atomic(dir / "tasks.jsonl", serialize_corpus(tasks));
    }
    detail::write_file_atomic(state.file, state.meta.dump(2) + "\n");
    return state;
}

}  // namespace

RunSummary run_experiment(const RunConfig& config, const RunServices& services) {
    config.validate();
    std::vector<TaskRecord> corpus;
    try {
        corpus = load_corpus(config.corpus_path);
    } catch (const CorpusError& e) {
        throw RunError("cannot load corpus " + config.corpus_path.string() + ": " + e.what());
    }
    const std::vector<TaskRecord> tasks = sample_phase(corpus, config.phase, config.seed);
    const PromptLibrary library = load_library(config);
    if (!library.has_few_shot_set(config.few_shot_set)) {
        throw RunError("unknown few-shot set '" + config.few_shot_set + "'");
    }

    // The hash covers the sampled tasks so that a resumed run asks the same questions.
    RunState state = open_run_dir(config, detail::sha256_hex(serialize_corpus(tasks)), tasks);
    const fs::path dir = config.out_dir;

    LoadedRecords loaded = read_records(dir);
    if (loaded.torn) {
        const std::string content = detail::read_file(dir / "records.jsonl");
        detail::write_file_atomic(dir / "records.jsonl", std::string_view(content).substr(0, loaded.valid_bytes));
    }
    std::set<std::string> done;
    for (const auto& r : loaded.records) done.insert(pair_key(r.completion.task_id, r.completion.strategy));

    struct Job {
        const TaskRecord* task;
        StrategyId strategy;
    };
    std::vector<Job> jobs;
    RunSummary summary;
    summary.run_dir = dir;
    for (const auto& task : tasks) {
        for (StrategyId s : config.strategies) {
            ++summary.pairs;
            if (done.count(pair_key(task.task_id, s))) {
                ++summary.skipped;
            } else {
                jobs.push_back({&task, s});
            }
        }
    }

    auto gateway = make_gateway(config, services, library);
    LineLog records(dir / "records.jsonl");
    LineLog errors(dir / "errors.jsonl");
    std::atomic<std::size_t> next{0}, completed{0}, failed{0};

    auto log_error = [&](const Job& job, std::string_view kind, std::string_view message) {
        json e;
        e["task_id"] = job.task->task_id;
        e["strategy"] = std::string(strategy_name(job.strategy));
        e["kind"] = std::string(kind);
        e["message"] = std::string(message);
        e["timestamp"] = utc_timestamp();
        errors.append(e.dump());
        ++failed;
    };

    auto process = [&](const Job& job) {
        const RenderedPrompt prompt = render_prompt(job.strategy, *job.task, config.few_shot_set, library);
        const CompletionRequest request{config.provider, config.model,      prompt.system_text,
                                        prompt.user_text(), config.temperature, config.max_output_tokens};
        RunRecord record;
        record.completion = gateway->complete(request, job.strategy, job.task->task_id);

        ReasoningTrace trace;
        try {
            trace = parse_response(job.strategy, record.completion.response_text);
        } catch (const ResponseParseError& e) {
            trace = e.partial();
            record.status = RecordStatus::parse_error;
            record.diagnostics = e.what();
        }
        const StepValidation validation = validate_step_limits(trace);
        record.steps_compliant = validation.compliant;
        record.step_violations = validation.violations.size();
        record.step_overflows = validation.step_overflows.size();

        const ExtractionResult extraction = extract_patch(record.completion.response_text);
        record.extraction = extraction.source;
        if (extraction.diff) {
            const std::string rel = "patches/" + artifact_name(job.task->task_id, job.strategy, ".patch");
            detail::write_file_atomic(dir / rel, serialize_diff(*extraction.diff));
            record.patch_file = rel;
        } else if (record.status == RecordStatus::ok) {
            record.status = RecordStatus::no_patch;
            record.diagnostics = extraction.diagnostics;
        }
        records.append(run_record_to_json(record));
        ++completed;
    };

    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            const Job& job = jobs[i];
            try {
                process(job);
            } catch (const GatewayError& e) {
                log_error(job, gateway_error_kind_name(e.kind()), e.what());
            } catch (const std::exception& e) {
                log_error(job, "internal", e.what());
            }
        }
    };
    {
        const std::size_t n = std::min(config.max_concurrent, std::max<std::size_t>(jobs.size(), 1));
        std::vector<std::jthread> pool;
        pool.reserve(n);
        for (std::size_t i = 0; i < n; ++i) pool.emplace_back(worker);
    }

    state.meta["finished_at"] = utc_timestamp();
    detail::write_file_atomic(state.file, state.meta.dump(2) + "\n");

    summary.completed = completed;
    summary.failed = failed;
    summary.backend_calls = gateway->backend_calls();
    return summary;
}

// ---------------------------------------------------------------------------
// Score, report, compare

namespace {

struct RunDir {
    json meta;
    RunConfig config;
    std::vector<TaskRecord> tasks;
    std::vector<RunRecord> records;
};

RunDir open_existing(const fs::path& run_dir) {
    const fs::path file = run_dir / "config.json";
    if (!fs::exists(file)) throw RunError(run_dir.string() + " is not a run directory (no config.json)");
    RunDir out;
    try {
        out.meta = json::parse(detail::read_file(file));
    } catch (const json::exception& e) {
        throw RunError("unreadable " + file.string() + ": " + e.what());
    }
    if (!out.meta.contains("config")) throw RunError(file.string() + " lacks a config section");
    out.config = run_config_from_json(out.meta["config"].dump());
    out.config.out_dir = run_dir;
    std::ifstream tasks(run_dir / "tasks.jsonl", std::ios::binary);
    if (!tasks) throw RunError("run directory lacks tasks.jsonl");
    out.tasks = parse_corpus(tasks);
    out.records = load_run_records(run_dir);
    return out;
}

ReportInputs report_inputs(const fs::path& run_dir, StrategyId baseline) {
    RunDir run = open_existing(run_dir);
    if (run.records.empty()) throw RunError("run directory " + run_dir.string() + " holds no records");

    std::map<StrategyId, std::vector<CompletionRecord>> reported, approximated;
    std::map<StrategyId, std::vector<QualityReport>> quality;
    for (const auto& r : run.records) {
        auto& bucket = r.completion.token_source == TokenSource::provider_reported ? reported : approximated;
        bucket[r.completion.strategy].push_back(r.completion);
        if (r.quality_ref) {
            quality[r.completion.strategy].push_back(
                quality_report_from_json(detail::read_file(run_dir / *r.quality_ref)));
        }
    }

    ReportInputs in;
    in.strategies = run.config.strategies;
    in.baseline = baseline;
    for (StrategyId s : in.strategies) {
        if (auto it = reported.find(s); it != reported.end()) in.efficiency.push_back(aggregate(it->second));
        if (auto it = approximated.find(s); it != approximated.end()) {
            in.approximated.push_back(aggregate_approximated(it->second));
        }
        if (auto it = quality.find(s); it != quality.end()) in.quality.push_back(average_quality(it->second));
    }
    auto text = [&](const char* key) {
        const auto& v = run.meta.value(key, json(nullptr));
        return v.is_string() ? v.get<std::string>() : std::string{};
    };
    in.manifest.config_hash = text("config_hash");
    in.manifest.corpus_hash = text("corpus_hash");
    in.manifest.seed = run.config.seed;
    in.manifest.phase = std::string(phase_name(run.config.phase.name));
    in.manifest.started_at = text("started_at");
    in.manifest.finished_at = text("finished_at");
    in.manifest.task_count = run.tasks.size();
    in.manifest.record_count = run.records.size();
    return in;
}

}  // namespace

ScoreSummary score_run(const fs::path& run_dir, std::size_t subset_size, std::uint64_t seed,
                       const RunServices& services) {
    RunDir run = open_existing(run_dir);
    if (subset_size == 0) throw RunError("quality subset size must be positive");
    if (subset_size > run.tasks.size()) {
        throw SampleSizeError("quality subset of " + std::to_string(subset_size) + " exceeds the " +
                              std::to_string(run.tasks.size()) + " tasks of the run");
    }
    ScoreSummary summary;
    std::set<std::string> selected;
    for (std::size_t i : sample_indices(run.tasks.size(), subset_size, seed)) {
        summary.selected_tasks.push_back(run.tasks[i].task_id);
        selected.insert(run.tasks[i].task_id);
    }
    std::map<std::string, const TaskRecord*> by_id;
    for (const auto& t : run.tasks) by_id[t.task_id] = &t;

    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < run.records.size(); ++i) {
        const RunRecord& r = run.records[i];
        if (!selected.count(r.completion.task_id)) continue;
        if (!r.patch_file || r.quality_ref) {
            ++summary.skipped;
            continue;
        }
        todo.push_back(i);
    }
    const bool any_patch = std::any_of(run.records.begin(), run.records.end(), [&](const RunRecord& r) {
        return selected.count(r.completion.task_id) && r.patch_file;
    });
    if (!any_patch) throw RunError("no extractable patches in the selected subset");

    const PromptLibrary library = load_library(run.config);
    auto gateway = make_gateway(run.config, services, library);
    Judge judge(*gateway, run.config.provider, run.config.model);

    std::atomic<std::size_t> next{0};
    std::mutex mutex;
    auto worker = [&] {
        for (std::size_t k = next++; k < todo.size(); k = next++) {
            RunRecord& r = run.records[todo[k]];
            const TaskRecord& task = *by_id.at(r.completion.task_id);
            try {
                const UnifiedDiff diff = parse_unified_diff(detail::read_file(run_dir / *r.patch_file));
                const QualityReport report = judge.assess(task, diff, r.completion.strategy);
                const std::string rel = "quality/" + artifact_name(task.task_id, r.completion.strategy, ".json");
                detail::write_file_atomic(run_dir / rel, quality_report_to_json(report) + "\n");
                std::lock_guard lock(mutex);
                r.quality_ref = rel;
                if (r.status == RecordStatus::judge_error) r.status = RecordStatus::ok;
                ++summary.judged;
            } catch (const std::exception& e) {
                std::lock_guard lock(mutex);
                if (r.status == RecordStatus::ok) r.status = RecordStatus::judge_error;
                r.diagnostics = std::string("judge: ") + e.what();
                ++summary.judge_errors;
            }
        }
    };
    {
        const std::size_t n = std::min(run.config.max_concurrent, std::max<std::size_t>(todo.size(), 1));
        std::vector<std::jthread> pool;
        for (std::size_t i = 0; i < n; ++i) pool.emplace_back(worker);
    }

    std::string content;
    for (const auto& r : run.records) content += run_record_to_json(r) + "\n";
    detail::write_file_atomic(run_dir / "records.jsonl", content);
    return summary;
}

ReportBundle report_run(const fs::path& run_dir) {
    return emit_reports(report_inputs(run_dir, StrategyId::cot), run_dir / "report");
}

ReportBundle compare_run(const fs::path& run_dir, StrategyId baseline) {
    return build_reports(report_inputs(run_dir, baseline));
}

}  // namespace draftbench
