// draftbench: run, score, report and compare prompting-strategy benchmarks.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "draftbench/experiment.hpp"
#include "draftbench/quality.hpp"

namespace {

namespace db = draftbench;

struct RunFlags {
    std::string config_file;
    std::string corpus;
    std::string strategies = "all";
    std::string phase = "small";
    std::uint64_t seed = 0;
    std::string provider = "mock";
    std::string model = "mock-1";
    double temperature = db::kDefaultTemperature;
    std::size_t max_output_tokens = 4096;
    bool replay = false;
    std::string replay_dir;
    std::size_t max_concurrent = 4;
    std::optional<std::size_t> quality_subset;
    std::string out;
    std::string few_shot_set{db::kDefaultFewShotSet};
    std::string prompts_dir;
};

db::RunConfig config_from(const RunFlags& f) {
    db::RunConfig c;
    c.corpus_path = f.corpus;
    c.strategies = db::parse_strategy_list(f.strategies);
    c.phase = db::Phase::from_name(f.phase);
    c.seed = f.seed;
    c.provider = f.provider;
    c.model = f.model;
    c.temperature = f.temperature;
    c.max_output_tokens = f.max_output_tokens;
    c.replay = f.replay;
    if (!f.replay_dir.empty()) c.replay_dir = f.replay_dir;
    c.max_concurrent = f.max_concurrent;
    c.quality_subset = f.quality_subset;
    c.out_dir = f.out;
    c.few_shot_set = f.few_shot_set;
    if (!f.prompts_dir.empty()) c.prompts_dir = f.prompts_dir;
    // The config file wins over flags.
    if (!f.config_file.empty()) {
        std::ifstream in(f.config_file, std::ios::binary);
        if (!in) throw db::RunError("cannot read config file " + f.config_file);
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        c = db::run_config_from_json(text, c);
    }
    return c;
}

void print_bundle(const db::ReportBundle& bundle) {
    std::cout << bundle.formatted;
    for (const auto& w : bundle.warnings) std::cerr << "warning: " << w << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    if (!db::audit_weights()) {
        std::cerr << "draftbench: rubric weights are inconsistent\n";
        return 3;
    }

    CLI::App app{"Benchmark harness for Chain-of-Draft prompting strategies on code-fix tasks"};
    app.require_subcommand(1);

    RunFlags rf;
    auto* run = app.add_subcommand("run", "Render, complete, parse and extract every (task, strategy) pair");
    run->add_option("--config", rf.config_file, "JSON config file; its keys override flags");
    run->add_option("--corpus", rf.corpus, "Line-delimited JSON task corpus");
    run->add_option("--strategies", rf.strategies, "Comma-separated strategy names, or 'all'");
    run->add_option("--phase", rf.phase, "small (10), medium (50) or full")
        ->check(CLI::IsMember({"small", "medium", "full"}));
    run->add_option("--seed", rf.seed, "Sampling seed");
    run->add_option("--provider", rf.provider, "mock, openai, anthropic, or an id defined in --config");
    run->add_option("--model", rf.model, "Model identifier sent to the provider");
    run->add_option("--temperature", rf.temperature, "Sampling temperature")->check(CLI::Range(0.0, 2.0));
    run->add_option("--max-output-tokens", rf.max_output_tokens, "Completion token budget");
    run->add_flag("--replay", rf.replay, "Serve completions from the replay store only");
    run->add_option("--replay-dir", rf.replay_dir, "Replay store directory (default <out>/replay)");
    run->add_option("--max-concurrent", rf.max_concurrent, "Requests in flight at once")->check(CLI::PositiveNumber);
    run->add_option("--quality-subset", rf.quality_subset, "Judge this many tasks after the run");
    run->add_option("--out", rf.out, "Run directory");
    run->add_option("--few-shot-set", rf.few_shot_set, "Named few-shot example set");
    run->add_option("--prompts", rf.prompts_dir, "Directory overriding the builtin prompts");

    std::string run_dir;
    std::size_t subset = 50;
    std::uint64_t score_seed = 0;
    auto* score = app.add_subcommand("score", "Judge a seeded, strategy-paired subset of a run");
    score->add_option("--run", run_dir, "Run directory")->required();
    score->add_option("--subset", subset, "Number of tasks to judge")->check(CLI::PositiveNumber);
    score->add_option("--seed", score_seed, "Subset seed");

    auto* report = app.add_subcommand("report", "Aggregate a run and write <run>/report/");
    report->add_option("--run", run_dir, "Run directory")->required();

    std::string baseline = "cot";
    auto* compare = app.add_subcommand("compare", "Print the tables against another baseline");
    compare->add_option("--run", run_dir, "Run directory")->required();
    compare->add_option("--baseline", baseline, "Baseline strategy");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            const db::RunConfig config = config_from(rf);
            const db::RunSummary s = db::run_experiment(config);
            std::cerr << "pairs " << s.pairs << ", skipped " << s.skipped << ", completed " << s.completed
                      << ", failed " << s.failed << ", backend calls " << s.backend_calls << "\n";
            if (s.failed) std::cerr << "see " << (s.run_dir / "errors.jsonl").string() << "\n";
            if (config.quality_subset) {
                const db::ScoreSummary q = db::score_run(s.run_dir, *config.quality_subset, config.seed);
                std::cerr << "judged " << q.judged << ", judge errors " << q.judge_errors << "\n";
            }
            print_bundle(db::report_run(s.run_dir));
        } else if (score->parsed()) {
            const db::ScoreSummary q = db::score_run(run_dir, subset, score_seed);
            std::cerr << "selected " << q.selected_tasks.size() << " tasks, judged " << q.judged << ", skipped "
                      << q.skipped << ", judge errors " << q.judge_errors << "\n";
        } else if (report->parsed()) {
            print_bundle(db::report_run(run_dir));
        } else if (compare->parsed()) {
            auto id = db::parse_strategy(baseline);
            if (!id) throw db::Error("unknown baseline strategy '" + baseline + "'");
            print_bundle(db::compare_run(run_dir, *id));
        }
    } catch (const std::exception& e) {
        std::cerr << "draftbench: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
