#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "draftbench/experiment.hpp"
#include "draftbench/metrics.hpp"
#include "draftbench/patch.hpp"
#include "draftbench/prompt_strategies.hpp"
#include "draftbench/quality.hpp"
#include "draftbench/report.hpp"

namespace py = pybind11;
namespace db = draftbench;

namespace {

db::StrategyId strategy_arg(const std::string& name) {
    auto id = db::parse_strategy(name);
    if (!id) throw py::value_error("unknown strategy '" + name + "'");
    return *id;
}

py::dict trace_dict(const db::ReasoningTrace& t) {
    py::dict sections;
    for (const auto& s : t.sections) sections[py::str(s.label)] = s.steps;
    py::dict out;
    out["strategy"] = std::string(db::strategy_name(t.strategy));
    out["sections"] = sections;
    out["solution"] = t.solution_text;
    out["diagnostics"] = t.diagnostics;
    return out;
}

db::DimensionScores dimensions_arg(const std::map<std::string, double>& values) {
    db::DimensionScores d;
    for (db::Dimension dim : db::kAllDimensions) {
        auto it = values.find(std::string(db::dimension_name(dim)));
        if (it == values.end()) throw py::key_error(std::string(db::dimension_name(dim)));
        d[dim] = it->second;
    }
    return d;
}

py::dict bundle_dict(const db::ReportBundle& b) {
    py::dict out;
    out["efficiency_csv"] = b.efficiency_csv;
    out["quality_csv"] = b.quality_csv;
    out["combined_csv"] = b.combined_csv;
    out["radar_jsonl"] = b.radar_jsonl;
    out["manifest"] = b.manifest;
    out["formatted"] = b.formatted;
    out["warnings"] = b.warnings;
    return out;
}

}  // namespace

PYBIND11_MODULE(_draftbench, m) {
    m.doc() = "Chain-of-Draft benchmark harness";

    static py::exception<db::Error> error(m, "Error");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const db::Error& e) {
            py::set_error(error, e.what());
        }
    });

    m.def("strategies", [] {
        std::vector<std::string> out;
        for (auto s : db::kAllStrategies) out.emplace_back(db::strategy_name(s));
        return out;
    });
    m.def("display_name", [](const std::string& s) { return std::string(db::strategy_display_name(strategy_arg(s))); });

    m.def("render_prompt",
          [](const std::string& strategy, const std::string& task_json, const std::string& few_shot_set) {
              const auto p = db::render_prompt(strategy_arg(strategy), db::parse_task(task_json), few_shot_set);
              return py::make_tuple(p.system_text, p.user_text());
          },
          py::arg("strategy"), py::arg("task_json"), py::arg("few_shot_set") = std::string(db::kDefaultFewShotSet),
          "Returns (system_text, user_text) for a task given as one JSON corpus line.");

    m.def("parse_response", [](const std::string& strategy, const std::string& text) {
        return trace_dict(db::parse_response(strategy_arg(strategy), text));
    });

    m.def("validate_steps", [](const std::string& strategy, const std::string& text) {
        const auto v = db::validate_step_limits(db::parse_response(strategy_arg(strategy), text));
        py::list violations;
        for (const auto& x : v.violations) violations.append(py::make_tuple(x.section, x.step_index, x.word_count));
        py::dict out;
        out["compliant"] = v.compliant;
        out["violations"] = violations;
        out["word_counts"] = v.word_counts;
        return out;
    });

    m.def("count_words", [](const std::string& s) { return db::count_words(s); });

    m.def("extract_patch", [](const std::string& text) {
        const auto r = db::extract_patch(text);
        std::optional<std::string> diff;
        if (r.diff) diff = db::serialize_diff(*r.diff);
        return py::make_tuple(std::string(db::extraction_source_name(r.source)), diff);
    }, "Returns (source, canonical diff text or None).");

    m.def("normalize_diff", [](const std::string& text) { return db::serialize_diff(db::parse_unified_diff(text)); });

    m.def("apply_patch", [](const std::string& diff, const std::map<std::string, std::string>& files) {
        db::FileMap in(files.begin(), files.end());
        const db::FileMap out = db::apply_patch(db::parse_unified_diff(diff), in);
        return std::map<std::string, std::string>(out.begin(), out.end());
    });

    m.def("token_ratio", &db::token_ratio);
    m.def("token_savings", &db::token_savings);
    m.def("latency_ratio", &db::latency_ratio);
    m.def("quality_retention", &db::quality_retention);
    m.def("quality_efficiency_index", &db::quality_efficiency_index);

    m.def("pearson", [](const std::vector<double>& xs, const std::vector<double>& ys) {
        return db::pearson(xs, ys).r;
    });

    m.def("overall_quality", [](const std::map<std::string, double>& dims) {
        return db::overall_quality(dimensions_arg(dims));
    }, "Weighted overall score from the six dimension scores (0-10).");

    m.def("score_judge_response", [](const std::string& text) {
        const auto d = db::score_dimensions(db::parse_judge_response(text));
        std::map<std::string, double> out;
        for (auto dim : db::kAllDimensions) out[std::string(db::dimension_name(dim))] = d[dim];
        out["overall"] = db::overall_quality(d);
        return out;
    });

    m.def("minmax_normalize", [](const std::vector<std::pair<std::string, double>>& values, bool invert) {
        std::vector<db::StrategyValue> in;
        for (const auto& [name, v] : values) in.emplace_back(strategy_arg(name), v);
        const auto s = db::minmax_normalize("series", in, invert);
        std::vector<std::pair<std::string, double>> out;
        for (const auto& [id, v] : s.values) out.emplace_back(std::string(db::strategy_name(id)), v);
        return out;
    }, py::arg("values"), py::arg("invert") = false);

    m.def("run", [](const std::string& config_json) {
        const db::RunConfig config = db::run_config_from_json(config_json);
        db::RunSummary s;
        {
            py::gil_scoped_release release;
            s = db::run_experiment(config);
        }
        py::dict out;
        out["run_dir"] = s.run_dir.string();
        out["pairs"] = s.pairs;
        out["skipped"] = s.skipped;
        out["completed"] = s.completed;
        out["failed"] = s.failed;
        out["backend_calls"] = s.backend_calls;
        return out;
    }, "Runs an experiment from a JSON config object.");

    m.def("score", [](const std::filesystem::path& run_dir, std::size_t subset, std::uint64_t seed) {
        db::ScoreSummary s;
        {
            py::gil_scoped_release release;
            s = db::score_run(run_dir, subset, seed);
        }
        py::dict out;
        out["selected_tasks"] = s.selected_tasks;
        out["judged"] = s.judged;
        out["judge_errors"] = s.judge_errors;
        return out;
    }, py::arg("run_dir"), py::arg("subset"), py::arg("seed") = 0);

    m.def("report", [](const std::filesystem::path& run_dir) { return bundle_dict(db::report_run(run_dir)); });
    m.def("compare", [](const std::filesystem::path& run_dir, const std::string& baseline) {
        return bundle_dict(db::compare_run(run_dir, strategy_arg(baseline)));
    });
}
