#include "draftbench/quality.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include <json.hpp>

#include "draftbench/llm_gateway.hpp"
#include "draftbench/prompt_strategies.hpp"
#include "text_util.hpp"

namespace draftbench {

using json = nlohmann::ordered_json;

std::string_view dimension_name(Dimension d) {
    switch (d) {
        case Dimension::correctness: return "correctness";
        case Dimension::compatibility: return "compatibility";
        case Dimension::security: return "security";
        case Dimension::performance: return "performance";
        case Dimension::test_coverage: return "test_coverage";
        case Dimension::maintainability: return "maintainability";
    }
    return "unknown";
}

std::optional<Dimension> parse_dimension(std::string_view name) {
    for (Dimension d : kAllDimensions) {
        if (dimension_name(d) == name) return d;
    }
    return std::nullopt;
}

bool audit_weights() { return detail::rubric_weights_sum_to_ten() && detail::overall_weights_sum_to_one(); }

double score_dimension(Dimension d, std::span<const double, 3> subs) {
    const auto& rubric = kRubric[index_of(d)];
    double score = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        if (!(subs[i] >= 0.0 && subs[i] <= 1.0)) {
            throw QualityRangeError(std::string(dimension_name(d)) + "." + std::string(rubric[i].name) +
                                    " = " + std::to_string(subs[i]) + " lies outside [0, 1]");
        }
        score += rubric[i].weight * subs[i];
    }
    return score;
}

DimensionScores score_dimensions(const SubScores& subs) {
    DimensionScores out;
    for (Dimension d : kAllDimensions) out[d] = score_dimension(d, subs.values[index_of(d)]);
    return out;
}

double overall_quality(const DimensionScores& d) {
    double sum = 0.0;
    for (Dimension dim : kAllDimensions) sum += kOverallWeights[index_of(dim)] * d[dim];
    return sum;
}

QualityReport make_quality_report(const SubScores& subs, std::string rationale, std::string task_id,
                                  StrategyId strategy) {
    QualityReport report;
    report.dimensions = score_dimensions(subs);
    report.overall = overall_quality(report.dimensions);
    report.judge_rationale = std::move(rationale);
    report.task_id = std::move(task_id);
    report.strategy = strategy;
    return report;
}

std::string quality_report_to_json(const QualityReport& r) {
    json obj;
    obj["task_id"] = r.task_id;
    obj["strategy"] = std::string(strategy_name(r.strategy));
    json dims = json::object();
    for (Dimension d : kAllDimensions) dims[std::string(dimension_name(d))] = r.dimensions[d];
    obj["dimensions"] = dims;
    obj["overall"] = r.overall;
    obj["judge_rationale"] = r.judge_rationale;
    return obj.dump(2);
}

QualityReport quality_report_from_json(std::string_view text) {
    try {
        const json obj = json::parse(text);
        QualityReport r;
        r.task_id = obj.at("task_id").get<std::string>();
        auto strategy = parse_strategy(obj.at("strategy").get<std::string>());
        if (!strategy) throw Error("unknown strategy in quality report");
        r.strategy = *strategy;
        for (Dimension d : kAllDimensions) {
            r.dimensions[d] = obj.at("dimensions").at(std::string(dimension_name(d))).get<double>();
        }
        r.overall = obj.at("overall").get<double>();
        r.judge_rationale = obj.value("judge_rationale", std::string{});
        return r;
    } catch (const json::exception& e) {
        throw Error(std::string("malformed quality report: ") + e.what());
    }
}

std::string_view rubric_questions() {
    return "1. Correctness: Does it solve the described problem?\n"
           "2. Compatibility: Does it integrate well with existing code?\n"
           "3. Security: Does it introduce vulnerabilities?\n"
           "4. Performance: Does it impact system performance?\n"
           "5. Test Coverage: Does it include necessary tests?\n"
           "6. Maintainability: Does it follow coding standards?\n";
}

std::string judge_system_text() {
    return "You are a meticulous senior code reviewer. You score proposed patches against a fixed rubric and "
           "report the scores in the exact format requested.";
}

namespace {

std::string score_block_template() {
    std::string out;
    for (Dimension d : kAllDimensions) {
        for (const auto& sub : kRubric[index_of(d)]) {
            out += std::string(dimension_name(d)) + "." + std::string(sub.name) + ": <0-1>\n";
        }
    }
    return out;
}

std::string fence_for(std::string_view body) {
    std::size_t longest = 0, run = 0;
    for (char c : body) {
        run = c == '`' ? run + 1 : 0;
        longest = std::max(longest, run);
    }
    return std::string(std::max<std::size_t>(3, longest + 1), '`');
}

}  // namespace

std::string build_judge_prompt(const TaskRecord& task, const UnifiedDiff& patch) {
    const std::string diff = serialize_diff(patch);
    const std::string fence = fence_for(diff);
    std::string out;
    out += "Review the proposed patch for the issue below.\n\n";
    out += render_task_block(task);
    out += "\nProposed patch:\n" + fence + "diff\n" + diff + fence + "\n\n";
    out += "For each patch, evaluate:\n";
    out += rubric_questions();
    out += "\nScore every sub-component below on a 0-1 scale (0 = absent or harmful, 1 = fully satisfied).\n"
           "Reply with exactly these 18 lines, one 'label: value' pair per line, using decimal numbers:\n\n";
    out += score_block_template();
    out += "\nAfter the 18 lines, add a short rationale.\n";
    return out;
}

namespace {

struct ScoreLine {
    Dimension dimension;
    std::size_t sub;
    std::string_view value;
};

std::optional<ScoreLine> match_score_line(std::string_view raw) {
    std::string_view line = detail::trim(raw);
    while (!line.empty() && (line.front() == '-' || line.front() == '*' || line.front() == '`' ||
                             line.front() == ' ')) {
        line.remove_prefix(1);
    }
    std::size_t colon = line.find(':');
    if (colon == std::string_view::npos) return std::nullopt;
    std::string label = detail::to_lower(detail::trim(line.substr(0, colon)));
    std::erase_if(label, [](char c) { return c == '*' || c == '`'; });
    std::size_t dot = label.find('.');
    if (dot == std::string::npos) return std::nullopt;
    auto dim = parse_dimension(std::string_view(label).substr(0, dot));
    if (!dim) return std::nullopt;
    std::string_view sub = std::string_view(label).substr(dot + 1);
    const auto& rubric = kRubric[index_of(*dim)];
    for (std::size_t i = 0; i < 3; ++i) {
        if (rubric[i].name == sub) return ScoreLine{*dim, i, line.substr(colon + 1)};
    }
    return std::nullopt;
}

std::optional<double> parse_value(std::string_view v) {
    v = detail::trim(v);
    while (!v.empty() && (v.front() == '*' || v.front() == '`')) v.remove_prefix(1);
    std::size_t end = 0;
    while (end < v.size() && (std::isdigit(static_cast<unsigned char>(v[end])) || v[end] == '.' ||
                              v[end] == '-' || v[end] == '+' || v[end] == 'e' || v[end] == 'E')) {
        ++end;
    }
    double out = 0.0;
    if (end == 0) return std::nullopt;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + end, out);
    if (ec != std::errc{} || ptr != v.data() + end) return std::nullopt;
    return out;
}

}  // namespace

SubScores parse_judge_response(std::string_view text) {
    SubScores scores;
    std::array<std::array<bool, 3>, 6> seen{};
    for (std::string_view line : detail::split_lines(text)) {
        auto m = match_score_line(line);
        if (!m) continue;
        const std::string label =
            std::string(dimension_name(m->dimension)) + "." + std::string(kRubric[index_of(m->dimension)][m->sub].name);
        auto& flag = seen[index_of(m->dimension)][m->sub];
        if (flag) throw JudgeParseError("duplicate label '" + label + "'");
        flag = true;
        auto value = parse_value(m->value);
        if (!value) throw JudgeParseError("invalid value for '" + label + "'");
        if (!(*value >= 0.0 && *value <= 1.0)) {
            throw JudgeParseError("value " + std::string(detail::trim(m->value)) + " for '" + label +
                                  "' lies outside [0, 1]");
        }
        scores.values[index_of(m->dimension)][m->sub] = *value;
    }
    std::string missing;
    for (Dimension d : kAllDimensions) {
        for (std::size_t i = 0; i < 3; ++i) {
            if (!seen[index_of(d)][i]) {
                missing += (missing.empty() ? "" : ", ") + std::string(dimension_name(d)) + "." +
                           std::string(kRubric[index_of(d)][i].name);
            }
        }
    }
    if (!missing.empty()) throw JudgeParseError("missing label(s): " + missing);
    return scores;
}

std::string extract_rationale(std::string_view text) {
    std::vector<std::string> kept;
    for (std::string_view line : detail::split_lines(text)) {
        if (match_score_line(line)) continue;
        kept.emplace_back(line);
    }
    return std::string(detail::trim(detail::join_lines(kept)));
}

Judge::Judge(Gateway& gateway, std::string provider_id, std::string model_id, double temperature)
    : gateway_(gateway), provider_id_(std::move(provider_id)), model_id_(std::move(model_id)),
      temperature_(temperature) {}

QualityReport Judge::assess(const TaskRecord& task, const UnifiedDiff& patch, StrategyId strategy) {
    if (patch.empty()) throw Error("cannot judge an empty patch");
    CompletionRequest request{provider_id_, model_id_, judge_system_text(), build_judge_prompt(task, patch),
                              temperature_, 1024};
    CompletionRecord reply = gateway_.complete(request, strategy, task.task_id);
    SubScores subs;
    try {
        subs = parse_judge_response(reply.response_text);
    } catch (const JudgeParseError& first) {
        request.user_text += "\nYour previous reply could not be read (" + std::string(first.what()) +
                             "). Reply again. Start with the 18 'label: value' lines exactly as listed, "
                             "each value a decimal number between 0 and 1.\n";
        reply = gateway_.complete(request, strategy, task.task_id);
        try {
            subs = parse_judge_response(reply.response_text);
        } catch (const JudgeParseError& second) {
            throw JudgeParseError(std::string("judge output unreadable after one re-ask: ") + second.what());
        }
    }
    return make_quality_report(subs, extract_rationale(reply.response_text), task.task_id, strategy);
}

}  // namespace draftbench
