#include "draftbench/prompt_strategies.hpp"

#include <algorithm>
#include <cctype>

#include "text_util.hpp"

namespace draftbench {

namespace {

SectionSpec draft(std::string label, std::size_t max_steps, std::vector<std::string> aliases = {}) {
    return {std::move(label), std::move(aliases), max_steps, kDraftWordLimit};
}

}  // namespace

SectionSchema section_schema(StrategyId strategy) {
    switch (strategy) {
        case StrategyId::standard:
            return {strategy, {}};
        case StrategyId::cot:
            return {strategy, {{"Reasoning", {"Thinking steps", "Reasoning steps"}, std::nullopt, std::nullopt}}};
        case StrategyId::baseline_cod:
            return {strategy, {draft("Thinking steps", 5, {"Drafting steps", "Draft steps"})}};
        case StrategyId::structured_cod:
            return {strategy,
                    {draft("Problem understanding", 1), draft("File location", 1), draft("Problem diagnosis", 1),
                     draft("Modification strategy", 1)}};
        case StrategyId::hierarchical_cod:
            return {strategy,
                    {draft("L1 (Strategy Layer)", 1, {"L1", "Strategy Layer"}),
                     draft("L2 (Tactical Layer)", 2, {"L2", "Tactical Layer"}),
                     draft("L3 (Operational Layer)", 3, {"L3", "Operational Layer"})}};
        case StrategyId::iterative_cod:
            return {strategy, {draft("Initial draft", 3), draft("Assessment", 1), draft("Refinement", 2)}};
        case StrategyId::code_specific_cod:
            return {strategy,
                    {draft("Dependencies", 1), draft("Interfaces", 1), draft("Implementation", 1),
                     draft("Testing", 1)}};
    }
    return {strategy, {}};
}

std::string RenderedPrompt::user_text() const {
    if (few_shot_block.empty()) return task_block;
    return few_shot_block + "\n\nNow resolve the following issue in the same format.\n\n" + task_block;
}

std::string render_task_block(const TaskRecord& task) {
    std::string out;
    out += "Repository: " + task.repo + "\n\n";
    out += "Problem statement:\n" + task.problem_statement + "\n";
    if (!task.code_context.empty()) {
        out += "\nCode context:\n";
        for (const auto& snippet : task.code_context) {
            // Fence longer than any backtick run inside the snippet.
            std::size_t longest = 0, run = 0;
            for (char c : snippet.snippet) {
                run = c == '`' ? run + 1 : 0;
                longest = std::max(longest, run);
            }
            std::string fence(std::max<std::size_t>(3, longest + 1), '`');
            out += "File: " + snippet.file_path + "\n" + fence + "\n" + snippet.snippet;
            if (!snippet.snippet.empty() && snippet.snippet.back() != '\n') out += '\n';
            out += fence + "\n";
        }
    }
    return out;
}

RenderedPrompt render_prompt(StrategyId strategy, const TaskRecord& task, std::string_view few_shot_set,
                             const PromptLibrary& library) {
    return {library.system_text(strategy), library.few_shot(few_shot_set, strategy), render_task_block(task),
            strategy};
}

ResponseParseError::ResponseParseError(const std::string& what, ReasoningTrace partial)
    : Error(what), partial_(std::move(partial)) {}

namespace {

// Drops markdown emphasis/heading marks, bullets and "1." / "1)" numbering.
std::string_view strip_line_decoration(std::string_view line) {
    line = detail::trim(line);
    for (;;) {
        std::string_view before = line;
        while (!line.empty() && (line.front() == '#' || line.front() == '*' || line.front() == '_' ||
                                 line.front() == '>')) {
            line.remove_prefix(1);
        }
        line = detail::trim_left(line);
        if (line.starts_with("- ") || line == "-" || line.starts_with("+ ")) {
            line.remove_prefix(1);
        } else if (line.starts_with("\xE2\x80\xA2")) {  // bullet
            line.remove_prefix(3);
        } else {
            std::size_t digits = 0;
            while (digits < line.size() && std::isdigit(static_cast<unsigned char>(line[digits]))) ++digits;
            if (digits > 0 && digits < line.size() && (line[digits] == '.' || line[digits] == ')') &&
                (digits + 1 == line.size() || line[digits + 1] == ' ' || line[digits + 1] == '\t')) {
                line.remove_prefix(digits + 1);
            }
        }
        line = detail::trim_left(line);
        if (line == before) break;
    }
    return line;
}

std::string_view strip_emphasis(std::string_view s) {
    s = detail::trim(s);
    while (!s.empty() && (s.front() == '*' || s.front() == '_')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == '*' || s.back() == '_')) s.remove_suffix(1);
    return detail::trim(s);
}

// If line opens with `name`, an optional "(...)" and a colon, returns the
// text after the colon.
std::optional<std::string_view> match_header(std::string_view line, std::string_view name) {
    if (!detail::istarts_with(line, name)) return std::nullopt;
    std::string_view rest = line.substr(name.size());
    auto skip_marks = [&] {
        while (!rest.empty() && (rest.front() == ' ' || rest.front() == '\t' || rest.front() == '*' ||
                                 rest.front() == '_')) {
            rest.remove_prefix(1);
        }
    };
    skip_marks();
    if (!rest.empty() && rest.front() == '(') {
        std::size_t close = rest.find(')');
        if (close == std::string_view::npos) return std::nullopt;
        rest.remove_prefix(close + 1);
        skip_marks();
    }
    if (rest.empty() || rest.front() != ':') return std::nullopt;
    rest.remove_prefix(1);
    return strip_emphasis(rest);
}

struct HeaderMatch {
    std::size_t section;
    std::string_view inline_text;
};

std::optional<HeaderMatch> match_section(std::string_view raw_line, const SectionSchema& schema) {
    std::string_view line = strip_line_decoration(raw_line);
    for (std::size_t i = 0; i < schema.sections.size(); ++i) {
        const auto& spec = schema.sections[i];
        if (auto m = match_header(line, spec.label)) return HeaderMatch{i, *m};
        for (const auto& alias : spec.aliases) {
            if (auto m = match_header(line, alias)) return HeaderMatch{i, *m};
        }
    }
    return std::nullopt;
}

bool is_fence(std::string_view line) {
    line = detail::trim(line);
    return line.starts_with("```") || line.starts_with("~~~");
}

struct MarkerPos {
    std::size_t line_index;
    std::size_t content_offset;  // into the full text
};

std::optional<MarkerPos> find_last_marker(std::string_view text) {
    std::optional<MarkerPos> found;
    std::size_t pos = 0, index = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        std::string_view stripped = detail::trim_left(line);
        while (!stripped.empty() && (stripped.front() == '#' || stripped.front() == '*' || stripped.front() == '_')) {
            stripped.remove_prefix(1);
        }
        stripped = detail::trim_left(stripped);
        if (auto rest = match_header(stripped, "Solution")) {
            // Offset of the text after the colon on this line.
            std::size_t colon = line.find(':');
            found = MarkerPos{index, pos + colon + 1};
        }
        if (end == text.size()) break;
        pos = end + 1;
        ++index;
    }
    return found;
}

}  // namespace

std::optional<std::string_view> solution_section(std::string_view text) {
    auto marker = find_last_marker(text);
    if (!marker) return std::nullopt;
    std::string_view rest = text.substr(marker->content_offset);
    // Drop emphasis closing the marker, e.g. "**Solution:**".
    std::string_view head = detail::trim_left(rest);
    while (!head.empty() && (head.front() == '*' || head.front() == '_')) head.remove_prefix(1);
    return detail::trim(head);
}

ReasoningTrace parse_response(StrategyId strategy, std::string_view raw_text) {
    const SectionSchema schema = section_schema(strategy);
    ReasoningTrace trace;
    trace.strategy = strategy;
    for (const auto& spec : schema.sections) trace.sections.push_back({spec.label, {}});

    if (detail::trim(raw_text).empty()) throw ResponseParseError("response is empty", trace);

    auto marker = find_last_marker(raw_text);
    std::vector<std::string_view> lines = detail::split_lines(raw_text);
    std::size_t body_end = marker ? marker->line_index : lines.size();
    if (marker) {
        std::string_view solution = *solution_section(raw_text);
        trace.solution_text = std::string(solution);
        trace.solution_empty = solution.empty();
    }

    std::vector<bool> seen(schema.sections.size(), false);
    std::optional<std::size_t> current;
    std::vector<std::string> leading;
    bool in_fence = false;
    for (std::size_t i = 0; i < body_end; ++i) {
        std::string_view line = lines[i];
        if (is_fence(line)) in_fence = !in_fence;
        if (!in_fence) {
            if (auto header = match_section(line, schema)) {
                current = header->section;
                seen[*current] = true;
                if (!header->inline_text.empty()) {
                    trace.sections[*current].steps.emplace_back(header->inline_text);
                }
                continue;
            }
        }
        if (detail::trim(line).empty()) continue;
        if (current && !in_fence && !is_fence(line)) {
            std::string_view step = strip_emphasis(strip_line_decoration(line));
            if (!step.empty()) trace.sections[*current].steps.emplace_back(step);
        } else {
            leading.emplace_back(line);
        }
    }

    // A lone section may be written without its header.
    if (schema.sections.size() == 1 && !seen[0]) {
        for (const auto& line : leading) {
            if (is_fence(line)) continue;
            std::string_view step = strip_emphasis(strip_line_decoration(line));
            if (!step.empty()) trace.sections[0].steps.emplace_back(step);
        }
        leading.clear();
        seen[0] = !trace.sections[0].steps.empty();
    }
    trace.diagnostics = detail::join_lines(leading);

    std::vector<std::string> missing;
    for (std::size_t i = 0; i < seen.size(); ++i) {
        if (!seen[i]) missing.push_back(schema.sections[i].label);
    }
    std::string problems;
    if (!missing.empty()) {
        problems = "missing section";
        problems += missing.size() > 1 ? "s " : " ";
        for (std::size_t i = 0; i < missing.size(); ++i) {
            problems += (i ? ", '" : "'") + missing[i] + ":'";
        }
    }
    if (!marker) {
        if (!problems.empty()) problems += "; ";
        problems += "no 'Solution:' marker";
    }
    if (!problems.empty()) {
        throw ResponseParseError(std::string(strategy_name(strategy)) + " response: " + problems, trace);
    }
    return trace;
}

std::size_t count_words(std::string_view step) {
    auto is_ws = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; };
    auto is_wordy = [](char c) {
        auto u = static_cast<unsigned char>(c);
        return std::isalnum(u) || u >= 0x80;
    };
    std::size_t words = 0;
    std::size_t i = 0;
    while (i < step.size()) {
        while (i < step.size() && is_ws(step[i])) ++i;
        if (i >= step.size()) break;
        bool counts = false;
        while (i < step.size() && !is_ws(step[i])) {
            if (step[i] == '`') {
                std::size_t close = step.find('`', i + 1);
                if (close != std::string_view::npos) {
                    if (close > i + 1) counts = true;
                    i = close + 1;
                    continue;
                }
            }
            counts = counts || is_wordy(step[i]);
            ++i;
        }
        if (counts) ++words;
    }
    return words;
}

StepValidation validate_step_limits(const ReasoningTrace& trace) {
    const SectionSchema schema = section_schema(trace.strategy);
    StepValidation result;
    for (const auto& section : trace.sections) {
        auto spec = std::find_if(schema.sections.begin(), schema.sections.end(),
                                 [&](const SectionSpec& s) { return s.label == section.label; });
        std::vector<std::size_t> counts;
        counts.reserve(section.steps.size());
        for (std::size_t i = 0; i < section.steps.size(); ++i) {
            std::size_t n = count_words(section.steps[i]);
            counts.push_back(n);
            if (spec != schema.sections.end() && spec->words_per_step_limit && n > *spec->words_per_step_limit) {
                result.violations.push_back({section.label, i, n});
            }
        }
        if (spec != schema.sections.end() && spec->max_steps && section.steps.size() > *spec->max_steps) {
            result.step_overflows.push_back({section.label, section.steps.size(), *spec->max_steps});
        }
        result.word_counts.push_back(std::move(counts));
    }
    result.compliant = result.violations.empty();
    return result;
}

}  // namespace draftbench
