#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "draftbench/error.hpp"
#include "draftbench/strategy.hpp"
#include "draftbench/task_corpus.hpp"

namespace draftbench {

/// Word limit every draft step must respect.
inline constexpr std::size_t kDraftWordLimit = 5;

struct SectionSpec {
    std::string label;
    /// Short forms accepted when parsing, e.g. "L1" for "L1 (Strategy Layer)".
    std::vector<std::string> aliases;
    /// nullopt = unbounded.
    std::optional<std::size_t> max_steps;
    std::optional<std::size_t> words_per_step_limit;
};

struct SectionSchema {
    StrategyId strategy;
    std::vector<SectionSpec> sections;
};

SectionSchema section_schema(StrategyId strategy);

class TemplateError : public Error {
public:
    using Error::Error;
};

inline constexpr std::string_view kDefaultFewShotSet = "django_admin";

/// System prompts and named few-shot sets, keyed by strategy.
///
/// Directory layout for load_directory():
///   system/<strategy>.txt
///   few_shot/<set name>/<strategy>.txt
class PromptLibrary {
public:
    /// The assets shipped with the library.
    static const PromptLibrary& builtin();
    /// Starts from the builtin assets and overrides whatever the directory provides.
    static PromptLibrary load_directory(const std::filesystem::path& dir);

    const std::string& system_text(StrategyId strategy) const;
    const std::string& few_shot(std::string_view set_name, StrategyId strategy) const;
    bool has_few_shot_set(std::string_view set_name) const;
    std::vector<std::string> few_shot_sets() const;

    void set_system_text(StrategyId strategy, std::string text);
    void set_few_shot(std::string set_name, StrategyId strategy, std::string text);

private:
    std::map<StrategyId, std::string> system_;
    std::map<std::string, std::map<StrategyId, std::string>, std::less<>> few_shot_;
};

struct RenderedPrompt {
    std::string system_text;
    std::string few_shot_block;
    std::string task_block;
    StrategyId strategy;

    /// The user message sent to the model: few-shot block, then the task.
    std::string user_text() const;
};

/// Task description shared verbatim by every strategy.
std::string render_task_block(const TaskRecord& task);

RenderedPrompt render_prompt(StrategyId strategy, const TaskRecord& task,
                             std::string_view few_shot_set = kDefaultFewShotSet,
                             const PromptLibrary& library = PromptLibrary::builtin());

struct TraceSection {
    std::string label;
    std::vector<std::string> steps;

    bool operator==(const TraceSection&) const = default;
};

struct ReasoningTrace {
    StrategyId strategy = StrategyId::standard;
    /// In schema order.
    std::vector<TraceSection> sections;
    std::string solution_text;
    bool solution_empty = true;
    /// Text that preceded the first recognised section header.
    std::string diagnostics;
};

/// Raised when a response does not follow its strategy's structure.
/// partial() holds whatever was recovered before the failure.
class ResponseParseError : public Error {
public:
    ResponseParseError(const std::string& what, ReasoningTrace partial);
    const ReasoningTrace& partial() const noexcept { return partial_; }

private:
    ReasoningTrace partial_;
};

/// Content following the last line-leading "Solution:" marker, if any.
std::optional<std::string_view> solution_section(std::string_view text);

ReasoningTrace parse_response(StrategyId strategy, std::string_view raw_text);

/// Whitespace-delimited words with punctuation stripped. Hyphenated tokens
/// and `inline code` spans count as one word.
std::size_t count_words(std::string_view step);

struct StepViolation {
    std::string section;
    std::size_t step_index;  // 0-based
    std::size_t word_count;

    bool operator==(const StepViolation&) const = default;
};

struct StepCountOverflow {
    std::string section;
    std::size_t steps;
    std::size_t max_steps;

    bool operator==(const StepCountOverflow&) const = default;
};

struct StepValidation {
    /// word_counts[section][step]
    std::vector<std::vector<std::size_t>> word_counts;
    std::vector<StepViolation> violations;
    /// Sections holding more steps than the template shows. Informational only.
    std::vector<StepCountOverflow> step_overflows;
    bool compliant = true;
};

StepValidation validate_step_limits(const ReasoningTrace& trace);

}  // namespace draftbench
