#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "draftbench/error.hpp"

namespace draftbench {

enum class TaskCategory { bug_fix, feature, performance, other };

std::string_view category_name(TaskCategory c);
std::optional<TaskCategory> parse_category(std::string_view name);

struct CodeSnippet {
    std::string file_path;
    std::string snippet;

    bool operator==(const CodeSnippet&) const = default;
};

/// One code-fix task. gold_patch is never shown to the model.
struct TaskRecord {
    std::string task_id;
    std::string repo;
    std::string problem_statement;
    std::vector<CodeSnippet> code_context;
    std::optional<std::string> gold_patch;
    TaskCategory category = TaskCategory::other;
    std::string language_tag;

    bool operator==(const TaskRecord&) const = default;
};

/// Raised for malformed or inconsistent corpus input. line() is 1-based,
/// or 0 when the error is not tied to a single line.
class CorpusError : public Error {
public:
    CorpusError(const std::string& what, std::size_t line = 0);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Raised when a phase asks for more tasks than the corpus holds.
class SampleSizeError : public Error {
public:
    using Error::Error;
};

/// Parses one JSON record. Throws CorpusError (line 0) on schema violations.
TaskRecord parse_task(std::string_view json_line);
std::string serialize_task(const TaskRecord& task);

/// Line-delimited JSON, one task per line. Blank lines are skipped.
std::vector<TaskRecord> parse_corpus(std::istream& in);
std::vector<TaskRecord> load_corpus(const std::filesystem::path& path);
std::string serialize_corpus(std::span<const TaskRecord> corpus);

enum class PhaseName { small, medium, full };

struct Phase {
    PhaseName name = PhaseName::full;
    /// nullopt selects every task.
    std::optional<std::size_t> sample_size;

    static Phase small() { return {PhaseName::small, 10}; }
    static Phase medium() { return {PhaseName::medium, 50}; }
    static Phase full() { return {PhaseName::full, std::nullopt}; }
    static Phase from_name(std::string_view name);
};

std::string_view phase_name(PhaseName p);

/// k distinct indices drawn uniformly from [0, n), returned ascending.
/// Bit-for-bit reproducible across platforms for a given seed.
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, std::uint64_t seed);

/// Seeded uniform sample without replacement, kept in corpus order.
std::vector<TaskRecord> sample_phase(std::span<const TaskRecord> corpus, const Phase& phase,
                                     std::uint64_t seed);

}  // namespace draftbench
