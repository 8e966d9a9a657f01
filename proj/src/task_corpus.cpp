#include "draftbench/task_corpus.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <numeric>
#include <unordered_set>

#include <json.hpp>

#include "text_util.hpp"

namespace draftbench {

using json = nlohmann::ordered_json;

CorpusError::CorpusError(const std::string& what, std::size_t line)
    : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

std::string_view category_name(TaskCategory c) {
    switch (c) {
        case TaskCategory::bug_fix: return "bug_fix";
        case TaskCategory::feature: return "feature";
        case TaskCategory::performance: return "performance";
        case TaskCategory::other: return "other";
    }
    return "other";
}

std::optional<TaskCategory> parse_category(std::string_view name) {
    for (auto c : {TaskCategory::bug_fix, TaskCategory::feature, TaskCategory::performance, TaskCategory::other}) {
        if (category_name(c) == name) return c;
    }
    return std::nullopt;
}

namespace {

std::string required_string(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) throw CorpusError(std::string("missing field '") + key + "'");
    if (!it->is_string()) throw CorpusError(std::string("field '") + key + "' must be a string");
    return it->get<std::string>();
}

std::string optional_string(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return {};
    if (!it->is_string()) throw CorpusError(std::string("field '") + key + "' must be a string");
    return it->get<std::string>();
}

}  // namespace

TaskRecord parse_task(std::string_view json_line) {
    json obj;
    try {
        obj = json::parse(json_line);
    } catch (const json::parse_error& e) {
        throw CorpusError(std::string("malformed JSON: ") + e.what());
    }
    if (!obj.is_object()) throw CorpusError("record must be a JSON object");

    TaskRecord task;
    task.task_id = required_string(obj, "task_id");
    if (task.task_id.empty()) throw CorpusError("task_id is empty");
    task.repo = required_string(obj, "repo");
    task.problem_statement = required_string(obj, "problem_statement");
    if (detail::trim(task.problem_statement).empty()) {
        throw CorpusError("problem_statement is empty for task '" + task.task_id + "'");
    }

    if (auto it = obj.find("code_context"); it != obj.end() && !it->is_null()) {
        if (!it->is_array()) throw CorpusError("code_context must be an array");
        for (const auto& entry : *it) {
            if (!entry.is_object()) throw CorpusError("code_context entries must be objects");
            CodeSnippet snippet{required_string(entry, "file_path"), optional_string(entry, "snippet")};
            if (snippet.file_path.empty()) {
                throw CorpusError("code_context file_path is empty for task '" + task.task_id + "'");
            }
            task.code_context.push_back(std::move(snippet));
        }
    }

    if (auto it = obj.find("gold_patch"); it != obj.end() && !it->is_null()) {
        if (!it->is_string()) throw CorpusError("gold_patch must be a string");
        task.gold_patch = it->get<std::string>();
    }

    if (auto cat = optional_string(obj, "category"); !cat.empty()) {
        auto parsed = parse_category(cat);
        if (!parsed) throw CorpusError("unknown category '" + cat + "'");
        task.category = *parsed;
    }
    task.language_tag = optional_string(obj, "language_tag");
    return task;
}

std::string serialize_task(const TaskRecord& task) {
    json obj;
    obj["task_id"] = task.task_id;
    obj["repo"] = task.repo;
    obj["problem_statement"] = task.problem_statement;
    obj["code_context"] = json::array();
    for (const auto& s : task.code_context) {
        obj["code_context"].push_back({{"file_path", s.file_path}, {"snippet", s.snippet}});
    }
    if (task.gold_patch) obj["gold_patch"] = *task.gold_patch;
    obj["category"] = std::string(category_name(task.category));
    obj["language_tag"] = task.language_tag;
    return obj.dump();
}

std::vector<TaskRecord> parse_corpus(std::istream& in) {
    std::vector<TaskRecord> corpus;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        TaskRecord task;
        try {
            task = parse_task(line);
        } catch (const CorpusError& e) {
            throw CorpusError(e.what(), line_no);
        }
        if (!seen.insert(task.task_id).second) {
            throw CorpusError("duplicate task_id '" + task.task_id + "'", line_no);
        }
        corpus.push_back(std::move(task));
    }
    return corpus;
}

std::vector<TaskRecord> load_corpus(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CorpusError("cannot open corpus file " + path.string());
    return parse_corpus(in);
}

std::string serialize_corpus(std::span<const TaskRecord> corpus) {
    std::string out;
    for (const auto& task : corpus) {
        out += serialize_task(task);
        out += '\n';
    }
    return out;
}

std::string_view phase_name(PhaseName p) {
    switch (p) {
        case PhaseName::small: return "small";
        case PhaseName::medium: return "medium";
        case PhaseName::full: return "full";
    }
    return "full";
}

Phase Phase::from_name(std::string_view name) {
    if (name == "small") return small();
    if (name == "medium") return medium();
    if (name == "full") return full();
    throw Error("unknown phase '" + std::string(name) + "' (expected small, medium or full)");
}

std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, std::uint64_t seed) {
    if (k > n) {
        throw SampleSizeError("cannot sample " + std::to_string(k) + " items from " + std::to_string(n));
    }
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    detail::SplitMix64 rng{seed};
    // Partial Fisher-Yates: the first k slots end up a uniform k-subset.
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return idx;
}

std::vector<TaskRecord> sample_phase(std::span<const TaskRecord> corpus, const Phase& phase, std::uint64_t seed) {
    if (corpus.empty()) throw SampleSizeError("cannot sample a phase from an empty corpus");
    if (!phase.sample_size) return {corpus.begin(), corpus.end()};
    if (*phase.sample_size == 0) throw SampleSizeError("phase sample size must be positive");
    if (corpus.size() < *phase.sample_size) {
        throw SampleSizeError("phase '" + std::string(phase_name(phase.name)) + "' needs " +
                              std::to_string(*phase.sample_size) + " tasks but the corpus has " +
                              std::to_string(corpus.size()));
    }
    std::vector<TaskRecord> out;
    out.reserve(*phase.sample_size);
    for (std::size_t i : sample_indices(corpus.size(), *phase.sample_size, seed)) out.push_back(corpus[i]);
    return out;
}

}  // namespace draftbench
