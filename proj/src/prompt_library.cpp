#include <algorithm>

#include "draftbench/prompt_strategies.hpp"
#include "embedded_prompts.hpp"
#include "text_util.hpp"

namespace draftbench {

namespace {

std::string strip_trailing_newlines(std::string_view s) {
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.remove_suffix(1);
    return std::string(s);
}

// std::find rather than string_view::find: GCC 11 warns spuriously on the latter here.
bool has_slash(std::string_view s) { return std::find(s.begin(), s.end(), '/') != s.end(); }

// Accepts "system/<strategy>.txt" and "few_shot/<set>/<strategy>.txt".
void add_asset(PromptLibrary& lib, std::string_view rel, std::string_view content) {
    auto stem_of = [](std::string_view file) -> std::optional<StrategyId> {
        if (file.size() < 4 || file.substr(file.size() - 4) != ".txt") return std::nullopt;
        return parse_strategy(file.substr(0, file.size() - 4));
    };
    if (rel.starts_with("system/")) {
        std::string_view file = rel.substr(7);
        if (has_slash(file)) return;
        if (auto id = stem_of(file)) lib.set_system_text(*id, strip_trailing_newlines(content));
        return;
    }
    if (rel.starts_with("few_shot/")) {
        std::string_view rest = rel.substr(9);
        const auto slash = static_cast<std::size_t>(std::find(rest.begin(), rest.end(), '/') - rest.begin());
        if (slash == rest.size() || slash == 0) return;
        std::string_view set = rest.substr(0, slash);
        std::string_view file = rest.substr(slash + 1);
        if (has_slash(file)) return;
        if (auto id = stem_of(file)) lib.set_few_shot(std::string(set), *id, strip_trailing_newlines(content));
    }
}

PromptLibrary make_builtin() {
    PromptLibrary lib;
    for (const auto& file : detail::embedded_prompt_files()) add_asset(lib, file.path, file.content);
    for (StrategyId id : kAllStrategies) {
        // Throws if an asset is missing from the build.
        (void)lib.system_text(id);
        (void)lib.few_shot(kDefaultFewShotSet, id);
    }
    return lib;
}

}  // namespace

const PromptLibrary& PromptLibrary::builtin() {
    static const PromptLibrary lib = make_builtin();
    return lib;
}

PromptLibrary PromptLibrary::load_directory(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw TemplateError("prompt directory not found: " + dir.string());
    PromptLibrary lib = builtin();
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& path : files) {
        add_asset(lib, fs::relative(path, dir).generic_string(), detail::read_file(path));
    }
    return lib;
}

const std::string& PromptLibrary::system_text(StrategyId strategy) const {
    auto it = system_.find(strategy);
    if (it == system_.end()) {
        throw TemplateError("no system prompt for strategy '" + std::string(strategy_name(strategy)) + "'");
    }
    return it->second;
}

const std::string& PromptLibrary::few_shot(std::string_view set_name, StrategyId strategy) const {
    auto set = few_shot_.find(set_name);
    if (set == few_shot_.end()) throw TemplateError("unknown few-shot set '" + std::string(set_name) + "'");
    auto it = set->second.find(strategy);
    if (it == set->second.end()) {
        throw TemplateError("few-shot set '" + std::string(set_name) + "' has no example for strategy '" +
                            std::string(strategy_name(strategy)) + "'");
    }
    return it->second;
}

bool PromptLibrary::has_few_shot_set(std::string_view set_name) const {
    return few_shot_.find(set_name) != few_shot_.end();
}

std::vector<std::string> PromptLibrary::few_shot_sets() const {
    std::vector<std::string> names;
    for (const auto& [name, _] : few_shot_) names.push_back(name);
    return names;
}

void PromptLibrary::set_system_text(StrategyId strategy, std::string text) { system_[strategy] = std::move(text); }

void PromptLibrary::set_few_shot(std::string set_name, StrategyId strategy, std::string text) {
    few_shot_[std::move(set_name)][strategy] = std::move(text);
}

}  // namespace draftbench
