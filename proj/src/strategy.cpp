#include "draftbench/strategy.hpp"

#include <algorithm>
#include <string>

#include "draftbench/error.hpp"
#include "text_util.hpp"

namespace draftbench {

std::string_view strategy_name(StrategyId id) {
    switch (id) {
        case StrategyId::standard: return "standard";
        case StrategyId::cot: return "cot";
        case StrategyId::baseline_cod: return "baseline_cod";
        case StrategyId::structured_cod: return "structured_cod";
        case StrategyId::hierarchical_cod: return "hierarchical_cod";
        case StrategyId::iterative_cod: return "iterative_cod";
        case StrategyId::code_specific_cod: return "code_specific_cod";
    }
    return "unknown";
}

std::string_view strategy_display_name(StrategyId id) {
    switch (id) {
        case StrategyId::standard: return "Standard";
        case StrategyId::cot: return "CoT";
        case StrategyId::baseline_cod: return "Baseline CoD";
        case StrategyId::structured_cod: return "Structured CoD";
        case StrategyId::hierarchical_cod: return "Hierarchical CoD";
        case StrategyId::iterative_cod: return "Iterative CoD";
        case StrategyId::code_specific_cod: return "Code-Specific CoD";
    }
    return "Unknown";
}

std::optional<StrategyId> parse_strategy(std::string_view name) {
    const std::string key = detail::to_lower(detail::trim(name));
    for (StrategyId id : kAllStrategies) {
        if (strategy_name(id) == key) return id;
    }
    return std::nullopt;
}

std::vector<StrategyId> parse_strategy_list(std::string_view comma_list) {
    if (detail::iequals(detail::trim(comma_list), "all")) {
        return {kAllStrategies.begin(), kAllStrategies.end()};
    }
    std::vector<StrategyId> out;
    std::size_t pos = 0;
    while (pos <= comma_list.size()) {
        std::size_t end = comma_list.find(',', pos);
        if (end == std::string_view::npos) end = comma_list.size();
        std::string_view item = detail::trim(comma_list.substr(pos, end - pos));
        if (!item.empty()) {
            auto id = parse_strategy(item);
            if (!id) throw Error("unknown strategy '" + std::string(item) + "'");
            if (std::find(out.begin(), out.end(), *id) != out.end()) {
                throw Error("strategy '" + std::string(item) + "' listed twice");
            }
            out.push_back(*id);
        }
        pos = end + 1;
    }
    if (out.empty()) throw Error("strategy list is empty");
    return out;
}

}  // namespace draftbench
