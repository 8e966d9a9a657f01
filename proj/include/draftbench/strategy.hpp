#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <vector>

namespace draftbench {

/// The seven prompting strategies. Names returned by strategy_name() are
/// stable and used as report keys.
enum class StrategyId {
    standard,
    cot,
    baseline_cod,
    structured_cod,
    hierarchical_cod,
    iterative_cod,
    code_specific_cod,
};

inline constexpr std::array<StrategyId, 7> kAllStrategies = {
    StrategyId::standard,         StrategyId::cot,           StrategyId::baseline_cod,
    StrategyId::structured_cod,   StrategyId::hierarchical_cod,
    StrategyId::iterative_cod,    StrategyId::code_specific_cod,
};

std::string_view strategy_name(StrategyId id);
/// Human-readable row label, e.g. "Baseline CoD".
std::string_view strategy_display_name(StrategyId id);
std::optional<StrategyId> parse_strategy(std::string_view name);

/// Parses "cot,baseline_cod" (or "all"). Throws Error on unknown or repeated names.
std::vector<StrategyId> parse_strategy_list(std::string_view comma_list);

}  // namespace draftbench
