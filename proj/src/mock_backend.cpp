#include "draftbench/mock_backend.hpp"

#include <array>
#include <string>

#include "draftbench/quality.hpp"
#include "text_util.hpp"

namespace draftbench {

namespace {

constexpr std::array<std::string_view, 16> kDraftSteps = {
    "Locate failing validation path", "Check boundary condition",  "Add missing guard",
    "Update call site",               "Preserve existing behaviour", "Cover empty input",
    "Adjust return value",            "Reuse existing helper",     "Guard against None",
    "Keep public API stable",         "Compare with sibling check", "Normalize input early",
    "Raise clear error",              "Trace caller expectations",  "Add regression test",
    "Narrow exception scope",
};

constexpr std::array<std::string_view, 10> kReasoningSteps = {
    "The issue describes behaviour that differs from what the documentation promises, so the first task is to "
    "find where the relevant value is computed.",
    "Looking at the provided code context, the function that handles this case does not account for the "
    "situation described in the report.",
    "The root cause appears to be a missing check that lets an unexpected value flow through to the caller "
    "without any validation or normalization.",
    "Callers elsewhere in the module rely on the current return type, so the fix should keep the signature "
    "unchanged and only alter the faulty branch.",
    "Adding an explicit guard at the point of entry is the smallest change that resolves the problem while "
    "leaving the surrounding logic intact.",
    "We should also consider edge cases such as empty collections and None values, because they take the same "
    "path and would fail in a similar way.",
    "An existing helper already performs a similar normalization, so reusing it keeps the behaviour consistent "
    "with the rest of the codebase.",
    "The error message should name the offending value so that users can understand what went wrong without "
    "reading the source.",
    "After the change the original scenario from the issue returns the expected result, and the unaffected "
    "scenarios behave exactly as before.",
    "A regression test that reproduces the reported scenario would protect this behaviour against future "
    "refactoring.",
};

std::uint64_t seed_from(const CompletionRequest& request) {
    return std::stoull(request_hash(request).hex.substr(0, 16), nullptr, 16);
}

std::optional<std::string> last_file_path(std::string_view user_text) {
    std::optional<std::string> path;
    for (std::string_view line : detail::split_lines(user_text)) {
        if (line.starts_with("File: ")) path = std::string(detail::trim(line.substr(6)));
    }
    if (path && path->empty()) path.reset();
    return path;
}

std::string mock_diff(const std::string& path, StrategyId strategy, detail::SplitMix64& rng) {
    const std::size_t added = 1 + rng.below(3);
    std::string out = "--- a/" + path + "\n+++ b/" + path + "\n";
    out += "@@ -0,0 +1," + std::to_string(added) + " @@\n";
    out += "+# fix drafted with the " + std::string(strategy_name(strategy)) + " strategy\n";
    for (std::size_t i = 1; i < added; ++i) out += "+# " + std::string(kDraftSteps[rng.below(kDraftSteps.size())]) + "\n";
    return out;
}

std::string answer(StrategyId strategy, const CompletionRequest& request, detail::SplitMix64& rng) {
    std::string out;
    const SectionSchema schema = section_schema(strategy);
    for (const auto& section : schema.sections) {
        out += section.label + ":\n";
        std::size_t steps = section.max_steps ? *section.max_steps : 5 + rng.below(6);
        for (std::size_t i = 0; i < steps; ++i) {
            if (section.words_per_step_limit) {
                out += "- " + std::string(kDraftSteps[rng.below(kDraftSteps.size())]) + "\n";
            } else {
                out += std::to_string(i + 1) + ". " + std::string(kReasoningSteps[rng.below(kReasoningSteps.size())]) +
                       "\n";
            }
        }
        out += "\n";
    }
    out += "Solution:\n";
    if (auto path = last_file_path(request.user_text)) {
        out += "```diff\n" + mock_diff(*path, strategy, rng) + "```\n";
    } else {
        out += "No code change is needed; the reported behaviour is intended.\n";
    }
    return out;
}

std::string judge_answer(detail::SplitMix64& rng) {
    std::string out;
    for (Dimension d : kAllDimensions) {
        for (const auto& sub : kRubric[index_of(d)]) {
            const double v = 0.55 + static_cast<double>(rng.below(46)) / 100.0;
            out += std::string(dimension_name(d)) + "." + std::string(sub.name) + ": " + detail::format_fixed(v, 2) +
                   "\n";
        }
    }
    out += "\nThe patch addresses the issue with a small, contained change.\n";
    return out;
}

}  // namespace

MockBackend::MockBackend(PromptLibrary library) : library_(std::move(library)) {}

BackendReply MockBackend::send(const CompletionRequest& request) {
    request.validate();
    detail::SplitMix64 rng{seed_from(request)};
    BackendReply reply;
    if (request.user_text.find("For each patch, evaluate:") != std::string::npos) {
        reply.text = judge_answer(rng);
    } else {
        StrategyId strategy = StrategyId::standard;
        for (StrategyId s : kAllStrategies) {
            if (library_.system_text(s) == request.system_text) strategy = s;
        }
        reply.text = answer(strategy, request, rng);
    }
    reply.usage = Usage{approximate_tokens(request.system_text) + approximate_tokens(request.user_text),
                        approximate_tokens(reply.text)};
    return reply;
}

}  // namespace draftbench
