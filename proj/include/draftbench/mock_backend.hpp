#pragma once

#include "draftbench/llm_gateway.hpp"
#include "draftbench/prompt_strategies.hpp"

namespace draftbench {

/// Offline provider that answers in the shape each strategy asks for.
///
/// It recognises the strategy by comparing the system text against the
/// prompt library, and answers judge prompts with a score block. Output is
/// a pure function of the request, so recorded runs replay exactly.
/// Usage is reported (as a real provider would) from approximate_tokens().
class MockBackend final : public Backend {
public:
    explicit MockBackend(PromptLibrary library = PromptLibrary::builtin());
    BackendReply send(const CompletionRequest& request) override;

private:
    PromptLibrary library_;
};

}  // namespace draftbench
