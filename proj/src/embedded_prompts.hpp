#pragma once

#include <string_view>
#include <vector>

namespace draftbench::detail {

struct EmbeddedFile {
    std::string_view path;  // relative to assets/prompts, '/'-separated
    std::string_view content;
};

const std::vector<EmbeddedFile>& embedded_prompt_files();

}  // namespace draftbench::detail
