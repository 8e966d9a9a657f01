#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "draftbench/error.hpp"

namespace draftbench {

enum class LineKind { context, add, remove };

struct DiffLine {
    LineKind kind;
    std::string text;

    bool operator==(const DiffLine&) const = default;
};

struct Hunk {
    std::size_t old_start = 0;
    std::size_t old_len = 0;
    std::size_t new_start = 0;
    std::size_t new_len = 0;
    /// Text after the closing "@@", e.g. a function name. May be empty.
    std::string heading;
    std::vector<DiffLine> lines;

    bool operator==(const Hunk&) const = default;
};

/// Paths are stored without the conventional "a/" and "b/" prefixes.
/// "/dev/null" marks a created (old side) or deleted (new side) file.
struct FileDiff {
    std::string old_path;
    std::string new_path;
    std::vector<Hunk> hunks;

    bool operator==(const FileDiff&) const = default;
};

struct UnifiedDiff {
    std::vector<FileDiff> files;

    bool empty() const noexcept { return files.empty(); }
    bool operator==(const UnifiedDiff&) const = default;
};

inline constexpr std::string_view kDevNull = "/dev/null";

class DiffParseError : public Error {
public:
    using Error::Error;
};

class PatchApplyError : public Error {
public:
    using Error::Error;
};

/// Strict parse. Lines outside file/hunk structure ("diff --git", "index",
/// prose) are skipped; hunk bodies must match their declared lengths.
UnifiedDiff parse_unified_diff(std::string_view text);

/// Same structure rules, but stray +/-/space lines after a complete hunk are
/// skipped as prose instead of rejected. Used when scanning model output.
UnifiedDiff parse_unified_diff_lenient(std::string_view text);

/// Canonical text: "--- a/<old>", "+++ b/<new>", "@@ -a,b +c,d @@".
std::string serialize_diff(const UnifiedDiff& diff);

using FileMap = std::map<std::string, std::string, std::less<>>;

/// Exact-context application at the declared offsets.
FileMap apply_patch(const UnifiedDiff& diff, const FileMap& files);

enum class ExtractionSource { fenced_block, solution_section, bare_scan, none };

std::string_view extraction_source_name(ExtractionSource s);
std::optional<ExtractionSource> parse_extraction_source(std::string_view name);

struct ExtractionResult {
    std::optional<UnifiedDiff> diff;
    ExtractionSource source = ExtractionSource::none;
    std::string diagnostics;
};

/// Tries fenced blocks, then the Solution section, then a bare scan.
/// Never throws.
ExtractionResult extract_patch(std::string_view response_text);

}  // namespace draftbench
