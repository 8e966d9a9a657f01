#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace draftbench::detail {

std::string_view trim(std::string_view s);
std::string_view trim_left(std::string_view s);
std::string to_lower(std::string_view s);
bool iequals(std::string_view a, std::string_view b);
bool istarts_with(std::string_view s, std::string_view prefix);

/// Splits on '\n' and drops a trailing '\r' from each line. A final empty
/// segment after a trailing newline is not returned.
std::vector<std::string_view> split_lines(std::string_view text);

std::string join_lines(const std::vector<std::string>& lines);

std::string sha256_hex(std::string_view data);

/// Lowercase, keeps [a-z0-9._-], replaces everything else with '_'.
std::string safe_file_component(std::string_view s);

std::string read_file(const std::filesystem::path& path);
/// Writes to a temporary sibling, then renames over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Fixed-point rendering with the given number of decimals.
std::string format_fixed(double value, int decimals);

/// splitmix64; the only RNG used for anything that must replay bit-for-bit.
struct SplitMix64 {
    std::uint64_t state;
    std::uint64_t next();
    /// Uniform in [0, bound) by rejection; bound > 0.
    std::uint64_t below(std::uint64_t bound);
};

}  // namespace draftbench::detail
