#include "draftbench/patch.hpp"

#include <cctype>
#include <charconv>

#include "draftbench/prompt_strategies.hpp"
#include "text_util.hpp"

namespace draftbench {

namespace {

using detail::split_lines;

bool parse_size(std::string_view s, std::size_t& out) {
    if (s.empty()) return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

// "-a[,b]" or "+c[,d]"; an omitted length means 1.
bool parse_range(std::string_view s, char sign, std::size_t& start, std::size_t& len) {
    if (s.empty() || s.front() != sign) return false;
    s.remove_prefix(1);
    std::size_t comma = s.find(',');
    if (comma == std::string_view::npos) {
        len = 1;
        return parse_size(s, start);
    }
    return parse_size(s.substr(0, comma), start) && parse_size(s.substr(comma + 1), len);
}

std::optional<Hunk> parse_hunk_header(std::string_view line) {
    if (!line.starts_with("@@ ")) return std::nullopt;
    std::string_view rest = line.substr(3);
    std::size_t close = rest.find(" @@");
    if (close == std::string_view::npos) return std::nullopt;
    std::string_view ranges = rest.substr(0, close);
    std::string_view heading = rest.substr(close + 3);
    if (!heading.empty() && heading.front() == ' ') heading.remove_prefix(1);

    std::size_t space = ranges.find(' ');
    if (space == std::string_view::npos) return std::nullopt;
    Hunk h;
    if (!parse_range(ranges.substr(0, space), '-', h.old_start, h.old_len)) return std::nullopt;
    if (!parse_range(ranges.substr(space + 1), '+', h.new_start, h.new_len)) return std::nullopt;
    h.heading = std::string(heading);
    return h;
}

std::string header_path(std::string_view raw, std::string_view prefix) {
    std::size_t tab = raw.find('\t');
    if (tab != std::string_view::npos) raw = raw.substr(0, tab);
    raw = detail::trim(raw);
    if (raw == kDevNull) return std::string(raw);
    if (raw.starts_with(prefix)) raw.remove_prefix(prefix.size());
    return std::string(raw);
}

bool is_body_line(std::string_view line) {
    return !line.empty() && (line.front() == ' ' || line.front() == '+' || line.front() == '-');
}

class DiffParser {
public:
    DiffParser(std::string_view text, bool lenient) : lines_(split_lines(text)), lenient_(lenient) {}

    UnifiedDiff parse() {
        UnifiedDiff diff;
        while (i_ < lines_.size()) {
            std::string_view line = lines_[i_];
            if (line.starts_with("--- ")) {
                if (i_ + 1 < lines_.size() && lines_[i_ + 1].starts_with("+++ ")) {
                    start_file(diff, line, lines_[i_ + 1]);
                    i_ += 2;
                    continue;
                }
                reject("line " + std::to_string(i_ + 1) + ": '---' header without a following '+++' line");
                ++i_;
                continue;
            }
            if (line.starts_with("+++ ")) {
                reject("line " + std::to_string(i_ + 1) + ": '+++' header without a preceding '---' line");
                ++i_;
                continue;
            }
            if (line.starts_with("@@")) {
                if (diff.files.empty()) {
                    reject("line " + std::to_string(i_ + 1) + ": hunk before any file header");
                    ++i_;
                    continue;
                }
                auto hunk = parse_hunk_header(line);
                if (!hunk) {
                    reject("line " + std::to_string(i_ + 1) + ": malformed hunk header '" + std::string(line) + "'");
                    ++i_;
                    continue;
                }
                ++i_;
                read_hunk_body(*hunk);
                diff.files.back().hunks.push_back(std::move(*hunk));
                continue;
            }
            // "diff --git", "index ...", prose, fences, blank lines.
            ++i_;
        }
        if (diff.files.empty()) throw DiffParseError("no '---'/'+++' file header found");
        for (const auto& f : diff.files) {
            if (f.hunks.empty()) throw DiffParseError("file '" + f.new_path + "' has no hunks");
        }
        return diff;
    }

private:
    void reject(const std::string& message) {
        if (!lenient_) throw DiffParseError("malformed header: " + message);
    }

    void start_file(UnifiedDiff& diff, std::string_view old_line, std::string_view new_line) {
        FileDiff file;
        file.old_path = header_path(old_line.substr(4), "a/");
        file.new_path = header_path(new_line.substr(4), "b/");
        if (file.old_path.empty() || file.new_path.empty()) {
            throw DiffParseError("malformed header: empty path at line " + std::to_string(i_ + 1));
        }
        if (file.old_path == kDevNull && file.new_path == kDevNull) {
            throw DiffParseError("malformed header: both sides are /dev/null at line " + std::to_string(i_ + 1));
        }
        diff.files.push_back(std::move(file));
    }

    [[noreturn]] void mismatch(const Hunk& h, std::size_t old_seen, std::size_t new_seen) const {
        throw DiffParseError("hunk length mismatch in hunk " + std::to_string(hunk_index_) + " (@@ -" +
                             std::to_string(h.old_start) + "," + std::to_string(h.old_len) + " +" +
                             std::to_string(h.new_start) + "," + std::to_string(h.new_len) +
                             " @@): expected old/new lengths " + std::to_string(h.old_len) + "/" +
                             std::to_string(h.new_len) + ", found " + std::to_string(old_seen) + "/" +
                             std::to_string(new_seen));
    }

    void read_hunk_body(Hunk& h) {
        ++hunk_index_;
        std::size_t old_seen = 0, new_seen = 0;
        auto count_rest = [&] {
            // For the error message: how long the body really was.
            std::size_t j = i_;
            while (j < lines_.size() && is_body_line(lines_[j]) && !starts_file_header(j)) {
                char c = lines_[j].front();
                if (c != '+') ++old_seen;
                if (c != '-') ++new_seen;
                ++j;
            }
        };
        while (old_seen < h.old_len || new_seen < h.new_len) {
            if (i_ >= lines_.size()) mismatch(h, old_seen, new_seen);
            std::string_view line = lines_[i_];
            if (line.starts_with("\\")) {  // "\ No newline at end of file"
                ++i_;
                continue;
            }
            const char kind = line.empty() ? ' ' : line.front();
            const std::string text = line.empty() ? std::string() : std::string(line.substr(1));
            if (kind == ' ' && old_seen < h.old_len && new_seen < h.new_len) {
                h.lines.push_back({LineKind::context, text});
                ++old_seen;
                ++new_seen;
            } else if (kind == '-' && old_seen < h.old_len) {
                h.lines.push_back({LineKind::remove, text});
                ++old_seen;
            } else if (kind == '+' && new_seen < h.new_len) {
                h.lines.push_back({LineKind::add, text});
                ++new_seen;
            } else {
                if (kind == ' ' || kind == '-' || kind == '+') count_rest();
                mismatch(h, old_seen, new_seen);
            }
            ++i_;
        }
        while (i_ < lines_.size() && lines_[i_].starts_with("\\")) ++i_;
        if (!lenient_ && i_ < lines_.size() && is_body_line(lines_[i_]) && !starts_file_header(i_) &&
            !lines_[i_].starts_with("@@")) {
            count_rest();
            mismatch(h, old_seen, new_seen);
        }
    }

    bool starts_file_header(std::size_t j) const {
        return lines_[j].starts_with("--- ") && j + 1 < lines_.size() && lines_[j + 1].starts_with("+++ ");
    }

    std::vector<std::string_view> lines_;
    bool lenient_;
    std::size_t i_ = 0;
    std::size_t hunk_index_ = 0;
};

}  // namespace

UnifiedDiff parse_unified_diff(std::string_view text) {
    if (detail::trim(text).empty()) throw DiffParseError("diff text is empty");
    return DiffParser(text, false).parse();
}

UnifiedDiff parse_unified_diff_lenient(std::string_view text) {
    if (detail::trim(text).empty()) throw DiffParseError("diff text is empty");
    return DiffParser(text, true).parse();
}

std::string serialize_diff(const UnifiedDiff& diff) {
    std::string out;
    for (const auto& file : diff.files) {
        out += "--- ";
        out += file.old_path == kDevNull ? std::string(kDevNull) : "a/" + file.old_path;
        out += "\n+++ ";
        out += file.new_path == kDevNull ? std::string(kDevNull) : "b/" + file.new_path;
        out += '\n';
        for (const auto& h : file.hunks) {
            out += "@@ -" + std::to_string(h.old_start) + "," + std::to_string(h.old_len) + " +" +
                   std::to_string(h.new_start) + "," + std::to_string(h.new_len) + " @@";
            if (!h.heading.empty()) out += " " + h.heading;
            out += '\n';
            for (const auto& line : h.lines) {
                out += line.kind == LineKind::context ? ' ' : line.kind == LineKind::add ? '+' : '-';
                out += line.text;
                out += '\n';
            }
        }
    }
    return out;
}

FileMap apply_patch(const UnifiedDiff& diff, const FileMap& files) {
    FileMap out = files;
    for (const auto& fd : diff.files) {
        const bool create = fd.old_path == kDevNull;
        const bool remove = fd.new_path == kDevNull;

        std::vector<std::string> original;
        bool trailing_newline = true;
        if (create) {
            if (out.contains(fd.new_path)) throw PatchApplyError("cannot create '" + fd.new_path + "': file exists");
        } else {
            auto it = out.find(fd.old_path);
            if (it == out.end()) throw PatchApplyError("missing file '" + fd.old_path + "'");
            for (auto line : split_lines(it->second)) original.emplace_back(line);
            trailing_newline = it->second.empty() || it->second.back() == '\n';
        }

        std::vector<std::string> result;
        std::size_t cursor = 0;
        std::size_t hunk_no = 0;
        for (const auto& h : fd.hunks) {
            ++hunk_no;
            if (h.old_len > 0 && h.old_start == 0) {
                throw PatchApplyError("hunk " + std::to_string(hunk_no) + " of '" + fd.old_path +
                                      "' starts at line 0");
            }
            const std::size_t start = h.old_len == 0 ? h.old_start : h.old_start - 1;
            if (start < cursor || start > original.size()) {
                throw PatchApplyError("hunk " + std::to_string(hunk_no) + " of '" + fd.old_path +
                                      "' is out of order or past the end of the file");
            }
            result.insert(result.end(), original.begin() + static_cast<std::ptrdiff_t>(cursor),
                          original.begin() + static_cast<std::ptrdiff_t>(start));
            std::size_t pos = start;
            for (const auto& line : h.lines) {
                if (line.kind == LineKind::add) {
                    result.push_back(line.text);
                    continue;
                }
                if (pos >= original.size() || original[pos] != line.text) {
                    throw PatchApplyError("context mismatch in '" + fd.old_path + "' at line " +
                                          std::to_string(pos + 1) + ": expected '" + line.text + "', found " +
                                          (pos < original.size() ? "'" + original[pos] + "'" : "end of file"));
                }
                if (line.kind == LineKind::context) result.push_back(line.text);
                ++pos;
            }
            cursor = pos;
        }
        result.insert(result.end(), original.begin() + static_cast<std::ptrdiff_t>(cursor), original.end());

        if (!create) out.erase(fd.old_path);
        if (remove) continue;
        std::string text = detail::join_lines(result);
        if (trailing_newline && !result.empty()) text += '\n';
        out[fd.new_path] = std::move(text);
    }
    return out;
}

std::string_view extraction_source_name(ExtractionSource s) {
    switch (s) {
        case ExtractionSource::fenced_block: return "fenced_block";
        case ExtractionSource::solution_section: return "solution_section";
        case ExtractionSource::bare_scan: return "bare_scan";
        case ExtractionSource::none: return "none";
    }
    return "none";
}

std::optional<ExtractionSource> parse_extraction_source(std::string_view name) {
    for (auto s : {ExtractionSource::fenced_block, ExtractionSource::solution_section, ExtractionSource::bare_scan,
                   ExtractionSource::none}) {
        if (extraction_source_name(s) == name) return s;
    }
    return std::nullopt;
}

namespace {

struct FencedBlock {
    std::string info;
    std::string content;
};

std::vector<FencedBlock> fenced_blocks(std::string_view text) {
    std::vector<FencedBlock> blocks;
    auto lines = split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::string_view open = detail::trim(lines[i]);
        if (!(open.starts_with("```") || open.starts_with("~~~"))) continue;
        const char fc = open.front();
        std::size_t width = 0;
        while (width < open.size() && open[width] == fc) ++width;
        FencedBlock block;
        block.info = detail::to_lower(detail::trim(open.substr(width)));
        std::vector<std::string> body;
        std::size_t j = i + 1;
        for (; j < lines.size(); ++j) {
            std::string_view close = detail::trim(lines[j]);
            std::size_t w = 0;
            while (w < close.size() && close[w] == fc) ++w;
            if (w >= width && w == close.size()) break;
            body.emplace_back(lines[j]);
        }
        block.content = detail::join_lines(body);
        blocks.push_back(std::move(block));
        i = j;
    }
    return blocks;
}

bool diff_label(std::string_view info) {
    std::string_view first = info.substr(0, info.find_first_of(" \t{"));
    return first.empty() || first == "diff" || first == "patch" || first == "udiff";
}

}  // namespace

ExtractionResult extract_patch(std::string_view response_text) {
    ExtractionResult result;
    try {
        UnifiedDiff combined;
        std::size_t index = 0;
        for (const auto& block : fenced_blocks(response_text)) {
            ++index;
            if (!diff_label(block.info)) continue;
            if (detail::trim(block.content).empty()) continue;
            try {
                UnifiedDiff d = parse_unified_diff(block.content);
                combined.files.insert(combined.files.end(), d.files.begin(), d.files.end());
            } catch (const DiffParseError& e) {
                result.diagnostics += "fenced block " + std::to_string(index) + ": " + e.what() + "\n";
            }
        }
        if (!combined.empty()) {
            result.diff = std::move(combined);
            result.source = ExtractionSource::fenced_block;
            return result;
        }

        if (auto solution = solution_section(response_text); solution && !solution->empty()) {
            try {
                result.diff = parse_unified_diff_lenient(*solution);
                result.source = ExtractionSource::solution_section;
                return result;
            } catch (const DiffParseError& e) {
                result.diagnostics += std::string("solution section: ") + e.what() + "\n";
            }
        }

        if (!detail::trim(response_text).empty()) {
            try {
                result.diff = parse_unified_diff_lenient(response_text);
                result.source = ExtractionSource::bare_scan;
                return result;
            } catch (const DiffParseError& e) {
                result.diagnostics += std::string("bare scan: ") + e.what() + "\n";
            }
        }
    } catch (const std::exception& e) {
        result.diagnostics += std::string("extraction failed: ") + e.what() + "\n";
    }
    result.diff.reset();
    result.source = ExtractionSource::none;
    return result;
}

}  // namespace draftbench
