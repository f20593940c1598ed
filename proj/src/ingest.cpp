#include "mergectx/ingest.hpp"

#include "mergectx/linediff.hpp"

#include <algorithm>
#include <filesystem>
#include <sstream>

namespace mergectx::ingest {

namespace {

bool starts_with_marker(const std::string& line, const char* marker7) {
    if (line.compare(0, 7, marker7) != 0) return false;
    // Git writes exactly seven marker characters, optionally followed by a
    // space and a label (or nothing at all for =======).
    return line.size() == 7 || line[7] == ' ' || line[7] == '\t';
}

std::string marker_label(const std::string& line) {
    if (line.size() <= 8) return "";
    return line.substr(8);
}

std::string join_lines(const std::vector<std::string>& lines, int first, int last) {
    std::string out;
    for (int i = first; i <= last; ++i) {
        out += lines[static_cast<std::size_t>(i - 1)];
        out += '\n';
    }
    return out;
}

}  // namespace

std::string to_string(Version v) {
    switch (v) {
        case Version::A: return "A";
        case Version::B: return "B";
        case Version::Merged: return "merged";
    }
    return "?";
}

std::string to_string(BlockKind k) {
    return k == BlockKind::Conflict ? "conflict" : "diff";
}

void validate_scenario(const MergeScenario& scenario) {
    if (scenario.version_a_dir == scenario.version_b_dir)
        throw std::runtime_error("version A and version B must be distinct trees");
    for (const auto& file : scenario.changed_files) {
        auto path = std::filesystem::path(scenario.merged_dir) / file;
        if (!std::filesystem::exists(path))
            throw std::runtime_error("changed file missing from merged tree: " + file);
    }
}

std::string make_block_id(const std::string& file, Version version, BlockKind kind,
                          int start_line, int end_line) {
    std::ostringstream os;
    os << to_string(version) << ':' << file << ':' << start_line << '-' << end_line << ':'
       << to_string(kind);
    return os.str();
}

MergedFileParse parse_merged_file(const std::string& merged_file_text) {
    MergedFileParse parse;
    parse.lines = linediff::split_lines(merged_file_text);

    enum class State { Outside, InOurs, InBase, InTheirs };
    State state = State::Outside;
    ConflictRegion cur;
    int n = static_cast<int>(parse.lines.size());
    for (int ln = 1; ln <= n; ++ln) {
        const std::string& line = parse.lines[static_cast<std::size_t>(ln - 1)];
        if (starts_with_marker(line, "<<<<<<<")) {
            if (state != State::Outside)
                throw UnbalancedMarkers("nested <<<<<<< at line " + std::to_string(ln));
            cur = ConflictRegion{};
            cur.whole.first = ln;
            cur.label_a = marker_label(line);
            cur.side_a = {ln + 1, ln};  // grows as lines are consumed
            state = State::InOurs;
        } else if (starts_with_marker(line, "|||||||")) {
            if (state != State::InOurs)
                throw UnbalancedMarkers("unexpected ||||||| at line " + std::to_string(ln));
            cur.has_base_section = true;
            cur.side_base = {ln + 1, ln};
            state = State::InBase;
        } else if (line == "=======" || starts_with_marker(line, "=======")) {
            if (state == State::InOurs || state == State::InBase) {
                cur.side_b = {ln + 1, ln};
                state = State::InTheirs;
            }
            // A bare ======= outside a region is ordinary text.
        } else if (starts_with_marker(line, ">>>>>>>")) {
            if (state != State::InTheirs)
                throw UnbalancedMarkers("unexpected >>>>>>> at line " + std::to_string(ln));
            cur.label_b = marker_label(line);
            cur.whole.last = ln;
            parse.regions.push_back(cur);
            state = State::Outside;
        } else {
            switch (state) {
                case State::Outside: break;
                case State::InOurs: cur.side_a.last = ln; break;
                case State::InBase: cur.side_base.last = ln; break;
                case State::InTheirs: cur.side_b.last = ln; break;
            }
        }
    }
    if (state != State::Outside)
        throw UnbalancedMarkers("conflict region opened at line " +
                                std::to_string(cur.whole.first) + " is never closed");
    return parse;
}

std::vector<CodeBlock> parse_conflict_markers(const std::string& merged_file_text,
                                              const std::string& file) {
    MergedFileParse parse = parse_merged_file(merged_file_text);
    std::vector<CodeBlock> blocks;
    blocks.reserve(parse.regions.size());
    for (const ConflictRegion& r : parse.regions) {
        CodeBlock b;
        b.file = file;
        b.version = Version::Merged;
        b.kind = BlockKind::Conflict;
        b.start_line = r.whole.first;
        b.end_line = r.whole.last;
        b.text = join_lines(parse.lines, r.whole.first, r.whole.last);
        b.id = make_block_id(file, b.version, b.kind, b.start_line, b.end_line);
        blocks.push_back(std::move(b));
    }
    return blocks;
}

VersionView extract_version_view(const MergedFileParse& parse, Version side) {
    VersionView view;
    view.side_spans.reserve(parse.regions.size());
    std::vector<std::string> out_lines;
    int next = 1;
    const int n = static_cast<int>(parse.lines.size());
    for (const ConflictRegion& r : parse.regions) {
        for (int ln = next; ln < r.whole.first; ++ln)
            out_lines.push_back(parse.lines[static_cast<std::size_t>(ln - 1)]);
        const LineSpan src = (side == Version::B) ? r.side_b : r.side_a;
        LineSpan mapped{static_cast<int>(out_lines.size()) + 1, static_cast<int>(out_lines.size())};
        for (int ln = src.first; ln <= src.last; ++ln) {
            out_lines.push_back(parse.lines[static_cast<std::size_t>(ln - 1)]);
            mapped.last = static_cast<int>(out_lines.size());
        }
        view.side_spans.push_back(mapped);
        next = r.whole.last + 1;
    }
    for (int ln = next; ln <= n; ++ln)
        out_lines.push_back(parse.lines[static_cast<std::size_t>(ln - 1)]);
    std::string text;
    for (const auto& l : out_lines) {
        text += l;
        text += '\n';
    }
    view.text = std::move(text);
    return view;
}

std::vector<CodeBlock> compute_diff_blocks(const std::string& base_text,
                                           const std::string& version_text,
                                           const std::string& file, Version version) {
    auto base_lines = linediff::split_lines(base_text);
    auto ver_lines = linediff::split_lines(version_text);
    auto hunks = linediff::diff_lines(base_lines, ver_lines);

    std::vector<CodeBlock> blocks;
    for (const auto& h : hunks) {
        if (h.ver_begin == h.ver_end) continue;  // pure deletion, no version lines
        CodeBlock b;
        b.file = file;
        b.version = version;
        b.kind = BlockKind::Diff;
        b.start_line = h.ver_begin + 1;
        b.end_line = h.ver_end;
        b.base_begin = h.base_begin;
        b.base_end = h.base_end;
        b.has_base_span = true;
        b.text = join_lines(ver_lines, b.start_line, b.end_line);
        b.id = make_block_id(file, version, b.kind, b.start_line, b.end_line);
        blocks.push_back(std::move(b));
    }
    return blocks;
}

bool base_ranges_overlap(int begin1, int end1, int begin2, int end2) {
    const bool empty1 = begin1 == end1;
    const bool empty2 = begin2 == end2;
    if (empty1 && empty2) return begin1 == begin2;
    if (empty1) return begin2 <= begin1 && begin1 <= end2;
    if (empty2) return begin1 <= begin2 && begin2 <= end1;
    return std::max(begin1, begin2) < std::min(end1, end2);
}

std::vector<BlockPair> pair_blocks(const std::vector<CodeBlock>& diffs_a,
                                   const std::vector<CodeBlock>& diffs_b,
                                   const std::string& base_text) {
    (void)base_text;  // blocks carry their base spans already
    std::vector<BlockPair> pairs;
    for (const auto& a : diffs_a) {
        if (!a.has_base_span) continue;
        for (const auto& b : diffs_b) {
            if (!b.has_base_span) continue;
            if (a.file != b.file) continue;
            if (base_ranges_overlap(a.base_begin, a.base_end, b.base_begin, b.base_end))
                pairs.push_back({a.id, b.id});
        }
    }
    return pairs;
}

std::optional<LineSpan> map_span_between_texts(const std::string& from_text,
                                               const std::string& to_text, LineSpan span) {
    auto from_lines = linediff::split_lines(from_text);
    auto to_lines = linediff::split_lines(to_text);
    auto matches = linediff::match_lines(from_lines, to_lines);
    int lo = 0, hi = -1;
    bool any = false;
    for (const auto& [fi, ti] : matches) {
        const int from_line = fi + 1;
        if (from_line < span.first || from_line > span.last) continue;
        const int to_line = ti + 1;
        if (!any) {
            lo = to_line;
            any = true;
        }
        hi = to_line;
    }
    if (!any) return std::nullopt;
    return LineSpan{lo, hi};
}

}  // namespace mergectx::ingest
