#pragma once
// Three-way merge ingestion: conflict marker parsing, per-version diff
// blocks, and cross-version block pairing.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mergectx::ingest {

enum class Version { A, B, Merged };
enum class BlockKind { Conflict, Diff };

std::string to_string(Version v);
std::string to_string(BlockKind k);

/// 1-based inclusive line range.
struct LineSpan {
    int first = 0;
    int last = 0;

    bool empty() const { return last < first; }
    int length() const { return empty() ? 0 : last - first + 1; }
    bool intersects(const LineSpan& o) const {
        return !empty() && !o.empty() && first <= o.last && o.first <= last;
    }
    bool contains(int line) const { return !empty() && first <= line && line <= last; }
    bool operator==(const LineSpan& o) const = default;
};

/// A contiguous line range from one version of one file, tagged as either a
/// git conflict region or a changed (diff) region.
struct CodeBlock {
    std::string id;
    std::string file;
    Version version = Version::Merged;
    int start_line = 0;  // 1-based inclusive
    int end_line = 0;
    BlockKind kind = BlockKind::Diff;
    std::string text;

    // Base-file hunk backing this block, half-open [begin, end). Empty range
    // (begin == end) marks a pure insertion at that base position. Only
    // meaningful when has_base_span is set (diff blocks and conflict sides).
    int base_begin = 0;
    int base_end = 0;
    bool has_base_span = false;

    LineSpan span() const { return {start_line, end_line}; }
};

/// Two blocks (one per version) covering the same base-file hunk region.
struct BlockPair {
    std::string block_a;
    std::string block_b;
    bool operator==(const BlockPair& o) const = default;
};

/// Paths describing one git three-way merge in progress.
struct MergeScenario {
    std::string base_dir;
    std::string version_a_dir;
    std::string version_b_dir;
    std::string merged_dir;
    std::vector<std::string> changed_files;
};

/// Enforces the scenario invariants: distinct version trees and every
/// changed file present under merged_dir. Throws std::runtime_error.
void validate_scenario(const MergeScenario& scenario);

struct UnbalancedMarkers : std::runtime_error {
    explicit UnbalancedMarkers(const std::string& what) : std::runtime_error(what) {}
};

/// One `<<<<<<< ... >>>>>>>` region of a merged file, all coordinates in
/// merged-file lines. diff3-style base sections are recorded when present.
struct ConflictRegion {
    LineSpan whole;       // includes the marker lines
    LineSpan side_a;      // lines between <<<<<<< and ||||||| / =======
    LineSpan side_base;   // diff3 base section, empty when absent
    LineSpan side_b;      // lines between ======= and >>>>>>>
    std::string label_a;
    std::string label_b;
    bool has_base_section = false;
};

struct MergedFileParse {
    std::vector<std::string> lines;
    std::vector<ConflictRegion> regions;
};

/// Scans a merged file for git conflict markers (diff2 or diff3 style).
/// Throws UnbalancedMarkers on unterminated or nested regions.
MergedFileParse parse_merged_file(const std::string& merged_file_text);

/// Spec-level view of parse_merged_file: one Conflict block per region,
/// covering the marker lines in merged-file coordinates.
std::vector<CodeBlock> parse_conflict_markers(const std::string& merged_file_text,
                                              const std::string& file = "");

/// Rebuilds one side's view of the merged file: non-conflict text verbatim,
/// each conflict region replaced by that side's lines. side_spans[i] is the
/// view-coordinate range of region i's content (empty when the side is empty).
struct VersionView {
    std::string text;
    std::vector<LineSpan> side_spans;
};
VersionView extract_version_view(const MergedFileParse& parse, Version side);

/// Changed-line ranges of version_text relative to base_text, one Diff block
/// per hunk with a non-empty version side. Pure deletions carry no version
/// lines and are omitted.
std::vector<CodeBlock> compute_diff_blocks(const std::string& base_text,
                                           const std::string& version_text,
                                           const std::string& file = "",
                                           Version version = Version::A);

/// Pairs diff blocks from the two versions whose base-side hunk ranges
/// overlap. A block may appear in several pairs; unpaired blocks are omitted.
std::vector<BlockPair> pair_blocks(const std::vector<CodeBlock>& diffs_a,
                                   const std::vector<CodeBlock>& diffs_b,
                                   const std::string& base_text);

/// Overlap test on base-file hunk ranges (half-open; empty = insertion point).
bool base_ranges_overlap(int begin1, int end1, int begin2, int end2);

/// Maps a span of `from_text` into the line coordinates of `to_text` via the
/// canonical line diff. Returns the range of to-lines matched inside the
/// span, or nullopt when none of the span's lines survive in to_text.
std::optional<LineSpan> map_span_between_texts(const std::string& from_text,
                                               const std::string& to_text,
                                               LineSpan span);

/// Deterministic block id, stable across runs.
std::string make_block_id(const std::string& file, Version version, BlockKind kind,
                          int start_line, int end_line);

}  // namespace mergectx::ingest
