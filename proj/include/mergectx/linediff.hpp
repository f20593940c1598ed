#pragma once
// Canonical minimal line diff shared by merge ingestion and coordinate
// mapping. The canonical form is defined as: trim the common suffix, then
// the common prefix, then backtrack an LCS table from the end, preferring a
// matched line when the texts agree and a base-side deletion on ties.

#include <string>
#include <string_view>
#include <vector>

namespace mergectx::linediff {

/// One edit region. Ranges are half-open 0-based indices; either side may be
/// empty (pure insertion / pure deletion) but not both.
struct DiffHunk {
    int base_begin = 0;
    int base_end = 0;
    int ver_begin = 0;
    int ver_end = 0;
    bool operator==(const DiffHunk& o) const = default;
};

std::vector<std::string> split_lines(const std::string& text);

std::vector<DiffHunk> diff_lines(const std::vector<std::string>& base,
                                 const std::vector<std::string>& version);

/// Pairs of (base index, version index) for lines the canonical diff keeps.
std::vector<std::pair<int, int>> match_lines(const std::vector<std::string>& base,
                                             const std::vector<std::string>& version);

namespace detail {
/// Test hook: shrinks the LCS table budget to force the anchor-split path.
/// Returns the previous limit.
std::size_t set_dp_cell_limit(std::size_t cells);
}  // namespace detail

}  // namespace mergectx::linediff
