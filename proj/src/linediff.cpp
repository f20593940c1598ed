#include "mergectx/linediff.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <unordered_map>

namespace mergectx::linediff {

namespace {

// Size guard for the quadratic LCS table. Inputs larger than this are split
// around unique-line anchors first (patience style) and only the gaps go
// through the table; gaps still too large degrade to one coarse hunk.
std::size_t g_max_dp_cells = 16u * 1024u * 1024u;

void intern(const std::vector<std::string>& a, const std::vector<std::string>& b,
            std::vector<int>& ids_a, std::vector<int>& ids_b) {
    std::unordered_map<std::string_view, int> table;
    table.reserve(a.size() + b.size());
    auto id_of = [&](const std::string& s) {
        auto [it, inserted] = table.emplace(std::string_view(s), static_cast<int>(table.size()));
        return it->second;
    };
    ids_a.reserve(a.size());
    ids_b.reserve(b.size());
    for (const auto& s : a) ids_a.push_back(id_of(s));
    for (const auto& s : b) ids_b.push_back(id_of(s));
}

// LCS backtrack from the end: take the diagonal when lines agree, otherwise
// prefer consuming a base line on ties. Emits matches in ascending order.
void dp_match(const std::vector<int>& a, int a_off, int a_len, const std::vector<int>& b,
              int b_off, int b_len, std::vector<std::pair<int, int>>& out) {
    const std::size_t cols = static_cast<std::size_t>(b_len) + 1;
    std::vector<uint32_t> table((static_cast<std::size_t>(a_len) + 1) * cols, 0);
    auto at = [&](std::size_t i, std::size_t j) -> uint32_t& { return table[i * cols + j]; };
    for (int i = 1; i <= a_len; ++i) {
        for (int j = 1; j <= b_len; ++j) {
            if (a[a_off + i - 1] == b[b_off + j - 1])
                at(i, j) = at(i - 1, j - 1) + 1;
            else
                at(i, j) = std::max(at(i - 1, j), at(i, j - 1));
        }
    }
    std::vector<std::pair<int, int>> rev;
    int i = a_len, j = b_len;
    while (i > 0 && j > 0) {
        if (a[a_off + i - 1] == b[b_off + j - 1]) {
            rev.emplace_back(a_off + i - 1, b_off + j - 1);
            --i;
            --j;
        } else if (at(i - 1, j) >= at(i, j - 1)) {
            --i;
        } else {
            --j;
        }
    }
    out.insert(out.end(), rev.rbegin(), rev.rend());
}

// Longest increasing subsequence over anchor candidates (strictly increasing
// in both coordinates), patience-sorting style.
std::vector<std::pair<int, int>> lis_anchors(std::vector<std::pair<int, int>> cand) {
    std::sort(cand.begin(), cand.end());
    std::vector<int> tails;  // indices into cand
    std::vector<int> prev(cand.size(), -1);
    for (int idx = 0; idx < static_cast<int>(cand.size()); ++idx) {
        int lo = 0, hi = static_cast<int>(tails.size());
        while (lo < hi) {
            int mid = (lo + hi) / 2;
            if (cand[tails[mid]].second < cand[idx].second)
                lo = mid + 1;
            else
                hi = mid;
        }
        if (lo > 0) prev[idx] = tails[lo - 1];
        if (lo == static_cast<int>(tails.size()))
            tails.push_back(idx);
        else
            tails[lo] = idx;
    }
    std::vector<std::pair<int, int>> chain;
    if (!tails.empty()) {
        for (int idx = tails.back(); idx != -1; idx = prev[idx]) chain.push_back(cand[idx]);
        std::reverse(chain.begin(), chain.end());
    }
    return chain;
}

void match_region(const std::vector<int>& a, int a_begin, int a_end, const std::vector<int>& b,
                  int b_begin, int b_end, std::vector<std::pair<int, int>>& out) {
    const int a_stop = a_end;
    while (a_end > a_begin && b_end > b_begin && a[a_end - 1] == b[b_end - 1]) {
        --a_end;
        --b_end;
    }
    while (a_begin < a_end && b_begin < b_end && a[a_begin] == b[b_begin]) {
        out.emplace_back(a_begin, b_begin);
        ++a_begin;
        ++b_begin;
    }
    const int a_len = a_end - a_begin;
    const int b_len = b_end - b_begin;
    if (a_len > 0 && b_len > 0) {
        if (static_cast<std::size_t>(a_len) * static_cast<std::size_t>(b_len) <= g_max_dp_cells) {
            dp_match(a, a_begin, a_len, b, b_begin, b_len, out);
        } else {
            // Anchor on lines unique to both sides within the region.
            std::map<int, std::pair<int, int>> count_a, count_b;  // id -> (count, pos)
            for (int i = a_begin; i < a_end; ++i) {
                auto& e = count_a[a[i]];
                e.first++;
                e.second = i;
            }
            for (int j = b_begin; j < b_end; ++j) {
                auto& e = count_b[b[j]];
                e.first++;
                e.second = j;
            }
            std::vector<std::pair<int, int>> cand;
            for (const auto& [id, ca] : count_a) {
                auto it = count_b.find(id);
                if (ca.first == 1 && it != count_b.end() && it->second.first == 1)
                    cand.emplace_back(ca.second, it->second.second);
            }
            auto chain = lis_anchors(std::move(cand));
            if (!chain.empty()) {
                int pa = a_begin, pb = b_begin;
                for (const auto& [ai, bi] : chain) {
                    match_region(a, pa, ai, b, pb, bi, out);
                    out.emplace_back(ai, bi);
                    pa = ai + 1;
                    pb = bi + 1;
                }
                match_region(a, pa, a_end, b, pb, b_end, out);
            }
            // No anchors: the whole region is one replacement, no matches.
        }
    }
    for (int i = a_end, j = b_end; i < a_stop; ++i, ++j) out.emplace_back(i, j);
}

}  // namespace

namespace detail {
std::size_t set_dp_cell_limit(std::size_t cells) {
    std::size_t previous = g_max_dp_cells;
    g_max_dp_cells = cells;
    return previous;
}
}  // namespace detail

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string::npos) {
            lines.push_back(text.substr(pos));
            break;
        }
        lines.push_back(text.substr(pos, nl - pos));
        pos = nl + 1;
    }
    return lines;
}

std::vector<std::pair<int, int>> match_lines(const std::vector<std::string>& base,
                                             const std::vector<std::string>& version) {
    std::vector<int> ids_a, ids_b;
    intern(base, version, ids_a, ids_b);
    std::vector<std::pair<int, int>> out;
    match_region(ids_a, 0, static_cast<int>(ids_a.size()), ids_b, 0,
                 static_cast<int>(ids_b.size()), out);
    return out;
}

std::vector<DiffHunk> diff_lines(const std::vector<std::string>& base,
                                 const std::vector<std::string>& version) {
    auto matches = match_lines(base, version);
    std::vector<DiffHunk> hunks;
    int pb = 0, pv = 0;
    auto flush_gap = [&](int nb, int nv) {
        if (nb > pb || nv > pv) hunks.push_back({pb, nb, pv, nv});
    };
    for (const auto& [bi, vi] : matches) {
        flush_gap(bi, vi);
        pb = bi + 1;
        pv = vi + 1;
    }
    flush_gap(static_cast<int>(base.size()), static_cast<int>(version.size()));
    return hunks;
}

}  // namespace mergectx::linediff
