#pragma once
// Conflict-centric context grouping: per-version grouping via bounded
// multi-source BFS over the colored graph, cross-version merging via a joint
// disjoint set over code-block pairs, and deterministic context rendering.

#include "mergectx/ingest.hpp"
#include "mergectx/mtcpg.hpp"

#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace mergectx::context {

struct DistanceThreshold {
    int k = 4;
};

struct ContextGroup {
    int group_id = 0;
    std::vector<std::string> member_blocks;    // canonical order, includes conflicts
    std::vector<std::string> conflict_blocks;  // non-empty
};

struct BfsLimits {
    int per_source_visit_cap = 50000;
};

/// Undirected adjacency in CSR form.
struct Csr {
    std::vector<int> offsets;
    std::vector<int> neighbors;
    int node_count() const { return static_cast<int>(offsets.size()) - 1; }
};

Csr build_csr(int node_count, const std::vector<mtcpg::MtCpgEdge>& edges);

/// For each source, the target node ids within k undirected hops. Sources
/// that hit the visit cap stop expanding and are reported in diagnostics.
/// The OpenMP path batches sources 64 at a time; `serial::` is the
/// reference.
std::vector<std::vector<int>> reach_within_k(const Csr& csr, const std::vector<int>& sources,
                                             const std::vector<char>& target_mask, int k,
                                             const BfsLimits& limits,
                                             std::vector<std::string>* diagnostics);
namespace serial {
std::vector<std::vector<int>> reach_within_k(const Csr& csr, const std::vector<int>& sources,
                                             const std::vector<char>& target_mask, int k,
                                             const BfsLimits& limits,
                                             std::vector<std::string>* diagnostics);
}

/// Per-version grouping: collect nodes with attached blocks, run the bounded
/// MS-BFS from the conflict-carrying ones, union groups, then project node
/// groups onto block groups. Groups without a conflict block are dropped.
std::vector<ContextGroup> single_version_contexts(const mtcpg::MtCpg& graph,
                                                  const std::set<std::string>& conflict_block_ids,
                                                  DistanceThreshold k, BfsLimits limits = {},
                                                  std::vector<std::string>* diagnostics = nullptr);

/// Joins the two per-version partitions through block pairs until no merge
/// happens. Groups without a conflict block are dropped from the output.
std::vector<ContextGroup> cross_version_contexts(const std::vector<ContextGroup>& r_a,
                                                 const std::vector<ContextGroup>& r_b,
                                                 const std::vector<ingest::BlockPair>& pairs,
                                                 const std::set<std::string>& conflict_block_ids);

struct MissingSource : std::runtime_error {
    explicit MissingSource(const std::string& what) : std::runtime_error(what) {}
};

/// Reads back a block's source text; file lookup order and snippet order are
/// deterministic. Conflicts are rendered separately by the prompt stage.
struct RenderedContext {
    std::vector<std::string> context_snippets;  // labeled non-conflict snippets
    std::vector<std::string> conflict_texts;    // marker-form conflicts, in order
};

using BlockLookup = std::function<const ingest::CodeBlock*(const std::string& id)>;

RenderedContext render_context(const ContextGroup& group, const BlockLookup& lookup,
                               const std::map<std::string, std::string>& version_roots);

}  // namespace mergectx::context
