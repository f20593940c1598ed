#include "mergectx/context.hpp"

#include "mergectx/linediff.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace mergectx::context {

namespace {

struct Dsu {
    std::vector<int> parent;
    explicit Dsu(int n) : parent(static_cast<std::size_t>(n)) {
        for (int i = 0; i < n; ++i) parent[static_cast<std::size_t>(i)] = i;
    }
    int find(int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (b < a) std::swap(a, b);  // keep the smaller id as root
        parent[static_cast<std::size_t>(b)] = a;
        return true;
    }
};

}  // namespace

Csr build_csr(int node_count, const std::vector<mtcpg::MtCpgEdge>& edges) {
    Csr csr;
    std::vector<int> degree(static_cast<std::size_t>(node_count), 0);
    for (const auto& e : edges) {
        degree[static_cast<std::size_t>(e.src)]++;
        degree[static_cast<std::size_t>(e.dst)]++;
    }
    csr.offsets.resize(static_cast<std::size_t>(node_count) + 1, 0);
    for (int i = 0; i < node_count; ++i)
        csr.offsets[static_cast<std::size_t>(i) + 1] =
            csr.offsets[static_cast<std::size_t>(i)] + degree[static_cast<std::size_t>(i)];
    csr.neighbors.resize(static_cast<std::size_t>(csr.offsets.back()));
    std::vector<int> cursor(csr.offsets.begin(), csr.offsets.end() - 1);
    for (const auto& e : edges) {
        csr.neighbors[static_cast<std::size_t>(cursor[static_cast<std::size_t>(e.src)]++)] =
            e.dst;
        csr.neighbors[static_cast<std::size_t>(cursor[static_cast<std::size_t>(e.dst)]++)] =
            e.src;
    }
    // Deterministic neighbor order.
    for (int v = 0; v < node_count; ++v)
        std::sort(csr.neighbors.begin() + csr.offsets[static_cast<std::size_t>(v)],
                  csr.neighbors.begin() + csr.offsets[static_cast<std::size_t>(v) + 1]);
    return csr;
}

namespace serial {

std::vector<std::vector<int>> reach_within_k(const Csr& csr, const std::vector<int>& sources,
                                             const std::vector<char>& target_mask, int k,
                                             const BfsLimits& limits,
                                             std::vector<std::string>* diagnostics) {
    const int n = csr.node_count();
    std::vector<std::vector<int>> result(sources.size());
    std::vector<int> seen_at(static_cast<std::size_t>(n), -1);
    for (std::size_t si = 0; si < sources.size(); ++si) {
        const int src = sources[si];
        // Level-synchronous BFS: stop expanding once the visit cap is passed
        // at a level boundary.
        std::vector<int> frontier{src};
        seen_at[static_cast<std::size_t>(src)] = static_cast<int>(si);
        int visited = 1;
        if (target_mask[static_cast<std::size_t>(src)]) result[si].push_back(src);
        bool capped = false;
        for (int depth = 1; depth <= k && !frontier.empty(); ++depth) {
            if (visited > limits.per_source_visit_cap) {
                capped = true;
                break;
            }
            std::vector<int> next;
            for (int u : frontier) {
                for (int off = csr.offsets[static_cast<std::size_t>(u)];
                     off < csr.offsets[static_cast<std::size_t>(u) + 1]; ++off) {
                    int v = csr.neighbors[static_cast<std::size_t>(off)];
                    if (seen_at[static_cast<std::size_t>(v)] ==
                        static_cast<int>(si))
                        continue;
                    seen_at[static_cast<std::size_t>(v)] = static_cast<int>(si);
                    next.push_back(v);
                    ++visited;
                    if (target_mask[static_cast<std::size_t>(v)]) result[si].push_back(v);
                }
            }
            frontier = std::move(next);
        }
        if (capped && diagnostics)
            diagnostics->push_back("bfs visit cap hit at source node " + std::to_string(src));
        std::sort(result[si].begin(), result[si].end());
    }
    return result;
}

}  // namespace serial

std::vector<std::vector<int>> reach_within_k(const Csr& csr, const std::vector<int>& sources,
                                             const std::vector<char>& target_mask, int k,
                                             const BfsLimits& limits,
                                             std::vector<std::string>* diagnostics) {
    const int n = csr.node_count();
    const int batch_count = (static_cast<int>(sources.size()) + 63) / 64;
    std::vector<std::vector<int>> result(sources.size());
    std::vector<std::vector<std::string>> batch_diags(static_cast<std::size_t>(batch_count));

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (long batch = 0; batch < batch_count; ++batch) {
        const std::size_t first = static_cast<std::size_t>(batch) * 64;
        const std::size_t count = std::min<std::size_t>(64, sources.size() - first);
        std::vector<uint64_t> seen(static_cast<std::size_t>(n), 0);
        std::vector<uint64_t> frontier(static_cast<std::size_t>(n), 0);
        std::vector<int> frontier_nodes;
        std::vector<int> visited(count, 1);
        uint64_t active = count == 64 ? ~0ull : ((1ull << count) - 1);
        for (std::size_t b = 0; b < count; ++b) {
            int src = sources[first + b];
            if (!(seen[static_cast<std::size_t>(src)])) frontier_nodes.push_back(src);
            seen[static_cast<std::size_t>(src)] |= 1ull << b;
            frontier[static_cast<std::size_t>(src)] |= 1ull << b;
        }
        for (int depth = 1; depth <= k && active != 0 && !frontier_nodes.empty(); ++depth) {
            // Mask out capped sources at level boundaries (matches serial).
            for (std::size_t b = 0; b < count; ++b) {
                if ((active >> b) & 1ull) {
                    if (visited[b] > limits.per_source_visit_cap) {
                        active &= ~(1ull << b);
                        batch_diags[static_cast<std::size_t>(batch)].push_back(
                            "bfs visit cap hit at source node " +
                            std::to_string(sources[first + b]));
                    }
                }
            }
            if (active == 0) break;
            // Push-style expansion: one shared sweep advances all 64 sources.
            std::vector<uint64_t> next(static_cast<std::size_t>(n), 0);
            std::vector<int> next_nodes;
            for (int u : frontier_nodes) {
                uint64_t fm = frontier[static_cast<std::size_t>(u)] & active;
                if (!fm) continue;
                for (int off = csr.offsets[static_cast<std::size_t>(u)];
                     off < csr.offsets[static_cast<std::size_t>(u) + 1]; ++off) {
                    int v = csr.neighbors[static_cast<std::size_t>(off)];
                    uint64_t gather = fm & ~seen[static_cast<std::size_t>(v)];
                    if (!gather) continue;
                    if (!next[static_cast<std::size_t>(v)]) next_nodes.push_back(v);
                    next[static_cast<std::size_t>(v)] |= gather;
                    seen[static_cast<std::size_t>(v)] |= gather;
                    uint64_t bits = gather;
                    while (bits) {
                        int b = std::countr_zero(bits);
                        bits &= bits - 1;
                        visited[static_cast<std::size_t>(b)]++;
                    }
                }
            }
            for (int u : frontier_nodes) frontier[static_cast<std::size_t>(u)] = 0;
            for (int v : next_nodes)
                frontier[static_cast<std::size_t>(v)] = next[static_cast<std::size_t>(v)];
            frontier_nodes = std::move(next_nodes);
        }
        for (int v = 0; v < n; ++v) {
            if (!target_mask[static_cast<std::size_t>(v)]) continue;
            uint64_t bits = seen[static_cast<std::size_t>(v)];
            while (bits) {
                int b = std::countr_zero(bits);
                bits &= bits - 1;
                result[first + static_cast<std::size_t>(b)].push_back(v);
            }
        }
    }
    if (diagnostics)
        for (const auto& dlist : batch_diags)
            for (const auto& d : dlist) diagnostics->push_back(d);
    return result;  // per-source lists already ascending (v scanned in order)
}

std::vector<ContextGroup> single_version_contexts(const mtcpg::MtCpg& graph,
                                                  const std::set<std::string>& conflict_block_ids,
                                                  DistanceThreshold k, BfsLimits limits,
                                                  std::vector<std::string>* diagnostics) {
    const int n = static_cast<int>(graph.nodes.size());
    std::vector<char> is_qnode(static_cast<std::size_t>(n), 0);
    std::vector<int> conflict_sources;
    for (const auto& node : graph.nodes) {
        if (node.attached_blocks.empty()) continue;
        is_qnode[static_cast<std::size_t>(node.id)] = 1;
        for (const auto& id : node.attached_blocks) {
            if (conflict_block_ids.count(id)) {
                conflict_sources.push_back(node.id);
                break;
            }
        }
    }
    if (conflict_sources.empty()) return {};

    Csr csr = build_csr(n, graph.edges);
    auto reach = reach_within_k(csr, conflict_sources, is_qnode, k.k, limits, diagnostics);

    Dsu node_sets(n);
    for (std::size_t si = 0; si < conflict_sources.size(); ++si)
        for (int u : reach[si]) node_sets.unite(conflict_sources[si], u);

    // Node groups in canonical order (by smallest node id).
    std::map<int, std::vector<int>> node_groups;
    for (int v = 0; v < n; ++v)
        if (is_qnode[static_cast<std::size_t>(v)]) node_groups[node_sets.find(v)].push_back(v);

    // Project node groups onto block groups: the first block seen in a node
    // group is the representative, later blocks of the group are unioned in.
    std::vector<std::string> block_order;
    std::map<std::string, int> block_idx;
    auto intern_block = [&](const std::string& id) {
        auto it = block_idx.find(id);
        if (it != block_idx.end()) return it->second;
        int idx = static_cast<int>(block_order.size());
        block_order.push_back(id);
        block_idx.emplace(id, idx);
        return idx;
    };
    for (const auto& [root, members] : node_groups)
        for (int v : members)
            for (const auto& id : graph.nodes[static_cast<std::size_t>(v)].attached_blocks)
                intern_block(id);

    Dsu block_sets(static_cast<int>(block_order.size()));
    for (const auto& [root, members] : node_groups) {
        int rep = -1;
        for (int v : members) {
            for (const auto& id : graph.nodes[static_cast<std::size_t>(v)].attached_blocks) {
                int idx = block_idx.at(id);
                if (rep < 0)
                    rep = idx;
                else
                    block_sets.unite(rep, idx);
            }
        }
    }

    std::map<int, ContextGroup> groups;
    for (std::size_t i = 0; i < block_order.size(); ++i) {
        int root = block_sets.find(static_cast<int>(i));
        auto& g = groups[root];
        g.member_blocks.push_back(block_order[i]);
        if (conflict_block_ids.count(block_order[i])) g.conflict_blocks.push_back(block_order[i]);
    }
    std::vector<ContextGroup> out;
    for (auto& [root, g] : groups) {
        if (g.conflict_blocks.empty()) continue;  // conflict-centric only
        std::sort(g.member_blocks.begin(), g.member_blocks.end());
        std::sort(g.conflict_blocks.begin(), g.conflict_blocks.end());
        out.push_back(std::move(g));
    }
    std::sort(out.begin(), out.end(), [](const ContextGroup& x, const ContextGroup& y) {
        return x.member_blocks.front() < y.member_blocks.front();
    });
    for (std::size_t i = 0; i < out.size(); ++i) out[i].group_id = static_cast<int>(i);
    return out;
}

std::vector<ContextGroup> cross_version_contexts(const std::vector<ContextGroup>& r_a,
                                                 const std::vector<ContextGroup>& r_b,
                                                 const std::vector<ingest::BlockPair>& pairs,
                                                 const std::set<std::string>& conflict_block_ids) {
    std::vector<std::string> block_order;
    std::map<std::string, int> block_idx;
    auto intern_block = [&](const std::string& id) {
        auto it = block_idx.find(id);
        if (it != block_idx.end()) return it->second;
        int idx = static_cast<int>(block_order.size());
        block_order.push_back(id);
        block_idx.emplace(id, idx);
        return idx;
    };
    for (const auto* groups : {&r_a, &r_b})
        for (const auto& g : *groups)
            for (const auto& id : g.member_blocks) intern_block(id);
    for (const auto& p : pairs) {
        intern_block(p.block_a);
        intern_block(p.block_b);
    }

    Dsu sets(static_cast<int>(block_order.size()));
    for (const auto* groups : {&r_a, &r_b}) {
        for (const auto& g : *groups) {
            int rep = -1;
            for (const auto& id : g.member_blocks) {
                int idx = block_idx.at(id);
                if (rep < 0)
                    rep = idx;
                else
                    sets.unite(rep, idx);
            }
        }
    }
    // Merge across versions until a full pass makes no progress.
    while (true) {
        bool merged = false;
        for (const auto& p : pairs)
            if (sets.unite(block_idx.at(p.block_a), block_idx.at(p.block_b))) merged = true;
        if (!merged) break;
    }

    std::map<int, ContextGroup> groups;
    for (std::size_t i = 0; i < block_order.size(); ++i) {
        int root = sets.find(static_cast<int>(i));
        auto& g = groups[root];
        g.member_blocks.push_back(block_order[i]);
        if (conflict_block_ids.count(block_order[i])) g.conflict_blocks.push_back(block_order[i]);
    }
    std::vector<ContextGroup> out;
    for (auto& [root, g] : groups) {
        if (g.conflict_blocks.empty()) continue;
        std::sort(g.member_blocks.begin(), g.member_blocks.end());
        std::sort(g.conflict_blocks.begin(), g.conflict_blocks.end());
        out.push_back(std::move(g));
    }
    std::sort(out.begin(), out.end(), [](const ContextGroup& x, const ContextGroup& y) {
        return x.member_blocks.front() < y.member_blocks.front();
    });
    for (std::size_t i = 0; i < out.size(); ++i) out[i].group_id = static_cast<int>(i);
    return out;
}

RenderedContext render_context(const ContextGroup& group, const BlockLookup& lookup,
                               const std::map<std::string, std::string>& version_roots) {
    RenderedContext rendered;
    struct Snippet {
        std::string file;
        int start_line;
        std::string version;
        std::string body;
    };
    std::vector<Snippet> snippets;
    std::vector<std::pair<std::string, std::string>> conflicts;  // (sort key, text)
    std::set<std::string> conflict_seen;

    for (const auto& id : group.member_blocks) {
        const ingest::CodeBlock* block = lookup(id);
        if (!block) throw MissingSource("unknown block id " + id);
        const std::string version = ingest::to_string(block->version);
        if (block->kind == ingest::BlockKind::Conflict) {
            if (conflict_seen.insert(block->id).second)
                conflicts.emplace_back(block->file + ":" + std::to_string(block->start_line),
                                       "@@ conflict " + block->file + " | merged lines " +
                                           std::to_string(block->start_line) + "-" +
                                           std::to_string(block->end_line) + " @@\n" +
                                           block->text);
            continue;
        }
        auto root_it = version_roots.find(version);
        if (root_it == version_roots.end())
            throw MissingSource("no source tree for version " + version);
        std::filesystem::path path = std::filesystem::path(root_it->second) / block->file;
        std::ifstream in(path, std::ios::binary);
        if (!in) throw MissingSource("missing file " + path.string());
        std::ostringstream buf;
        buf << in.rdbuf();
        auto lines = linediff::split_lines(buf.str());
        std::ostringstream body;
        body << "@@ context " << block->file << " | version " << version << " | lines "
             << block->start_line << "-" << block->end_line << " @@\n";
        for (int ln = block->start_line;
             ln <= block->end_line && ln <= static_cast<int>(lines.size()); ++ln)
            body << "+ " << lines[static_cast<std::size_t>(ln - 1)] << "\n";
        snippets.push_back({block->file, block->start_line, version, body.str()});
    }
    std::sort(snippets.begin(), snippets.end(), [](const Snippet& x, const Snippet& y) {
        return std::tie(x.file, x.start_line, x.version) <
               std::tie(y.file, y.start_line, y.version);
    });
    for (auto& s : snippets) rendered.context_snippets.push_back(std::move(s.body));
    std::sort(conflicts.begin(), conflicts.end());
    for (auto& [key, text] : conflicts) rendered.conflict_texts.push_back(std::move(text));
    return rendered;
}

}  // namespace mergectx::context
