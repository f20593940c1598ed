#include "mergectx/align.hpp"

#include <algorithm>

namespace mergectx::align {

LineSegmentTree::LineSegmentTree(std::string file, int size)
    : file_(std::move(file)), size_(size) {
    if (size_ < 1) size_ = 1;
    stamps_.resize(4 * static_cast<std::size_t>(size_));
}

void LineSegmentTree::annotate(int node_id, int first, int last) {
    if (first < 1 || last > size_ || first > last)
        throw SpanOutOfRange(file_ + ": span [" + std::to_string(first) + "," +
                             std::to_string(last) + "] outside [1," + std::to_string(size_) +
                             "]");
    annotate_rec(1, 1, size_, first, last, node_id);
}

void LineSegmentTree::annotate_rec(int t, int lo, int hi, int first, int last, int node_id) {
    if (last < lo || hi < first) return;
    if (first <= lo && hi <= last) {
        stamps_[static_cast<std::size_t>(t)].push_back(node_id);
        return;
    }
    int mid = (lo + hi) / 2;
    annotate_rec(2 * t, lo, mid, first, last, node_id);
    annotate_rec(2 * t + 1, mid + 1, hi, first, last, node_id);
}

std::vector<int> LineSegmentTree::query(int first, int last) const {
    std::vector<int> out;
    if (first > last) return out;
    query_rec(1, 1, size_, std::max(first, 1), std::min(last, size_), out);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

void LineSegmentTree::query_rec(int t, int lo, int hi, int first, int last,
                                std::vector<int>& out) const {
    if (last < lo || hi < first) return;
    const auto& stamps = stamps_[static_cast<std::size_t>(t)];
    out.insert(out.end(), stamps.begin(), stamps.end());
    if (lo == hi) return;
    int mid = (lo + hi) / 2;
    query_rec(2 * t, lo, mid, first, last, out);
    query_rec(2 * t + 1, mid + 1, hi, first, last, out);
}

LineSegmentTree build_tree(const std::string& file, int line_count,
                           const std::vector<mtcpg::MtCpgNode>& graph_nodes) {
    LineSegmentTree tree(file, line_count);
    for (const auto& node : graph_nodes) {
        if (node.file != file) continue;
        tree.annotate(node.id, node.start_line, node.end_line);
    }
    return tree;
}

std::vector<int> query_blocks(const LineSegmentTree& tree, const ingest::CodeBlock& block) {
    return tree.query(block.start_line, block.end_line);
}

namespace serial {
std::vector<int> query_scan(const std::vector<mtcpg::MtCpgNode>& nodes, const std::string& file,
                            int first, int last) {
    std::vector<int> out;
    for (const auto& n : nodes) {
        if (n.file != file) continue;
        if (n.start_line <= last && first <= n.end_line) out.push_back(n.id);
    }
    std::sort(out.begin(), out.end());
    return out;
}
}  // namespace serial

void color_graph(mtcpg::MtCpg& graph, const std::vector<ingest::CodeBlock>& blocks,
                 const std::map<std::string, int>& line_counts) {
    for (auto& node : graph.nodes) node.attached_blocks.clear();

    // One tree per file that actually has blocks.
    std::map<std::string, LineSegmentTree> trees;
    for (const auto& block : blocks) {
        if (trees.count(block.file)) continue;
        std::vector<mtcpg::MtCpgNode> file_nodes;
        for (const auto& n : graph.nodes)
            if (n.file == block.file) file_nodes.push_back(n);
        auto it = line_counts.find(block.file);
        int size;
        if (it != line_counts.end()) {
            size = it->second;  // strict: node spans beyond this throw
        } else {
            // File without a recorded length: size the tree to fit.
            size = std::max(block.end_line, 1);
            for (const auto& n : file_nodes) size = std::max(size, n.end_line);
        }
        trees.emplace(block.file, build_tree(block.file, size, file_nodes));
    }

    // Parallel query phase; attachment stays in block input order.
    std::vector<std::vector<int>> hits(blocks.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (long i = 0; i < static_cast<long>(blocks.size()); ++i) {
        const auto& block = blocks[static_cast<std::size_t>(i)];
        hits[static_cast<std::size_t>(i)] = query_blocks(trees.at(block.file), block);
    }
    for (std::size_t i = 0; i < blocks.size(); ++i)
        for (int node_id : hits[i])
            graph.nodes[static_cast<std::size_t>(node_id)].attached_blocks.push_back(
                blocks[i].id);
}

}  // namespace mergectx::align
