#pragma once
// Graph-text alignment: per-file line segment trees annotated with graph
// nodes, queried by code blocks, and a coloring pass that attaches block ids
// to the nodes they cover.

#include "mergectx/ingest.hpp"
#include "mergectx/mtcpg.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace mergectx::align {

struct SpanOutOfRange : std::runtime_error {
    explicit SpanOutOfRange(const std::string& what) : std::runtime_error(what) {}
};

/// Interval tree over [1, size]; each tree node carries the graph nodes
/// whose line span covers its interval (canonical decomposition).
class LineSegmentTree {
public:
    LineSegmentTree(std::string file, int size);

    void annotate(int node_id, int first, int last);

    /// All annotated node ids whose span intersects [first, last], sorted.
    std::vector<int> query(int first, int last) const;

    const std::string& file() const { return file_; }
    int size() const { return size_; }

private:
    void annotate_rec(int t, int lo, int hi, int first, int last, int node_id);
    void query_rec(int t, int lo, int hi, int first, int last, std::vector<int>& out) const;

    std::string file_;
    int size_;
    std::vector<std::vector<int>> stamps_;
};

/// Builds the tree for one file and stamps every node of that file.
/// Throws SpanOutOfRange when a node's span exceeds [1, line_count].
LineSegmentTree build_tree(const std::string& file, int line_count,
                           const std::vector<mtcpg::MtCpgNode>& graph_nodes);

/// Node ids whose spans intersect the block's line range.
std::vector<int> query_blocks(const LineSegmentTree& tree, const ingest::CodeBlock& block);

namespace serial {
/// Linear-scan reference used by tests and the benchmark.
std::vector<int> query_scan(const std::vector<mtcpg::MtCpgNode>& nodes, const std::string& file,
                            int first, int last);
}  // namespace serial

/// Resets all attachments, then attaches each block (in input order) to every
/// node its span intersects. line_counts maps file -> total lines; the batch
/// query phase runs in parallel, attachment order stays deterministic.
void color_graph(mtcpg::MtCpg& graph, const std::vector<ingest::CodeBlock>& blocks,
                 const std::map<std::string, int>& line_counts);

}  // namespace mergectx::align
