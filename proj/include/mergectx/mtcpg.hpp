#pragma once
// Multi-layer code property graph: per-file definitions and base edges
// elevated into one graph per version, with cross-layer edges (definition
// <-> contained element, use -> definition) and inter-file edges mediated by
// import nodes.

#include "mergectx/frontend.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace mergectx::mtcpg {

using frontend::BaseEdgeKind;
using frontend::DefKind;

enum class Layer { High, Low };

enum class EdgeKind { Ast, Cfg, DataFlow, CrossLayer, InterFile };

std::string to_string(Layer layer);
std::string to_string(EdgeKind kind);
bool is_base_edge(EdgeKind kind);

/// High layer: standalone definitions and file-level elements. Low layer:
/// elements contained in a definition.
Layer layer_of(DefKind kind);

struct MtCpgNode {
    int id = 0;
    DefKind kind = DefKind::MethodStmt;
    Layer layer = Layer::Low;
    std::string file;
    int start_line = 0;  // alignment span: header lines only for containers
    int end_line = 0;
    std::string name;
    std::string signature;
    std::vector<std::string> attached_blocks;  // filled by the align stage

    // Resolution inputs carried over from the frontend.
    std::vector<std::string> referenced_names;
    int parent = -1;
    bool has_body = false;
};

struct MtCpgEdge {
    int src = 0;
    int dst = 0;
    EdgeKind kind = EdgeKind::Ast;
    bool operator==(const MtCpgEdge& o) const = default;
    auto operator<=>(const MtCpgEdge& o) const = default;
};

struct MtCpg {
    std::vector<MtCpgNode> nodes;
    std::vector<MtCpgEdge> edges;
    std::map<std::string, std::vector<int>> file_index;
    std::map<std::pair<std::string, std::string>, std::vector<int>> name_index;
    std::vector<std::string> diagnostics;  // unresolved references etc.

    // (node, name) references the cross-layer pass could not resolve.
    std::vector<std::pair<int, std::string>> unresolved_refs;

    int base_edge_count = 0;

    bool has_edge(int src, int dst, EdgeKind kind) const;
    const MtCpgNode* find_node(const std::string& file, DefKind kind,
                               const std::string& name) const;
    const MtCpgNode* find_node_at(const std::string& file, DefKind kind, int line) const;
};

/// Builds the graph for one version: nodes in canonical (file, line, kind)
/// order, base edges rewired to node ids, then cross-layer and inter-file
/// enrichment. Inter-file search never leaves changed_files.
MtCpg build_mtcpg(const std::vector<frontend::ParsedFile>& files,
                  const std::set<std::string>& changed_files);

/// Low -> referenced High node in the same file, plus containment edges
/// High -> contained Low. Returns the number of edges added.
int add_cross_layer_edges(MtCpg& graph);

/// Two-step inter-file construction for references the cross-layer pass left
/// unresolved, plus declaration -> definition edges for signature-matched
/// prototypes. Returns the number of edges added.
int add_inter_file_edges(MtCpg& graph, const std::set<std::string>& changed_files);

/// Matches an import spec ("math_utils.h", "pkg.mod", "com.acme.Widget")
/// against a changed-file path.
bool import_matches_file(const std::string& import_name, const std::string& file_path);

std::string to_json(const MtCpg& graph);
std::string to_dot(const MtCpg& graph);

}  // namespace mergectx::mtcpg
