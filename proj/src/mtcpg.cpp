#include "mergectx/mtcpg.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <sstream>

namespace mergectx::mtcpg {

namespace {
using nlohmann::json;
}

std::string to_string(Layer layer) { return layer == Layer::High ? "high" : "low"; }

std::string to_string(EdgeKind kind) {
    switch (kind) {
        case EdgeKind::Ast: return "ast";
        case EdgeKind::Cfg: return "cfg";
        case EdgeKind::DataFlow: return "dataflow";
        case EdgeKind::CrossLayer: return "cross_layer";
        case EdgeKind::InterFile: return "inter_file";
    }
    return "?";
}

bool is_base_edge(EdgeKind kind) {
    return kind == EdgeKind::Ast || kind == EdgeKind::Cfg || kind == EdgeKind::DataFlow;
}

Layer layer_of(DefKind kind) {
    switch (kind) {
        case DefKind::TypeDef:
        case DefKind::MethodDef:
        case DefKind::GlobalVarDef:
        case DefKind::ImportDef: return Layer::High;
        case DefKind::MemberDef:
        case DefKind::MethodStmt:
        case DefKind::MethodVarDef: return Layer::Low;
    }
    return Layer::Low;
}

bool MtCpg::has_edge(int src, int dst, EdgeKind kind) const {
    return std::find(edges.begin(), edges.end(), MtCpgEdge{src, dst, kind}) != edges.end();
}

const MtCpgNode* MtCpg::find_node(const std::string& file, DefKind kind,
                                  const std::string& name) const {
    for (const auto& n : nodes)
        if (n.file == file && n.kind == kind && n.name == name) return &n;
    return nullptr;
}

const MtCpgNode* MtCpg::find_node_at(const std::string& file, DefKind kind, int line) const {
    for (const auto& n : nodes)
        if (n.file == file && n.kind == kind && n.start_line == line) return &n;
    return nullptr;
}

MtCpg build_mtcpg(const std::vector<frontend::ParsedFile>& files,
                  const std::set<std::string>& changed_files) {
    MtCpg graph;

    // Canonical node order: files sorted by path, definitions by (line, kind
    // order, name). Base edge endpoints are remapped accordingly.
    std::vector<const frontend::ParsedFile*> ordered;
    for (const auto& f : files) ordered.push_back(&f);
    std::sort(ordered.begin(), ordered.end(),
              [](const auto* a, const auto* b) { return a->file < b->file; });

    for (const auto* pf : ordered) {
        const auto& defs = pf->defs;
        std::vector<int> order(defs.size());
        for (std::size_t i = 0; i < defs.size(); ++i) order[i] = static_cast<int>(i);
        std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
            const auto& dx = defs[static_cast<std::size_t>(x)];
            const auto& dy = defs[static_cast<std::size_t>(y)];
            return std::tie(dx.start_line, dx.end_line, dx.kind, x) <
                   std::tie(dy.start_line, dy.end_line, dy.kind, y);
        });
        std::vector<int> def_to_node(defs.size(), -1);
        for (int rank = 0; rank < static_cast<int>(order.size()); ++rank) {
            const auto& d = defs[static_cast<std::size_t>(order[static_cast<std::size_t>(rank)])];
            MtCpgNode node;
            node.id = static_cast<int>(graph.nodes.size());
            node.kind = d.kind;
            node.layer = layer_of(d.kind);
            node.file = d.file;
            // Containers align on their header lines only; the body belongs
            // to the contained nodes.
            node.start_line = d.start_line;
            node.end_line = d.header_end_line > 0 ? d.header_end_line : d.end_line;
            node.name = d.name;
            node.signature = d.signature;
            node.referenced_names = d.referenced_names;
            node.has_body = d.has_body;
            def_to_node[static_cast<std::size_t>(order[static_cast<std::size_t>(rank)])] =
                node.id;
            graph.nodes.push_back(std::move(node));
        }
        // Parents and indexes.
        for (std::size_t i = 0; i < defs.size(); ++i) {
            int node_id = def_to_node[i];
            auto& node = graph.nodes[static_cast<std::size_t>(node_id)];
            if (defs[i].parent >= 0)
                node.parent = def_to_node[static_cast<std::size_t>(defs[i].parent)];
            graph.file_index[node.file].push_back(node_id);
            if (!node.name.empty())
                graph.name_index[{node.file, node.name}].push_back(node_id);
        }
        for (const auto& e : pf->base_edges) {
            EdgeKind kind = e.kind == BaseEdgeKind::Ast    ? EdgeKind::Ast
                            : e.kind == BaseEdgeKind::Cfg ? EdgeKind::Cfg
                                                          : EdgeKind::DataFlow;
            graph.edges.push_back({def_to_node[static_cast<std::size_t>(e.src)],
                                   def_to_node[static_cast<std::size_t>(e.dst)], kind});
        }
    }
    for (auto& [file, ids] : graph.file_index) std::sort(ids.begin(), ids.end());
    for (auto& [key, ids] : graph.name_index) std::sort(ids.begin(), ids.end());
    graph.base_edge_count = static_cast<int>(graph.edges.size());

    add_cross_layer_edges(graph);
    add_inter_file_edges(graph, changed_files);

    std::sort(graph.edges.begin(), graph.edges.end());
    graph.edges.erase(std::unique(graph.edges.begin(), graph.edges.end()), graph.edges.end());
    return graph;
}

int add_cross_layer_edges(MtCpg& graph) {
    std::set<MtCpgEdge> existing(graph.edges.begin(), graph.edges.end());
    int added = 0;
    auto add_edge = [&](int src, int dst, EdgeKind kind) {
        MtCpgEdge e{src, dst, kind};
        if (existing.insert(e).second) {
            graph.edges.push_back(e);
            ++added;
        }
    };

    // Containment: High definition -> contained Low node.
    for (const auto& node : graph.nodes) {
        if (node.parent < 0) continue;
        const auto& parent = graph.nodes[static_cast<std::size_t>(node.parent)];
        if (parent.layer == Layer::High && node.layer == Layer::Low)
            add_edge(parent.id, node.id, EdgeKind::CrossLayer);
    }

    // Usage: Low node -> same-file High node it references. Names already
    // bound to a local of the same method stay with the dataflow edges.
    for (const auto& node : graph.nodes) {
        if (node.layer != Layer::Low) continue;
        for (const auto& name : node.referenced_names) {
            bool is_local = false;
            if (node.parent >= 0) {
                auto it = graph.name_index.find({node.file, name});
                if (it != graph.name_index.end()) {
                    for (int cand : it->second) {
                        const auto& c = graph.nodes[static_cast<std::size_t>(cand)];
                        if (c.kind == DefKind::MethodVarDef && c.parent == node.parent) {
                            is_local = true;
                            break;
                        }
                    }
                }
            }
            if (is_local) continue;
            bool resolved = false;
            auto it = graph.name_index.find({node.file, name});
            if (it != graph.name_index.end()) {
                for (int cand : it->second) {
                    const auto& c = graph.nodes[static_cast<std::size_t>(cand)];
                    if (c.id == node.id) continue;
                    if (c.layer == Layer::High) {
                        add_edge(node.id, c.id, EdgeKind::CrossLayer);
                        resolved = true;
                    } else if (c.kind == DefKind::MemberDef && c.parent >= 0) {
                        // A member reference depends on the definition that
                        // contains the member.
                        const auto& owner = graph.nodes[static_cast<std::size_t>(c.parent)];
                        if (owner.layer == Layer::High && owner.id != node.id) {
                            add_edge(node.id, owner.id, EdgeKind::CrossLayer);
                            resolved = true;
                        }
                    }
                }
            }
            if (!resolved) graph.unresolved_refs.emplace_back(node.id, name);
        }
    }
    return added;
}

bool import_matches_file(const std::string& import_name, const std::string& file_path) {
    if (import_name.empty()) return false;
    if (import_name == file_path) return true;
    // Suffix match on path components: "math_utils.h" vs "include/math_utils.h".
    if (file_path.size() > import_name.size() &&
        file_path.compare(file_path.size() - import_name.size(), import_name.size(),
                          import_name) == 0 &&
        file_path[file_path.size() - import_name.size() - 1] == '/')
        return true;
    // Dotted module path: "pkg.mod" vs "pkg/mod.py", "com.acme.Widget" vs
    // ".../com/acme/Widget.java".
    std::string slashed = import_name;
    std::replace(slashed.begin(), slashed.end(), '.', '/');
    for (const char* ext : {".py", ".java"}) {
        std::string candidate = slashed + ext;
        if (file_path == candidate) return true;
        if (file_path.size() > candidate.size() &&
            file_path.compare(file_path.size() - candidate.size(), candidate.size(),
                              candidate) == 0 &&
            file_path[file_path.size() - candidate.size() - 1] == '/')
            return true;
    }
    return false;
}

int add_inter_file_edges(MtCpg& graph, const std::set<std::string>& changed_files) {
    std::set<MtCpgEdge> existing(graph.edges.begin(), graph.edges.end());
    int added = 0;
    auto add_edge = [&](int src, int dst, EdgeKind kind) {
        MtCpgEdge e{src, dst, kind};
        if (existing.insert(e).second) {
            graph.edges.push_back(e);
            ++added;
        }
    };

    // Per-file import lists (only imports that resolve to a changed file in
    // this graph).
    std::map<std::string, std::vector<std::pair<int, std::string>>> imports_of;
    for (const auto& node : graph.nodes) {
        if (node.kind != DefKind::ImportDef) continue;
        for (const auto& [file, ids] : graph.file_index) {
            if (file == node.file) continue;
            if (!changed_files.count(file)) continue;
            if (import_matches_file(node.name, file))
                imports_of[node.file].push_back({node.id, file});
        }
    }

    // Transitive search: High nodes named `name` reachable from file F
    // through its imports. The first hop's ImportDef node anchors the edges.
    auto search = [&](const std::string& from_file, const std::string& name) {
        std::vector<std::pair<int, int>> found;  // (first-hop import node, target)
        auto it = imports_of.find(from_file);
        if (it == imports_of.end()) return found;
        for (const auto& [import_node, first_file] : it->second) {
            std::set<std::string> visited{from_file};
            std::vector<std::string> stack{first_file};
            while (!stack.empty()) {
                std::string file = stack.back();
                stack.pop_back();
                if (!visited.insert(file).second) continue;
                auto ni = graph.name_index.find({file, name});
                if (ni != graph.name_index.end()) {
                    for (int cand : ni->second) {
                        const auto& c = graph.nodes[static_cast<std::size_t>(cand)];
                        if (c.layer == Layer::High) {
                            found.push_back({import_node, cand});
                        } else if (c.kind == DefKind::MemberDef && c.parent >= 0 &&
                                   graph.nodes[static_cast<std::size_t>(c.parent)].layer ==
                                       Layer::High) {
                            // Member hit: depend on its containing definition.
                            found.push_back({import_node, c.parent});
                        }
                    }
                }
                auto fi = imports_of.find(file);
                if (fi != imports_of.end())
                    for (const auto& [_, next_file] : fi->second) stack.push_back(next_file);
            }
        }
        return found;
    };

    std::vector<std::pair<int, std::string>> still_unresolved;
    for (const auto& [node_id, name] : graph.unresolved_refs) {
        const auto& node = graph.nodes[static_cast<std::size_t>(node_id)];
        if (node.layer != Layer::Low) {
            still_unresolved.emplace_back(node_id, name);
            continue;
        }
        auto found = search(node.file, name);
        if (found.empty()) {
            still_unresolved.emplace_back(node_id, name);
            continue;
        }
        for (const auto& [import_node, target] : found) {
            add_edge(node_id, import_node, EdgeKind::CrossLayer);
            add_edge(import_node, target, EdgeKind::InterFile);
        }
    }
    for (const auto& [node_id, name] : still_unresolved) {
        const auto& node = graph.nodes[static_cast<std::size_t>(node_id)];
        graph.diagnostics.push_back("unresolved reference '" + name + "' at " + node.file + ":" +
                                    std::to_string(node.start_line));
    }
    graph.unresolved_refs = std::move(still_unresolved);

    // Prototype -> definition, matched conservatively on name and normalized
    // signature across files.
    for (const auto& decl : graph.nodes) {
        if (decl.kind != DefKind::MethodDef || decl.has_body) continue;
        for (const auto& def : graph.nodes) {
            if (def.kind != DefKind::MethodDef || !def.has_body) continue;
            if (def.file == decl.file) continue;
            if (def.name != decl.name || def.signature != decl.signature) continue;
            add_edge(decl.id, def.id, EdgeKind::InterFile);
        }
    }
    return added;
}

std::string to_json(const MtCpg& graph) {
    json j;
    j["nodes"] = json::array();
    for (const auto& n : graph.nodes) {
        json jn;
        jn["id"] = n.id;
        jn["kind"] = frontend::to_string(n.kind);
        jn["layer"] = to_string(n.layer);
        jn["file"] = n.file;
        jn["line_span"] = {n.start_line, n.end_line};
        jn["name"] = n.name;
        if (!n.signature.empty()) jn["signature"] = n.signature;
        if (!n.attached_blocks.empty()) jn["attached_blocks"] = n.attached_blocks;
        j["nodes"].push_back(std::move(jn));
    }
    j["edges"] = json::array();
    for (const auto& e : graph.edges)
        j["edges"].push_back({{"src", e.src}, {"dst", e.dst}, {"kind", to_string(e.kind)}});
    return j.dump(2);
}

std::string to_dot(const MtCpg& graph) {
    std::ostringstream os;
    os << "digraph mtcpg {\n";
    for (const auto& n : graph.nodes) {
        os << "  n" << n.id << " [label=\"" << frontend::to_string(n.kind);
        if (!n.name.empty()) os << "\\n" << n.name;
        os << "\\n" << n.file << ":" << n.start_line << "\"";
        if (n.layer == Layer::High) os << " shape=box";
        os << "];\n";
    }
    for (const auto& e : graph.edges) {
        os << "  n" << e.src << " -> n" << e.dst << " [label=\"" << to_string(e.kind) << "\"";
        if (e.kind == EdgeKind::CrossLayer) os << " style=dashed";
        if (e.kind == EdgeKind::InterFile) os << " style=dotted";
        os << "];\n";
    }
    os << "}\n";
    return os.str();
}

}  // namespace mergectx::mtcpg
