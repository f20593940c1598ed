#include "mergectx/frontend.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace mergectx::frontend {

std::string to_string(Language lang) {
    switch (lang) {
        case Language::C: return "c";
        case Language::Python: return "python";
        case Language::Java: return "java";
    }
    return "?";
}

std::string to_string(DefKind kind) {
    switch (kind) {
        case DefKind::TypeDef: return "TypeDef";
        case DefKind::MethodDef: return "MethodDef";
        case DefKind::MemberDef: return "MemberDef";
        case DefKind::GlobalVarDef: return "GlobalVarDef";
        case DefKind::ImportDef: return "ImportDef";
        case DefKind::MethodStmt: return "MethodStmt";
        case DefKind::MethodVarDef: return "MethodVarDef";
    }
    return "?";
}

Language language_from_string(const std::string& name) {
    std::string lower;
    for (char c : name) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (lower == "c") return Language::C;
    if (lower == "python" || lower == "py") return Language::Python;
    if (lower == "java") return Language::Java;
    throw std::invalid_argument("unsupported language: " + name);
}

namespace lex {

bool is_identifier(const std::string& token) {
    if (token.empty()) return false;
    if (std::isdigit(static_cast<unsigned char>(token[0]))) return false;
    for (char c : token)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return true;
}

std::vector<std::string> identifiers(const std::string& text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i + 1;
            while (j < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_'))
                ++j;
            out.push_back(text.substr(i, j - i));
            i = j;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i + 1;  // skip numbers (incl. hex suffixes)
            while (j < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '.'))
                ++j;
            i = j;
        } else {
            ++i;
        }
    }
    return out;
}

std::string strip_comments_c(const std::string& text) {
    std::string out = text;
    enum class St { Code, Slash, Line, Block, BlockStar, Str, StrEsc, Chr, ChrEsc } st = St::Code;
    for (std::size_t i = 0; i < out.size(); ++i) {
        char c = out[i];
        switch (st) {
            case St::Code:
                if (c == '/') st = St::Slash;
                else if (c == '"') st = St::Str;
                else if (c == '\'') st = St::Chr;
                break;
            case St::Slash:
                if (c == '/') {
                    out[i - 1] = ' ';
                    out[i] = ' ';
                    st = St::Line;
                } else if (c == '*') {
                    out[i - 1] = ' ';
                    out[i] = ' ';
                    st = St::Block;
                } else {
                    st = St::Code;
                }
                break;
            case St::Line:
                if (c == '\n') st = St::Code;
                else out[i] = ' ';
                break;
            case St::Block:
                if (c == '*') st = St::BlockStar;
                if (c != '\n') out[i] = ' ';
                break;
            case St::BlockStar:
                if (c == '/') {
                    out[i] = ' ';
                    st = St::Code;
                } else {
                    st = (c == '*') ? St::BlockStar : St::Block;
                    if (c != '\n') out[i] = ' ';
                }
                break;
            case St::Str:
                if (c == '\\') st = St::StrEsc;
                else if (c == '"' || c == '\n') st = St::Code;
                break;
            case St::StrEsc: st = St::Str; break;
            case St::Chr:
                if (c == '\\') st = St::ChrEsc;
                else if (c == '\'' || c == '\n') st = St::Code;
                break;
            case St::ChrEsc: st = St::Chr; break;
        }
    }
    return out;
}

std::string strip_comments_python(const std::string& text) {
    std::string out = text;
    enum class St { Code, Comment, Sq, Dq, SqEsc, DqEsc, TripleSq, TripleDq } st = St::Code;
    auto triple_at = [&](std::size_t i, char q) {
        return i + 2 < out.size() && out[i] == q && out[i + 1] == q && out[i + 2] == q;
    };
    for (std::size_t i = 0; i < out.size(); ++i) {
        char c = out[i];
        switch (st) {
            case St::Code:
                if (c == '#') {
                    st = St::Comment;
                    out[i] = ' ';
                } else if (triple_at(i, '\'')) {
                    st = St::TripleSq;
                    i += 2;
                } else if (triple_at(i, '"')) {
                    st = St::TripleDq;
                    i += 2;
                } else if (c == '\'') {
                    st = St::Sq;
                } else if (c == '"') {
                    st = St::Dq;
                }
                break;
            case St::Comment:
                if (c == '\n') st = St::Code;
                else out[i] = ' ';
                break;
            case St::Sq:
                if (c == '\\') st = St::SqEsc;
                else if (c == '\'' || c == '\n') st = St::Code;
                break;
            case St::Dq:
                if (c == '\\') st = St::DqEsc;
                else if (c == '"' || c == '\n') st = St::Code;
                break;
            case St::SqEsc: st = St::Sq; break;
            case St::DqEsc: st = St::Dq; break;
            case St::TripleSq:
                if (triple_at(i, '\'')) {
                    st = St::Code;
                    i += 2;
                }
                break;
            case St::TripleDq:
                if (triple_at(i, '"')) {
                    st = St::Code;
                    i += 2;
                }
                break;
        }
    }
    return out;
}

}  // namespace lex

std::vector<RawDefinition> parse_source(const std::string& file, const std::string& text,
                                        Language language) {
    switch (language) {
        case Language::C: return parse_c(file, text);
        case Language::Python: return parse_python(file, text);
        case Language::Java: return parse_java(file, text);
    }
    throw std::invalid_argument("unsupported language");
}

std::vector<RawDefinition> parse_file(const std::string& path, Language language,
                                      const std::string& file_label) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseFailure(path, 0, "cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_source(file_label.empty() ? path : file_label, buf.str(), language);
}

std::vector<BaseEdge> extract_base_edges(const std::vector<RawDefinition>& defs) {
    std::vector<BaseEdge> edges;
    // Group statements and variables by enclosing method.
    for (int m = 0; m < static_cast<int>(defs.size()); ++m) {
        if (defs[m].kind != DefKind::MethodDef || !defs[m].has_body) continue;
        std::vector<int> stmts;
        std::vector<int> members;  // stmts + var defs, in order
        for (int i = 0; i < static_cast<int>(defs.size()); ++i) {
            // Direct children only: locals and statements always attach to
            // their method.
            if (defs[i].parent != m) continue;
            if (defs[i].kind == DefKind::MethodStmt) {
                stmts.push_back(i);
                members.push_back(i);
            } else if (defs[i].kind == DefKind::MethodVarDef) {
                members.push_back(i);
            }
        }
        for (int s : stmts) edges.push_back({s, m, BaseEdgeKind::Ast});
        for (std::size_t i = 1; i < stmts.size(); ++i)
            edges.push_back({stmts[i - 1], stmts[i], BaseEdgeKind::Cfg});

        // Flow-insensitive def-use: writer -> later reader.
        for (int w : members) {
            std::vector<std::string> written;
            if (defs[w].kind == DefKind::MethodVarDef) written.push_back(defs[w].name);
            for (const auto& n : defs[w].written_names) written.push_back(n);
            if (written.empty()) continue;
            for (int r : stmts) {
                if (r == w) continue;
                if (defs[r].start_line < defs[w].start_line) continue;
                if (defs[r].start_line == defs[w].start_line && r < w) continue;
                bool reads = false;
                for (const auto& name : written) {
                    if (std::find(defs[r].referenced_names.begin(),
                                  defs[r].referenced_names.end(),
                                  name) != defs[r].referenced_names.end()) {
                        reads = true;
                        break;
                    }
                }
                if (reads) edges.push_back({w, r, BaseEdgeKind::DataFlow});
            }
        }
    }
    std::sort(edges.begin(), edges.end(), [](const BaseEdge& x, const BaseEdge& y) {
        return std::tie(x.src, x.dst, x.kind) < std::tie(y.src, y.dst, y.kind);
    });
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

std::vector<ParsedFile> parse_files(
    const std::vector<std::pair<std::string, std::string>>& path_and_label, Language language,
    std::vector<FileDiagnostic>& diagnostics) {
    std::vector<ParsedFile> results(path_and_label.size());
    std::vector<FileDiagnostic> local_diags(path_and_label.size());
    std::vector<char> failed(path_and_label.size(), 0);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (long i = 0; i < static_cast<long>(path_and_label.size()); ++i) {
        auto idx = static_cast<std::size_t>(i);
        const auto& [path, label] = path_and_label[idx];
        try {
            ParsedFile pf;
            pf.file = label;
            pf.defs = parse_file(path, language, label);
            pf.base_edges = extract_base_edges(pf.defs);
            results[idx] = std::move(pf);
        } catch (const ParseFailure& e) {
            failed[idx] = 1;
            local_diags[idx] = {label, e.line, e.what()};
        }
    }
    std::vector<ParsedFile> ok;
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (failed[i])
            diagnostics.push_back(local_diags[i]);
        else
            ok.push_back(std::move(results[i]));
    }
    return ok;
}

}  // namespace mergectx::frontend
