#include "mergectx/frontend.hpp"
#include "mergectx/linediff.hpp"

#include "frontend_util.hpp"

#include <algorithm>

namespace mergectx::frontend {

namespace {

using detail::filtered_identifiers;
using detail::normalize_signature;
using detail::parse_declaration;
using detail::rough_tokens;
using detail::split_top_level;
using detail::trim;

const std::set<std::string>& java_keywords() {
    static const std::set<std::string> kw = {
        "abstract", "assert",    "boolean",  "break",      "byte",    "case",    "catch",
        "char",     "class",     "const",    "continue",   "default", "do",      "double",
        "else",     "enum",      "extends",  "final",      "finally", "float",   "for",
        "goto",     "if",        "implements", "import",   "instanceof", "int",  "interface",
        "long",     "native",    "new",      "package",    "private", "protected", "public",
        "return",   "short",     "static",   "strictfp",   "super",   "switch",  "synchronized",
        "this",     "throw",     "throws",   "transient",  "try",     "void",    "volatile",
        "while",    "true",      "false",    "null",       "var",     "record",  "String",
        "Integer",  "Long",      "Double",   "Boolean",    "Object",  "List",    "Map",
        "Set",      "ArrayList", "HashMap",  "HashSet",    "System",  "Math",    "Override",
    };
    return kw;
}

const std::set<std::string>& java_control() {
    static const std::set<std::string> kw = {"if",    "else",  "for",      "while",  "do",
                                             "switch", "return", "break",  "continue", "throw",
                                             "try",   "catch", "finally",  "case",   "default",
                                             "synchronized", "new"};
    return kw;
}

struct Line {
    int number;
    std::string text;
};

void emit_java_params(const std::string& params, int line_first, int line_last,
                      std::vector<RawDefinition>& defs, const std::string& file, int parent) {
    std::string inner = trim(params);
    if (inner.empty()) return;
    for (const auto& raw : split_top_level(inner, ',')) {
        auto tokens = rough_tokens(raw);
        int ident_count = 0;
        for (const auto& t : tokens)
            if (lex::is_identifier(t)) ident_count++;
        if (ident_count < 2 || !lex::is_identifier(tokens.back())) continue;
        RawDefinition var;
        var.kind = DefKind::MethodVarDef;
        var.name = tokens.back();
        var.file = file;
        var.start_line = line_first;
        var.end_line = line_last;
        var.header_end_line = line_last;
        var.parent = parent;
        var.referenced_names = filtered_identifiers(raw, java_keywords(), {var.name});
        defs.push_back(std::move(var));
    }
}

struct JavaStatementSink {
    JavaStatementSink(std::vector<RawDefinition>& defs_, const std::string& file_, int parent_)
        : defs(defs_), file(file_), parent(parent_) {}

    std::vector<RawDefinition>& defs;
    const std::string& file;
    int parent;

    std::string pending;
    bool has_content = false;
    int first_line = -1;
    int last_line = -1;

    void feed(int line_no, char c) {
        if (!has_content) {
            if (std::isspace(static_cast<unsigned char>(c))) return;
            has_content = true;
            first_line = line_no;
        }
        pending += c;
        if (!std::isspace(static_cast<unsigned char>(c))) last_line = line_no;
    }

    void flush() {
        std::string text = trim(pending);
        pending.clear();
        has_content = false;
        if (text.empty()) return;

        auto tokens = rough_tokens(text);
        if (tokens.empty()) return;
        bool is_control = java_control().count(tokens[0]) || tokens[0] == "else";
        detail::DeclarationParts decl;
        if (!is_control) decl = parse_declaration(text, java_keywords());

        if (!is_control && !decl.declarators.empty()) {
            std::set<std::string> declared;
            for (const auto& d : decl.declarators) declared.insert(d.name);
            for (const auto& d : decl.declarators) {
                RawDefinition var;
                var.kind = DefKind::MethodVarDef;
                var.name = d.name;
                var.file = file;
                var.start_line = first_line;
                var.end_line = last_line;
                var.header_end_line = last_line;
                var.parent = parent;
                var.referenced_names = decl.type_refs;
                defs.push_back(std::move(var));
            }
            if (decl.has_initializer) {
                RawDefinition stmt;
                stmt.kind = DefKind::MethodStmt;
                stmt.file = file;
                stmt.start_line = first_line;
                stmt.end_line = last_line;
                stmt.header_end_line = last_line;
                stmt.parent = parent;
                std::set<std::string> exclude = declared;
                std::string inits;
                for (const auto& d : decl.declarators)
                    for (const auto& r : d.init_refs) inits += r + " ";
                stmt.referenced_names = filtered_identifiers(inits, java_keywords(), exclude);
                for (const auto& d : decl.declarators)
                    if (d.has_init) stmt.written_names.push_back(d.name);
                defs.push_back(std::move(stmt));
            }
            return;
        }
        RawDefinition stmt;
        stmt.kind = DefKind::MethodStmt;
        stmt.file = file;
        stmt.start_line = first_line;
        stmt.end_line = last_line;
        stmt.header_end_line = last_line;
        stmt.parent = parent;
        stmt.referenced_names = filtered_identifiers(text, java_keywords());
        stmt.written_names = detail::written_names_of_statement(text, java_keywords());
        defs.push_back(std::move(stmt));
    }
};

void parse_java_body(const std::vector<Line>& lines, std::size_t open_idx, std::size_t open_col,
                     std::size_t close_idx, std::size_t close_col,
                     std::vector<RawDefinition>& defs, const std::string& file, int parent) {
    JavaStatementSink sink(defs, file, parent);
    int paren = 0;
    for (std::size_t li = open_idx; li <= close_idx && li < lines.size(); ++li) {
        const std::string& text = lines[li].text;
        std::size_t from = (li == open_idx) ? open_col + 1 : 0;
        std::size_t to = (li == close_idx) ? close_col : text.size();
        for (std::size_t col = from; col < to; ++col) {
            char c = text[col];
            if (c == '(') paren++;
            else if (c == ')') paren--;
            if (c == '{' || c == '}') {
                sink.flush();
                continue;
            }
            if (c == ';' && paren == 0) {
                sink.feed(lines[li].number, c);
                sink.flush();
                continue;
            }
            sink.feed(lines[li].number, c);
        }
        if (li != close_idx) sink.feed(lines[li].number, '\n');
    }
    sink.flush();
}

}  // namespace

std::vector<RawDefinition> parse_java(const std::string& file, const std::string& text) {
    std::vector<RawDefinition> defs;
    std::string clean = lex::strip_comments_c(text);  // same comment syntax
    auto raw_lines = linediff::split_lines(clean);
    std::vector<Line> lines;
    lines.reserve(raw_lines.size());
    for (std::size_t i = 0; i < raw_lines.size(); ++i)
        lines.push_back({static_cast<int>(i) + 1, raw_lines[i]});

    // First pass: imports / package at any brace depth 0 position, plus the
    // top-level type declarations.
    std::size_t i = 0;
    const std::size_t n = lines.size();

    // Scans class bodies recursively (depth 1 members of each class).
    struct ClassScan {
        std::vector<RawDefinition>& defs;
        const std::vector<Line>& lines;
        const std::string& file;

        void scan_class_body(std::size_t open_idx, std::size_t open_col, std::size_t close_idx,
                             std::size_t close_col, int cls_idx) {
            std::size_t li = open_idx;
            std::size_t col = open_col + 1;
            int paren = 0, brace = 0;
            std::string header;
            std::size_t unit_first = li;
            bool header_started = false;
            std::size_t member_open_idx = 0, member_open_col = 0;

            auto at_end = [&](std::size_t l, std::size_t c2) {
                return l > close_idx || (l == close_idx && c2 >= close_col);
            };
            while (!at_end(li, col)) {
                const std::string& text = lines[li].text;
                if (col >= text.size() || (li == close_idx && col >= close_col)) {
                    if (li == close_idx) break;
                    ++li;
                    col = 0;
                    if (!header_started) unit_first = li;
                    header += '\n';
                    continue;
                }
                char c = text[col];
                if (!header_started && !std::isspace(static_cast<unsigned char>(c))) {
                    header_started = true;
                    unit_first = li;
                    header.clear();
                }
                if (c == '(') paren++;
                else if (c == ')') paren--;
                else if (c == '{' && paren == 0) {
                    // A member with a body: method, constructor, nested type,
                    // or initializer block.
                    member_open_idx = li;
                    member_open_col = col;
                    // Find matching close.
                    int depth = 1;
                    std::size_t mj = li, mc = col + 1;
                    while (depth > 0 && !at_end(mj, mc)) {
                        const std::string& mt = lines[mj].text;
                        if (mc >= mt.size()) {
                            ++mj;
                            mc = 0;
                            continue;
                        }
                        if (mt[mc] == '{') depth++;
                        else if (mt[mc] == '}') depth--;
                        ++mc;
                    }
                    std::size_t member_close_idx = mj;
                    std::size_t member_close_col = mc > 0 ? mc - 1 : 0;
                    emit_body_member(trim(header), unit_first, member_open_idx, member_open_col,
                                     member_close_idx, member_close_col, cls_idx);
                    header.clear();
                    header_started = false;
                    li = mj;
                    col = mc;
                    // Optional trailing ';'
                    continue;
                } else if (c == ';' && paren == 0 && brace == 0) {
                    emit_plain_member(trim(header), unit_first, li, cls_idx);
                    header.clear();
                    header_started = false;
                    ++col;
                    continue;
                }
                header += c;
                ++col;
            }
        }

        void emit_plain_member(const std::string& header, std::size_t first_idx,
                               std::size_t last_idx, int cls_idx) {
            if (header.empty()) return;
            auto tokens = rough_tokens(header);
            if (tokens.empty()) return;
            std::size_t open_paren = header.find('(');
            std::size_t eq_pos = header.find('=');
            if (open_paren != std::string::npos &&
                (eq_pos == std::string::npos || eq_pos > open_paren)) {
                // Abstract/interface method declaration.
                std::string name;
                auto before = rough_tokens(header.substr(0, open_paren));
                for (auto it = before.rbegin(); it != before.rend(); ++it)
                    if (lex::is_identifier(*it)) {
                        name = *it;
                        break;
                    }
                if (name.empty()) return;
                std::size_t close_paren = header.rfind(')');
                std::string params =
                    close_paren != std::string::npos && close_paren > open_paren
                        ? header.substr(open_paren + 1, close_paren - open_paren - 1)
                        : "";
                RawDefinition def;
                def.kind = DefKind::MethodDef;
                def.name = name;
                def.file = file;
                def.start_line = lines[first_idx].number;
                def.end_line = lines[last_idx].number;
                def.header_end_line = lines[last_idx].number;
                def.parent = cls_idx;
                def.has_body = false;
                def.signature = normalize_signature(params, java_keywords());
                def.referenced_names = filtered_identifiers(header, java_keywords(), {name});
                defs.push_back(std::move(def));
                return;
            }
            auto decl = parse_declaration(header, java_keywords());
            for (const auto& d : decl.declarators) {
                RawDefinition field;
                field.kind = DefKind::MemberDef;
                field.name = d.name;
                field.file = file;
                field.start_line = lines[first_idx].number;
                field.end_line = lines[last_idx].number;
                field.header_end_line = lines[last_idx].number;
                field.parent = cls_idx;
                field.referenced_names = decl.type_refs;
                for (const auto& r : d.init_refs) field.referenced_names.push_back(r);
                defs.push_back(std::move(field));
            }
        }

        void emit_body_member(const std::string& header, std::size_t first_idx,
                              std::size_t open_idx, std::size_t open_col,
                              std::size_t close_idx, std::size_t close_col, int cls_idx) {
            if (header.empty()) return;  // static initializer block
            auto tokens = rough_tokens(header);
            bool nested_type = false;
            for (const auto& t : tokens)
                if (t == "class" || t == "interface" || t == "enum") {
                    nested_type = true;
                    break;
                }
            if (nested_type) {
                std::string name;
                for (std::size_t k = 0; k + 1 < tokens.size(); ++k)
                    if ((tokens[k] == "class" || tokens[k] == "interface" ||
                         tokens[k] == "enum") &&
                        lex::is_identifier(tokens[k + 1])) {
                        name = tokens[k + 1];
                        break;
                    }
                RawDefinition def;
                def.kind = DefKind::TypeDef;
                def.name = name;
                def.file = file;
                def.start_line = lines[first_idx].number;
                def.end_line = lines[close_idx].number;
                def.header_end_line = lines[open_idx].number;
                def.parent = cls_idx;
                int nested_idx = static_cast<int>(defs.size());
                defs.push_back(std::move(def));
                scan_class_body(open_idx, open_col, close_idx, close_col, nested_idx);
                return;
            }
            std::size_t open_paren = header.find('(');
            if (open_paren == std::string::npos) return;
            std::string name;
            auto before = rough_tokens(header.substr(0, open_paren));
            for (auto it = before.rbegin(); it != before.rend(); ++it)
                if (lex::is_identifier(*it)) {
                    name = *it;
                    break;
                }
            std::size_t close_paren = header.rfind(')');
            std::string params = close_paren != std::string::npos && close_paren > open_paren
                                     ? header.substr(open_paren + 1, close_paren - open_paren - 1)
                                     : "";
            RawDefinition def;
            def.kind = DefKind::MethodDef;
            def.name = name;
            def.file = file;
            def.start_line = lines[first_idx].number;
            def.end_line = lines[close_idx].number;
            def.header_end_line = lines[open_idx].number;
            def.parent = cls_idx;
            def.has_body = true;
            def.signature = normalize_signature(params, java_keywords());
            int parent = static_cast<int>(defs.size());
            defs.push_back(std::move(def));
            emit_java_params(params, lines[first_idx].number, lines[open_idx].number, defs, file,
                             parent);
            parse_java_body(lines, open_idx, open_col, close_idx, close_col, defs, file, parent);
        }
    };

    while (i < n) {
        std::string t = trim(lines[i].text);
        if (t.empty()) {
            ++i;
            continue;
        }
        auto tokens = rough_tokens(t);
        if (tokens.empty()) {
            ++i;
            continue;
        }
        if (tokens[0] == "package") {
            ++i;
            continue;
        }
        if (tokens[0] == "import") {
            std::string target;
            for (std::size_t k = 1; k < tokens.size(); ++k) {
                if (tokens[k] == ";") break;
                if (tokens[k] == "static") continue;
                target += tokens[k];
            }
            if (!target.empty()) {
                RawDefinition def;
                def.kind = DefKind::ImportDef;
                def.name = target;  // dotted path, e.g. com.acme.Widget
                def.file = file;
                def.start_line = lines[i].number;
                def.end_line = lines[i].number;
                def.header_end_line = lines[i].number;
                defs.push_back(std::move(def));
            }
            ++i;
            continue;
        }
        bool is_type = false;
        for (const auto& tk : tokens)
            if (tk == "class" || tk == "interface" || tk == "enum") {
                is_type = true;
                break;
            }
        if (is_type) {
            // Find the class body braces.
            int paren = 0, brace = 0;
            bool found_open = false, found_close = false;
            std::size_t open_idx = 0, open_col = 0, close_idx = 0, close_col = 0;
            std::string header;
            std::size_t j = i;
            for (; j < n && !found_close; ++j) {
                const std::string& lt = lines[j].text;
                for (std::size_t col = 0; col < lt.size(); ++col) {
                    char c = lt[col];
                    if (c == '(') paren++;
                    else if (c == ')') paren--;
                    else if (c == '{') {
                        if (brace == 0 && !found_open) {
                            found_open = true;
                            open_idx = j;
                            open_col = col;
                        }
                        brace++;
                    } else if (c == '}') {
                        brace--;
                        if (brace == 0 && found_open) {
                            found_close = true;
                            close_idx = j;
                            close_col = col;
                            break;
                        }
                    }
                    if (!found_open) header += c;
                }
                if (found_close) break;
                if (!found_open) header += '\n';
            }
            if (!found_close) throw ParseFailure(file, lines[i].number, "unterminated type");
            std::string name;
            auto htok = rough_tokens(header);
            for (std::size_t k = 0; k + 1 < htok.size(); ++k)
                if ((htok[k] == "class" || htok[k] == "interface" || htok[k] == "enum") &&
                    lex::is_identifier(htok[k + 1])) {
                    name = htok[k + 1];
                    break;
                }
            RawDefinition def;
            def.kind = DefKind::TypeDef;
            def.name = name;
            def.file = file;
            def.start_line = lines[i].number;
            def.end_line = lines[close_idx].number;
            def.header_end_line = lines[open_idx].number;
            def.referenced_names = filtered_identifiers(header, java_keywords(), {name});
            int cls_idx = static_cast<int>(defs.size());
            defs.push_back(std::move(def));
            ClassScan scan{defs, lines, file};
            scan.scan_class_body(open_idx, open_col, close_idx, close_col, cls_idx);
            i = close_idx + 1;
            continue;
        }
        ++i;
    }
    return defs;
}

}  // namespace mergectx::frontend
