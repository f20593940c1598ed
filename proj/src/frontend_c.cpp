#include "mergectx/frontend.hpp"
#include "mergectx/linediff.hpp"

#include "frontend_util.hpp"

#include <algorithm>

namespace mergectx::frontend {

namespace detail {

std::vector<std::string> written_names_of_statement(const std::string& text,
                                                    const std::set<std::string>& keywords) {
    auto tokens = rough_tokens(text);
    std::vector<std::string> written;
    auto add = [&](const std::string& n) {
        if (!n.empty() && !keywords.count(n) &&
            std::find(written.begin(), written.end(), n) == written.end())
            written.push_back(n);
    };
    auto lhs_root = [&](int end) -> std::string {
        // Walk back over the lvalue expression and return its first identifier.
        int begin = end;
        while (begin >= 0) {
            const std::string& t = tokens[static_cast<std::size_t>(begin)];
            if (lex::is_identifier(t) || t == "." || t == "*" || t == ")" || t == "]" ||
                t == "[" || t == "(" || t == ">" || t == "-") {
                --begin;
                continue;
            }
            break;
        }
        for (int k = begin + 1; k <= end; ++k)
            if (lex::is_identifier(tokens[static_cast<std::size_t>(k)]))
                return tokens[static_cast<std::size_t>(k)];
        return "";
    };
    for (int i = 0; i < static_cast<int>(tokens.size()); ++i) {
        const std::string& t = tokens[static_cast<std::size_t>(i)];
        if (t == "=") {
            const std::string* prev = i > 0 ? &tokens[static_cast<std::size_t>(i - 1)] : nullptr;
            const std::string* next = i + 1 < static_cast<int>(tokens.size())
                                          ? &tokens[static_cast<std::size_t>(i + 1)]
                                          : nullptr;
            if (next && *next == "=") {
                ++i;  // ==
                continue;
            }
            if (prev && (*prev == "=" || *prev == "!" || *prev == "<" || *prev == ">")) continue;
            int end = i - 1;
            if (prev && prev->size() == 1 &&
                std::string("+-*/%&|^").find((*prev)[0]) != std::string::npos)
                end = i - 2;  // compound assignment
            if (end >= 0) add(lhs_root(end));
        } else if ((t == "+" || t == "-") && i + 1 < static_cast<int>(tokens.size()) &&
                   tokens[static_cast<std::size_t>(i + 1)] == t) {
            // ++x / x++ / --x / x--
            if (i + 2 < static_cast<int>(tokens.size()) &&
                lex::is_identifier(tokens[static_cast<std::size_t>(i + 2)]))
                add(tokens[static_cast<std::size_t>(i + 2)]);
            else if (i > 0 && lex::is_identifier(tokens[static_cast<std::size_t>(i - 1)]))
                add(tokens[static_cast<std::size_t>(i - 1)]);
            ++i;
        }
    }
    return written;
}

}  // namespace detail

namespace {

using detail::DeclarationParts;
using detail::filtered_identifiers;
using detail::normalize_signature;
using detail::parse_declaration;
using detail::rough_tokens;
using detail::split_top_level;
using detail::trim;

const std::set<std::string>& c_keywords() {
    static const std::set<std::string> kw = {
        "auto",     "break",    "case",     "char",   "const",    "continue", "default",
        "do",       "double",   "else",     "enum",   "extern",   "float",    "for",
        "goto",     "if",       "inline",   "int",    "long",     "register", "restrict",
        "return",   "short",    "signed",   "sizeof", "static",   "struct",   "switch",
        "typedef",  "union",    "unsigned", "void",   "volatile", "while",    "_Bool",
        "_Complex", "_Atomic",  "NULL",     "true",   "false",    "size_t",   "ssize_t",
        "int8_t",   "int16_t",  "int32_t",  "int64_t", "uint8_t", "uint16_t", "uint32_t",
        "uint64_t", "uintptr_t", "intptr_t", "bool",
    };
    return kw;
}

const std::set<std::string>& c_control() {
    static const std::set<std::string> kw = {"if",     "else",   "for",     "while", "do",
                                             "switch", "return", "break",   "continue",
                                             "goto",   "case",   "default", "sizeof"};
    return kw;
}

struct Line {
    int number;  // 1-based
    std::string text;
};

// Splits a function body into statements. Each statement ends at ';' outside
// parens, at '{' (control headers, nested block opens), or at a closing '}'.
struct StatementSink {
    StatementSink(std::vector<RawDefinition>& defs_, const std::string& file_, int parent_)
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
        emit_statement(text, first_line, last_line);
    }

    void emit_statement(const std::string& text, int start, int end) {
        auto tokens = rough_tokens(text);
        if (tokens.empty()) return;
        const std::string& head = tokens[0];
        bool is_control = c_control().count(head) || head == "else";
        DeclarationParts decl;
        if (!is_control) decl = parse_declaration(text, c_keywords());

        bool looks_like_call = false;
        if (!decl.declarators.empty()) {
            // "name(" right at the start of the declarator region means a
            // call, not a declaration (e.g. "foo(x);").
            std::size_t open = text.find('(');
            if (open != std::string::npos) {
                std::string before = trim(text.substr(0, open));
                auto btok = rough_tokens(before);
                if (btok.size() == 1 && lex::is_identifier(btok[0]) &&
                    !c_keywords().count(btok[0]))
                    looks_like_call = true;
            }
        }

        if (!is_control && !looks_like_call && !decl.declarators.empty()) {
            std::set<std::string> declared;
            for (const auto& d : decl.declarators) declared.insert(d.name);
            for (const auto& d : decl.declarators) {
                RawDefinition var;
                var.kind = DefKind::MethodVarDef;
                var.name = d.name;
                var.file = file;
                var.start_line = start;
                var.end_line = end;
                var.header_end_line = end;
                var.parent = parent;
                var.referenced_names = decl.type_refs;
                defs.push_back(std::move(var));
            }
            if (decl.has_initializer) {
                RawDefinition stmt;
                stmt.kind = DefKind::MethodStmt;
                stmt.file = file;
                stmt.start_line = start;
                stmt.end_line = end;
                stmt.header_end_line = end;
                stmt.parent = parent;
                std::set<std::string> exclude = declared;
                for (const auto& ref : decl.type_refs) exclude.insert(ref);
                std::string inits;
                for (const auto& d : decl.declarators)
                    for (const auto& r : d.init_refs) inits += r + " ";
                stmt.referenced_names = filtered_identifiers(inits, c_keywords(), exclude);
                for (const auto& d : decl.declarators)
                    if (d.has_init) stmt.written_names.push_back(d.name);
                defs.push_back(std::move(stmt));
            }
            return;
        }

        RawDefinition stmt;
        stmt.kind = DefKind::MethodStmt;
        stmt.file = file;
        stmt.start_line = start;
        stmt.end_line = end;
        stmt.header_end_line = end;
        stmt.parent = parent;
        stmt.referenced_names = filtered_identifiers(text, c_keywords());
        stmt.written_names = detail::written_names_of_statement(text, c_keywords());
        defs.push_back(std::move(stmt));
    }
};

void parse_function_body(const std::vector<Line>& lines, std::size_t open_idx,
                         std::size_t open_col, std::size_t close_idx, std::size_t close_col,
                         std::vector<RawDefinition>& defs, const std::string& file, int parent) {
    StatementSink sink(defs, file, parent);
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

void emit_params(const std::string& params, int line_first, int line_last,
                 std::vector<RawDefinition>& defs, const std::string& file, int parent) {
    std::string inner = trim(params);
    if (inner.empty() || inner == "void") return;
    for (const auto& raw : split_top_level(inner, ',')) {
        auto tokens = rough_tokens(raw);
        if (tokens.empty()) continue;
        int ident_count = 0;
        for (const auto& t : tokens)
            if (lex::is_identifier(t)) ident_count++;
        std::string name;
        if (ident_count >= 2 && lex::is_identifier(tokens.back()) &&
            !c_keywords().count(tokens.back()))
            name = tokens.back();
        // Unnamed parameters ("double", "void*") produce no variable node.
        if (name.empty()) continue;
        RawDefinition var;
        var.kind = DefKind::MethodVarDef;
        var.name = name;
        var.file = file;
        var.start_line = line_first;
        var.end_line = line_last;
        var.header_end_line = line_last;
        var.parent = parent;
        std::set<std::string> exclude{name};
        var.referenced_names = filtered_identifiers(raw, c_keywords(), exclude);
        defs.push_back(std::move(var));
    }
}

// Locates the function name: the identifier immediately before the first '('.
std::string function_name(const std::string& header, std::size_t paren_pos,
                          std::string* return_refs_out) {
    std::string before = header.substr(0, paren_pos);
    auto tokens = rough_tokens(before);
    std::string name;
    for (auto it = tokens.rbegin(); it != tokens.rend(); ++it) {
        if (lex::is_identifier(*it)) {
            name = *it;
            break;
        }
        if (*it != "*") break;
    }
    if (return_refs_out) {
        std::string rest;
        for (const auto& t : tokens)
            if (t != name) rest += t + " ";
        *return_refs_out = rest;
    }
    return name;
}

}  // namespace

std::vector<RawDefinition> parse_c(const std::string& file, const std::string& text) {
    std::vector<RawDefinition> defs;
    std::string clean = lex::strip_comments_c(text);
    auto raw_lines = linediff::split_lines(clean);
    std::vector<Line> lines;
    lines.reserve(raw_lines.size());
    for (std::size_t i = 0; i < raw_lines.size(); ++i)
        lines.push_back({static_cast<int>(i) + 1, raw_lines[i]});

    std::size_t i = 0;
    const std::size_t n = lines.size();
    while (i < n) {
        std::string t = trim(lines[i].text);
        if (t.empty()) {
            ++i;
            continue;
        }

        // --- Preprocessor directives -------------------------------------
        if (t[0] == '#') {
            int first_line = lines[i].number;
            std::string directive = t;
            while (!directive.empty() && directive.back() == '\\' && i + 1 < n) {
                directive.pop_back();
                ++i;
                directive += " " + trim(lines[i].text);
            }
            int last_line = lines[i].number;
            ++i;
            std::string body = trim(directive.substr(1));
            if (body.rfind("include", 0) == 0) {
                std::string rest = trim(body.substr(7));
                std::string target;
                if (rest.size() >= 2 && (rest[0] == '"' || rest[0] == '<')) {
                    char close = rest[0] == '"' ? '"' : '>';
                    std::size_t end = rest.find(close, 1);
                    if (end != std::string::npos) target = rest.substr(1, end - 1);
                }
                if (!target.empty()) {
                    RawDefinition def;
                    def.kind = DefKind::ImportDef;
                    def.name = target;
                    def.file = file;
                    def.start_line = first_line;
                    def.end_line = last_line;
                    def.header_end_line = last_line;
                    defs.push_back(std::move(def));
                }
            } else if (body.rfind("define", 0) == 0) {
                std::string rest = body.substr(6);
                std::size_t p = 0;
                while (p < rest.size() && std::isspace(static_cast<unsigned char>(rest[p]))) ++p;
                std::size_t name_end = p;
                while (name_end < rest.size() &&
                       (std::isalnum(static_cast<unsigned char>(rest[name_end])) ||
                        rest[name_end] == '_'))
                    ++name_end;
                std::string name = rest.substr(p, name_end - p);
                if (!name.empty()) {
                    RawDefinition def;
                    def.file = file;
                    def.start_line = first_line;
                    def.end_line = last_line;
                    def.header_end_line = last_line;
                    def.name = name;
                    if (name_end < rest.size() && rest[name_end] == '(') {
                        // Function-like macro.
                        std::size_t close = rest.find(')', name_end);
                        std::string params = close == std::string::npos
                                                 ? ""
                                                 : rest.substr(name_end + 1, close - name_end - 1);
                        std::string macro_body =
                            close == std::string::npos ? "" : rest.substr(close + 1);
                        def.kind = DefKind::MethodDef;
                        def.has_body = true;
                        std::string sig;
                        for (char c : params)
                            if (!std::isspace(static_cast<unsigned char>(c))) sig += c;
                        def.signature = sig;
                        std::set<std::string> exclude{name};
                        for (const auto& pn : lex::identifiers(params)) exclude.insert(pn);
                        def.referenced_names =
                            filtered_identifiers(macro_body, c_keywords(), exclude);
                    } else {
                        def.kind = DefKind::GlobalVarDef;
                        def.referenced_names = filtered_identifiers(
                            rest.substr(name_end), c_keywords(), {name});
                    }
                    defs.push_back(std::move(def));
                }
            }
            // #ifdef / #ifndef / #endif / #pragma / ... : no node; branches
            // are parsed as ordinary code.
            continue;
        }

        // --- Scan one top-level unit --------------------------------------
        int paren = 0, brace = 0;
        bool found_open = false, found_close = false, found_semi = false;
        std::size_t open_idx = 0, open_col = 0, close_idx = 0, close_col = 0;
        std::size_t semi_idx = 0, semi_col = 0;
        bool eq_before_open = false;
        std::string header;
        std::size_t j = i;
        for (; j < n && !found_semi && !found_close; ++j) {
            const std::string& lt = lines[j].text;
            for (std::size_t col = 0; col < lt.size(); ++col) {
                char c = lt[col];
                if (c == '(') paren++;
                else if (c == ')') paren--;
                else if (c == '=' && !found_open && paren == 0) {
                    bool cmp = (col + 1 < lt.size() && lt[col + 1] == '=') ||
                               (col > 0 && std::string("=!<>").find(lt[col - 1]) !=
                                               std::string::npos);
                    if (!cmp) eq_before_open = true;
                } else if (c == '{') {
                    if (brace == 0 && paren == 0 && !found_open) {
                        found_open = true;
                        open_idx = j;
                        open_col = col;
                    }
                    brace++;
                } else if (c == '}') {
                    brace--;
                    if (brace == 0 && found_open && !found_close) {
                        found_close = true;
                        close_idx = j;
                        close_col = col;
                    }
                } else if (c == ';' && paren == 0 && brace == 0) {
                    found_semi = true;
                    semi_idx = j;
                    semi_col = col;
                    break;
                }
                if (!found_open) header += c;
                if (found_close) break;
            }
            if (found_semi || found_close) break;
            if (!found_open) header += '\n';
        }
        if (j >= n && !found_semi && !found_close)
            throw ParseFailure(file, lines[i].number, "unterminated definition");

        std::string h = trim(header);
        auto htok = rough_tokens(h);
        bool is_typedef = !htok.empty() && htok[0] == "typedef";
        bool is_tagged = false;
        std::string tag_kind;
        for (const auto& tk : htok) {
            if (tk == "struct" || tk == "union" || tk == "enum") {
                is_tagged = true;
                tag_kind = tk;
                break;
            }
            if (tk != "typedef" && tk != "const" && tk != "static") break;
        }

        if (found_open && !eq_before_open) {
            // A '(' in the header (before the body brace) marks a function
            // definition, even when the return type is a tagged struct.
            std::size_t open_paren = h.find('(');
            bool is_function = open_paren != std::string::npos;
            if (is_function) {
                std::string ret_refs;
                std::string name = function_name(h, open_paren, &ret_refs);
                std::size_t close_paren = h.rfind(')');
                std::string params = close_paren != std::string::npos && close_paren > open_paren
                                         ? h.substr(open_paren + 1, close_paren - open_paren - 1)
                                         : "";
                RawDefinition def;
                def.kind = DefKind::MethodDef;
                def.name = name;
                def.file = file;
                def.start_line = lines[i].number;
                def.end_line = lines[close_idx].number;
                def.header_end_line = lines[open_idx].number;
                def.has_body = true;
                def.signature = normalize_signature(params, c_keywords());
                def.referenced_names = filtered_identifiers(ret_refs, c_keywords(), {name});
                int parent = static_cast<int>(defs.size());
                defs.push_back(std::move(def));
                emit_params(params, lines[i].number, lines[open_idx].number, defs, file, parent);
                parse_function_body(lines, open_idx, open_col, close_idx, close_col, defs, file,
                                    parent);
                i = close_idx + 1;
                continue;
            }
            if (is_tagged || is_typedef) {
                // struct/union/enum definition, with optional typedef name or
                // variable declarators after the closing brace.
                std::size_t tail_idx = close_idx, tail_col = close_col + 1;
                std::string tail;
                bool tail_done = false;
                for (std::size_t tj = tail_idx; tj < n && !tail_done; ++tj) {
                    const std::string& lt = lines[tj].text;
                    for (std::size_t col = (tj == tail_idx ? tail_col : 0); col < lt.size();
                         ++col) {
                        if (lt[col] == ';') {
                            tail_done = true;
                            tail_idx = tj;
                            break;
                        }
                        tail += lt[col];
                    }
                    if (!tail_done && tj + 1 >= n) tail_idx = tj;
                }
                tail = trim(tail);

                std::string tag_name;
                for (std::size_t ti = 0; ti + 1 < htok.size(); ++ti) {
                    if ((htok[ti] == "struct" || htok[ti] == "union" || htok[ti] == "enum") &&
                        lex::is_identifier(htok[ti + 1]) && !c_keywords().count(htok[ti + 1])) {
                        tag_name = htok[ti + 1];
                        break;
                    }
                }
                std::string type_name = tag_name;
                if (is_typedef && !tail.empty()) {
                    auto ttok = rough_tokens(tail);
                    for (auto it = ttok.rbegin(); it != ttok.rend(); ++it)
                        if (lex::is_identifier(*it)) {
                            type_name = *it;
                            break;
                        }
                }

                RawDefinition def;
                def.kind = DefKind::TypeDef;
                def.name = type_name;
                def.file = file;
                def.start_line = lines[i].number;
                def.end_line = lines[tail_idx].number;
                def.header_end_line = lines[open_idx].number;
                int parent = static_cast<int>(defs.size());
                defs.push_back(std::move(def));

                // Members: the body between the braces.
                if (tag_kind == "enum") {
                    std::string body;
                    std::vector<int> body_line_of_char;
                    for (std::size_t bj = open_idx; bj <= close_idx; ++bj) {
                        const std::string& lt = lines[bj].text;
                        std::size_t from = bj == open_idx ? open_col + 1 : 0;
                        std::size_t to = bj == close_idx ? close_col : lt.size();
                        for (std::size_t col = from; col < to; ++col) {
                            body += lt[col];
                            body_line_of_char.push_back(lines[bj].number);
                        }
                        body += '\n';
                        body_line_of_char.push_back(lines[bj].number);
                    }
                    std::size_t piece_start = 0;
                    for (const auto& piece : split_top_level(body, ',')) {
                        std::string p = trim(piece);
                        std::size_t pos = piece_start;
                        piece_start += piece.size() + 1;
                        if (p.empty()) continue;
                        auto ptok = rough_tokens(p);
                        if (ptok.empty() || !lex::is_identifier(ptok[0])) continue;
                        int line_no = body_line_of_char[std::min(
                            pos + piece.find_first_not_of(" \t\n"),
                            body_line_of_char.size() - 1)];
                        RawDefinition member;
                        member.kind = DefKind::MemberDef;
                        member.name = ptok[0];
                        member.file = file;
                        member.start_line = line_no;
                        member.end_line = line_no;
                        member.header_end_line = line_no;
                        member.parent = parent;
                        member.referenced_names =
                            filtered_identifiers(p, c_keywords(), {ptok[0]});
                        defs.push_back(std::move(member));
                    }
                } else {
                    // Reuse the statement splitter; declarations become
                    // members, anything else (initializer statements, inner
                    // brace noise) is dropped.
                    std::size_t first_member = defs.size();
                    parse_function_body(lines, open_idx, open_col, close_idx, close_col, defs,
                                        file, parent);
                    std::size_t keep = first_member;
                    for (std::size_t d = first_member; d < defs.size(); ++d) {
                        if (defs[d].kind != DefKind::MethodVarDef) continue;
                        defs[d].kind = DefKind::MemberDef;
                        if (keep != d) defs[keep] = std::move(defs[d]);
                        ++keep;
                    }
                    defs.resize(keep);
                }

                // Non-typedef trailing declarators are global variables.
                if (!is_typedef && !tail.empty()) {
                    for (const auto& piece : split_top_level(tail, ',')) {
                        std::string p = trim(piece);
                        if (p.empty()) continue;
                        auto ptok = rough_tokens(p);
                        std::string name;
                        for (const auto& tk : ptok)
                            if (lex::is_identifier(tk) && !c_keywords().count(tk)) {
                                name = tk;
                                break;
                            }
                        if (name.empty()) continue;
                        RawDefinition var;
                        var.kind = DefKind::GlobalVarDef;
                        var.name = name;
                        var.file = file;
                        var.start_line = lines[tail_idx].number;
                        var.end_line = lines[tail_idx].number;
                        var.header_end_line = lines[tail_idx].number;
                        if (!type_name.empty()) var.referenced_names.push_back(type_name);
                        defs.push_back(std::move(var));
                    }
                }
                i = tail_idx + 1;
                continue;
            }
            // Opaque block (extern "C" { ... } etc.): skip past it.
            i = close_idx + 1;
            continue;
        }

        if (found_open && eq_before_open) {
            // Global with a brace initializer: treat the whole unit up to the
            // ';' after the closing brace as one declaration.
            std::size_t end_idx = close_idx;
            for (std::size_t tj = close_idx; tj < n; ++tj) {
                if (lines[tj].text.find(';', tj == close_idx ? close_col : 0) !=
                    std::string::npos) {
                    end_idx = tj;
                    break;
                }
            }
            std::string unit;
            for (std::size_t uj = i; uj <= end_idx; ++uj) unit += lines[uj].text + "\n";
            auto decl = parse_declaration(unit, c_keywords());
            for (const auto& d : decl.declarators) {
                RawDefinition var;
                var.kind = DefKind::GlobalVarDef;
                var.name = d.name;
                var.file = file;
                var.start_line = lines[i].number;
                var.end_line = lines[end_idx].number;
                var.header_end_line = lines[end_idx].number;
                var.referenced_names = decl.type_refs;
                for (const auto& r : d.init_refs) var.referenced_names.push_back(r);
                defs.push_back(std::move(var));
            }
            i = end_idx + 1;
            continue;
        }

        // --- Simple unit ending at ';' -------------------------------------
        {
            std::string unit;
            for (std::size_t uj = i; uj <= semi_idx; ++uj) {
                const std::string& lt = lines[uj].text;
                std::size_t to = (uj == semi_idx) ? semi_col : lt.size();
                unit += lt.substr(0, to);
                unit += '\n';
            }
            std::string u = trim(unit);
            auto utok = rough_tokens(u);
            std::size_t open_paren = u.find('(');
            std::size_t eq_pos = u.find('=');

            if (!utok.empty() && utok[0] == "typedef") {
                std::string name;
                std::size_t fp = u.find("(*");
                if (fp != std::string::npos) {
                    auto after = lex::identifiers(u.substr(fp));
                    if (!after.empty()) name = after[0];
                } else {
                    auto ids = lex::identifiers(u);
                    for (auto it = ids.rbegin(); it != ids.rend(); ++it)
                        if (!c_keywords().count(*it)) {
                            name = *it;
                            break;
                        }
                }
                if (!name.empty()) {
                    RawDefinition def;
                    def.kind = DefKind::TypeDef;
                    def.name = name;
                    def.file = file;
                    def.start_line = lines[i].number;
                    def.end_line = lines[semi_idx].number;
                    def.header_end_line = lines[semi_idx].number;
                    def.referenced_names = filtered_identifiers(u, c_keywords(), {name});
                    defs.push_back(std::move(def));
                }
            } else if (open_paren != std::string::npos &&
                       (eq_pos == std::string::npos || eq_pos > open_paren)) {
                // Function prototype, unless the '(' belongs to a pointer
                // declarator like "int (*fp)(void);".
                std::string before = u.substr(0, open_paren);
                std::string name = function_name(u, open_paren, nullptr);
                bool pointer_decl = false;
                std::size_t np = u.find("(*");
                if (np != std::string::npos && np <= open_paren) pointer_decl = true;
                if (!name.empty() && !pointer_decl && !c_keywords().count(name)) {
                    std::size_t close_paren = u.rfind(')');
                    std::string params =
                        close_paren != std::string::npos && close_paren > open_paren
                            ? u.substr(open_paren + 1, close_paren - open_paren - 1)
                            : "";
                    RawDefinition def;
                    def.kind = DefKind::MethodDef;
                    def.name = name;
                    def.file = file;
                    def.start_line = lines[i].number;
                    def.end_line = lines[semi_idx].number;
                    def.header_end_line = lines[semi_idx].number;
                    def.has_body = false;
                    def.signature = normalize_signature(params, c_keywords());
                    std::set<std::string> exclude{name};
                    def.referenced_names = filtered_identifiers(
                        before + " " + params, c_keywords(), exclude);
                    defs.push_back(std::move(def));
                } else if (pointer_decl || name.empty()) {
                    auto decl = parse_declaration(u, c_keywords());
                    for (const auto& d : decl.declarators) {
                        RawDefinition var;
                        var.kind = DefKind::GlobalVarDef;
                        var.name = d.name;
                        var.file = file;
                        var.start_line = lines[i].number;
                        var.end_line = lines[semi_idx].number;
                        var.header_end_line = lines[semi_idx].number;
                        var.referenced_names = decl.type_refs;
                        defs.push_back(std::move(var));
                    }
                }
            } else {
                auto decl = parse_declaration(u, c_keywords());
                for (const auto& d : decl.declarators) {
                    RawDefinition var;
                    var.kind = DefKind::GlobalVarDef;
                    var.name = d.name;
                    var.file = file;
                    var.start_line = lines[i].number;
                    var.end_line = lines[semi_idx].number;
                    var.header_end_line = lines[semi_idx].number;
                    var.referenced_names = decl.type_refs;
                    for (const auto& r : d.init_refs) var.referenced_names.push_back(r);
                    defs.push_back(std::move(var));
                }
            }
            i = semi_idx + 1;
        }
    }
    return defs;
}

}  // namespace mergectx::frontend
