#include "mergectx/frontend.hpp"
#include "mergectx/linediff.hpp"

#include "frontend_util.hpp"

#include <algorithm>

namespace mergectx::frontend {

namespace {

using detail::filtered_identifiers;
using detail::rough_tokens;
using detail::split_top_level;
using detail::trim;

const std::set<std::string>& py_keywords() {
    static const std::set<std::string> kw = {
        "False",  "None",   "True",   "and",    "as",     "assert", "async",
        "await",  "break",  "class",  "continue", "def",  "del",    "elif",
        "else",   "except", "finally", "for",   "from",   "global", "if",
        "import", "in",     "is",     "lambda", "nonlocal", "not",  "or",
        "pass",   "raise",  "return", "try",    "while",  "with",   "yield",
        "self",   "cls",    "print",  "len",    "range",  "int",    "str",
        "float",  "bool",   "list",   "dict",   "set",    "tuple",  "object",
    };
    return kw;
}

int indent_of(const std::string& line) {
    int n = 0;
    for (char c : line) {
        if (c == ' ') n += 1;
        else if (c == '\t') n += 8;
        else break;
    }
    return n;
}

struct Logical {
    int first_line;
    int last_line;
    int indent;
    std::string text;
};

// Joins bracket continuations and explicit backslash continuations into
// logical lines.
std::vector<Logical> logical_lines(const std::vector<std::string>& lines) {
    std::vector<Logical> out;
    std::size_t i = 0;
    while (i < lines.size()) {
        std::string t = lines[i];
        if (trim(t).empty()) {
            ++i;
            continue;
        }
        Logical log;
        log.first_line = static_cast<int>(i) + 1;
        log.indent = indent_of(t);
        int depth = 0;
        std::string text;
        std::size_t j = i;
        for (; j < lines.size(); ++j) {
            const std::string& cur = lines[j];
            for (char c : cur) {
                if (c == '(' || c == '[' || c == '{') depth++;
                else if (c == ')' || c == ']' || c == '}') depth--;
            }
            text += (j == i ? cur : " " + trim(cur));
            bool backslash = !cur.empty() && trim(cur).size() > 0 && trim(cur).back() == '\\';
            if (depth <= 0 && !backslash) break;
            if (backslash) {
                std::string tt = trim(text);
                if (!tt.empty() && tt.back() == '\\') text = tt.substr(0, tt.size() - 1);
            }
        }
        log.last_line = static_cast<int>(std::min(j, lines.size() - 1)) + 1;
        log.text = text;
        out.push_back(std::move(log));
        i = j + 1;
    }
    return out;
}

std::string def_name(const std::string& text, const char* kw) {
    auto tokens = rough_tokens(text);
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i)
        if (tokens[i] == kw && lex::is_identifier(tokens[i + 1])) return tokens[i + 1];
    return "";
}

std::vector<std::string> assigned_targets(const std::string& text) {
    std::vector<std::string> targets;
    // "a = b", "a, b = ...", "a: T = ...", "a += ..."
    std::size_t eq = std::string::npos;
    int depth = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (c == '(' || c == '[' || c == '{') depth++;
        else if (c == ')' || c == ']' || c == '}') depth--;
        else if (c == '=' && depth == 0) {
            bool cmp = (i + 1 < text.size() && text[i + 1] == '=') ||
                       (i > 0 && std::string("=!<>+-*/%&|^:").find(text[i - 1]) !=
                                     std::string::npos);
            if (i > 0 && text[i - 1] == ':') cmp = false;  // annotated assign
            bool aug = i > 0 && std::string("+-*/%&|^").find(text[i - 1]) != std::string::npos;
            if (!cmp || aug) {
                eq = aug ? i - 1 : i;
                break;
            }
        }
    }
    if (eq == std::string::npos) return targets;
    std::string lhs = text.substr(0, eq);
    std::size_t colon = lhs.find(':');
    if (colon != std::string::npos) lhs = lhs.substr(0, colon);
    for (const auto& piece : split_top_level(lhs, ',')) {
        auto ids = lex::identifiers(piece);
        if (!ids.empty() && !py_keywords().count(ids[0])) targets.push_back(ids[0]);
    }
    return targets;
}

void parse_def_body(const std::vector<Logical>& logs, std::size_t def_idx, int body_indent_min,
                    std::vector<RawDefinition>& defs, const std::string& file, int parent,
                    std::size_t& next_idx) {
    std::set<std::string> locals_seen;
    std::size_t j = def_idx + 1;
    for (; j < logs.size(); ++j) {
        if (logs[j].indent <= body_indent_min) break;
        const Logical& log = logs[j];
        std::string t = trim(log.text);
        if (t.empty()) continue;
        auto targets = assigned_targets(t);
        auto tokens = rough_tokens(t);
        if (!tokens.empty() && tokens[0] == "for") {
            // for targets in iterable:
            std::size_t in_pos = t.find(" in ");
            if (in_pos != std::string::npos) {
                std::string between = t.substr(3, in_pos - 3);
                for (const auto& id : lex::identifiers(between))
                    if (!py_keywords().count(id)) targets.push_back(id);
            }
        }
        for (const auto& name : targets) {
            if (locals_seen.count(name)) continue;
            locals_seen.insert(name);
            RawDefinition var;
            var.kind = DefKind::MethodVarDef;
            var.name = name;
            var.file = file;
            var.start_line = log.first_line;
            var.end_line = log.last_line;
            var.header_end_line = log.last_line;
            var.parent = parent;
            defs.push_back(std::move(var));
        }
        RawDefinition stmt;
        stmt.kind = DefKind::MethodStmt;
        stmt.file = file;
        stmt.start_line = log.first_line;
        stmt.end_line = log.last_line;
        stmt.header_end_line = log.last_line;
        stmt.parent = parent;
        std::set<std::string> exclude(targets.begin(), targets.end());
        stmt.referenced_names = filtered_identifiers(t, py_keywords(), {});
        stmt.written_names = targets;
        defs.push_back(std::move(stmt));
    }
    next_idx = j;
}

void emit_python_params(const std::string& header, int line_first, int line_last,
                        std::vector<RawDefinition>& defs, const std::string& file, int parent) {
    std::size_t open = header.find('(');
    std::size_t close = header.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close <= open) return;
    std::string params = header.substr(open + 1, close - open - 1);
    for (const auto& raw : split_top_level(params, ',')) {
        std::string p = trim(raw);
        if (p.empty()) continue;
        while (!p.empty() && (p[0] == '*' || p[0] == ' ')) p = p.substr(1);
        std::size_t stop = p.find_first_of(":=");
        std::string name = trim(stop == std::string::npos ? p : p.substr(0, stop));
        if (!lex::is_identifier(name) || name == "self" || name == "cls") continue;
        RawDefinition var;
        var.kind = DefKind::MethodVarDef;
        var.name = name;
        var.file = file;
        var.start_line = line_first;
        var.end_line = line_last;
        var.header_end_line = line_last;
        var.parent = parent;
        if (stop != std::string::npos && p[stop] == ':') {
            std::string ann = p.substr(stop + 1);
            std::size_t eq = ann.find('=');
            if (eq != std::string::npos) ann = ann.substr(0, eq);
            var.referenced_names = filtered_identifiers(ann, py_keywords(), {});
        }
        defs.push_back(std::move(var));
    }
}

int method_end_line(const std::vector<Logical>& logs, std::size_t from, int indent) {
    int end = logs[from].last_line;
    for (std::size_t j = from + 1; j < logs.size(); ++j) {
        if (logs[j].indent <= indent) break;
        end = logs[j].last_line;
    }
    return end;
}

}  // namespace

std::vector<RawDefinition> parse_python(const std::string& file, const std::string& text) {
    std::vector<RawDefinition> defs;
    std::string clean = lex::strip_comments_python(text);
    auto lines = linediff::split_lines(clean);
    auto logs = logical_lines(lines);

    std::size_t i = 0;
    while (i < logs.size()) {
        const Logical& log = logs[i];
        std::string t = trim(log.text);
        auto tokens = rough_tokens(t);
        if (tokens.empty()) {
            ++i;
            continue;
        }
        if (log.indent == 0 && (tokens[0] == "import" || tokens[0] == "from")) {
            std::string module;
            if (tokens[0] == "from" && tokens.size() >= 2) {
                module = tokens[1];
                for (std::size_t k = 2; k + 1 < tokens.size() && tokens[k] == "."; k += 2)
                    module += "." + tokens[k + 1];
            } else if (tokens.size() >= 2) {
                module = tokens[1];
                for (std::size_t k = 2; k + 1 < tokens.size() && tokens[k] == "."; k += 2)
                    module += "." + tokens[k + 1];
            }
            if (!module.empty()) {
                RawDefinition def;
                def.kind = DefKind::ImportDef;
                def.name = module;
                def.file = file;
                def.start_line = log.first_line;
                def.end_line = log.last_line;
                def.header_end_line = log.last_line;
                defs.push_back(std::move(def));
            }
            ++i;
            continue;
        }
        bool is_def = tokens[0] == "def" || (tokens[0] == "async" && tokens.size() > 1 &&
                                             tokens[1] == "def");
        if (log.indent == 0 && is_def) {
            std::string name = def_name(t, "def");
            RawDefinition def;
            def.kind = DefKind::MethodDef;
            def.name = name;
            def.file = file;
            def.start_line = log.first_line;
            def.header_end_line = log.last_line;
            def.has_body = true;
            def.end_line = method_end_line(logs, i, log.indent);
            int parent = static_cast<int>(defs.size());
            defs.push_back(std::move(def));
            emit_python_params(t, log.first_line, log.last_line, defs, file, parent);
            std::size_t next = i + 1;
            parse_def_body(logs, i, log.indent, defs, file, parent, next);
            i = next;
            continue;
        }
        if (log.indent == 0 && tokens[0] == "class") {
            std::string cls_name = def_name(t, "class");
            RawDefinition cls;
            cls.kind = DefKind::TypeDef;
            cls.name = cls_name;
            cls.file = file;
            cls.start_line = log.first_line;
            cls.header_end_line = log.last_line;
            cls.end_line = method_end_line(logs, i, log.indent);
            cls.referenced_names = filtered_identifiers(
                t.substr(t.find('(') == std::string::npos ? t.size() : t.find('(')),
                py_keywords(), {cls_name});
            int cls_idx = static_cast<int>(defs.size());
            defs.push_back(std::move(cls));
            // Class body: fields and methods.
            std::size_t j = i + 1;
            const int cls_indent = log.indent;
            while (j < logs.size() && logs[j].indent > cls_indent) {
                const Logical& member = logs[j];
                std::string mt = trim(member.text);
                auto mtok = rough_tokens(mt);
                bool member_is_def =
                    !mtok.empty() && (mtok[0] == "def" || (mtok[0] == "async" &&
                                                           mtok.size() > 1 && mtok[1] == "def"));
                if (member_is_def) {
                    std::string name = def_name(mt, "def");
                    RawDefinition def;
                    def.kind = DefKind::MethodDef;
                    def.name = name;
                    def.file = file;
                    def.start_line = member.first_line;
                    def.header_end_line = member.last_line;
                    def.has_body = true;
                    def.end_line = method_end_line(logs, j, member.indent);
                    def.parent = cls_idx;
                    int parent = static_cast<int>(defs.size());
                    defs.push_back(std::move(def));
                    emit_python_params(mt, member.first_line, member.last_line, defs, file,
                                       parent);
                    std::size_t next = j + 1;
                    parse_def_body(logs, j, member.indent, defs, file, parent, next);
                    j = next;
                    continue;
                }
                auto targets = assigned_targets(mt);
                for (const auto& name : targets) {
                    RawDefinition field;
                    field.kind = DefKind::MemberDef;
                    field.name = name;
                    field.file = file;
                    field.start_line = member.first_line;
                    field.end_line = member.last_line;
                    field.header_end_line = member.last_line;
                    field.parent = cls_idx;
                    std::set<std::string> exclude{name};
                    field.referenced_names = filtered_identifiers(mt, py_keywords(), exclude);
                    defs.push_back(std::move(field));
                }
                ++j;
            }
            i = j;
            continue;
        }
        if (log.indent == 0) {
            auto targets = assigned_targets(t);
            for (const auto& name : targets) {
                RawDefinition var;
                var.kind = DefKind::GlobalVarDef;
                var.name = name;
                var.file = file;
                var.start_line = log.first_line;
                var.end_line = log.last_line;
                var.header_end_line = log.last_line;
                std::set<std::string> exclude{name};
                var.referenced_names = filtered_identifiers(t, py_keywords(), exclude);
                defs.push_back(std::move(var));
            }
            ++i;
            continue;
        }
        ++i;
    }
    return defs;
}

}  // namespace mergectx::frontend
