#pragma once
// Internal helpers shared by the brace-language frontends (C, Java).

#include "mergectx/frontend.hpp"

#include <cctype>
#include <set>
#include <string>
#include <vector>

namespace mergectx::frontend::detail {

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

/// Splits on top-level commas (depth 0 w.r.t. (), [], {}, <>optional).
inline std::vector<std::string> split_top_level(const std::string& s, char sep) {
    std::vector<std::string> parts;
    int paren = 0, bracket = 0, brace = 0;
    std::string cur;
    for (char c : s) {
        if (c == '(') paren++;
        else if (c == ')') paren--;
        else if (c == '[') bracket++;
        else if (c == ']') bracket--;
        else if (c == '{') brace++;
        else if (c == '}') brace--;
        if (c == sep && paren == 0 && bracket == 0 && brace == 0) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    return parts;
}

/// Crude token split: identifiers, numbers, and single punctuation chars.
inline std::vector<std::string> rough_tokens(const std::string& s) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i + 1;
            while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_'))
                ++j;
            tokens.push_back(s.substr(i, j - i));
            i = j;
        } else {
            tokens.push_back(std::string(1, c));
            ++i;
        }
    }
    return tokens;
}

/// Normalizes a parameter list: parameter names stripped, whitespace
/// collapsed. "double w, double h" -> "double,double"; "(void)" -> "".
inline std::string normalize_signature(const std::string& params,
                                       const std::set<std::string>& type_keywords) {
    std::string inner = trim(params);
    if (inner.empty()) return "";
    std::vector<std::string> out;
    for (const auto& raw : split_top_level(inner, ',')) {
        auto tokens = rough_tokens(raw);
        if (tokens.empty()) continue;
        // Drop a trailing parameter name: the last identifier, when at least
        // one identifier/keyword precedes it.
        int ident_count = 0;
        for (const auto& t : tokens)
            if (lex::is_identifier(t)) ident_count++;
        if (ident_count >= 2 && lex::is_identifier(tokens.back()) &&
            !type_keywords.count(tokens.back()))
            tokens.pop_back();
        // Trailing array brackets of the dropped name are kept as-is.
        std::string joined;
        for (const auto& t : tokens) joined += t;
        out.push_back(joined);
    }
    if (out.size() == 1 && out[0] == "void") return "";
    std::string sig;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (i) sig += ',';
        sig += out[i];
    }
    return sig;
}

struct Declarator {
    std::string name;
    bool has_init = false;
    std::vector<std::string> init_refs;  // identifiers in the initializer
};

struct DeclarationParts {
    std::vector<std::string> type_refs;  // non-keyword identifiers in the type
    std::vector<Declarator> declarators;
    bool has_initializer = false;
};

/// Storage/visibility qualifiers: never the type itself.
inline const std::set<std::string>& declaration_qualifiers() {
    static const std::set<std::string> q = {
        "const",    "static",   "volatile", "extern",       "register",  "inline",
        "restrict", "final",    "private",  "public",       "protected", "abstract",
        "synchronized", "transient", "native", "strictfp",  "_Atomic",
    };
    return q;
}

/// Parses "struct foo *a = x, b" style declarations. `keywords` holds
/// reserved words never treated as declared names or type references.
inline DeclarationParts parse_declaration(const std::string& text,
                                          const std::set<std::string>& keywords) {
    DeclarationParts parts;
    auto tokens = rough_tokens(text);
    // Consume the type prefix: keywords, plus one tag after struct/union/enum,
    // plus one non-keyword identifier acting as the type name.
    std::size_t i = 0;
    bool saw_tag_keyword = false;
    bool saw_type_name = false;
    while (i < tokens.size()) {
        const std::string& t = tokens[i];
        if (t == "struct" || t == "union" || t == "enum") {
            saw_tag_keyword = true;
            ++i;
            continue;
        }
        if (declaration_qualifiers().count(t)) {
            ++i;  // qualifier, not a type
            continue;
        }
        if (keywords.count(t)) {
            saw_type_name = true;  // builtin type
            ++i;
            continue;
        }
        if (t == "*" || t == "<" || t == ">") {  // pointers / crude generics
            ++i;
            continue;
        }
        if (lex::is_identifier(t)) {
            if (saw_tag_keyword && parts.type_refs.empty()) {
                parts.type_refs.push_back(t);
                saw_tag_keyword = false;
                saw_type_name = true;
                ++i;
                continue;
            }
            if (!saw_type_name) {
                // First identifier is the type name when another identifier
                // (the declared name) follows.
                bool another_ident_follows = false;
                for (std::size_t j = i + 1; j < tokens.size(); ++j) {
                    if (tokens[j] == "*" || tokens[j] == "<" || tokens[j] == ">" ||
                        keywords.count(tokens[j]))
                        continue;
                    another_ident_follows = lex::is_identifier(tokens[j]);
                    break;
                }
                if (another_ident_follows) {
                    parts.type_refs.push_back(t);
                    saw_type_name = true;
                    ++i;
                    continue;
                }
            }
            break;  // declarators start here
        }
        break;
    }
    if (!saw_type_name && parts.type_refs.empty()) return parts;  // not a declaration

    // Re-assemble the declarator region and split on top-level commas.
    std::string rest;
    for (std::size_t j = i; j < tokens.size(); ++j) {
        rest += tokens[j];
        rest += ' ';
    }
    for (const auto& piece : split_top_level(rest, ',')) {
        std::string p = trim(piece);
        if (p.empty()) continue;
        Declarator d;
        std::string before_eq = p, after_eq;
        std::size_t eq = std::string::npos;
        {
            int paren = 0, bracket = 0;
            for (std::size_t k = 0; k < p.size(); ++k) {
                char c = p[k];
                if (c == '(') paren++;
                else if (c == ')') paren--;
                else if (c == '[') bracket++;
                else if (c == ']') bracket--;
                else if (c == '=' && paren == 0 && bracket == 0 &&
                         (k + 1 >= p.size() || p[k + 1] != '=') && (k == 0 || p[k - 1] != '!') &&
                         (k == 0 || p[k - 1] != '<') && (k == 0 || p[k - 1] != '>')) {
                    eq = k;
                    break;
                }
            }
        }
        if (eq != std::string::npos) {
            before_eq = p.substr(0, eq);
            after_eq = p.substr(eq + 1);
            parts.has_initializer = true;
            d.has_init = true;
        }
        for (const auto& t : rough_tokens(before_eq)) {
            if (lex::is_identifier(t) && !keywords.count(t)) {
                d.name = t;
                break;
            }
        }
        if (!after_eq.empty()) {
            for (const auto& ident : lex::identifiers(after_eq))
                if (!keywords.count(ident)) d.init_refs.push_back(ident);
        }
        if (!d.name.empty()) parts.declarators.push_back(std::move(d));
    }
    return parts;
}

/// Collects non-keyword identifiers of `text`, excluding `exclude`.
inline std::vector<std::string> filtered_identifiers(const std::string& text,
                                                     const std::set<std::string>& keywords,
                                                     const std::set<std::string>& exclude = {}) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& ident : lex::identifiers(text)) {
        if (keywords.count(ident) || exclude.count(ident) || seen.count(ident)) continue;
        seen.insert(ident);
        out.push_back(ident);
    }
    return out;
}

/// Names written by an expression statement: roots of "lhs op= rhs" plus
/// "++x" / "x++" operands.
std::vector<std::string> written_names_of_statement(const std::string& text,
                                                    const std::set<std::string>& keywords);

}  // namespace mergectx::frontend::detail
