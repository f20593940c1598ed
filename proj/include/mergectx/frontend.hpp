#pragma once
// Simplified source frontend: turns files into per-file definition lists and
// intra-procedural base dependencies. Declaration-level grammar plus
// statement splitting; no preprocessing, no macro expansion. Preprocessor
// conditionals are parsed as ordinary code in all branches.

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace mergectx::frontend {

enum class Language { C, Python, Java };
enum class DefKind {
    TypeDef,
    MethodDef,
    MemberDef,
    GlobalVarDef,
    ImportDef,
    MethodStmt,
    MethodVarDef,
};

std::string to_string(Language lang);
std::string to_string(DefKind kind);
Language language_from_string(const std::string& name);

/// One program element of the seven Table-style kinds. Spans are 1-based
/// inclusive; header_end_line is the last line of the signature/header for
/// container definitions (== end_line for leaves).
struct RawDefinition {
    DefKind kind = DefKind::MethodStmt;
    std::string name;       // empty for statements
    std::string signature;  // normalized parameter types, MethodDef only
    std::string file;
    int start_line = 0;
    int end_line = 0;
    int header_end_line = 0;
    int parent = -1;  // index into the same file's definition list
    bool has_body = false;
    std::vector<std::string> referenced_names;
    std::vector<std::string> written_names;  // names this element assigns
};

enum class BaseEdgeKind { Ast, Cfg, DataFlow };

/// Intra-procedural dependency between two definitions of one file.
struct BaseEdge {
    int src = 0;  // index into the definition list
    int dst = 0;
    BaseEdgeKind kind = BaseEdgeKind::Ast;
    bool operator==(const BaseEdge& o) const = default;
};

struct ParseFailure : std::runtime_error {
    std::string file;
    int line;
    ParseFailure(const std::string& file_, int line_, const std::string& what)
        : std::runtime_error(file_ + ":" + std::to_string(line_) + ": " + what),
          file(file_),
          line(line_) {}
};

std::vector<RawDefinition> parse_source(const std::string& file, const std::string& text,
                                        Language language);
std::vector<RawDefinition> parse_file(const std::string& path, Language language,
                                      const std::string& file_label = "");

/// Cfg edges between consecutive statements, flow-insensitive def-use
/// DataFlow edges (writer to later reader), and one Ast edge from every
/// statement to its method.
std::vector<BaseEdge> extract_base_edges(const std::vector<RawDefinition>& defs);

struct ParsedFile {
    std::string file;
    std::vector<RawDefinition> defs;
    std::vector<BaseEdge> base_edges;
};

struct FileDiagnostic {
    std::string file;
    int line = 0;
    std::string message;
};

/// Parses many files; failures are recorded and skipped, the rest proceed.
/// Parallel over files, deterministic output order (input order).
std::vector<ParsedFile> parse_files(const std::vector<std::pair<std::string, std::string>>& path_and_label,
                                    Language language, std::vector<FileDiagnostic>& diagnostics);

// Implemented per language in frontend_<lang>.cpp.
std::vector<RawDefinition> parse_c(const std::string& file, const std::string& text);
std::vector<RawDefinition> parse_python(const std::string& file, const std::string& text);
std::vector<RawDefinition> parse_java(const std::string& file, const std::string& text);

// Shared lexical helpers (exposed for the language parsers and tests).
namespace lex {
/// Blanks out comments, keeping the line structure intact. String and char
/// literals are preserved (their contents are masked from comment scanning).
std::string strip_comments_c(const std::string& text);
std::string strip_comments_python(const std::string& text);
std::vector<std::string> identifiers(const std::string& text);
bool is_identifier(const std::string& token);
}  // namespace lex

}  // namespace mergectx::frontend
