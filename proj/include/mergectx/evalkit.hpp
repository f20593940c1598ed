#pragma once
// Resolution scoring: edit-distance, winnowing, and cosine similarity on a
// 0-100 scale, plus external syntax checking and run aggregation.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mergectx::evalkit {

struct SimilarityScores {
    double ed = 0.0;
    double ws = 0.0;
    double cs = 0.0;
};

struct WinnowParams {
    int kgram = 5;   // tokens per k-gram
    int window = 4;  // winnowing window, in k-gram hashes
};

/// Shared code tokenizer: identifier/number runs plus operators as single
/// tokens; whitespace is dropped.
std::vector<std::string> tokenize_code(const std::string& text);

/// 100 * (1 - levenshtein(a, b) / max(|a|, |b|)); 100 when both are empty.
double edit_distance_similarity(const std::string& a, const std::string& b);

/// Jaccard similarity (x100) of winnowed k-gram fingerprint sets. Texts
/// shorter than one k-gram fall back to exact token-sequence match.
double winnowing_similarity(const std::string& a, const std::string& b,
                            const WinnowParams& params = {});

/// Cosine similarity (x100) of token-frequency vectors.
double cosine_similarity(const std::string& a, const std::string& b);

SimilarityScores score_pair(const std::string& generated, const std::string& truth,
                            const WinnowParams& params = {});

/// Winnowed fingerprint set (exposed for tests of the window guarantee).
std::vector<uint64_t> winnow_fingerprints(const std::vector<std::string>& tokens,
                                          const WinnowParams& params);
std::vector<uint64_t> kgram_hashes(const std::vector<std::string>& tokens, int kgram);

// ---------------------------------------------------------------------------
// Batch scoring. The OpenMP path and the serial reference produce identical
// results; the reference is kept for tests and the benchmark.

struct ScoreTask {
    std::string generated;
    std::string truth;
};

std::vector<SimilarityScores> score_batch(const std::vector<ScoreTask>& tasks,
                                          const WinnowParams& params = {});
namespace serial {
std::vector<SimilarityScores> score_batch(const std::vector<ScoreTask>& tasks,
                                          const WinnowParams& params = {});
}

// ---------------------------------------------------------------------------
// External syntax checking.

struct CheckerUnavailable : std::runtime_error {
    explicit CheckerUnavailable(const std::string& what) : std::runtime_error(what) {}
};

struct SyntaxVerdict {
    bool pass = false;
    std::string diagnostic;
};

/// Writes patched_text to a scratch file and runs the configured checker
/// command. "{file}" is substituted with the scratch path and "{dir}" with
/// include_dir (so relative includes keep resolving). Throws
/// CheckerUnavailable when the command cannot be executed at all.
SyntaxVerdict syntax_check(const std::string& patched_text, const std::string& language,
                           const std::string& checker_command,
                           const std::string& include_dir = ".");

// ---------------------------------------------------------------------------
// Aggregation.

struct IncompleteRuns : std::runtime_error {
    explicit IncompleteRuns(const std::string& what) : std::runtime_error(what) {}
};

struct ScoredRecord {
    std::string conflict_id;
    std::string language;
    SimilarityScores scores;
};

struct ReportRow {
    std::string language;  // "overall" for the summary row
    int conflicts = 0;
    double ed = 0.0;
    double ws = 0.0;
    double cs = 0.0;
};

struct Report {
    std::vector<ReportRow> rows;  // per language, then overall last
    int repeats = 1;
};

/// Per-conflict averages over `repeats` records, then per-language and
/// overall means. Throws IncompleteRuns when a conflict has fewer records.
Report aggregate_report(const std::vector<ScoredRecord>& records, int repeats);

std::string format_report_table(const Report& report);

}  // namespace mergectx::evalkit
