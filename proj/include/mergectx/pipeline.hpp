#pragma once
// End-to-end orchestration behind the CLI commands: scenario ingestion,
// per-version graph construction and coloring, context grouping, prompt
// construction, model calls, and scoring.

#include "mergectx/align.hpp"
#include "mergectx/config.hpp"
#include "mergectx/context.hpp"
#include "mergectx/evalkit.hpp"
#include "mergectx/ingest.hpp"
#include "mergectx/mtcpg.hpp"
#include "mergectx/resolve.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mergectx::pipeline {

/// One merged-file conflict region together with its per-version conflict
/// side blocks (absent when a side is empty or unmappable).
struct ConflictSite {
    ingest::CodeBlock merged_block;
    std::optional<std::string> a_block_id;
    std::optional<std::string> b_block_id;
};

struct BlockTable {
    std::vector<ingest::CodeBlock> blocks;
    const ingest::CodeBlock* find(const std::string& id) const;
    void add(ingest::CodeBlock block);
};

struct AnalyzeResult {
    std::vector<std::string> changed_files;
    mtcpg::MtCpg graph_a;
    mtcpg::MtCpg graph_b;
    std::map<std::string, int> line_counts_a;
    std::map<std::string, int> line_counts_b;
    BlockTable blocks;
    std::vector<ingest::BlockPair> pairs;
    std::vector<ConflictSite> conflicts;
    std::set<std::string> conflict_block_ids;
    std::vector<std::string> diagnostics;
};

AnalyzeResult analyze_scenario(const config::RunConfig& cfg);

struct ContextResult {
    std::vector<context::ContextGroup> groups;
    // merged conflict block id -> index into groups, -1 for uncovered
    // conflicts (they still get a prompt with empty context).
    std::map<std::string, int> group_of_conflict;
    std::vector<std::string> diagnostics;
};

ContextResult build_contexts(const AnalyzeResult& analysis, int k, int visit_cap);

struct PromptJob {
    std::string conflict_id;
    std::string file;
    int start_line = 0;
    int end_line = 0;
    std::string prompt;
    std::vector<std::string> warnings;  // e.g. context truncation
};

std::vector<PromptJob> build_prompts(const AnalyzeResult& analysis, const ContextResult& ctx,
                                     const config::RunConfig& cfg);

struct ResolutionRecord {
    std::string conflict_id;
    std::string file;
    int start_line = 0;
    int end_line = 0;
    int repeat = 0;
    std::string language;
    std::string prompt;
    std::string raw_output;
    std::string resolution;  // extracted; empty when errored
    std::string error;       // distinct failure surface, empty on success
    std::optional<std::string> ground_truth;
    std::optional<evalkit::SimilarityScores> scores;
};

std::string record_to_json(const ResolutionRecord& record);
ResolutionRecord record_from_json(const std::string& line);

/// Calls the model for every (job, repeat), bounded by `concurrency`
/// in-flight requests; records come back sorted by (conflict, repeat).
std::vector<ResolutionRecord> run_resolutions(const std::vector<PromptJob>& jobs,
                                              resolve::ModelClient& client, int repeats,
                                              int concurrency, const std::string& language);

/// Ground truth for one conflict region: the resolved-file lines between the
/// non-conflict anchors surrounding the region in the merged file.
std::optional<std::string> extract_ground_truth(const ingest::MergedFileParse& parse,
                                                std::size_t region_index,
                                                const std::string& resolved_text);

// --- CLI command entry points (exit code semantics). ---
int cmd_analyze(const config::RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_contexts(const config::RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_resolve(const config::RunConfig& cfg, std::ostream& out, std::ostream& err,
                resolve::ModelClient* injected_client = nullptr);
int cmd_eval(const config::RunConfig& cfg, const std::string& ground_truth_dir,
             std::ostream& out, std::ostream& err);

}  // namespace mergectx::pipeline
