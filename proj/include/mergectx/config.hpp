#pragma once
// Run configuration: scenario paths, grouping and model parameters, metric
// settings. Precedence: CLI flags > environment variables > config file >
// defaults; the CLI applies flags on top of what load_config returns.

#include "mergectx/evalkit.hpp"
#include "mergectx/resolve.hpp"

#include <map>
#include <string>
#include <vector>

namespace mergectx::config {

struct RunConfig {
    // Scenario.
    std::string base_dir;
    std::string a_dir;
    std::string b_dir;
    std::string merged_dir;
    std::string language = "c";
    std::vector<std::string> files;  // empty: every file under merged_dir

    // Grouping.
    int k = 4;
    int bfs_visit_cap = 50000;

    // Model.
    resolve::ModelConfig model;

    // Metrics.
    evalkit::WinnowParams winnow;
    std::map<std::string, std::string> syntax_checkers;  // language -> command

    // Run control.
    std::string out_dir = "out";
    int repeats = 10;
    int concurrency = 4;
    bool dry_run = false;
    bool dump_graph = false;
    bool dump_dot = false;
    bool dump_defs = false;
    bool syntax_check = false;
    std::string prompt_template_file;
};

/// Reads a JSON config document (scenario / model / metrics / run sections),
/// then applies environment overrides (MERGECTX_API_KEY or the configured
/// key variable). Missing file with allow_missing=true yields defaults.
RunConfig load_config(const std::string& path, bool allow_missing);

/// Environment-only defaults (no config file).
RunConfig default_config();

}  // namespace mergectx::config
