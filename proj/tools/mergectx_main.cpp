// mergectx: resolve git merge conflicts with dependency-aware LLM context.
//
// Subcommands: analyze, contexts, resolve, eval. Config precedence is
// CLI flags > environment > config file > defaults.

#include "mergectx/config.hpp"
#include "mergectx/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

struct CommonFlags {
    std::string config_path;
    std::string base, a, b, merged;
    std::string language;
    std::string out;
    std::vector<std::string> files;
    int k = -1;
    int repeats = -1;
    int concurrency = -1;
    std::string model;
    std::string endpoint;
    double temperature = -1.0;
    bool dump_graph = false;
    bool dump_dot = false;
    bool dump_defs = false;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "JSON config file");
    cmd->add_option("--base", flags.base, "base version tree");
    cmd->add_option("--a", flags.a, "version A tree");
    cmd->add_option("--b", flags.b, "version B tree");
    cmd->add_option("--merged", flags.merged, "preliminary merge tree (conflict markers)");
    cmd->add_option("--language", flags.language, "c, python, or java");
    cmd->add_option("--file", flags.files, "restrict to these changed files");
    cmd->add_option("--k", flags.k, "context hop bound (default 4)");
    cmd->add_option("--out", flags.out, "output directory");
    cmd->add_option("--repeats", flags.repeats, "model calls per conflict");
    cmd->add_option("--concurrency", flags.concurrency, "max in-flight model requests");
    cmd->add_option("--model", flags.model, "model name");
    cmd->add_option("--endpoint", flags.endpoint, "chat-completions endpoint URL");
    cmd->add_option("--temperature", flags.temperature, "sampling temperature (default 0)");
    cmd->add_flag("--dump-graph", flags.dump_graph, "write graph JSON dumps");
    cmd->add_flag("--dump-dot", flags.dump_dot, "write graph DOT dumps");
    cmd->add_flag("--dump-defs", flags.dump_defs, "write raw definition dumps");
}

mergectx::config::RunConfig make_config(const CommonFlags& flags) {
    using mergectx::config::RunConfig;
    RunConfig cfg = flags.config_path.empty()
                        ? mergectx::config::default_config()
                        : mergectx::config::load_config(flags.config_path, false);
    if (!flags.base.empty()) cfg.base_dir = flags.base;
    if (!flags.a.empty()) cfg.a_dir = flags.a;
    if (!flags.b.empty()) cfg.b_dir = flags.b;
    if (!flags.merged.empty()) cfg.merged_dir = flags.merged;
    if (!flags.language.empty()) cfg.language = flags.language;
    if (!flags.files.empty()) cfg.files = flags.files;
    if (flags.k > 0) cfg.k = flags.k;
    if (!flags.out.empty()) cfg.out_dir = flags.out;
    if (flags.repeats > 0) cfg.repeats = flags.repeats;
    if (flags.concurrency > 0) cfg.concurrency = flags.concurrency;
    if (!flags.model.empty()) cfg.model.model = flags.model;
    if (!flags.endpoint.empty()) cfg.model.endpoint = flags.endpoint;
    if (flags.temperature >= 0.0) cfg.model.temperature = flags.temperature;
    cfg.dump_graph = cfg.dump_graph || flags.dump_graph;
    cfg.dump_dot = cfg.dump_dot || flags.dump_dot;
    cfg.dump_defs = cfg.dump_defs || flags.dump_defs;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dependency-aware merge conflict resolution"};
    app.require_subcommand(1);

    CommonFlags analyze_flags, contexts_flags, resolve_flags, eval_flags;
    bool dry_run = false;
    bool syntax_check = false;
    std::string ground_truth;

    CLI::App* analyze = app.add_subcommand("analyze", "build graphs and block alignment");
    add_common_flags(analyze, analyze_flags);

    CLI::App* contexts = app.add_subcommand("contexts", "group conflicts with related changes");
    add_common_flags(contexts, contexts_flags);

    CLI::App* resolve = app.add_subcommand("resolve", "build prompts and query the model");
    add_common_flags(resolve, resolve_flags);
    resolve->add_flag("--dry-run", dry_run, "write prompts only, no network calls");

    CLI::App* eval = app.add_subcommand("eval", "score a resolution ledger against ground truth");
    add_common_flags(eval, eval_flags);
    eval->add_option("--ground-truth", ground_truth, "resolved (ground truth) tree")
        ->required();
    eval->add_flag("--syntax-check", syntax_check, "run the configured syntax checker");

    CLI11_PARSE(app, argc, argv);

    try {
        if (analyze->parsed())
            return mergectx::pipeline::cmd_analyze(make_config(analyze_flags), std::cout,
                                                   std::cerr);
        if (contexts->parsed())
            return mergectx::pipeline::cmd_contexts(make_config(contexts_flags), std::cout,
                                                    std::cerr);
        if (resolve->parsed()) {
            auto cfg = make_config(resolve_flags);
            cfg.dry_run = dry_run;
            return mergectx::pipeline::cmd_resolve(cfg, std::cout, std::cerr);
        }
        if (eval->parsed()) {
            auto cfg = make_config(eval_flags);
            cfg.syntax_check = cfg.syntax_check || syntax_check;
            return mergectx::pipeline::cmd_eval(cfg, ground_truth, std::cout, std::cerr);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
