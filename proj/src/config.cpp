#include "mergectx/config.hpp"

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <fstream>

namespace mergectx::config {

namespace {
using nlohmann::json;

void apply_env(RunConfig& cfg) {
    if (const char* key = std::getenv("MERGECTX_API_KEY")) cfg.model.api_key = key;
    if (const char* endpoint = std::getenv("MERGECTX_ENDPOINT")) cfg.model.endpoint = endpoint;
    if (const char* model = std::getenv("MERGECTX_MODEL")) cfg.model.model = model;
}

}  // namespace

RunConfig default_config() {
    RunConfig cfg;
    cfg.syntax_checkers = {
        {"c", "clang -fsyntax-only -I{dir} {file}"},
        {"python", "python3 -c \"import ast,sys; ast.parse(open(sys.argv[1]).read())\" {file}"},
    };
    apply_env(cfg);
    return cfg;
}

RunConfig load_config(const std::string& path, bool allow_missing) {
    RunConfig cfg = default_config();
    std::ifstream in(path);
    if (!in) {
        if (allow_missing) return cfg;
        throw std::runtime_error("cannot read config file: " + path);
    }
    json doc = json::parse(in);

    if (doc.contains("scenario")) {
        const auto& s = doc["scenario"];
        cfg.base_dir = s.value("base", cfg.base_dir);
        cfg.a_dir = s.value("a", cfg.a_dir);
        cfg.b_dir = s.value("b", cfg.b_dir);
        cfg.merged_dir = s.value("merged", cfg.merged_dir);
        cfg.language = s.value("language", cfg.language);
        if (s.contains("files")) cfg.files = s["files"].get<std::vector<std::string>>();
    }
    if (doc.contains("model")) {
        const auto& m = doc["model"];
        cfg.model.endpoint = m.value("endpoint", cfg.model.endpoint);
        cfg.model.model = m.value("name", cfg.model.model);
        cfg.model.temperature = m.value("temperature", cfg.model.temperature);
        cfg.model.max_output_tokens = m.value("max_output_tokens", cfg.model.max_output_tokens);
        cfg.model.timeout_ms = m.value("timeout_ms", cfg.model.timeout_ms);
        cfg.model.retries = m.value("retries", cfg.model.retries);
        cfg.model.prompt_token_budget =
            m.value("prompt_token_budget", cfg.model.prompt_token_budget);
        if (m.contains("api_key_env"))
            if (const char* key = std::getenv(m["api_key_env"].get<std::string>().c_str()))
                cfg.model.api_key = key;
    }
    if (doc.contains("metrics")) {
        const auto& mt = doc["metrics"];
        cfg.winnow.kgram = mt.value("winnow_kgram", cfg.winnow.kgram);
        cfg.winnow.window = mt.value("winnow_window", cfg.winnow.window);
        if (mt.contains("syntax_checkers"))
            for (const auto& [lang, cmd] : mt["syntax_checkers"].items())
                cfg.syntax_checkers[lang] = cmd.get<std::string>();
    }
    if (doc.contains("run")) {
        const auto& r = doc["run"];
        cfg.k = r.value("k", cfg.k);
        cfg.bfs_visit_cap = r.value("bfs_visit_cap", cfg.bfs_visit_cap);
        cfg.out_dir = r.value("out", cfg.out_dir);
        cfg.repeats = r.value("repeats", cfg.repeats);
        cfg.concurrency = r.value("concurrency", cfg.concurrency);
        cfg.syntax_check = r.value("syntax_check", cfg.syntax_check);
        cfg.prompt_template_file = r.value("prompt_template", cfg.prompt_template_file);
    }
    apply_env(cfg);

    if (cfg.k < 1) throw std::runtime_error("config error: k must be >= 1");
    if (cfg.repeats < 1) throw std::runtime_error("config error: repeats must be >= 1");
    return cfg;
}

}  // namespace mergectx::config
