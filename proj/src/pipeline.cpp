#include "mergectx/pipeline.hpp"

#include "mergectx/linediff.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

namespace mergectx::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;
using ingest::BlockKind;
using ingest::CodeBlock;
using ingest::LineSpan;
using ingest::Version;

namespace {

std::optional<std::string> read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

std::string join_lines(const std::vector<std::string>& lines, int first, int last) {
    std::string out;
    for (int i = first; i <= last && i <= static_cast<int>(lines.size()); ++i) {
        out += lines[static_cast<std::size_t>(i - 1)];
        out += '\n';
    }
    return out;
}

std::vector<std::string> list_merged_files(const config::RunConfig& cfg) {
    if (!cfg.files.empty()) {
        for (const auto& f : cfg.files)
            if (!fs::exists(fs::path(cfg.merged_dir) / f))
                throw std::runtime_error("changed file missing from merged tree: " + f);
        return cfg.files;
    }
    std::vector<std::string> files;
    if (!fs::is_directory(cfg.merged_dir))
        throw std::runtime_error("merged dir not found: " + cfg.merged_dir);
    for (const auto& entry : fs::recursive_directory_iterator(cfg.merged_dir)) {
        if (!entry.is_regular_file()) continue;
        files.push_back(fs::relative(entry.path(), cfg.merged_dir).generic_string());
    }
    std::sort(files.begin(), files.end());
    return files;
}

// Removes the parts of diff blocks that fall inside conflict-side spans of
// the same file/version; the surviving pieces keep the parent's base span.
std::vector<CodeBlock> subtract_conflict_spans(const std::vector<CodeBlock>& diffs,
                                               const std::vector<LineSpan>& conflict_spans) {
    std::vector<CodeBlock> out;
    for (const auto& block : diffs) {
        std::vector<LineSpan> pieces{{block.start_line, block.end_line}};
        for (const auto& cut : conflict_spans) {
            if (cut.empty()) continue;
            std::vector<LineSpan> next;
            for (const auto& piece : pieces) {
                if (!piece.intersects(cut)) {
                    next.push_back(piece);
                    continue;
                }
                if (piece.first < cut.first) next.push_back({piece.first, cut.first - 1});
                if (piece.last > cut.last) next.push_back({cut.last + 1, piece.last});
            }
            pieces = std::move(next);
        }
        auto block_lines = linediff::split_lines(block.text);
        for (const auto& piece : pieces) {
            CodeBlock b = block;
            b.start_line = piece.first;
            b.end_line = piece.last;
            b.id = ingest::make_block_id(b.file, b.version, b.kind, b.start_line, b.end_line);
            std::string text;
            for (int ln = piece.first; ln <= piece.last; ++ln) {
                int offset = ln - block.start_line;
                if (offset >= 0 && offset < static_cast<int>(block_lines.size())) {
                    text += block_lines[static_cast<std::size_t>(offset)];
                    text += '\n';
                }
            }
            b.text = std::move(text);
            out.push_back(std::move(b));
        }
    }
    return out;
}

json block_to_json(const CodeBlock& b) {
    return json{{"id", b.id},
                {"file", b.file},
                {"version", ingest::to_string(b.version)},
                {"start_line", b.start_line},
                {"end_line", b.end_line},
                {"kind", ingest::to_string(b.kind)}};
}

std::string sanitize_id(const std::string& id) {
    std::string out;
    for (char c : id)
        out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.') ? c : '_';
    return out;
}

}  // namespace

const CodeBlock* BlockTable::find(const std::string& id) const {
    for (const auto& b : blocks)
        if (b.id == id) return &b;
    return nullptr;
}

void BlockTable::add(CodeBlock block) { blocks.push_back(std::move(block)); }

AnalyzeResult analyze_scenario(const config::RunConfig& cfg) {
    ingest::MergeScenario scenario{cfg.base_dir, cfg.a_dir, cfg.b_dir, cfg.merged_dir,
                                   list_merged_files(cfg)};
    ingest::validate_scenario(scenario);
    AnalyzeResult result;
    result.changed_files = scenario.changed_files;
    const auto language = frontend::language_from_string(cfg.language);

    std::set<std::string> changed_set(result.changed_files.begin(), result.changed_files.end());
    std::map<std::string, std::vector<LineSpan>> conflict_spans_a, conflict_spans_b;
    std::vector<CodeBlock> diff_blocks_a, diff_blocks_b;

    for (const auto& file : result.changed_files) {
        auto merged_text = read_file(fs::path(cfg.merged_dir) / file);
        if (!merged_text) {
            result.diagnostics.push_back("missing merged file: " + file);
            continue;
        }
        ingest::MergedFileParse parse;
        try {
            parse = ingest::parse_merged_file(*merged_text);
        } catch (const ingest::UnbalancedMarkers& e) {
            result.diagnostics.push_back(file + ": " + e.what());
            continue;
        }
        std::string base_text = read_file(fs::path(cfg.base_dir) / file).value_or("");
        auto a_text = read_file(fs::path(cfg.a_dir) / file);
        auto b_text = read_file(fs::path(cfg.b_dir) / file);
        if (a_text)
            result.line_counts_a[file] =
                static_cast<int>(linediff::split_lines(*a_text).size());
        if (b_text)
            result.line_counts_b[file] =
                static_cast<int>(linediff::split_lines(*b_text).size());

        auto a_lines = linediff::split_lines(a_text.value_or(""));
        auto b_lines = linediff::split_lines(b_text.value_or(""));

        // Conflict sites: the merged-coordinates block plus each side mapped
        // into its version's own file coordinates.
        ingest::VersionView view_a = ingest::extract_version_view(parse, Version::A);
        ingest::VersionView view_b = ingest::extract_version_view(parse, Version::B);
        for (std::size_t ri = 0; ri < parse.regions.size(); ++ri) {
            const auto& region = parse.regions[ri];
            ConflictSite site;
            site.merged_block.file = file;
            site.merged_block.version = Version::Merged;
            site.merged_block.kind = BlockKind::Conflict;
            site.merged_block.start_line = region.whole.first;
            site.merged_block.end_line = region.whole.last;
            site.merged_block.text = join_lines(parse.lines, region.whole.first,
                                                region.whole.last);
            site.merged_block.id =
                ingest::make_block_id(file, Version::Merged, BlockKind::Conflict,
                                      region.whole.first, region.whole.last);
            result.conflict_block_ids.insert(site.merged_block.id);
            result.blocks.add(site.merged_block);

            auto map_side = [&](const ingest::VersionView& view, Version version,
                                const std::optional<std::string>& text,
                                std::vector<LineSpan>& spans) -> std::optional<std::string> {
                const LineSpan view_span = view.side_spans[ri];
                if (view_span.empty() || !text) return std::nullopt;
                auto mapped = ingest::map_span_between_texts(view.text, *text, view_span);
                if (!mapped) return std::nullopt;
                CodeBlock side;
                side.file = file;
                side.version = version;
                side.kind = BlockKind::Conflict;
                side.start_line = mapped->first;
                side.end_line = mapped->last;
                side.text = join_lines(version == Version::A ? a_lines : b_lines,
                                       mapped->first, mapped->last);
                side.id = ingest::make_block_id(file, version, BlockKind::Conflict,
                                                mapped->first, mapped->last);
                spans.push_back(*mapped);
                result.conflict_block_ids.insert(side.id);
                result.blocks.add(side);
                return side.id;
            };
            site.a_block_id = map_side(view_a, Version::A, a_text, conflict_spans_a[file]);
            site.b_block_id = map_side(view_b, Version::B, b_text, conflict_spans_b[file]);
            if (site.a_block_id && site.b_block_id)
                result.pairs.push_back({*site.a_block_id, *site.b_block_id});
            result.conflicts.push_back(std::move(site));
        }

        // Diff blocks per version, minus the regions already covered by the
        // conflict sides.
        if (a_text) {
            auto diffs = ingest::compute_diff_blocks(base_text, *a_text, file, Version::A);
            auto trimmed = subtract_conflict_spans(diffs, conflict_spans_a[file]);
            for (auto& b : trimmed) diff_blocks_a.push_back(std::move(b));
        }
        if (b_text) {
            auto diffs = ingest::compute_diff_blocks(base_text, *b_text, file, Version::B);
            auto trimmed = subtract_conflict_spans(diffs, conflict_spans_b[file]);
            for (auto& b : trimmed) diff_blocks_b.push_back(std::move(b));
        }
    }

    // Cross-version diff pairs by base-hunk overlap, per file.
    {
        std::map<std::string, std::vector<CodeBlock>> by_file_a, by_file_b;
        for (const auto& b : diff_blocks_a) by_file_a[b.file].push_back(b);
        for (const auto& b : diff_blocks_b) by_file_b[b.file].push_back(b);
        for (const auto& [file, blocks_a] : by_file_a) {
            auto it = by_file_b.find(file);
            if (it == by_file_b.end()) continue;
            auto pairs = ingest::pair_blocks(blocks_a, it->second, "");
            result.pairs.insert(result.pairs.end(), pairs.begin(), pairs.end());
        }
    }
    for (auto& b : diff_blocks_a) result.blocks.add(std::move(b));
    for (auto& b : diff_blocks_b) result.blocks.add(std::move(b));

    // Per-version graphs over the changed files present in that version.
    auto build_version_graph = [&](const std::string& root) {
        std::vector<std::pair<std::string, std::string>> paths;
        for (const auto& file : result.changed_files) {
            fs::path p = fs::path(root) / file;
            if (fs::exists(p)) paths.push_back({p.string(), file});
        }
        std::vector<frontend::FileDiagnostic> diags;
        auto parsed = frontend::parse_files(paths, language, diags);
        for (const auto& d : diags)
            result.diagnostics.push_back("parse failure: " + d.message);
        return mtcpg::build_mtcpg(parsed, changed_set);
    };
    result.graph_a = build_version_graph(cfg.a_dir);
    result.graph_b = build_version_graph(cfg.b_dir);

    // Color each version's graph with its blocks, in canonical order.
    auto color = [&](mtcpg::MtCpg& graph, Version version,
                     const std::map<std::string, int>& line_counts) {
        std::vector<CodeBlock> blocks;
        for (const auto& b : result.blocks.blocks)
            if (b.version == version) blocks.push_back(b);
        std::sort(blocks.begin(), blocks.end(), [](const CodeBlock& x, const CodeBlock& y) {
            return std::tie(x.file, x.start_line, x.end_line, x.id) <
                   std::tie(y.file, y.start_line, y.end_line, y.id);
        });
        align::color_graph(graph, blocks, line_counts);
    };
    color(result.graph_a, Version::A, result.line_counts_a);
    color(result.graph_b, Version::B, result.line_counts_b);

    for (const auto& d : result.graph_a.diagnostics)
        result.diagnostics.push_back("A: " + d);
    for (const auto& d : result.graph_b.diagnostics)
        result.diagnostics.push_back("B: " + d);
    return result;
}

ContextResult build_contexts(const AnalyzeResult& analysis, int k, int visit_cap) {
    ContextResult result;
    context::DistanceThreshold threshold{k};
    context::BfsLimits limits{visit_cap};
    auto r_a = context::single_version_contexts(analysis.graph_a, analysis.conflict_block_ids,
                                                threshold, limits, &result.diagnostics);
    auto r_b = context::single_version_contexts(analysis.graph_b, analysis.conflict_block_ids,
                                                threshold, limits, &result.diagnostics);
    result.groups = context::cross_version_contexts(r_a, r_b, analysis.pairs,
                                                    analysis.conflict_block_ids);

    for (const auto& site : analysis.conflicts) {
        int found = -1;
        for (std::size_t gi = 0; gi < result.groups.size() && found < 0; ++gi) {
            const auto& members = result.groups[gi].member_blocks;
            auto has = [&](const std::optional<std::string>& id) {
                return id && std::binary_search(members.begin(), members.end(), *id);
            };
            if (has(site.a_block_id) || has(site.b_block_id)) found = static_cast<int>(gi);
        }
        result.group_of_conflict[site.merged_block.id] = found;
    }
    return result;
}

std::vector<PromptJob> build_prompts(const AnalyzeResult& analysis, const ContextResult& ctx,
                                     const config::RunConfig& cfg) {
    resolve::PromptTemplate tmpl = cfg.prompt_template_file.empty()
                                       ? resolve::PromptTemplate::standard()
                                       : resolve::PromptTemplate::from_file(
                                             cfg.prompt_template_file);
    const std::map<std::string, std::string> roots{
        {"A", cfg.a_dir}, {"B", cfg.b_dir}, {"merged", cfg.merged_dir}};

    // Conflict-side ids render as the merged conflict (marker form).
    std::map<std::string, const CodeBlock*> side_to_merged;
    std::map<std::string, const CodeBlock*> merged_by_id;
    for (const auto& site : analysis.conflicts) {
        const CodeBlock* merged = analysis.blocks.find(site.merged_block.id);
        merged_by_id[site.merged_block.id] = merged;
        if (site.a_block_id) side_to_merged[*site.a_block_id] = merged;
        if (site.b_block_id) side_to_merged[*site.b_block_id] = merged;
    }
    context::BlockLookup lookup = [&](const std::string& id) -> const CodeBlock* {
        auto it = side_to_merged.find(id);
        if (it != side_to_merged.end()) return it->second;
        return analysis.blocks.find(id);
    };

    std::vector<const ConflictSite*> ordered;
    for (const auto& site : analysis.conflicts) ordered.push_back(&site);
    std::sort(ordered.begin(), ordered.end(), [](const ConflictSite* x, const ConflictSite* y) {
        return std::tie(x->merged_block.file, x->merged_block.start_line) <
               std::tie(y->merged_block.file, y->merged_block.start_line);
    });

    std::vector<PromptJob> jobs;
    for (const ConflictSite* site : ordered) {
        PromptJob job;
        job.conflict_id = site->merged_block.id;
        job.file = site->merged_block.file;
        job.start_line = site->merged_block.start_line;
        job.end_line = site->merged_block.end_line;

        const std::string target_text =
            "@@ conflict " + site->merged_block.file + " | merged lines " +
            std::to_string(site->merged_block.start_line) + "-" +
            std::to_string(site->merged_block.end_line) + " @@\n" + site->merged_block.text;

        std::vector<std::string> snippets;
        int gidx = ctx.group_of_conflict.at(site->merged_block.id);
        if (gidx >= 0) {
            auto rendered = context::render_context(ctx.groups[static_cast<std::size_t>(gidx)],
                                                    lookup, roots);
            snippets = rendered.context_snippets;
            // Sibling conflicts of the same group are context too.
            for (const auto& text : rendered.conflict_texts)
                if (text != target_text) snippets.push_back(text);
        }

        while (true) {
            std::string context_text;
            for (const auto& s : snippets) {
                context_text += s;
                if (!context_text.empty() && context_text.back() != '\n') context_text += '\n';
            }
            try {
                job.prompt = resolve::build_prompt(tmpl, context_text, target_text,
                                                   cfg.model.prompt_token_budget);
                break;
            } catch (const resolve::PromptTooLarge& e) {
                if (snippets.empty()) {
                    job.prompt = resolve::build_prompt(tmpl, "", target_text, 0);
                    job.warnings.push_back(std::string("prompt over budget even without context: ") +
                                           e.what());
                    break;
                }
                snippets.pop_back();
                job.warnings.push_back("context truncated to fit prompt budget");
            }
        }
        jobs.push_back(std::move(job));
    }
    return jobs;
}

std::string record_to_json(const ResolutionRecord& record) {
    json j;
    j["conflict_id"] = record.conflict_id;
    j["file"] = record.file;
    j["start_line"] = record.start_line;
    j["end_line"] = record.end_line;
    j["repeat"] = record.repeat;
    j["language"] = record.language;
    j["prompt"] = record.prompt;
    j["raw_output"] = record.raw_output;
    j["resolution"] = record.resolution;
    j["error"] = record.error;
    if (record.ground_truth) j["ground_truth"] = *record.ground_truth;
    if (record.scores)
        j["scores"] = {{"ed", record.scores->ed}, {"ws", record.scores->ws},
                       {"cs", record.scores->cs}};
    return j.dump();
}

ResolutionRecord record_from_json(const std::string& line) {
    json j = json::parse(line);
    ResolutionRecord r;
    r.conflict_id = j.value("conflict_id", "");
    r.file = j.value("file", "");
    r.start_line = j.value("start_line", 0);
    r.end_line = j.value("end_line", 0);
    r.repeat = j.value("repeat", 0);
    r.language = j.value("language", "");
    r.prompt = j.value("prompt", "");
    r.raw_output = j.value("raw_output", "");
    r.resolution = j.value("resolution", "");
    r.error = j.value("error", "");
    if (j.contains("ground_truth")) r.ground_truth = j["ground_truth"].get<std::string>();
    if (j.contains("scores")) {
        evalkit::SimilarityScores s;
        s.ed = j["scores"].value("ed", 0.0);
        s.ws = j["scores"].value("ws", 0.0);
        s.cs = j["scores"].value("cs", 0.0);
        r.scores = s;
    }
    return r;
}

std::vector<ResolutionRecord> run_resolutions(const std::vector<PromptJob>& jobs,
                                              resolve::ModelClient& client, int repeats,
                                              int concurrency, const std::string& language) {
    struct Task {
        const PromptJob* job;
        int repeat;
    };
    std::vector<Task> tasks;
    for (const auto& job : jobs)
        for (int r = 0; r < repeats; ++r) tasks.push_back({&job, r});
    std::vector<ResolutionRecord> records(tasks.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) break;
            const Task& task = tasks[i];
            ResolutionRecord rec;
            rec.conflict_id = task.job->conflict_id;
            rec.file = task.job->file;
            rec.start_line = task.job->start_line;
            rec.end_line = task.job->end_line;
            rec.repeat = task.repeat;
            rec.language = language;
            rec.prompt = task.job->prompt;
            try {
                auto reply = client.request(task.job->prompt);
                rec.raw_output = reply.text;
                rec.resolution = resolve::extract_resolution(reply.text);
            } catch (const resolve::EndpointUnreachable& e) {
                rec.error = std::string("EndpointUnreachable: ") + e.what();
            } catch (const resolve::HttpError& e) {
                rec.error = std::string("HttpError: ") + e.what();
            } catch (const resolve::RequestTimeout& e) {
                rec.error = std::string("Timeout: ") + e.what();
            } catch (const resolve::NoCodeFound& e) {
                rec.error = std::string("NoCodeFound: ") + e.what();
            }
            records[i] = std::move(rec);
        }
    };
    int thread_count = std::max(1, std::min<int>(concurrency, static_cast<int>(tasks.size())));
    std::vector<std::thread> threads;
    for (int t = 0; t < thread_count; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    return records;  // already in (job order, repeat) order
}

std::optional<std::string> extract_ground_truth(const ingest::MergedFileParse& parse,
                                                std::size_t region_index,
                                                const std::string& resolved_text) {
    if (region_index >= parse.regions.size()) return std::nullopt;
    auto resolved_lines = linediff::split_lines(resolved_text);
    auto matches = linediff::match_lines(parse.lines, resolved_lines);
    const auto& region = parse.regions[region_index];
    int prev_anchor = -1;
    int next_anchor = static_cast<int>(resolved_lines.size());
    for (const auto& [mi, ri] : matches) {
        const int merged_line = mi + 1;
        if (merged_line < region.whole.first) prev_anchor = std::max(prev_anchor, ri);
        if (merged_line > region.whole.last) next_anchor = std::min(next_anchor, ri);
    }
    std::string truth;
    for (int ln = prev_anchor + 1; ln < next_anchor; ++ln) {
        truth += resolved_lines[static_cast<std::size_t>(ln)];
        if (ln + 1 < next_anchor) truth += '\n';
    }
    return truth;
}

// ---------------------------------------------------------------------------
// CLI commands.

namespace {

json groups_to_json(const std::vector<context::ContextGroup>& groups,
                    const std::set<std::string>& conflict_ids) {
    json arr = json::array();
    for (const auto& g : groups) {
        json jg;
        jg["group_id"] = g.group_id;
        jg["conflicts"] = g.conflict_blocks;
        json ctx_blocks = json::array();
        for (const auto& id : g.member_blocks)
            if (!conflict_ids.count(id)) ctx_blocks.push_back(id);
        jg["context_blocks"] = std::move(ctx_blocks);
        arr.push_back(std::move(jg));
    }
    return arr;
}

void dump_analysis(const config::RunConfig& cfg, const AnalyzeResult& analysis) {
    fs::path out = cfg.out_dir;
    json blocks = json::array();
    for (const auto& b : analysis.blocks.blocks) blocks.push_back(block_to_json(b));
    write_file(out / "blocks.json", blocks.dump(2) + "\n");

    json pairs = json::array();
    for (const auto& p : analysis.pairs)
        pairs.push_back({{"block_a", p.block_a}, {"block_b", p.block_b}});
    write_file(out / "pairs.json", pairs.dump(2) + "\n");

    json conflicts = json::array();
    for (const auto& site : analysis.conflicts) {
        json jc;
        jc["id"] = site.merged_block.id;
        jc["file"] = site.merged_block.file;
        jc["start_line"] = site.merged_block.start_line;
        jc["end_line"] = site.merged_block.end_line;
        if (site.a_block_id) jc["a_block"] = *site.a_block_id;
        if (site.b_block_id) jc["b_block"] = *site.b_block_id;
        conflicts.push_back(std::move(jc));
    }
    write_file(out / "conflicts.json", conflicts.dump(2) + "\n");

    if (cfg.dump_graph) {
        write_file(out / "graph_a.json", mtcpg::to_json(analysis.graph_a));
        write_file(out / "graph_b.json", mtcpg::to_json(analysis.graph_b));
    }
    if (cfg.dump_dot) {
        write_file(out / "graph_a.dot", mtcpg::to_dot(analysis.graph_a));
        write_file(out / "graph_b.dot", mtcpg::to_dot(analysis.graph_b));
    }

    // Block -> node attachments, per version.
    auto attachments = [&](const mtcpg::MtCpg& graph) {
        json j = json::object();
        for (const auto& node : graph.nodes)
            for (const auto& id : node.attached_blocks) j[id].push_back(node.id);
        return j;
    };
    write_file(out / "attachments_a.json", attachments(analysis.graph_a).dump(2) + "\n");
    write_file(out / "attachments_b.json", attachments(analysis.graph_b).dump(2) + "\n");
}

void print_graph_counts(const AnalyzeResult& analysis, std::ostream& out) {
    auto row = [&](const char* name, const mtcpg::MtCpg& g) {
        const int total = static_cast<int>(g.edges.size());
        const int base = g.base_edge_count;
        const double growth =
            base > 0 ? 100.0 * static_cast<double>(total - base) / base : 0.0;
        out << name << ": nodes " << g.nodes.size() << ", base edges " << base
            << ", mtcpg edges " << total << " (+" << std::fixed << std::setprecision(2)
            << growth << "%)\n";
    };
    row("version A", analysis.graph_a);
    row("version B", analysis.graph_b);
}

}  // namespace

int cmd_analyze(const config::RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        AnalyzeResult analysis = analyze_scenario(cfg);
        dump_analysis(cfg, analysis);
        if (cfg.dump_defs) {
            const auto language = frontend::language_from_string(cfg.language);
            for (const auto& [label, root] :
                 std::vector<std::pair<std::string, std::string>>{{"a", cfg.a_dir},
                                                                  {"b", cfg.b_dir}}) {
                json defs = json::object();
                for (const auto& file : analysis.changed_files) {
                    fs::path p = fs::path(root) / file;
                    if (!fs::exists(p)) continue;
                    try {
                        auto parsed = frontend::parse_file(p.string(), language, file);
                        json arr = json::array();
                        for (const auto& d : parsed)
                            arr.push_back({{"kind", frontend::to_string(d.kind)},
                                           {"name", d.name},
                                           {"signature", d.signature},
                                           {"line_span", {d.start_line, d.end_line}},
                                           {"parent", d.parent}});
                        defs[file] = std::move(arr);
                    } catch (const frontend::ParseFailure&) {
                    }
                }
                write_file(fs::path(cfg.out_dir) / ("defs_" + label + ".json"),
                           defs.dump(2) + "\n");
            }
        }
        print_graph_counts(analysis, out);
        out << "conflicts: " << analysis.conflicts.size() << ", blocks: "
            << analysis.blocks.blocks.size() << ", pairs: " << analysis.pairs.size() << "\n";
        for (const auto& d : analysis.diagnostics) err << "diagnostic: " << d << "\n";
        return 0;
    } catch (const std::exception& e) {
        err << "analyze failed: " << e.what() << "\n";
        return 1;
    }
}

int cmd_contexts(const config::RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        AnalyzeResult analysis = analyze_scenario(cfg);
        ContextResult ctx = build_contexts(analysis, cfg.k, cfg.bfs_visit_cap);
        json doc;
        doc["k"] = cfg.k;
        doc["groups"] = groups_to_json(ctx.groups, analysis.conflict_block_ids);
        write_file(fs::path(cfg.out_dir) / "contexts.json", doc.dump(2) + "\n");
        out << "groups: " << ctx.groups.size() << "\n";
        for (const auto& g : ctx.groups)
            out << "  group " << g.group_id << ": " << g.member_blocks.size() << " blocks, "
                << g.conflict_blocks.size() << " conflicts\n";
        for (const auto& d : ctx.diagnostics) err << "diagnostic: " << d << "\n";
        return 0;
    } catch (const std::exception& e) {
        err << "contexts failed: " << e.what() << "\n";
        return 1;
    }
}

int cmd_resolve(const config::RunConfig& cfg, std::ostream& out, std::ostream& err,
                resolve::ModelClient* injected_client) {
    try {
        AnalyzeResult analysis = analyze_scenario(cfg);
        ContextResult ctx = build_contexts(analysis, cfg.k, cfg.bfs_visit_cap);
        auto jobs = build_prompts(analysis, ctx, cfg);
        for (const auto& job : jobs)
            for (const auto& w : job.warnings)
                err << "warning: " << job.conflict_id << ": " << w << "\n";

        if (cfg.dry_run) {
            for (const auto& job : jobs)
                write_file(fs::path(cfg.out_dir) / "prompts" /
                               (sanitize_id(job.conflict_id) + ".txt"),
                           job.prompt);
            out << "dry run: wrote " << jobs.size() << " prompts, no network calls\n";
            return 0;
        }

        std::unique_ptr<resolve::HttpModelClient> owned;
        resolve::ModelClient* client = injected_client;
        if (!client) {
            owned = std::make_unique<resolve::HttpModelClient>(cfg.model);
            client = owned.get();
        }
        auto records =
            run_resolutions(jobs, *client, cfg.repeats, cfg.concurrency, cfg.language);
        std::string ledger;
        for (const auto& r : records) ledger += record_to_json(r) + "\n";
        write_file(fs::path(cfg.out_dir) / "resolutions.jsonl", ledger);
        int errors = 0;
        for (const auto& r : records)
            if (!r.error.empty()) ++errors;
        out << "resolved " << jobs.size() << " conflicts x " << cfg.repeats << " repeats, "
            << errors << " errors\n";
        return 0;
    } catch (const std::exception& e) {
        err << "resolve failed: " << e.what() << "\n";
        return 1;
    }
}

int cmd_eval(const config::RunConfig& cfg, const std::string& ground_truth_dir,
             std::ostream& out, std::ostream& err) {
    try {
        fs::path ledger_path = fs::path(cfg.out_dir) / "resolutions.jsonl";
        auto ledger_text = read_file(ledger_path);
        if (!ledger_text) {
            err << "eval failed: no ledger at " << ledger_path.string() << "\n";
            return 1;
        }
        std::vector<ResolutionRecord> records;
        for (const auto& line : linediff::split_lines(*ledger_text)) {
            if (line.empty()) continue;
            records.push_back(record_from_json(line));
        }
        if (records.empty()) {
            err << "eval failed: ledger is empty\n";
            return 1;
        }

        // Ground truth per conflict region, via anchor alignment.
        std::map<std::string, ingest::MergedFileParse> merged_cache;
        std::map<std::string, std::string> truth_cache;
        for (auto& rec : records) {
            auto mit = merged_cache.find(rec.file);
            if (mit == merged_cache.end()) {
                auto text = read_file(fs::path(cfg.merged_dir) / rec.file);
                if (!text) {
                    err << "eval failed: missing merged file " << rec.file << "\n";
                    return 1;
                }
                mit = merged_cache.emplace(rec.file, ingest::parse_merged_file(*text)).first;
            }
            auto tit = truth_cache.find(rec.file);
            if (tit == truth_cache.end()) {
                auto text = read_file(fs::path(ground_truth_dir) / rec.file);
                if (!text) {
                    err << "eval failed: missing ground truth for " << rec.file << "\n";
                    return 1;
                }
                tit = truth_cache.emplace(rec.file, *text).first;
            }
            std::size_t region_index = mit->second.regions.size();
            for (std::size_t ri = 0; ri < mit->second.regions.size(); ++ri) {
                if (mit->second.regions[ri].whole.first == rec.start_line &&
                    mit->second.regions[ri].whole.last == rec.end_line) {
                    region_index = ri;
                    break;
                }
            }
            if (region_index == mit->second.regions.size()) {
                err << "eval failed: record " << rec.conflict_id
                    << " does not match any conflict region\n";
                return 1;
            }
            rec.ground_truth = extract_ground_truth(mit->second, region_index, tit->second);
        }

        // Score (batch, parallel) and aggregate.
        std::vector<evalkit::ScoreTask> tasks;
        for (const auto& rec : records)
            tasks.push_back({rec.resolution, rec.ground_truth.value_or("")});
        auto scores = evalkit::score_batch(tasks, cfg.winnow);
        std::vector<evalkit::ScoredRecord> scored;
        for (std::size_t i = 0; i < records.size(); ++i) {
            records[i].scores = scores[i];
            scored.push_back({records[i].conflict_id, records[i].language, scores[i]});
        }
        auto report = evalkit::aggregate_report(scored, cfg.repeats);

        json jreport;
        jreport["repeats"] = report.repeats;
        jreport["rows"] = json::array();
        for (const auto& row : report.rows)
            jreport["rows"].push_back({{"language", row.language},
                                       {"conflicts", row.conflicts},
                                       {"ed", row.ed},
                                       {"ws", row.ws},
                                       {"cs", row.cs}});
        jreport["records"] = json::array();
        for (const auto& rec : records)
            jreport["records"].push_back({{"conflict_id", rec.conflict_id},
                                          {"repeat", rec.repeat},
                                          {"error", rec.error},
                                          {"ed", rec.scores->ed},
                                          {"ws", rec.scores->ws},
                                          {"cs", rec.scores->cs}});

        // Optional syntax checking against the patched ground-truth file.
        auto checker = cfg.syntax_checkers.find(cfg.language);
        if (cfg.syntax_check && checker != cfg.syntax_checkers.end()) {
            int pass = 0, total = 0, skipped = 0;
            for (const auto& rec : records) {
                if (!rec.error.empty()) continue;
                const auto& parse = merged_cache.at(rec.file);
                std::size_t region_index = 0;
                for (std::size_t ri = 0; ri < parse.regions.size(); ++ri)
                    if (parse.regions[ri].whole.first == rec.start_line) region_index = ri;
                auto resolved = truth_cache.at(rec.file);
                auto resolved_lines = linediff::split_lines(resolved);
                auto matches = linediff::match_lines(parse.lines, resolved_lines);
                const auto& region = parse.regions[region_index];
                int prev_anchor = -1, next_anchor = static_cast<int>(resolved_lines.size());
                for (const auto& [mi, ri2] : matches) {
                    if (mi + 1 < region.whole.first) prev_anchor = std::max(prev_anchor, ri2);
                    if (mi + 1 > region.whole.last) next_anchor = std::min(next_anchor, ri2);
                }
                std::string patched;
                for (int ln = 0; ln <= prev_anchor; ++ln)
                    patched += resolved_lines[static_cast<std::size_t>(ln)] + "\n";
                patched += rec.resolution;
                if (!patched.empty() && patched.back() != '\n') patched += '\n';
                for (int ln = next_anchor; ln < static_cast<int>(resolved_lines.size()); ++ln)
                    patched += resolved_lines[static_cast<std::size_t>(ln)] + "\n";
                try {
                    std::string include_dir =
                        (fs::path(ground_truth_dir) / rec.file).parent_path().string();
                    auto verdict = evalkit::syntax_check(patched, cfg.language,
                                                         checker->second, include_dir);
                    ++total;
                    if (verdict.pass) ++pass;
                } catch (const evalkit::CheckerUnavailable& e) {
                    err << "warning: syntax checker unavailable, skipping: " << e.what()
                        << "\n";
                    ++skipped;
                    break;
                }
            }
            if (total > 0)
                jreport["syntax"] = {{"pass", pass}, {"total", total}, {"skipped", skipped}};
        }

        write_file(fs::path(cfg.out_dir) / "report.json", jreport.dump(2) + "\n");
        out << evalkit::format_report_table(report);
        return 0;
    } catch (const evalkit::IncompleteRuns& e) {
        err << "eval failed: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "eval failed: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace mergectx::pipeline
