#include "mergectx/pipeline.hpp"

#include "support/scenario.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace mergectx;
using scenario::TempScenario;

namespace {

// One file, one conflict (both sides changed `scale`), plus a clean change
// in `shift` coming from version A.
void write_calc_scenario(TempScenario& s) {
    s.write("base", "calc.c",
            "#include \"calc.h\"\n"
            "int scale(int v) {\n"
            "  return v * 2;\n"
            "}\n"
            "int shift(int v) {\n"
            "  return v + 1;\n"
            "}\n");
    s.write("a", "calc.c",
            "#include \"calc.h\"\n"
            "int scale(int v) {\n"
            "  return v * 3;\n"
            "}\n"
            "int shift(int v) {\n"
            "  return v + 2;\n"
            "}\n");
    s.write("b", "calc.c",
            "#include \"calc.h\"\n"
            "int scale(int v) {\n"
            "  return v * 4;\n"
            "}\n"
            "int shift(int v) {\n"
            "  return v + 1;\n"
            "}\n");
    s.write("merged", "calc.c",
            "#include \"calc.h\"\n"
            "int scale(int v) {\n"
            "<<<<<<< a\n"
            "  return v * 3;\n"
            "=======\n"
            "  return v * 4;\n"
            ">>>>>>> b\n"
            "}\n"
            "int shift(int v) {\n"
            "  return v + 2;\n"
            "}\n");
    s.write("truth", "calc.c",
            "#include \"calc.h\"\n"
            "int scale(int v) {\n"
            "  return v * 12;\n"
            "}\n"
            "int shift(int v) {\n"
            "  return v + 2;\n"
            "}\n");
    // calc.h exists but is unchanged between versions.
    for (const char* tree : {"base", "a", "b", "merged", "truth"})
        s.write(tree, "calc.h", "int scale(int v);\nint shift(int v);\n");
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("analyze: conflict sites, side blocks, and diff blocks") {
    TempScenario s("analyze");
    write_calc_scenario(s);
    auto analysis = pipeline::analyze_scenario(s.config());

    REQUIRE(analysis.conflicts.size() == 1);
    const auto& site = analysis.conflicts[0];
    CHECK(site.merged_block.start_line == 3);
    CHECK(site.merged_block.end_line == 7);
    REQUIRE(site.a_block_id.has_value());
    REQUIRE(site.b_block_id.has_value());

    const auto* a_side = analysis.blocks.find(*site.a_block_id);
    REQUIRE(a_side);
    CHECK(a_side->start_line == 3);  // "return v * 3;" in A's own coordinates
    CHECK(a_side->end_line == 3);
    CHECK(a_side->text == "  return v * 3;\n");

    // The clean A-side change in `shift` is a diff block; it must not overlap
    // the conflict side block.
    bool found_shift_diff = false;
    for (const auto& b : analysis.blocks.blocks) {
        if (b.kind == ingest::BlockKind::Diff && b.version == ingest::Version::A) {
            CHECK_FALSE(b.span().intersects(a_side->span()));
            if (b.text.find("v + 2") != std::string::npos) found_shift_diff = true;
        }
    }
    CHECK(found_shift_diff);

    // Conflict sides pair with each other.
    bool conflict_pair = false;
    for (const auto& p : analysis.pairs)
        if (p.block_a == *site.a_block_id && p.block_b == *site.b_block_id)
            conflict_pair = true;
    CHECK(conflict_pair);
}

TEST_CASE("contexts: every conflict lands in a group") {
    TempScenario s("contexts");
    write_calc_scenario(s);
    auto cfg = s.config();
    auto analysis = pipeline::analyze_scenario(cfg);
    auto ctx = pipeline::build_contexts(analysis, cfg.k, cfg.bfs_visit_cap);
    REQUIRE_FALSE(ctx.groups.empty());
    for (const auto& site : analysis.conflicts)
        CHECK(ctx.group_of_conflict.at(site.merged_block.id) >= 0);
}

TEST_CASE("prompts: six sections, deterministic bytes, conflict last") {
    TempScenario s("prompts");
    write_calc_scenario(s);
    auto cfg = s.config();
    auto analysis = pipeline::analyze_scenario(cfg);
    auto ctx = pipeline::build_contexts(analysis, cfg.k, cfg.bfs_visit_cap);
    auto jobs = pipeline::build_prompts(analysis, ctx, cfg);
    REQUIRE(jobs.size() == 1);

    const std::string& prompt = jobs[0].prompt;
    std::size_t pos = 0;
    for (const auto& header : resolve::section_headers()) {
        std::size_t found = prompt.find(header, pos);
        REQUIRE(found != std::string::npos);
        pos = found;
    }
    CHECK(prompt.find("<<<<<<< a") != std::string::npos);
    CHECK(prompt.rfind("@@ conflict calc.c | merged lines 3-7 @@") != std::string::npos);

    for (int i = 0; i < 3; ++i) {
        auto again = pipeline::build_prompts(analysis, ctx, cfg);
        CHECK(again[0].prompt == prompt);
    }
}

TEST_CASE("ground truth extraction anchors around the conflict region") {
    TempScenario s("truth");
    write_calc_scenario(s);
    auto merged = slurp(std::filesystem::path(s.dir("merged")) / "calc.c");
    auto truth = slurp(std::filesystem::path(s.dir("truth")) / "calc.c");
    auto parse = ingest::parse_merged_file(merged);
    auto extracted = pipeline::extract_ground_truth(parse, 0, truth);
    REQUIRE(extracted.has_value());
    CHECK(*extracted == "  return v * 12;");
}

TEST_CASE("run_resolutions: repeats contract and record order") {
    TempScenario s("resolve");
    write_calc_scenario(s);
    auto cfg = s.config();
    auto analysis = pipeline::analyze_scenario(cfg);
    auto ctx = pipeline::build_contexts(analysis, cfg.k, cfg.bfs_visit_cap);
    auto jobs = pipeline::build_prompts(analysis, ctx, cfg);

    scenario::EchoClient client;
    client.replies["calc.c:3-7"] = "  return v * 12;";
    auto records = pipeline::run_resolutions(jobs, client, 3, 2, "c");
    REQUIRE(records.size() == 3);
    for (int r = 0; r < 3; ++r) {
        CHECK(records[static_cast<std::size_t>(r)].repeat == r);
        CHECK(records[static_cast<std::size_t>(r)].resolution == "  return v * 12;");
        CHECK(records[static_cast<std::size_t>(r)].error.empty());
    }
    CHECK(client.calls == 3);
}

TEST_CASE("resolution records round-trip through json lines") {
    pipeline::ResolutionRecord rec;
    rec.conflict_id = "merged:calc.c:3-7:conflict";
    rec.file = "calc.c";
    rec.start_line = 3;
    rec.end_line = 7;
    rec.repeat = 2;
    rec.language = "c";
    rec.prompt = "p\nq";
    rec.raw_output = "```\nx\n```";
    rec.resolution = "x\n";
    rec.scores = evalkit::SimilarityScores{50, 60, 70};
    auto line = pipeline::record_to_json(rec);
    auto back = pipeline::record_from_json(line);
    CHECK(back.conflict_id == rec.conflict_id);
    CHECK(back.repeat == rec.repeat);
    CHECK(back.prompt == rec.prompt);
    CHECK(back.resolution == rec.resolution);
    REQUIRE(back.scores.has_value());
    CHECK(back.scores->ws == 60);
}

TEST_CASE("cmd_resolve dry-run writes prompts and makes zero network calls") {
    TempScenario s("dryrun");
    write_calc_scenario(s);
    auto cfg = s.config();
    cfg.dry_run = true;
    scenario::TripwireClient tripwire;
    std::ostringstream out, err;
    int rc = pipeline::cmd_resolve(cfg, out, err, &tripwire);
    CHECK(rc == 0);
    CHECK(tripwire.calls == 0);

    bool found_prompt = false;
    for (const auto& entry :
         std::filesystem::directory_iterator(std::filesystem::path(cfg.out_dir) / "prompts"))
        if (entry.path().extension() == ".txt") found_prompt = true;
    CHECK(found_prompt);
}

TEST_CASE("cmd pipeline end to end: echo of ground truth scores 100") {
    TempScenario s("e2e");
    write_calc_scenario(s);
    auto cfg = s.config();
    cfg.repeats = 2;

    std::ostringstream out, err;
    REQUIRE(pipeline::cmd_analyze(cfg, out, err) == 0);
    CHECK(out.str().find("nodes") != std::string::npos);
    REQUIRE(pipeline::cmd_contexts(cfg, out, err) == 0);

    scenario::EchoClient client;
    client.replies["calc.c:3-7"] = "  return v * 12;";
    REQUIRE(pipeline::cmd_resolve(cfg, out, err, &client) == 0);
    CHECK(client.calls == 2);

    std::ostringstream eval_out;
    REQUIRE(pipeline::cmd_eval(cfg, s.dir("truth"), eval_out, err) == 0);
    auto report = slurp(std::filesystem::path(cfg.out_dir) / "report.json");
    CHECK(report.find("\"ed\": 100.0") != std::string::npos);
    CHECK(eval_out.str().find("overall") != std::string::npos);

    // Re-running resolve with unchanged inputs overwrites byte-identically.
    auto ledger_before = slurp(std::filesystem::path(cfg.out_dir) / "resolutions.jsonl");
    REQUIRE(pipeline::cmd_resolve(cfg, out, err, &client) == 0);
    auto ledger_after = slurp(std::filesystem::path(cfg.out_dir) / "resolutions.jsonl");
    CHECK(ledger_before == ledger_after);
}

TEST_CASE("cmd_eval fails on an empty ledger") {
    TempScenario s("emptyeval");
    write_calc_scenario(s);
    auto cfg = s.config();
    std::filesystem::create_directories(cfg.out_dir);
    std::ofstream(std::filesystem::path(cfg.out_dir) / "resolutions.jsonl").close();
    std::ostringstream out, err;
    CHECK(pipeline::cmd_eval(cfg, s.dir("truth"), out, err) == 1);
}

TEST_CASE("corrupt files produce diagnostics, not failure") {
    TempScenario s("robust");
    write_calc_scenario(s);
    // A second merged file with broken markers: skipped with a diagnostic.
    for (const char* tree : {"base", "a", "b"})
        s.write(tree, "broken.c", "int q;\n");
    s.write("merged", "broken.c", "<<<<<<< a\nint q;\n");
    auto analysis = pipeline::analyze_scenario(s.config());
    CHECK(analysis.conflicts.size() == 1);  // calc.c still analyzed
    bool mentioned = false;
    for (const auto& d : analysis.diagnostics)
        if (d.find("broken.c") != std::string::npos) mentioned = true;
    CHECK(mentioned);
}

TEST_CASE("prompt budget truncation drops context but keeps the conflict") {
    TempScenario s("budget");
    write_calc_scenario(s);
    auto cfg = s.config();
    cfg.model.prompt_token_budget = resolve::estimate_tokens(
        resolve::PromptTemplate::standard().static_sections) + 20;  // below even the bare conflict prompt
    auto analysis = pipeline::analyze_scenario(cfg);
    auto ctx = pipeline::build_contexts(analysis, cfg.k, cfg.bfs_visit_cap);
    auto jobs = pipeline::build_prompts(analysis, ctx, cfg);
    REQUIRE(jobs.size() == 1);
    CHECK_FALSE(jobs[0].prompt.empty());
    CHECK(jobs[0].prompt.find("@@ conflict") != std::string::npos);
    CHECK_FALSE(jobs[0].warnings.empty());
}

TEST_CASE("rendered context orders snippets by file, line, version") {
    TempScenario s("render");
    write_calc_scenario(s);
    // A second file so the group could span two files.
    s.write("a", "zz.c", "int zz = 1;\n");
    s.write("b", "zz.c", "int zz = 0;\n");
    s.write("base", "zz.c", "int zz = 0;\n");
    s.write("merged", "zz.c", "int zz = 1;\n");
    auto cfg = s.config();
    auto analysis = pipeline::analyze_scenario(cfg);

    context::ContextGroup group;
    std::vector<std::string> diff_ids;
    for (const auto& b : analysis.blocks.blocks)
        if (b.kind == ingest::BlockKind::Diff) diff_ids.push_back(b.id);
    REQUIRE(diff_ids.size() >= 2);
    group.member_blocks = diff_ids;
    std::sort(group.member_blocks.begin(), group.member_blocks.end());

    context::BlockLookup lookup = [&](const std::string& id) {
        return analysis.blocks.find(id);
    };
    std::map<std::string, std::string> roots{
        {"A", cfg.a_dir}, {"B", cfg.b_dir}, {"merged", cfg.merged_dir}};
    auto first = context::render_context(group, lookup, roots);
    auto second = context::render_context(group, lookup, roots);
    REQUIRE(first.context_snippets == second.context_snippets);
    // Snippet headers appear in (file, line, version) order.
    std::vector<std::string> headers;
    for (const auto& snip : first.context_snippets)
        headers.push_back(snip.substr(0, snip.find('\n')));
    auto sorted = headers;
    std::sort(sorted.begin(), sorted.end(), [](const std::string& x, const std::string& y) {
        return x < y;
    });
    // calc.c snippets precede zz.c snippets.
    CHECK(headers.front().find("calc.c") != std::string::npos);
    CHECK(headers.back().find("zz.c") != std::string::npos);

    // Unknown block ids surface as MissingSource.
    context::ContextGroup bad;
    bad.member_blocks = {"no-such-block"};
    CHECK_THROWS_AS(context::render_context(bad, lookup, roots), context::MissingSource);
}

TEST_CASE("python scenario flows through analyze and contexts") {
    TempScenario s("python");
    s.write("base", "tool.py",
            "LIMIT = 10\n"
            "def run(jobs):\n"
            "    return jobs[:LIMIT]\n");
    s.write("a", "tool.py",
            "LIMIT = 20\n"
            "def run(jobs):\n"
            "    return jobs[:LIMIT]\n");
    s.write("b", "tool.py",
            "LIMIT = 10\n"
            "def run(jobs):\n"
            "    return list(jobs)[:LIMIT]\n");
    s.write("merged", "tool.py",
            "LIMIT = 20\n"
            "def run(jobs):\n"
            "<<<<<<< a\n"
            "    return jobs[:LIMIT]\n"
            "=======\n"
            "    return list(jobs)[:LIMIT]\n"
            ">>>>>>> b\n");
    auto cfg = s.config();
    cfg.language = "python";
    auto analysis = pipeline::analyze_scenario(cfg);
    REQUIRE(analysis.conflicts.size() == 1);
    CHECK(analysis.graph_a.nodes.size() >= 3);
    auto ctx = pipeline::build_contexts(analysis, 4, cfg.bfs_visit_cap);
    REQUIRE_FALSE(ctx.groups.empty());
    // A's LIMIT change is related to the conflicted return statement.
    int gidx = ctx.group_of_conflict.at(analysis.conflicts[0].merged_block.id);
    REQUIRE(gidx >= 0);
    bool has_limit_diff = false;
    for (const auto& id : ctx.groups[static_cast<std::size_t>(gidx)].member_blocks) {
        const auto* b = analysis.blocks.find(id);
        if (b && b->kind == ingest::BlockKind::Diff && b->start_line == 1)
            has_limit_diff = true;
    }
    CHECK(has_limit_diff);
}

TEST_CASE("java scenario groups a field change with the conflicted method") {
    TempScenario s("java");
    auto file_with = [&](const std::string& field, const std::string& body) {
        return "public class Widget {\n"
               "    private int " + field + ";\n"
               "    public int grow(int delta) {\n"
               "        " + body + "\n"
               "        return size;\n"
               "    }\n"
               "}\n";
    };
    s.write("base", "Widget.java", file_with("size = 0", "size = size + delta;"));
    s.write("a", "Widget.java", file_with("size = 1", "size = size + delta;"));
    s.write("b", "Widget.java", file_with("size = 0", "size = size + delta * 2;"));
    s.write("merged", "Widget.java",
            "public class Widget {\n"
            "    private int size = 1;\n"
            "    public int grow(int delta) {\n"
            "<<<<<<< a\n"
            "        size = size + delta;\n"
            "=======\n"
            "        size = size + delta * 2;\n"
            ">>>>>>> b\n"
            "        return size;\n"
            "    }\n"
            "}\n");
    auto cfg = s.config();
    cfg.language = "java";
    auto analysis = pipeline::analyze_scenario(cfg);
    REQUIRE(analysis.conflicts.size() == 1);
    auto ctx = pipeline::build_contexts(analysis, 4, cfg.bfs_visit_cap);
    int gidx = ctx.group_of_conflict.at(analysis.conflicts[0].merged_block.id);
    REQUIRE(gidx >= 0);
    // A's field-initializer change (line 2) is in the conflict's group: the
    // conflicted statement writes/reads `size`, which the member defines.
    bool has_field_diff = false;
    for (const auto& id : ctx.groups[static_cast<std::size_t>(gidx)].member_blocks) {
        const auto* b = analysis.blocks.find(id);
        if (b && b->kind == ingest::BlockKind::Diff && b->start_line == 2)
            has_field_diff = true;
    }
    CHECK(has_field_diff);
}

TEST_CASE("config file loads sections and validates bounds") {
    TempScenario s("config");
    auto path = s.root() / "run.json";
    {
        std::ofstream out(path);
        out << R"({
          "scenario": {"base": "tb", "a": "ta", "b": "tb2", "merged": "tm",
                       "language": "python", "files": ["x.py"]},
          "model": {"endpoint": "http://h:1/v1", "name": "m1", "temperature": 0.5,
                    "retries": 7, "prompt_token_budget": 111},
          "metrics": {"winnow_kgram": 7, "winnow_window": 9,
                      "syntax_checkers": {"java": "javac {file}"}},
          "run": {"k": 6, "repeats": 4, "out": "odir", "concurrency": 9}
        })";
    }
    auto cfg = config::load_config(path.string(), false);
    CHECK(cfg.a_dir == "ta");
    CHECK(cfg.language == "python");
    CHECK(cfg.files == std::vector<std::string>{"x.py"});
    CHECK(cfg.model.endpoint == "http://h:1/v1");
    CHECK(cfg.model.model == "m1");
    CHECK(cfg.model.temperature == 0.5);
    CHECK(cfg.model.retries == 7);
    CHECK(cfg.model.prompt_token_budget == 111);
    CHECK(cfg.winnow.kgram == 7);
    CHECK(cfg.winnow.window == 9);
    CHECK(cfg.syntax_checkers.at("java") == "javac {file}");
    CHECK(cfg.syntax_checkers.count("c") == 1);  // defaults survive
    CHECK(cfg.k == 6);
    CHECK(cfg.repeats == 4);
    CHECK(cfg.out_dir == "odir");
    CHECK(cfg.concurrency == 9);

    // Invalid bounds are rejected.
    {
        std::ofstream out(path);
        out << R"({"run": {"k": 0}})";
    }
    CHECK_THROWS(config::load_config(path.string(), false));
    CHECK_THROWS(config::load_config((s.root() / "absent.json").string(), false));
    CHECK_NOTHROW(config::load_config((s.root() / "absent.json").string(), true));
}

TEST_CASE("empty changed set reports zero nodes and exits clean") {
    TempScenario s("empty");
    std::filesystem::create_directories(std::filesystem::path(s.dir("merged")));
    std::filesystem::create_directories(std::filesystem::path(s.dir("a")));
    std::filesystem::create_directories(std::filesystem::path(s.dir("b")));
    std::filesystem::create_directories(std::filesystem::path(s.dir("base")));
    auto cfg = s.config();
    std::ostringstream out, err;
    CHECK(pipeline::cmd_analyze(cfg, out, err) == 0);
    CHECK(out.str().find("nodes 0") != std::string::npos);
}
