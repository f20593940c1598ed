#include "mergectx/frontend.hpp"

#include <doctest.h>

#include <algorithm>

using namespace mergectx;
using frontend::DefKind;
using frontend::Language;
using frontend::RawDefinition;

namespace {

const RawDefinition* find_def(const std::vector<RawDefinition>& defs, DefKind kind,
                              const std::string& name) {
    for (const auto& d : defs)
        if (d.kind == kind && d.name == name) return &d;
    return nullptr;
}

int count_kind(const std::vector<RawDefinition>& defs, DefKind kind) {
    int n = 0;
    for (const auto& d : defs)
        if (d.kind == kind) ++n;
    return n;
}

std::string fixture(const char* name) {
    return std::string(MERGECTX_FIXTURE_DIR) + "/" + name;
}

bool refs_contain(const RawDefinition& d, const std::string& name) {
    return std::find(d.referenced_names.begin(), d.referenced_names.end(), name) !=
           d.referenced_names.end();
}

}  // namespace

TEST_CASE("empty file parses to nothing") {
    CHECK(frontend::parse_source("e.c", "", Language::C).empty());
    CHECK(frontend::parse_source("e.py", "", Language::Python).empty());
    CHECK(frontend::parse_source("E.java", "", Language::Java).empty());
}

TEST_CASE("point_area header: type with members and a declaration") {
    auto defs = frontend::parse_file(fixture("point_area/math_utils.h"), Language::C, "math_utils.h");
    REQUIRE(defs.size() == 6);

    const auto* point = find_def(defs, DefKind::TypeDef, "Point");
    REQUIRE(point);
    CHECK(point->start_line == 1);
    CHECK(point->end_line == 4);
    CHECK(point->header_end_line == 1);

    const auto* x = find_def(defs, DefKind::MemberDef, "x");
    const auto* y = find_def(defs, DefKind::MemberDef, "y");
    REQUIRE(x);
    REQUIRE(y);
    CHECK(x->start_line == 2);
    CHECK(y->start_line == 3);
    CHECK(defs[static_cast<std::size_t>(x->parent)].name == "Point");

    const auto* area = find_def(defs, DefKind::MethodDef, "area");
    REQUIRE(area);
    CHECK_FALSE(area->has_body);
    CHECK(area->signature == "double,double");
    CHECK(area->start_line == 5);

    CHECK(count_kind(defs, DefKind::GlobalVarDef) == 2);  // the two macros
}

TEST_CASE("point_area source: import, macro, function with params and body") {
    auto defs = frontend::parse_file(fixture("point_area/math_utils.c"), Language::C, "math_utils.c");
    REQUIRE(defs.size() == 6);

    const auto* import = find_def(defs, DefKind::ImportDef, "math_utils.h");
    REQUIRE(import);
    CHECK(import->start_line == 1);

    const auto* pi = find_def(defs, DefKind::GlobalVarDef, "PI");
    REQUIRE(pi);
    CHECK(pi->start_line == 2);

    const auto* area = find_def(defs, DefKind::MethodDef, "area");
    REQUIRE(area);
    CHECK(area->has_body);
    CHECK(area->signature == "double,double");
    CHECK(area->start_line == 3);
    CHECK(area->end_line == 5);
    CHECK(area->header_end_line == 3);

    const auto* w = find_def(defs, DefKind::MethodVarDef, "w");
    const auto* h = find_def(defs, DefKind::MethodVarDef, "h");
    REQUIRE(w);
    REQUIRE(h);
    CHECK(w->start_line == 3);
    CHECK(h->start_line == 3);

    REQUIRE(count_kind(defs, DefKind::MethodStmt) == 1);
    const auto& stmt = *std::find_if(defs.begin(), defs.end(), [](const RawDefinition& d) {
        return d.kind == DefKind::MethodStmt;
    });
    CHECK(stmt.start_line == 4);
    CHECK(refs_contain(stmt, "PI"));
    CHECK(refs_contain(stmt, "w"));
    CHECK(refs_contain(stmt, "h"));
}

TEST_CASE("point_area main: declaration without initializer has no statement node") {
    auto defs = frontend::parse_file(fixture("point_area/main.c"), Language::C, "main.c");
    REQUIRE(defs.size() == 5);

    const auto* p = find_def(defs, DefKind::MethodVarDef, "p");
    REQUIRE(p);
    CHECK(p->start_line == 3);
    CHECK(refs_contain(*p, "Point"));

    const auto* result = find_def(defs, DefKind::MethodVarDef, "result");
    REQUIRE(result);
    CHECK(result->start_line == 4);

    REQUIRE(count_kind(defs, DefKind::MethodStmt) == 1);
    const auto& stmt = *std::find_if(defs.begin(), defs.end(), [](const RawDefinition& d) {
        return d.kind == DefKind::MethodStmt;
    });
    CHECK(stmt.start_line == 4);
    CHECK(refs_contain(stmt, "area"));
    CHECK(refs_contain(stmt, "p"));
    CHECK_FALSE(refs_contain(stmt, "result"));  // its own declared name
    CHECK(stmt.written_names == std::vector<std::string>{"result"});
}

TEST_CASE("base edges: dataflow from parameters to the return statement") {
    auto defs = frontend::parse_file(fixture("point_area/math_utils.c"), Language::C, "math_utils.c");
    auto edges = frontend::extract_base_edges(defs);

    auto idx = [&](DefKind kind, const std::string& name) {
        for (int i = 0; i < static_cast<int>(defs.size()); ++i)
            if (defs[static_cast<std::size_t>(i)].kind == kind &&
                defs[static_cast<std::size_t>(i)].name == name)
                return i;
        return -1;
    };
    int w = idx(DefKind::MethodVarDef, "w");
    int h = idx(DefKind::MethodVarDef, "h");
    int area = idx(DefKind::MethodDef, "area");
    int stmt = -1;
    for (int i = 0; i < static_cast<int>(defs.size()); ++i)
        if (defs[static_cast<std::size_t>(i)].kind == DefKind::MethodStmt) stmt = i;

    auto has = [&](int src, int dst, frontend::BaseEdgeKind kind) {
        return std::find(edges.begin(), edges.end(), frontend::BaseEdge{src, dst, kind}) !=
               edges.end();
    };
    CHECK(has(w, stmt, frontend::BaseEdgeKind::DataFlow));
    CHECK(has(h, stmt, frontend::BaseEdgeKind::DataFlow));
    CHECK(has(stmt, area, frontend::BaseEdgeKind::Ast));
    // Single statement: no cfg edges.
    for (const auto& e : edges) CHECK(e.kind != frontend::BaseEdgeKind::Cfg);
}

TEST_CASE("single-statement method has zero cfg edges, chains have them") {
    auto defs = frontend::parse_source("t.c", "void f(void) {\n  g();\n}\n", Language::C);
    auto edges = frontend::extract_base_edges(defs);
    for (const auto& e : edges) CHECK(e.kind != frontend::BaseEdgeKind::Cfg);

    defs = frontend::parse_source("t.c", "void f(void) {\n  g();\n  g();\n  g();\n}\n",
                                  Language::C);
    edges = frontend::extract_base_edges(defs);
    int cfg = 0;
    for (const auto& e : edges)
        if (e.kind == frontend::BaseEdgeKind::Cfg) ++cfg;
    CHECK(cfg == 2);
}

TEST_CASE("straight-line def-use chain matches the hand-built table") {
    // a=1; b=a; c=b;  ->  writer(a)@1 -> reader@2, writer(b)@2 -> reader@3.
    auto defs = frontend::parse_source(
        "t.c", "void f(void) {\n  int a = 1;\n  int b = a;\n  int c = b;\n}\n", Language::C);
    auto edges = frontend::extract_base_edges(defs);

    // Hand-built def-use table over statements (declarations with
    // initializers produce var+stmt; the var writes, later readers read):
    // expected flows: a(var,2)->stmt3, a(stmt2 writes a)->stmt3,
    //                 b(var,3)->stmt4, b(stmt3 writes b)->stmt4.
    int df = 0;
    for (const auto& e : edges)
        if (e.kind == frontend::BaseEdgeKind::DataFlow) ++df;
    CHECK(df == 4);

    auto line_of = [&](int i) { return defs[static_cast<std::size_t>(i)].start_line; };
    for (const auto& e : edges) {
        if (e.kind != frontend::BaseEdgeKind::DataFlow) continue;
        CHECK(line_of(e.src) < line_of(e.dst));  // writers strictly precede
    }
}

TEST_CASE("every statement has exactly one ast edge to its method") {
    std::string text =
        "int helper(int q) {\n"
        "  q = q + 1;\n"
        "  return q;\n"
        "}\n"
        "int caller(void) {\n"
        "  int r = helper(1);\n"
        "  return r;\n"
        "}\n";
    auto defs = frontend::parse_source("t.c", text, Language::C);
    auto edges = frontend::extract_base_edges(defs);
    for (int i = 0; i < static_cast<int>(defs.size()); ++i) {
        if (defs[static_cast<std::size_t>(i)].kind != DefKind::MethodStmt) continue;
        int ast_edges = 0;
        for (const auto& e : edges)
            if (e.kind == frontend::BaseEdgeKind::Ast && e.src == i) ++ast_edges;
        CHECK(ast_edges == 1);
    }
}

TEST_CASE("dataflow never crosses method boundaries") {
    // Both methods use a variable named `q`; no edges may link them.
    std::string text =
        "void first(int q) {\n"
        "  use(q);\n"
        "}\n"
        "void second(void) {\n"
        "  int q = 2;\n"
        "  use(q);\n"
        "}\n";
    auto defs = frontend::parse_source("t.c", text, Language::C);
    auto edges = frontend::extract_base_edges(defs);
    auto method_of = [&](int i) {
        int cur = i;
        while (cur >= 0 && defs[static_cast<std::size_t>(cur)].kind != DefKind::MethodDef)
            cur = defs[static_cast<std::size_t>(cur)].parent;
        return cur;
    };
    for (const auto& e : edges) CHECK(method_of(e.src) == method_of(e.dst));
}

TEST_CASE("preprocessor branches are parsed as ordinary code") {
    auto defs = frontend::parse_source("t.c",
                                       "#ifdef FAST\n"
                                       "int mode = 1;\n"
                                       "#else\n"
                                       "int mode = 2;\n"
                                       "#endif\n",
                                       Language::C);
    CHECK(count_kind(defs, DefKind::GlobalVarDef) == 2);
}

TEST_CASE("function-like macros are method definitions") {
    auto defs = frontend::parse_source("t.c",
                                       "#define MAX(a, b) ((a) > (b) ? (a) : (b))\n"
                                       "#define LIMIT 64\n",
                                       Language::C);
    const auto* max = find_def(defs, DefKind::MethodDef, "MAX");
    REQUIRE(max);
    CHECK(max->has_body);
    const auto* limit = find_def(defs, DefKind::GlobalVarDef, "LIMIT");
    CHECK(limit);
}

TEST_CASE("parse determinism: identical bytes give identical definitions") {
    std::string text =
        "#include \"dep.h\"\n"
        "struct S { int a; };\n"
        "static int counter;\n"
        "int bump(int delta) {\n"
        "  counter += delta;\n"
        "  return counter;\n"
        "}\n";
    auto first = frontend::parse_source("t.c", text, Language::C);
    auto second = frontend::parse_source("t.c", text, Language::C);
    REQUIRE(first.size() == second.size());
    for (std::size_t i = 0; i < first.size(); ++i) {
        CHECK(first[i].kind == second[i].kind);
        CHECK(first[i].name == second[i].name);
        CHECK(first[i].start_line == second[i].start_line);
        CHECK(first[i].referenced_names == second[i].referenced_names);
    }
}

TEST_CASE("comments are ignored by the parser") {
    auto defs = frontend::parse_source("t.c",
                                       "// int fake;\n"
                                       "/* struct Bogus { int z; }; */\n"
                                       "int real;\n",
                                       Language::C);
    CHECK(defs.size() == 1);
    CHECK(defs[0].name == "real");
    CHECK(defs[0].start_line == 3);
}

TEST_CASE("python: imports, class, methods, locals") {
    std::string text =
        "import helpers\n"
        "from pkg.util import thing\n"
        "LIMIT = 10\n"
        "class Widget:\n"
        "    kind = 'basic'\n"
        "    def resize(self, scale):\n"
        "        w = self.width * scale\n"
        "        return w\n"
        "def main():\n"
        "    widget = Widget()\n"
        "    widget.resize(LIMIT)\n";
    auto defs = frontend::parse_source("widget.py", text, Language::Python);

    CHECK(find_def(defs, DefKind::ImportDef, "helpers"));
    CHECK(find_def(defs, DefKind::ImportDef, "pkg.util"));
    CHECK(find_def(defs, DefKind::GlobalVarDef, "LIMIT"));
    const auto* cls = find_def(defs, DefKind::TypeDef, "Widget");
    REQUIRE(cls);
    CHECK(find_def(defs, DefKind::MemberDef, "kind"));
    const auto* resize = find_def(defs, DefKind::MethodDef, "resize");
    REQUIRE(resize);
    CHECK(resize->parent >= 0);
    const auto* scale = find_def(defs, DefKind::MethodVarDef, "scale");
    REQUIRE(scale);
    const auto* w = find_def(defs, DefKind::MethodVarDef, "w");
    REQUIRE(w);
    const auto* main_fn = find_def(defs, DefKind::MethodDef, "main");
    REQUIRE(main_fn);
    CHECK(find_def(defs, DefKind::MethodVarDef, "widget"));
}

TEST_CASE("java: imports, class, fields, methods") {
    std::string text =
        "package com.acme;\n"
        "import com.acme.util.Counter;\n"
        "public class Widget {\n"
        "    private Counter counter;\n"
        "    private int size = 0;\n"
        "    public int grow(int delta) {\n"
        "        size += delta;\n"
        "        return size;\n"
        "    }\n"
        "}\n";
    auto defs = frontend::parse_source("Widget.java", text, Language::Java);

    CHECK(find_def(defs, DefKind::ImportDef, "com.acme.util.Counter"));
    const auto* cls = find_def(defs, DefKind::TypeDef, "Widget");
    REQUIRE(cls);
    const auto* counter = find_def(defs, DefKind::MemberDef, "counter");
    REQUIRE(counter);
    CHECK(refs_contain(*counter, "Counter"));
    CHECK(find_def(defs, DefKind::MemberDef, "size"));
    const auto* grow = find_def(defs, DefKind::MethodDef, "grow");
    REQUIRE(grow);
    CHECK(grow->has_body);
    CHECK(find_def(defs, DefKind::MethodVarDef, "delta"));
    CHECK(count_kind(defs, DefKind::MethodStmt) >= 2);
}

TEST_CASE("parse failures skip the file but keep the rest") {
    std::vector<std::pair<std::string, std::string>> paths = {
        {fixture("point_area/main.c"), "main.c"},
        {fixture("does_not_exist.c"), "does_not_exist.c"},
        {fixture("point_area/math_utils.c"), "math_utils.c"},
    };
    std::vector<frontend::FileDiagnostic> diags;
    auto parsed = frontend::parse_files(paths, Language::C, diags);
    CHECK(parsed.size() == 2);
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].file == "does_not_exist.c");
}
