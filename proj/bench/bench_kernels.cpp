// Benchmark: OpenMP kernels against their serial references.
//   - bounded multi-source BFS (context grouping)
//   - batched segment-tree queries (graph-text alignment)
//   - batch metric scoring (evaluation)
//
// Usage: mergectx_bench [scale]   (scale defaults to 1)

#include "mergectx/align.hpp"
#include "mergectx/context.hpp"
#include "mergectx/evalkit.hpp"

#include <chrono>
#include <cstdio>
#include <random>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace mergectx;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void report(const char* name, double serial_s, double parallel_s) {
    std::printf("%-28s serial %8.3fs   parallel %8.3fs   speedup %5.2fx\n", name, serial_s,
                parallel_s, parallel_s > 0 ? serial_s / parallel_s : 0.0);
}

void bench_msbfs(int scale) {
    const int n = 120000 * scale;
    const int m = n * 4;
    const int source_count = 2048;
    const int k = 4;
    std::mt19937 rng(1);
    std::vector<mtcpg::MtCpgEdge> edges;
    edges.reserve(static_cast<std::size_t>(m));
    for (int e = 0; e < m; ++e) {
        int u = static_cast<int>(rng() % static_cast<unsigned>(n));
        int v = static_cast<int>(rng() % static_cast<unsigned>(n));
        if (u != v) edges.push_back({u, v, mtcpg::EdgeKind::DataFlow});
    }
    auto csr = context::build_csr(n, edges);
    std::vector<int> sources;
    for (int s = 0; s < source_count; ++s)
        sources.push_back(static_cast<int>(rng() % static_cast<unsigned>(n)));
    std::vector<char> mask(static_cast<std::size_t>(n), 0);
    for (int v = 0; v < n; v += 7) mask[static_cast<std::size_t>(v)] = 1;

    auto t0 = std::chrono::steady_clock::now();
    auto serial = context::serial::reach_within_k(csr, sources, mask, k, {}, nullptr);
    double serial_s = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    auto parallel = context::reach_within_k(csr, sources, mask, k, {}, nullptr);
    double parallel_s = seconds_since(t0);

    if (serial != parallel) std::printf("msbfs MISMATCH between serial and parallel!\n");
    report("multi-source bfs (k=4)", serial_s, parallel_s);
}

void bench_segment_tree(int scale) {
    const int file_lines = 40000;
    const int node_count = 12000;
    const int query_count = 60000 * scale;
    std::mt19937 rng(2);
    std::vector<mtcpg::MtCpgNode> nodes;
    for (int i = 0; i < node_count; ++i) {
        mtcpg::MtCpgNode n;
        n.id = i;
        n.file = "f";
        n.start_line = 1 + static_cast<int>(rng() % file_lines);
        n.end_line = std::min(file_lines, n.start_line + static_cast<int>(rng() % 6));
        nodes.push_back(n);
    }
    auto tree = align::build_tree("f", file_lines, nodes);
    std::vector<std::pair<int, int>> queries;
    for (int q = 0; q < query_count; ++q) {
        int first = 1 + static_cast<int>(rng() % file_lines);
        queries.push_back({first, std::min(file_lines, first + static_cast<int>(rng() % 12))});
    }

    // Serial reference: linear scan per query.
    auto t0 = std::chrono::steady_clock::now();
    std::size_t scan_hits = 0;
    for (const auto& [first, last] : queries)
        scan_hits += align::serial::query_scan(nodes, "f", first, last).size();
    double serial_s = seconds_since(t0);

    // Parallel batch over the tree.
    t0 = std::chrono::steady_clock::now();
    std::vector<std::size_t> hits(queries.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 256)
#endif
    for (long i = 0; i < static_cast<long>(queries.size()); ++i) {
        const auto& [first, last] = queries[static_cast<std::size_t>(i)];
        hits[static_cast<std::size_t>(i)] = tree.query(first, last).size();
    }
    double parallel_s = seconds_since(t0);
    std::size_t tree_hits = 0;
    for (auto h : hits) tree_hits += h;
    if (scan_hits != tree_hits) std::printf("segment tree MISMATCH in hit counts!\n");
    report("segment-tree batch queries", serial_s, parallel_s);
}

void bench_scoring(int scale) {
    std::mt19937 rng(3);
    auto code = [&](int tokens) {
        static const char* parts[] = {"int", "x",  "=",  "+",  "(", ")",
                                      ";",   "if", "for", "{", "}", "call"};
        std::string out;
        for (int i = 0; i < tokens; ++i) {
            out += parts[rng() % 12];
            out += (rng() % 5 == 0) ? "\n" : " ";
        }
        return out;
    };
    std::vector<evalkit::ScoreTask> tasks;
    for (int i = 0; i < 400 * scale; ++i) tasks.push_back({code(220), code(220)});

    auto t0 = std::chrono::steady_clock::now();
    auto serial = evalkit::serial::score_batch(tasks);
    double serial_s = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    auto parallel = evalkit::score_batch(tasks);
    double parallel_s = seconds_since(t0);

    for (std::size_t i = 0; i < tasks.size(); ++i)
        if (serial[i].ed != parallel[i].ed) std::printf("scoring MISMATCH at %zu!\n", i);
    report("metric batch scoring", serial_s, parallel_s);
}

}  // namespace

int main(int argc, char** argv) {
    int scale = argc > 1 ? std::max(1, std::atoi(argv[1])) : 1;
#ifdef _OPENMP
    std::printf("openmp threads: %d, scale %d\n", omp_get_max_threads(), scale);
#else
    std::printf("built without openmp; parallel paths run serially (scale %d)\n", scale);
#endif
    bench_msbfs(scale);
    bench_segment_tree(scale);
    bench_scoring(scale);
    return 0;
}
