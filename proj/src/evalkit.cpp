#include "mergectx/evalkit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include <sys/wait.h>
#include <unistd.h>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mergectx::evalkit {

namespace {

bool is_ident_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '_';
}

// Multi-character operators matched greedily, longest first.
const std::array<const char*, 19> kOperators = {
    "<<=", ">>=", "...", "->", "::", "==", "!=", "<=", ">=", "&&",
    "||",  "<<",  ">>",  "+=", "-=", "*=", "/=", "%=", "++",
};

uint64_t fnv1a(const std::string& s, uint64_t seed) {
    uint64_t h = seed;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace

std::vector<std::string> tokenize_code(const std::string& text) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        char c = text[i];
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
            ++i;
            continue;
        }
        if (is_ident_char(c)) {
            std::size_t j = i + 1;
            while (j < n && is_ident_char(text[j])) ++j;
            tokens.push_back(text.substr(i, j - i));
            i = j;
            continue;
        }
        bool matched = false;
        for (const char* op : kOperators) {
            std::size_t len = std::char_traits<char>::length(op);
            if (text.compare(i, len, op) == 0) {
                tokens.emplace_back(op);
                i += len;
                matched = true;
                break;
            }
        }
        if (!matched) {
            tokens.push_back(std::string(1, c));
            ++i;
        }
    }
    return tokens;
}

double edit_distance_similarity(const std::string& a, const std::string& b) {
    const std::size_t n = a.size(), m = b.size();
    if (n == 0 && m == 0) return 100.0;
    if (n == 0 || m == 0) return 0.0;
    std::vector<uint32_t> prev(m + 1), cur(m + 1);
    std::iota(prev.begin(), prev.end(), 0u);
    for (std::size_t i = 1; i <= n; ++i) {
        cur[0] = static_cast<uint32_t>(i);
        for (std::size_t j = 1; j <= m; ++j) {
            uint32_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0u : 1u);
            cur[j] = std::min({sub, prev[j] + 1u, cur[j - 1] + 1u});
        }
        std::swap(prev, cur);
    }
    double dist = static_cast<double>(prev[m]);
    return 100.0 * (1.0 - dist / static_cast<double>(std::max(n, m)));
}

std::vector<uint64_t> kgram_hashes(const std::vector<std::string>& tokens, int kgram) {
    std::vector<uint64_t> hashes;
    if (static_cast<int>(tokens.size()) < kgram) return hashes;
    hashes.reserve(tokens.size() - static_cast<std::size_t>(kgram) + 1);
    for (std::size_t i = 0; i + static_cast<std::size_t>(kgram) <= tokens.size(); ++i) {
        uint64_t h = 1469598103934665603ull;
        for (int j = 0; j < kgram; ++j) {
            h = fnv1a(tokens[i + static_cast<std::size_t>(j)], h);
            h ^= 0x1f;  // token separator
            h *= 1099511628211ull;
        }
        hashes.push_back(h);
    }
    return hashes;
}

std::vector<uint64_t> winnow_fingerprints(const std::vector<std::string>& tokens,
                                          const WinnowParams& params) {
    auto hashes = kgram_hashes(tokens, params.kgram);
    std::vector<uint64_t> prints;
    const int w = params.window;
    const int n = static_cast<int>(hashes.size());
    if (n == 0) return prints;
    if (n <= w) {
        prints = hashes;  // degenerate: fewer hashes than one window
        return prints;
    }
    // Select the minimum of each window, rightmost occurrence on ties.
    int last_selected = -1;
    for (int start = 0; start + w <= n; ++start) {
        int min_idx = start;
        for (int j = start + 1; j < start + w; ++j)
            if (hashes[static_cast<std::size_t>(j)] <= hashes[static_cast<std::size_t>(min_idx)])
                min_idx = j;
        if (min_idx != last_selected) {
            prints.push_back(hashes[static_cast<std::size_t>(min_idx)]);
            last_selected = min_idx;
        }
    }
    return prints;
}

double winnowing_similarity(const std::string& a, const std::string& b,
                            const WinnowParams& params) {
    auto tokens_a = tokenize_code(a);
    auto tokens_b = tokenize_code(b);
    if (static_cast<int>(tokens_a.size()) < params.kgram ||
        static_cast<int>(tokens_b.size()) < params.kgram) {
        return tokens_a == tokens_b ? 100.0 : 0.0;
    }
    auto fp_a = winnow_fingerprints(tokens_a, params);
    auto fp_b = winnow_fingerprints(tokens_b, params);
    std::set<uint64_t> set_a(fp_a.begin(), fp_a.end());
    std::set<uint64_t> set_b(fp_b.begin(), fp_b.end());
    std::size_t inter = 0;
    for (uint64_t h : set_a) inter += set_b.count(h);
    std::size_t uni = set_a.size() + set_b.size() - inter;
    if (uni == 0) return 100.0;
    return 100.0 * static_cast<double>(inter) / static_cast<double>(uni);
}

double cosine_similarity(const std::string& a, const std::string& b) {
    auto tokens_a = tokenize_code(a);
    auto tokens_b = tokenize_code(b);
    if (tokens_a.empty() && tokens_b.empty()) return 100.0;
    if (tokens_a.empty() || tokens_b.empty()) return 0.0;
    std::unordered_map<std::string, int> freq_a, freq_b;
    for (const auto& t : tokens_a) freq_a[t]++;
    for (const auto& t : tokens_b) freq_b[t]++;
    double dot = 0.0, norm_a = 0.0, norm_b = 0.0;
    for (const auto& [t, f] : freq_a) {
        norm_a += static_cast<double>(f) * f;
        auto it = freq_b.find(t);
        if (it != freq_b.end()) dot += static_cast<double>(f) * it->second;
    }
    for (const auto& [t, f] : freq_b) norm_b += static_cast<double>(f) * f;
    double score = std::clamp(100.0 * dot / (std::sqrt(norm_a) * std::sqrt(norm_b)), 0.0, 100.0);
    if (score > 100.0 - 1e-9) score = 100.0;  // rounding noise on identical vectors
    return score;
}

SimilarityScores score_pair(const std::string& generated, const std::string& truth,
                            const WinnowParams& params) {
    SimilarityScores s;
    s.ed = edit_distance_similarity(generated, truth);
    s.ws = winnowing_similarity(generated, truth, params);
    s.cs = cosine_similarity(generated, truth);
    return s;
}

namespace serial {
std::vector<SimilarityScores> score_batch(const std::vector<ScoreTask>& tasks,
                                          const WinnowParams& params) {
    std::vector<SimilarityScores> out(tasks.size());
    for (std::size_t i = 0; i < tasks.size(); ++i)
        out[i] = score_pair(tasks[i].generated, tasks[i].truth, params);
    return out;
}
}  // namespace serial

std::vector<SimilarityScores> score_batch(const std::vector<ScoreTask>& tasks,
                                          const WinnowParams& params) {
    std::vector<SimilarityScores> out(tasks.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (long i = 0; i < static_cast<long>(tasks.size()); ++i) {
        const auto& t = tasks[static_cast<std::size_t>(i)];
        out[static_cast<std::size_t>(i)] = score_pair(t.generated, t.truth, params);
    }
    return out;
}

SyntaxVerdict syntax_check(const std::string& patched_text, const std::string& language,
                           const std::string& checker_command, const std::string& include_dir) {
    namespace fs = std::filesystem;
    std::string ext = language == "c" ? ".c" : language == "python" ? ".py" : ".java";
    fs::path scratch = fs::temp_directory_path() /
                       ("mergectx_syntax_" + std::to_string(::getpid()) + ext);
    {
        std::ofstream out(scratch);
        out << patched_text;
    }
    std::string cmd = checker_command;
    auto substitute = [&cmd](const std::string& placeholder, const std::string& value) {
        for (std::size_t pos = cmd.find(placeholder); pos != std::string::npos;
             pos = cmd.find(placeholder))
            cmd.replace(pos, placeholder.size(), value);
    };
    substitute("{file}", scratch.string());
    substitute("{dir}", include_dir.empty() ? "." : include_dir);
    cmd += " 2>&1";

    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) {
        fs::remove(scratch);
        throw CheckerUnavailable("cannot launch checker: " + checker_command);
    }
    std::string output;
    char buf[512];
    while (std::size_t n = ::fread(buf, 1, sizeof(buf), pipe)) output.append(buf, n);
    int status = ::pclose(pipe);
    fs::remove(scratch);
    int exit_code = (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
    if (exit_code == 127)
        throw CheckerUnavailable("checker command not found: " + checker_command);
    SyntaxVerdict verdict;
    verdict.pass = exit_code == 0;
    verdict.diagnostic = output;
    return verdict;
}

Report aggregate_report(const std::vector<ScoredRecord>& records, int repeats) {
    // conflict -> accumulated scores
    struct Acc {
        std::string language;
        int count = 0;
        double ed = 0, ws = 0, cs = 0;
    };
    std::map<std::string, Acc> per_conflict;
    for (const auto& r : records) {
        auto& acc = per_conflict[r.conflict_id];
        acc.language = r.language;
        acc.count++;
        acc.ed += r.scores.ed;
        acc.ws += r.scores.ws;
        acc.cs += r.scores.cs;
    }
    for (const auto& [id, acc] : per_conflict) {
        if (acc.count != repeats)
            throw IncompleteRuns("conflict " + id + " has " + std::to_string(acc.count) +
                                 " records, expected " + std::to_string(repeats));
    }

    std::map<std::string, ReportRow> by_language;
    ReportRow overall;
    overall.language = "overall";
    for (const auto& [id, acc] : per_conflict) {
        double ed = acc.ed / acc.count, ws = acc.ws / acc.count, cs = acc.cs / acc.count;
        auto& row = by_language[acc.language];
        row.language = acc.language;
        row.conflicts++;
        row.ed += ed;
        row.ws += ws;
        row.cs += cs;
        overall.conflicts++;
        overall.ed += ed;
        overall.ws += ws;
        overall.cs += cs;
    }
    Report report;
    report.repeats = repeats;
    for (auto& [lang, row] : by_language) {
        row.ed /= row.conflicts;
        row.ws /= row.conflicts;
        row.cs /= row.conflicts;
        report.rows.push_back(row);
    }
    if (overall.conflicts > 0) {
        overall.ed /= overall.conflicts;
        overall.ws /= overall.conflicts;
        overall.cs /= overall.conflicts;
    }
    report.rows.push_back(overall);
    return report;
}

std::string format_report_table(const Report& report) {
    std::ostringstream os;
    os << std::left << std::setw(10) << "Language" << std::right << std::setw(10) << "Conflicts"
       << std::setw(10) << "ED" << std::setw(10) << "WS" << std::setw(10) << "CS" << '\n';
    os << std::string(50, '-') << '\n';
    os << std::fixed << std::setprecision(2);
    for (const auto& row : report.rows) {
        os << std::left << std::setw(10) << row.language << std::right << std::setw(10)
           << row.conflicts << std::setw(10) << row.ed << std::setw(10) << row.ws
           << std::setw(10) << row.cs << '\n';
    }
    return os.str();
}

}  // namespace mergectx::evalkit
