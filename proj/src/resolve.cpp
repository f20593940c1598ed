#ifdef MERGECTX_TLS
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include "mergectx/resolve.hpp"

#include "mergectx/linediff.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>

namespace mergectx::resolve {

namespace {

using nlohmann::json;

// Sections 1-5. Static template text, version-pinned so prompt goldens stay
// stable; editable via PromptTemplate::from_file.
constexpr const char* kStandardSections = R"(### SECTION 1: PREAMBLE
You are an expert software engineer resolving a git merge conflict. Two
branches changed the same region of a file; git kept both candidate edits
between conflict markers. Your job is to produce the single block of code
that should replace the conflicted region, preserving the intent of both
branches whenever they are compatible.

### SECTION 2: TASK DESCRIPTION
You are given related code snippets (the context) and one conflicted region.
Produce the resolved code for that region only:
- Do not repeat code that lies outside the conflict markers.
- Keep the indentation style of the surrounding code.
- Use the context snippets to understand definitions, types, and call sites
  that the conflicted code depends on.

### SECTION 3: REASONING STEPS
Work through the conflict in three steps before writing the resolution:
1. Root cause: read the conflict and its context carefully and identify why
   the two edits collide.
2. Intent: infer what each side was trying to achieve, focusing on the
   functional difference each branch introduces.
3. Strategy: decide how to merge them. Adopt one side unchanged, interleave
   or combine elements of both, or write new code when neither side alone is
   correct.

### SECTION 4: INPUT AND OUTPUT FORMAT
The input below uses a compact patch format:
- "@@ context <file> | version <A|B> | lines <range> @@" introduces a related
  changed snippet from one merge candidate; its lines are prefixed with "+".
- "@@ conflict <file> | merged lines <range> @@" introduces the conflicted
  region exactly as git wrote it, including the <<<<<<</=======/>>>>>>>
  markers.
Reply with the resolved replacement for the conflicted region inside one
fenced code block (```). Output nothing after the fence. Never include
conflict markers in the answer.

### SECTION 5: EXAMPLE
Input:
@@ context src/list.c | version B | lines 12-14 @@
+ /* returns -1 when allocation fails */
+ static int list_grow(struct list *l, int extra);
@@ conflict src/list.c | merged lines 40-45 @@
<<<<<<< ours
    list_grow(l, n);
    l->sealed = 1;
=======
    if (list_grow(l, n) < 0)
        return -1;
>>>>>>> theirs
Reasoning: both sides call list_grow; one side adds sealing, the other adds
error handling, and the context shows list_grow reports failure through its
return value. The edits are compatible, so keep both behaviors.
Output:
```
    if (list_grow(l, n) < 0)
        return -1;
    l->sealed = 1;
```

### SECTION 6: INPUT
)";

}  // namespace

std::vector<std::string> section_headers() {
    return {"### SECTION 1: PREAMBLE",           "### SECTION 2: TASK DESCRIPTION",
            "### SECTION 3: REASONING STEPS",    "### SECTION 4: INPUT AND OUTPUT FORMAT",
            "### SECTION 5: EXAMPLE",            "### SECTION 6: INPUT"};
}

PromptTemplate PromptTemplate::standard() { return {kStandardSections}; }

PromptTemplate PromptTemplate::from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read prompt template: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    PromptTemplate tmpl{buf.str()};
    for (const auto& header : section_headers())
        if (tmpl.static_sections.find(header) == std::string::npos)
            throw std::runtime_error("prompt template " + path + " lacks header '" + header +
                                     "'");
    return tmpl;
}

std::size_t estimate_tokens(const std::string& text) { return text.size() / 4; }

std::string build_prompt(const PromptTemplate& tmpl, const std::string& context_text,
                         const std::string& conflict_text, std::size_t token_budget) {
    std::string prompt = tmpl.static_sections;
    if (!prompt.empty() && prompt.back() != '\n') prompt += '\n';
    if (context_text.empty())
        prompt += "(no related context snippets)\n";
    else
        prompt += context_text;
    if (!prompt.empty() && prompt.back() != '\n') prompt += '\n';
    prompt += conflict_text;
    if (!prompt.empty() && prompt.back() != '\n') prompt += '\n';
    if (token_budget > 0) {
        std::size_t est = estimate_tokens(prompt);
        if (est > token_budget) throw PromptTooLarge(est, token_budget);
    }
    return prompt;
}

HttpModelClient::HttpModelClient(ModelConfig cfg) : cfg_(std::move(cfg)) {}

namespace {

struct ParsedUrl {
    std::string scheme_host_port;
    std::string path;
};

ParsedUrl parse_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        return {"http://" + url.substr(0, url.find('/')), "/"};
    auto path_begin = url.find('/', scheme_end + 3);
    if (path_begin == std::string::npos) return {url, "/"};
    return {url.substr(0, path_begin), url.substr(path_begin)};
}

}  // namespace

ModelReply HttpModelClient::request(const std::string& prompt) {
    ParsedUrl url = parse_url(cfg_.endpoint);
#ifndef MERGECTX_TLS
    if (url.scheme_host_port.rfind("https://", 0) == 0)
        throw EndpointUnreachable("https endpoint requires a TLS-enabled build: " +
                                  cfg_.endpoint);
#endif
    json body;
    body["model"] = cfg_.model;
    body["messages"] = json::array({{{"role", "user"}, {"content", prompt}}});
    body["temperature"] = cfg_.temperature;
    body["max_tokens"] = cfg_.max_output_tokens;
    const std::string payload = body.dump();

    httplib::Headers headers;
    if (!cfg_.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg_.api_key);

    const auto started = std::chrono::steady_clock::now();
    int attempts = 0;
    int backoff_ms = 250;
    httplib::Error last_error = httplib::Error::Success;
    int last_status = 0;
    while (attempts <= cfg_.retries) {
        ++attempts;
        httplib::Client client(url.scheme_host_port);
        client.set_connection_timeout(0, cfg_.timeout_ms * 1000);
        client.set_read_timeout(cfg_.timeout_ms / 1000, (cfg_.timeout_ms % 1000) * 1000);
        client.set_write_timeout(cfg_.timeout_ms / 1000, (cfg_.timeout_ms % 1000) * 1000);
        auto res = client.Post(url.path, headers, payload, "application/json");
        if (res) {
            last_status = res->status;
            if (res->status >= 200 && res->status < 300) {
                json parsed = json::parse(res->body, nullptr, false);
                std::string text;
                if (!parsed.is_discarded()) {
                    if (parsed.contains("choices") && !parsed["choices"].empty()) {
                        const auto& choice = parsed["choices"][0];
                        if (choice.contains("message") && choice["message"].contains("content"))
                            text = choice["message"]["content"].get<std::string>();
                        else if (choice.contains("text"))
                            text = choice["text"].get<std::string>();
                    } else if (parsed.contains("content")) {
                        text = parsed["content"].get<std::string>();
                    }
                }
                if (text.empty()) text = res->body;
                ModelReply reply;
                reply.text = text;
                reply.attempts = attempts;
                reply.latency_ms = std::chrono::duration<double, std::milli>(
                                       std::chrono::steady_clock::now() - started)
                                       .count();
                return reply;
            }
            if (res->status < 500) throw HttpError(res->status);
            // 5xx: fall through to retry.
        } else {
            last_error = res.error();
        }
        if (attempts <= cfg_.retries) {
            std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
            backoff_ms *= 2;
        }
    }
    if (last_status >= 500) throw HttpError(last_status);
    switch (last_error) {
        case httplib::Error::Read:
        case httplib::Error::Write:
        case httplib::Error::ConnectionTimeout:
            throw RequestTimeout("request timed out after " + std::to_string(attempts) +
                                 " attempts");
        default:
            throw EndpointUnreachable("cannot reach " + cfg_.endpoint + " (" +
                                      httplib::to_string(last_error) + ")");
    }
}

bool contains_conflict_markers(const std::string& text) {
    for (const auto& line : linediff::split_lines(text)) {
        if (line.rfind("<<<<<<<", 0) == 0 || line.rfind(">>>>>>>", 0) == 0 ||
            line.rfind("|||||||", 0) == 0)
            return true;
        if (line.rfind("=======", 0) == 0) {
            std::string rest = line.substr(7);
            if (rest.find_first_not_of(" \t\r") == std::string::npos) return true;
        }
    }
    return false;
}

std::string extract_resolution(const std::string& raw_output) {
    // Collect fenced blocks; the last complete one wins.
    std::vector<std::string> blocks;
    std::size_t pos = 0;
    while (true) {
        std::size_t open = raw_output.find("```", pos);
        if (open == std::string::npos) break;
        std::size_t content_begin = raw_output.find('\n', open);
        if (content_begin == std::string::npos) break;  // fence with no body
        ++content_begin;
        std::size_t close = raw_output.find("```", content_begin);
        if (close == std::string::npos) break;
        blocks.push_back(raw_output.substr(content_begin, close - content_begin));
        pos = close + 3;
    }
    std::string candidate;
    if (!blocks.empty()) {
        candidate = blocks.back();
        // Indentation matters; only the trailing newline run is noise.
        std::size_t e = candidate.find_last_not_of(" \t\r\n");
        candidate = e == std::string::npos ? "" : candidate.substr(0, e + 1);
    } else {
        candidate = raw_output;
        // Trim leading/trailing blank lines.
        std::size_t b = candidate.find_first_not_of(" \t\r\n");
        if (b == std::string::npos)
            candidate.clear();
        else {
            std::size_t e = candidate.find_last_not_of(" \t\r\n");
            candidate = candidate.substr(b, e - b + 1);
        }
    }
    if (candidate.empty()) throw NoCodeFound("model output contained no code");
    if (contains_conflict_markers(candidate))
        throw NoCodeFound("extracted resolution still contains conflict markers");
    return candidate;
}

}  // namespace mergectx::resolve
