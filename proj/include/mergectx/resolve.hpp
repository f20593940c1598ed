#pragma once
// Prompt construction and model access. The prompt has six fixed sections:
// preamble, task description, reasoning steps, I/O format, worked example,
// and the payload (context snippets followed by the conflict, both in patch
// form).

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace mergectx::resolve {

inline constexpr int kSectionCount = 6;

/// "### SECTION n:" headers, in order, as they appear in every prompt.
std::vector<std::string> section_headers();

/// Static text of sections 1-5. The default is compiled in; a custom
/// template (same section headers) may replace it.
struct PromptTemplate {
    std::string static_sections;  // sections 1-5, verbatim
    static PromptTemplate standard();
    static PromptTemplate from_file(const std::string& path);
};

struct PromptTooLarge : std::runtime_error {
    std::size_t estimated_tokens;
    std::size_t budget;
    PromptTooLarge(std::size_t est, std::size_t budget_)
        : std::runtime_error("prompt estimate " + std::to_string(est) +
                             " tokens exceeds budget " + std::to_string(budget_)),
          estimated_tokens(est),
          budget(budget_) {}
};

/// Rough size estimate used for the budget check (chars / 4).
std::size_t estimate_tokens(const std::string& text);

/// Deterministic, byte-stable prompt. Throws PromptTooLarge when the
/// estimate exceeds token_budget (0 disables the check).
std::string build_prompt(const PromptTemplate& tmpl, const std::string& context_text,
                         const std::string& conflict_text, std::size_t token_budget = 0);

// ---------------------------------------------------------------------------
// Model access.

struct ModelConfig {
    std::string endpoint = "http://127.0.0.1:8080/v1/chat/completions";
    std::string model = "default";
    double temperature = 0.0;  // deterministic decoding unless overridden
    int max_output_tokens = 4096;
    int timeout_ms = 60000;
    int retries = 3;
    std::string api_key;  // usually from the environment
    std::size_t prompt_token_budget = 24000;
};

struct EndpointUnreachable : std::runtime_error {
    explicit EndpointUnreachable(const std::string& what) : std::runtime_error(what) {}
};
struct HttpError : std::runtime_error {
    int status;
    explicit HttpError(int status_)
        : std::runtime_error("endpoint returned HTTP " + std::to_string(status_)),
          status(status_) {}
};
struct RequestTimeout : std::runtime_error {
    explicit RequestTimeout(const std::string& what) : std::runtime_error(what) {}
};

struct ModelReply {
    std::string text;
    double latency_ms = 0.0;
    int attempts = 1;
};

/// Transport interface; the HTTP client and the test doubles implement it.
class ModelClient {
public:
    virtual ~ModelClient() = default;
    virtual ModelReply request(const std::string& prompt) = 0;
};

/// Chat-completions style JSON over HTTP. Retries transient failures
/// (connection errors, 5xx) with exponential backoff up to cfg.retries.
class HttpModelClient : public ModelClient {
public:
    explicit HttpModelClient(ModelConfig cfg);
    ModelReply request(const std::string& prompt) override;

private:
    ModelConfig cfg_;
};

// ---------------------------------------------------------------------------
// Output extraction.

struct NoCodeFound : std::runtime_error {
    explicit NoCodeFound(const std::string& what) : std::runtime_error(what) {}
};

/// Strips reasoning and fenced-code wrappers; the last fenced block wins,
/// unfenced output is taken whole. Outputs still carrying conflict markers
/// are rejected.
std::string extract_resolution(const std::string& raw_output);

bool contains_conflict_markers(const std::string& text);

}  // namespace mergectx::resolve
