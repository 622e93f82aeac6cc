#pragma once

#include "factcheck/http.hpp"
#include "factcheck/ledger.hpp"
#include "factcheck/money.hpp"
#include "factcheck/retry.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace factcheck {

// Language provenance of a query or snippet. EnUr marks English evidence that
// was translated back into Urdu.
enum class Language { Ur, En, EnUr };

std::string_view to_string(Language language);
std::optional<Language> parse_language(std::string_view text);

inline constexpr int kDefaultRequestedResults = 10;
inline constexpr int kMaxRequestedResults = 20;

struct SearchQuery {
    std::string text;
    Language language = Language::Ur;
    int requested_results = kDefaultRequestedResults;
    // Passed to the engine as its interface-language parameter when set.
    std::optional<std::string> locale;
};

// Throws ConfigError unless text is non-empty, language is ur or en and
// requested_results is in [1, 20].
void validate(const SearchQuery& query);

struct SearchHit {
    std::string title;
    std::string snippet;
    std::string url;
};

struct EvidenceSnippet {
    std::string title;
    std::string snippet_text;
    std::string url;
    int rank = 1;
    Language language = Language::Ur;
    std::string query_id;

    friend bool operator==(const EvidenceSnippet&, const EvidenceSnippet&) = default;
};

nlohmann::json to_json(const EvidenceSnippet& snippet);

// Deterministic key over (whitespace-normalized text, language,
// requested_results). Hex SHA-256.
std::string cache_key(const SearchQuery& query);

// Lowercases scheme and host, drops the fragment, a default port and a
// trailing slash on the path.
std::string normalize_url(std::string_view url);

class SearchBackend {
public:
    virtual ~SearchBackend() = default;
    virtual std::vector<SearchHit> fetch(const SearchQuery& query) = 0;
    virtual std::string identity() const = 0;
};

// Fixture-backed search. Lookups ignore requested_results and match on the
// whitespace-normalized query text plus language. Unknown queries raise
// MockMissError.
//
//   {"schema_version": 1,
//    "queries": [{"language": "ur", "query": "...",
//                 "results": [{"title": "...", "snippet": "...", "url": "..."}]}]}
class MockSearchBackend final : public SearchBackend {
public:
    void add(Language language, const std::string& query, std::vector<SearchHit> hits);
    static std::shared_ptr<MockSearchBackend> load(const std::filesystem::path& path);

    std::vector<SearchHit> fetch(const SearchQuery& query) override;
    std::string identity() const override { return "mock:" + source_; }

private:
    std::map<std::string, std::vector<SearchHit>> fixtures_;
    std::string source_ = "inline";
};

class FunctionSearchBackend final : public SearchBackend {
public:
    using Handler = std::function<std::vector<SearchHit>(const SearchQuery&)>;
    explicit FunctionSearchBackend(Handler handler, std::string identity = "function")
        : handler_(std::move(handler)), identity_(std::move(identity)) {}

    std::vector<SearchHit> fetch(const SearchQuery& query) override { return handler_(query); }
    std::string identity() const override { return identity_; }

private:
    Handler handler_;
    std::string identity_;
};

// SERP-style JSON search over HTTP: POST {"q", "num", "hl"} with an X-API-KEY
// header; reads organic[].{title, link, snippet, position}.
class HttpSearchBackend final : public SearchBackend {
public:
    static constexpr std::string_view kDefaultEndpoint = "https://google.serper.dev/search";

    HttpSearchBackend(std::shared_ptr<HttpTransport> transport, std::string endpoint, std::string api_key,
                      std::chrono::milliseconds timeout = std::chrono::seconds(30));

    static nlohmann::json request_body(const SearchQuery& query);
    static std::vector<SearchHit> parse_response(const std::string& body);

    std::vector<SearchHit> fetch(const SearchQuery& query) override;
    std::string identity() const override { return "http:" + endpoint_; }

private:
    std::shared_ptr<HttpTransport> transport_;
    std::string endpoint_;
    std::string api_key_;
    std::chrono::milliseconds timeout_;
};

// Result cache keyed by cache_key. Concurrent lookups of one key share a
// single backend fetch. With a file path the cache is loaded from and
// appended to a JSON-lines file:
//
//   {"schema_version": 1, "key": "<hex>",
//    "query": {"text": "...", "language": "ur", "requested_results": 10},
//    "results": [{"title": "...", "snippet": "...", "url": "..."}]}
//
// Later lines for a key replace earlier ones.
class SearchCache {
public:
    SearchCache() = default;
    explicit SearchCache(std::filesystem::path file);

    struct Lookup {
        std::vector<SearchHit> hits;
        bool fetched = false;  // true when this call ran the backend
    };

    // Returns cached hits, or runs `fetch` (once across concurrent callers)
    // and stores the result. With `bypass` set the cache is not read, but
    // the fresh result still replaces the stored one.
    Lookup get_or_fetch(const std::string& key, const SearchQuery& query,
                        const std::function<std::vector<SearchHit>()>& fetch, bool bypass = false);

    std::size_t size() const;

private:
    void persist(const std::string& key, const SearchQuery& query, const std::vector<SearchHit>& hits);

    mutable std::mutex mutex_;
    std::map<std::string, std::shared_future<std::vector<SearchHit>>> entries_;
    std::optional<std::filesystem::path> file_;
    std::mutex file_mutex_;
};

class SearchClient {
public:
    SearchClient(std::shared_ptr<SearchBackend> backend, std::shared_ptr<SearchCache> cache,
                 Money unit_cost, std::shared_ptr<CostLedger> ledger, std::shared_ptr<Backoff> backoff = nullptr,
                 bool bypass_cache = false);

    // At most requested_results snippets, URL-deduplicated, ranked 1..n in
    // engine order. A cache hit bills nothing. An empty result is not an
    // error.
    std::vector<EvidenceSnippet> search(const SearchQuery& query) const;

    SearchClient charging(std::shared_ptr<CostLedger> ledger) const;

    std::string backend_identity() const { return backend_->identity(); }
    Money unit_cost() const { return unit_cost_; }

private:
    std::shared_ptr<SearchBackend> backend_;
    std::shared_ptr<SearchCache> cache_;
    Money unit_cost_;
    std::vector<std::shared_ptr<CostLedger>> ledgers_;
    std::shared_ptr<Backoff> backoff_;
    bool bypass_cache_ = false;
};

}  // namespace factcheck
