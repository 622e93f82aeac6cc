#include "factcheck/search.hpp"

#include "factcheck/error.hpp"
#include "factcheck/text.hpp"

#include <fmt/format.h>

#include <unordered_set>

namespace factcheck {

using nlohmann::json;

std::string_view to_string(Language language) {
    switch (language) {
        case Language::Ur: return "ur";
        case Language::En: return "en";
        case Language::EnUr: return "en-ur";
    }
    return "ur";
}

std::optional<Language> parse_language(std::string_view text) {
    const auto s = text::ascii_lower(text::trim(text));
    if (s == "ur") return Language::Ur;
    if (s == "en") return Language::En;
    if (s == "en-ur") return Language::EnUr;
    return std::nullopt;
}

void validate(const SearchQuery& query) {
    if (text::trim(query.text).empty()) throw ConfigError("search query text is empty");
    if (query.language == Language::EnUr) throw ConfigError("search language must be ur or en");
    if (query.requested_results < 1 || query.requested_results > kMaxRequestedResults) {
        throw ConfigError(fmt::format("requested_results must be in [1, {}], got {}", kMaxRequestedResults,
                                      query.requested_results));
    }
}

json to_json(const EvidenceSnippet& s) {
    return {{"title", s.title},
            {"snippet", s.snippet_text},
            {"url", s.url},
            {"rank", s.rank},
            {"language", std::string(to_string(s.language))},
            {"query_id", s.query_id}};
}

std::string cache_key(const SearchQuery& query) {
    return text::sha256_hex(fmt::format("v1\x1f{}\x1f{}\x1f{}", text::collapse_whitespace(query.text),
                                        to_string(query.language), query.requested_results));
}

std::string normalize_url(std::string_view url) {
    auto s = std::string(text::trim(url));
    if (const auto hash = s.find('#'); hash != std::string::npos) s.erase(hash);

    const auto scheme_end = s.find("://");
    const std::size_t host_begin = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    auto host_end = s.find_first_of("/?", host_begin);
    if (host_end == std::string::npos) host_end = s.size();

    auto scheme = scheme_end == std::string::npos ? std::string() : text::ascii_lower(s.substr(0, scheme_end));
    auto host = text::ascii_lower(s.substr(host_begin, host_end - host_begin));
    if ((scheme == "http" && host.ends_with(":80")) || (scheme == "https" && host.ends_with(":443"))) {
        host.erase(host.rfind(':'));
    }
    auto rest = s.substr(host_end);
    const auto query_pos = rest.find('?');
    auto path = rest.substr(0, query_pos);
    const auto query = query_pos == std::string::npos ? std::string() : rest.substr(query_pos);
    while (!path.empty() && path.back() == '/') path.pop_back();

    std::string out;
    if (!scheme.empty()) out = scheme + "://";
    return out + host + path + query;
}

// ---------------------------------------------------------------------------
// Backends

namespace {

std::string fixture_key(Language language, std::string_view query) {
    return std::string(to_string(language)) + '\x1f' + text::collapse_whitespace(query);
}

std::vector<SearchHit> parse_hits(const json& results) {
    std::vector<SearchHit> hits;
    for (const auto& r : results) {
        SearchHit h;
        h.title = r.value("title", std::string());
        h.snippet = r.value("snippet", std::string());
        h.url = r.value("url", r.value("link", std::string()));
        hits.push_back(std::move(h));
    }
    return hits;
}

json hits_to_json(const std::vector<SearchHit>& hits) {
    json out = json::array();
    for (const auto& h : hits) out.push_back({{"title", h.title}, {"snippet", h.snippet}, {"url", h.url}});
    return out;
}

}  // namespace

void MockSearchBackend::add(Language language, const std::string& query, std::vector<SearchHit> hits) {
    fixtures_[fixture_key(language, query)] = std::move(hits);
}

std::shared_ptr<MockSearchBackend> MockSearchBackend::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open search fixture " + path.string());
    const auto j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ConfigError("search fixture is not a JSON object: " + path.string());
    auto backend = std::make_shared<MockSearchBackend>();
    backend->source_ = path.string();
    for (const auto& q : j.value("queries", json::array())) {
        const auto language = parse_language(q.value("language", std::string("ur")));
        if (!language || *language == Language::EnUr) {
            throw ConfigError("search fixture entry has an invalid language: " + q.dump());
        }
        backend->add(*language, q.value("query", std::string()), parse_hits(q.value("results", json::array())));
    }
    return backend;
}

std::vector<SearchHit> MockSearchBackend::fetch(const SearchQuery& query) {
    const auto it = fixtures_.find(fixture_key(query.language, query.text));
    if (it == fixtures_.end()) {
        throw MockMissError(
            fmt::format("search fixture has no results for [{}] '{}'", to_string(query.language), query.text));
    }
    return it->second;
}

HttpSearchBackend::HttpSearchBackend(std::shared_ptr<HttpTransport> transport, std::string endpoint,
                                     std::string api_key, std::chrono::milliseconds timeout)
    : transport_(std::move(transport)), endpoint_(std::move(endpoint)), api_key_(std::move(api_key)),
      timeout_(timeout) {
    if (endpoint_.empty()) endpoint_ = std::string(kDefaultEndpoint);
}

json HttpSearchBackend::request_body(const SearchQuery& query) {
    json body = {{"q", query.text}, {"num", query.requested_results}};
    if (query.locale) body["hl"] = *query.locale;
    return body;
}

std::vector<SearchHit> HttpSearchBackend::parse_response(const std::string& body) {
    const auto j = json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw TransportError("search endpoint returned non-JSON body", true);
    auto organic = j.value("organic", json::array());
    if (!organic.is_array()) return {};
    // Engine order is by position when present.
    std::stable_sort(organic.begin(), organic.end(), [](const json& a, const json& b) {
        return a.value("position", 0) < b.value("position", 0);
    });
    return parse_hits(organic);
}

std::vector<SearchHit> HttpSearchBackend::fetch(const SearchQuery& query) {
    HttpHeaders headers{{"Content-Type", "application/json"}};
    if (!api_key_.empty()) headers.emplace_back("X-API-KEY", api_key_);
    const auto response = transport_->post(endpoint_, headers, request_body(query).dump(), timeout_);
    if (response.status != 200) throw_for_status(response.status, "search endpoint", response.body);
    return parse_response(response.body);
}

// ---------------------------------------------------------------------------
// Cache

SearchCache::SearchCache(std::filesystem::path file) : file_(std::move(file)) {
    std::ifstream in(*file_, std::ios::binary);
    if (!in) return;  // created on first insert
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (text::trim(line).empty()) continue;
        const auto j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("key")) {
            throw DataError("malformed search cache line", file_->string(), number);
        }
        std::promise<std::vector<SearchHit>> p;
        p.set_value(parse_hits(j.value("results", json::array())));
        entries_[j["key"].get<std::string>()] = p.get_future().share();
    }
}

SearchCache::Lookup SearchCache::get_or_fetch(const std::string& key, const SearchQuery& query,
                                              const std::function<std::vector<SearchHit>()>& fetch, bool bypass) {
    std::promise<std::vector<SearchHit>> promise;
    {
        std::unique_lock lock(mutex_);
        if (!bypass) {
            if (const auto it = entries_.find(key); it != entries_.end()) {
                auto future = it->second;
                lock.unlock();
                return Lookup{future.get(), false};
            }
        }
        entries_[key] = promise.get_future().share();
    }
    try {
        auto hits = fetch();
        promise.set_value(hits);
        persist(key, query, hits);
        return Lookup{std::move(hits), true};
    } catch (...) {
        {
            std::lock_guard lock(mutex_);
            entries_.erase(key);
        }
        promise.set_exception(std::current_exception());
        throw;
    }
}

std::size_t SearchCache::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

void SearchCache::persist(const std::string& key, const SearchQuery& query, const std::vector<SearchHit>& hits) {
    if (!file_) return;
    const json line = {{"schema_version", 1},
                       {"key", key},
                       {"query",
                        {{"text", query.text},
                         {"language", std::string(to_string(query.language))},
                         {"requested_results", query.requested_results}}},
                       {"results", hits_to_json(hits)}};
    std::lock_guard lock(file_mutex_);
    std::ofstream out(*file_, std::ios::binary | std::ios::app);
    if (!out) throw DataError("cannot append to search cache", file_->string());
    out << line.dump() << '\n';
}

// ---------------------------------------------------------------------------
// Client

SearchClient::SearchClient(std::shared_ptr<SearchBackend> backend, std::shared_ptr<SearchCache> cache,
                           Money unit_cost, std::shared_ptr<CostLedger> ledger, std::shared_ptr<Backoff> backoff,
                           bool bypass_cache)
    : backend_(std::move(backend)), cache_(std::move(cache)), unit_cost_(unit_cost), backoff_(std::move(backoff)),
      bypass_cache_(bypass_cache) {
    if (!backend_) throw ConfigError("search backend is not configured");
    if (!cache_) cache_ = std::make_shared<SearchCache>();
    if (ledger) ledgers_.push_back(std::move(ledger));
    if (!backoff_) backoff_ = std::make_shared<Backoff>(RetryPolicy{}, real_sleeper());
}

std::vector<EvidenceSnippet> SearchClient::search(const SearchQuery& query) const {
    validate(query);
    const auto key = cache_key(query);
    const auto lookup = cache_->get_or_fetch(
        key, query, [&] { return backoff_->run([&] { return backend_->fetch(query); }); }, bypass_cache_);

    const auto language = std::string(to_string(query.language));
    for (const auto& ledger : ledgers_) ledger->record_search(language, lookup.fetched, unit_cost_);

    std::vector<EvidenceSnippet> out;
    std::unordered_set<std::string> seen;
    for (const auto& hit : lookup.hits) {
        if (static_cast<int>(out.size()) >= query.requested_results) break;
        if (text::trim(hit.url).empty()) continue;
        if (!seen.insert(normalize_url(hit.url)).second) continue;
        EvidenceSnippet s;
        s.title = hit.title;
        s.snippet_text = hit.snippet;
        s.url = hit.url;
        s.rank = static_cast<int>(out.size()) + 1;
        s.language = query.language;
        s.query_id = key.substr(0, 16);
        out.push_back(std::move(s));
    }
    return out;
}

SearchClient SearchClient::charging(std::shared_ptr<CostLedger> ledger) const {
    SearchClient copy = *this;
    if (ledger) copy.ledgers_.push_back(std::move(ledger));
    return copy;
}

}  // namespace factcheck
