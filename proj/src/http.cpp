#include "factcheck/http.hpp"

#include "factcheck/error.hpp"

#include <curl/curl.h>

#include <fmt/format.h>

namespace factcheck {

namespace {

struct CurlGlobal {
    CurlGlobal() { curl_global_init(CURL_GLOBAL_DEFAULT); }
    ~CurlGlobal() { curl_global_cleanup(); }
};

std::size_t append_body(char* data, std::size_t size, std::size_t count, void* user) {
    static_cast<std::string*>(user)->append(data, size * count);
    return size * count;
}

class CurlTransport final : public HttpTransport {
public:
    HttpResponse post(const std::string& url, const HttpHeaders& headers, const std::string& body,
                      std::chrono::milliseconds timeout) override {
        static CurlGlobal global;
        std::unique_ptr<CURL, decltype(&curl_easy_cleanup)> curl(curl_easy_init(), &curl_easy_cleanup);
        if (!curl) throw TransportError("curl_easy_init failed", true);

        curl_slist* list = nullptr;
        for (const auto& [name, value] : headers) list = curl_slist_append(list, (name + ": " + value).c_str());
        std::unique_ptr<curl_slist, decltype(&curl_slist_free_all)> header_list(list, &curl_slist_free_all);

        HttpResponse response;
        curl_easy_setopt(curl.get(), CURLOPT_URL, url.c_str());
        curl_easy_setopt(curl.get(), CURLOPT_POST, 1L);
        curl_easy_setopt(curl.get(), CURLOPT_POSTFIELDS, body.c_str());
        curl_easy_setopt(curl.get(), CURLOPT_POSTFIELDSIZE, static_cast<long>(body.size()));
        curl_easy_setopt(curl.get(), CURLOPT_HTTPHEADER, header_list.get());
        curl_easy_setopt(curl.get(), CURLOPT_TIMEOUT_MS, static_cast<long>(timeout.count()));
        curl_easy_setopt(curl.get(), CURLOPT_NOSIGNAL, 1L);
        curl_easy_setopt(curl.get(), CURLOPT_WRITEFUNCTION, &append_body);
        curl_easy_setopt(curl.get(), CURLOPT_WRITEDATA, &response.body);

        const auto rc = curl_easy_perform(curl.get());
        if (rc != CURLE_OK) {
            throw TransportError(fmt::format("POST {} failed: {}", url, curl_easy_strerror(rc)), true);
        }
        long status = 0;
        curl_easy_getinfo(curl.get(), CURLINFO_RESPONSE_CODE, &status);
        response.status = static_cast<int>(status);
        return response;
    }
};

}  // namespace

std::shared_ptr<HttpTransport> make_curl_transport() {
    return std::make_shared<CurlTransport>();
}

void throw_for_status(int status, const std::string& service, const std::string& body) {
    const auto excerpt = body.substr(0, 200);
    const auto message = fmt::format("{} returned HTTP {}: {}", service, status, excerpt);
    if (status == 401 || status == 403) throw AuthError(message, status);
    if (status == 402) throw QuotaError(message, status);
    const bool retryable = status == 408 || status == 425 || status == 429 || status >= 500;
    throw TransportError(message, retryable, status);
}

}  // namespace factcheck
