#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace factcheck {

struct HttpResponse {
    int status = 0;
    std::string body;
};

using HttpHeaders = std::vector<std::pair<std::string, std::string>>;

// Minimal POST-only transport. Connection-level failures throw a retryable
// TransportError; HTTP status codes are returned to the caller to classify.
class HttpTransport {
public:
    virtual ~HttpTransport() = default;
    virtual HttpResponse post(const std::string& url, const HttpHeaders& headers, const std::string& body,
                              std::chrono::milliseconds timeout) = 0;
};

std::shared_ptr<HttpTransport> make_curl_transport();

// Maps an error status to the matching exception type. 401/403 are auth
// failures, 402 is quota, 408/425/429 and 5xx are retryable.
[[noreturn]] void throw_for_status(int status, const std::string& service, const std::string& body);

}  // namespace factcheck
