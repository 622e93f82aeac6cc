#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace factcheck {

// Base of every error the library raises on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent dataset content. Carries the file and 1-based line
// when the failure can be located.
class DataError : public Error {
public:
    DataError(std::string message, std::string file = {}, std::size_t line = 0)
        : Error(format(message, file, line)), file_(std::move(file)), line_(line) {}

    const std::string& file() const noexcept { return file_; }
    std::size_t line() const noexcept { return line_; }

private:
    static std::string format(const std::string& message, const std::string& file, std::size_t line) {
        if (file.empty()) return message;
        if (line == 0) return file + ": " + message;
        return file + ":" + std::to_string(line) + ": " + message;
    }

    std::string file_;
    std::size_t line_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// A prompt template referenced a placeholder with no binding.
class TemplateError : public Error {
public:
    explicit TemplateError(std::string placeholder)
        : Error("unbound placeholder: " + placeholder), placeholder_(std::move(placeholder)) {}

    const std::string& placeholder() const noexcept { return placeholder_; }

private:
    std::string placeholder_;
};

// Model output that could not be parsed into the expected shape even after
// the repair pass. The raw text is kept for logging.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::string raw)
        : Error(message), raw_(std::move(raw)) {}

    const std::string& raw_text() const noexcept { return raw_; }

private:
    std::string raw_;
};

// Transport-level failure talking to a remote service. Only retryable
// failures are retried by the gateways.
class TransportError : public Error {
public:
    TransportError(const std::string& message, bool retryable, int status = 0)
        : Error(message), retryable_(retryable), status_(status) {}

    bool retryable() const noexcept { return retryable_; }
    int status() const noexcept { return status_; }

private:
    bool retryable_;
    int status_;
};

class AuthError : public TransportError {
public:
    explicit AuthError(const std::string& message, int status = 401)
        : TransportError(message, false, status) {}
};

class QuotaError : public TransportError {
public:
    explicit QuotaError(const std::string& message, int status = 402)
        : TransportError(message, false, status) {}
};

// Thrown by mock backends for a request that has no canned answer. Never
// retried: under --mock nothing may fall through to the network.
class MockMissError : public TransportError {
public:
    explicit MockMissError(const std::string& message) : TransportError(message, false) {}
};

class TranslationError : public Error {
public:
    using Error::Error;
};

class RetrievalError : public Error {
public:
    using Error::Error;
};

class PipelineError : public Error {
public:
    using Error::Error;
};

}  // namespace factcheck
