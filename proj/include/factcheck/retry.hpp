#pragma once

#include "factcheck/error.hpp"

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <random>
#include <string>

namespace factcheck {

using Sleeper = std::function<void(std::chrono::milliseconds)>;

Sleeper real_sleeper();

// Exponential backoff between attempts: initial, initial*multiplier, ...
// each scaled by a uniform factor in [1 - jitter, 1 + jitter].
struct RetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds initial_backoff{1000};
    double multiplier = 2.0;
    double jitter = 0.2;
};

// Shared, thread-safe source of jitter. Jitter only affects sleep length.
class Backoff {
public:
    Backoff(RetryPolicy policy, Sleeper sleeper, std::uint64_t seed = 0)
        : policy_(policy), sleeper_(std::move(sleeper)), rng_(seed) {}

    const RetryPolicy& policy() const { return policy_; }

    // Delay before retry number `retry` (1-based).
    std::chrono::milliseconds delay(int retry);
    void wait(int retry) { sleeper_(delay(retry)); }

    // Runs `fn`, retrying on retryable TransportError until attempts run out.
    template <typename Fn>
    auto run(Fn&& fn) -> decltype(fn()) {
        for (int attempt = 1;; ++attempt) {
            try {
                return fn();
            } catch (const TransportError& e) {
                if (!e.retryable()) throw;
                if (attempt >= policy_.max_attempts) {
                    throw TransportError(std::string(e.what()) + " (gave up after " + std::to_string(attempt) +
                                             " attempts)",
                                         false, e.status());
                }
            }
            wait(attempt);
        }
    }

private:
    RetryPolicy policy_;
    Sleeper sleeper_;
    std::mutex mutex_;
    std::mt19937_64 rng_;
};

}  // namespace factcheck
