#include "factcheck/retry.hpp"

#include <cmath>
#include <thread>

namespace factcheck {

Sleeper real_sleeper() {
    return [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

std::chrono::milliseconds Backoff::delay(int retry) {
    const double base = static_cast<double>(policy_.initial_backoff.count()) *
                        std::pow(policy_.multiplier, static_cast<double>(retry - 1));
    double factor = 1.0;
    if (policy_.jitter > 0) {
        std::lock_guard lock(mutex_);
        const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
        factor = 1.0 - policy_.jitter + 2.0 * policy_.jitter * u;
    }
    return std::chrono::milliseconds(static_cast<std::int64_t>(std::llround(base * factor)));
}

}  // namespace factcheck
