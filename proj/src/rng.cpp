#include "factcheck/rng.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace factcheck {

std::uint64_t PortableRng::below(std::uint64_t n) {
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    // rem = 2^64 mod n; values above max - rem would bias the low residues.
    const std::uint64_t rem = (max - n + 1) % n;
    const std::uint64_t limit = max - rem;
    std::uint64_t x = next();
    while (rem != 0 && x > limit) x = next();
    return x % n;
}

double PortableRng::unit() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

std::vector<std::size_t> PortableRng::sample_indices(std::size_t population, std::size_t count) {
    count = std::min(count, population);
    std::vector<std::size_t> pool(population);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < count; ++i) {
        const auto j = i + static_cast<std::size_t>(below(population - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(count);
    std::sort(pool.begin(), pool.end());
    return pool;
}

}  // namespace factcheck
