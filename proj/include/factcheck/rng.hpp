#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace factcheck {

// Seeded generator used wherever a run must be reproducible across platforms.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. Standard distributions are not portable, so bounded integers are
// drawn here by rejection sampling on the raw 64-bit output:
//
//   limit = 2^64 - (2^64 mod n);  draw x until x < limit;  return x mod n
//
// and uniform reals as (x >> 11) * 2^-53.
class PortableRng {
public:
    explicit PortableRng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform integer in [0, n). n must be > 0.
    std::uint64_t below(std::uint64_t n);

    // Uniform real in [0, 1).
    double unit();

    // Chooses `count` distinct indices from [0, population) by a partial
    // Fisher-Yates shuffle and returns them sorted ascending.
    std::vector<std::size_t> sample_indices(std::size_t population, std::size_t count);

private:
    std::mt19937_64 engine_;
};

}  // namespace factcheck
