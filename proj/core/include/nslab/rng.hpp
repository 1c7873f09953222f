#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace nslab {

/// Philox 4x64-10 counter-based generator. A (counter, key) pair maps to
/// four statistically independent 64-bit words, so streams indexed by
/// (seed, replica, step) can be evaluated in any order on any number of
/// threads and always produce the same numbers.
struct Philox4x64 {
    static std::array<std::uint64_t, 4> generate(const std::array<std::uint64_t, 4>& counter,
                                                 const std::array<std::uint64_t, 2>& key);
};

/// Gaussian increments for one (seed, replica) stream. draw(step, out) fills
/// out with standard normals derived from the counter (replica, step, block);
/// successive calls with the same arguments are identical.
class GaussianStream {
public:
    GaussianStream(std::uint64_t seed, std::uint64_t replica)
        : seed_(seed), replica_(replica) {}

    void draw(std::uint64_t step, std::vector<double>& out) const { draw(step, out.data(), out.size()); }
    void draw(std::uint64_t step, double* out, std::size_t n) const;

    /// Single uniform in (0,1) for auxiliary sampling decisions.
    double uniform(std::uint64_t step, std::uint64_t slot) const;

private:
    std::uint64_t seed_;
    std::uint64_t replica_;
};

}  // namespace nslab
