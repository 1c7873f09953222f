#include "nslab/rng.hpp"

#include <cmath>

namespace nslab {

namespace {

constexpr std::uint64_t kMult0 = 0xD2E7470EE14C6C93ull;
constexpr std::uint64_t kMult1 = 0xCA5A826395121157ull;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ull;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73Bull;

inline std::uint64_t mulhi(std::uint64_t a, std::uint64_t b) {
    return static_cast<std::uint64_t>((static_cast<__uint128_t>(a) * b) >> 64);
}

inline double to_open_unit(std::uint64_t x) {
    // (0,1]: 53-bit mantissa, shifted away from zero so log() is safe
    return (static_cast<double>(x >> 11) + 1.0) * 0x1p-53;
}

}  // namespace

std::array<std::uint64_t, 4> Philox4x64::generate(const std::array<std::uint64_t, 4>& counter,
                                                  const std::array<std::uint64_t, 2>& key) {
    std::array<std::uint64_t, 4> x = counter;
    std::uint64_t k0 = key[0], k1 = key[1];
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t hi0 = mulhi(kMult0, x[0]), lo0 = kMult0 * x[0];
        const std::uint64_t hi1 = mulhi(kMult1, x[2]), lo1 = kMult1 * x[2];
        x = {hi1 ^ x[1] ^ k0, lo1, hi0 ^ x[3] ^ k1, lo0};
        k0 += kWeyl0;
        k1 += kWeyl1;
    }
    return x;
}

void GaussianStream::draw(std::uint64_t step, double* out, std::size_t n) const {
    constexpr double kTwoPi = 6.283185307179586476925286766559;
    std::size_t produced = 0;
    std::uint64_t block = 0;
    while (produced < n) {
        auto words = Philox4x64::generate({replica_, step, block, 0x6e736c6162ull}, {seed_, 0});
        double z[4];
        for (int p = 0; p < 2; ++p) {
            const double u1 = to_open_unit(words[2 * p]);
            const double u2 = to_open_unit(words[2 * p + 1]);
            const double r = std::sqrt(-2.0 * std::log(u1));
            z[2 * p] = r * std::cos(kTwoPi * u2);
            z[2 * p + 1] = r * std::sin(kTwoPi * u2);
        }
        for (int i = 0; i < 4 && produced < n; ++i) out[produced++] = z[i];
        ++block;
    }
}

double GaussianStream::uniform(std::uint64_t step, std::uint64_t slot) const {
    auto words = Philox4x64::generate({replica_, step, slot, 0x756e6966ull}, {seed_, 1});
    return to_open_unit(words[0]);
}

}  // namespace nslab
