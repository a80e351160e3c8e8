#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace gpimdp {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// A stream is identified by (seed, substream); draws advance a 64-bit
/// counter, so any run can be replayed from its identifiers alone and
/// episodes get non-overlapping streams without sharing state.
class Philox {
   public:
    static constexpr std::string_view algorithm = "philox4x32-10";

    Philox(std::uint64_t seed, std::uint64_t substream = 0);

    std::uint32_t nextU32();
    /// Uniform double in [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Standard normal via Box-Muller; platform independent.
    double normal();

    std::uint64_t seed() const { return key64; }
    std::uint64_t substream() const { return stream; }

   private:
    void refill();

    std::uint64_t key64;
    std::uint64_t stream;
    std::uint64_t counter = 0;
    std::array<std::uint32_t, 4> block{};
    unsigned used = 4;
    bool haveSpare = false;
    double spare = 0.0;
};

}  // namespace gpimdp
