#include "gpimdp/rng.h"

#include <cmath>
#include <numbers>

namespace gpimdp {

namespace {

constexpr std::uint32_t philoxM0 = 0xD2511F53u;
constexpr std::uint32_t philoxM1 = 0xCD9E8D57u;
constexpr std::uint32_t philoxW0 = 0x9E3779B9u;
constexpr std::uint32_t philoxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    std::uint64_t const p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(philoxM0, ctr[0], hi0, lo0);
        mulhilo(philoxM1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += philoxW0;
        key[1] += philoxW1;
    }
    return ctr;
}

}  // namespace

Philox::Philox(std::uint64_t seed, std::uint64_t substream) : key64(seed), stream(substream) {}

void Philox::refill() {
    std::array<std::uint32_t, 4> const ctr{static_cast<std::uint32_t>(counter), static_cast<std::uint32_t>(counter >> 32),
                                           static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    block = philox4x32(ctr, {static_cast<std::uint32_t>(key64), static_cast<std::uint32_t>(key64 >> 32)});
    ++counter;
    used = 0;
}

std::uint32_t Philox::nextU32() {
    if (used == 4) refill();
    return block[used++];
}

double Philox::uniform() {
    std::uint64_t const hi = nextU32() >> 5;  // 27 bits
    std::uint64_t const lo = nextU32() >> 6;  // 26 bits
    return static_cast<double>((hi << 26) | lo) * 0x1.0p-53;
}

double Philox::normal() {
    if (haveSpare) {
        haveSpare = false;
        return spare;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double const u2 = uniform();
    double const r = std::sqrt(-2.0 * std::log(u1));
    double const theta = 2.0 * std::numbers::pi * u2;
    spare = r * std::sin(theta);
    haveSpare = true;
    return r * std::cos(theta);
}

}  // namespace gpimdp
