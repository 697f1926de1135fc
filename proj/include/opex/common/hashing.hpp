#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace opex {

// SplitMix64 finalizer. Used for counter-based, order-independent random draws.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t mix64(std::uint64_t a, std::uint64_t b) noexcept {
    return mix64(a ^ mix64(b));
}

constexpr std::uint64_t mix64(std::uint64_t a, std::uint64_t b, std::uint64_t c) noexcept {
    return mix64(mix64(a, b), c);
}

// Uniform double in [0, 1) from the top 53 bits.
constexpr double unit_interval(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * (1.0 / 9007199254740992.0);
}

class Fnv1a {
public:
    Fnv1a& add(std::string_view bytes) noexcept {
        for (unsigned char c : bytes) {
            state_ ^= c;
            state_ *= 0x100000001b3ULL;
        }
        return *this;
    }
    Fnv1a& add(std::uint64_t v) noexcept {
        for (int i = 0; i < 8; ++i) {
            state_ ^= (v >> (8 * i)) & 0xffU;
            state_ *= 0x100000001b3ULL;
        }
        return *this;
    }
    std::uint64_t value() const noexcept { return state_; }

private:
    std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

inline std::uint64_t fnv1a(std::string_view bytes) noexcept { return Fnv1a{}.add(bytes).value(); }

std::string to_hex(std::uint64_t v);

}  // namespace opex
