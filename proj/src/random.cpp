#include "fwgraph/random.hpp"

#include <algorithm>
#include <cmath>

namespace fwg {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t hash_label(std::string_view label) {
    std::uint64_t h = 0xCBF29CE484222325ull;  // FNV-1a
    for (unsigned char c : label) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return splitmix64(h);
}

RandomStream::RandomStream(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

RandomStream RandomStream::child(std::uint64_t index) const {
    return RandomStream(splitmix64(seed_ ^ splitmix64(index + 0x632BE59BD9B4E019ull)));
}

RandomStream RandomStream::child(std::uint64_t salt, std::uint64_t index) const {
    return child(splitmix64(salt) ^ index);
}

std::uint64_t RandomStream::next_u64() {
    ++draws_;
    return engine_();
}

double RandomStream::uniform() {
    // 53 random bits, shifted off zero.
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::exponential(double mean) { return -mean * std::log(uniform()); }

std::size_t RandomStream::categorical(const double* cumulative, std::size_t n) {
    const double u = uniform() * cumulative[n - 1];
    const auto it = std::upper_bound(cumulative, cumulative + n, u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative), n - 1);
}

}  // namespace fwg
