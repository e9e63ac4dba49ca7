#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace fwg {

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t hash_label(std::string_view label);

// Seeded 64-bit stream. Children depend only on the seed and the index, so
// the split tree is reproducible regardless of how many draws were taken.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed = 0);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t draws() const { return draws_; }

    RandomStream child(std::uint64_t index) const;
    RandomStream child(std::uint64_t salt, std::uint64_t index) const;

    std::uint64_t next_u64();
    // Uniform on the open interval (0, 1).
    double uniform();
    double exponential(double mean);
    std::size_t categorical(const double* cumulative, std::size_t n);

private:
    std::uint64_t seed_;
    std::uint64_t draws_ = 0;
    std::mt19937_64 engine_;
};

}  // namespace fwg
