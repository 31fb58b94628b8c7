#pragma once

#include <cstdint>

// Counter-based random draws. Every draw is a pure function of
// (master seed, stream tag, individual index), so simulation results do not
// depend on iteration or scheduling order and individuals can be partitioned
// across workers with bit-identical results.
namespace relrisk::rng {

// splitmix64 finalizer; a bijective mixer with full avalanche.
constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Purpose tags keep the per-individual draws for different model components
// independent of one another.
enum class Stream : std::uint64_t {
    background = 0x6267ULL,
    switch_indicator = 0x7377ULL,
    treatment = 0x7472ULL,
};

constexpr std::uint64_t derive(std::uint64_t seed, Stream stream, std::uint64_t index) noexcept {
    std::uint64_t h = mix(seed);
    h = mix(h ^ static_cast<std::uint64_t>(stream));
    h = mix(h ^ index);
    return h;
}

// Uniform on [0,1) with 53 random bits; never returns 1, so comparing
// against p is exact at both corners (p = 0 never fires, p = 1 always).
constexpr double uniform01(std::uint64_t seed, Stream stream, std::uint64_t index) noexcept {
    return static_cast<double>(derive(seed, stream, index) >> 11) * 0x1.0p-53;
}

constexpr bool bernoulli(double p, std::uint64_t seed, Stream stream,
                         std::uint64_t index) noexcept {
    return uniform01(seed, stream, index) < p;
}

}  // namespace relrisk::rng
