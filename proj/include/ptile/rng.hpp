#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace ptile {

/// SplitMix64 finalizer; used to derive independent sub-stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of sub-stream `stream` under `seed`. Generators take one sub-stream per
/// pattern edge / process step / instance so that output never depends on
/// evaluation order or worker count.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream)
{
    return mix64(mix64(seed) ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

/// Portable random source. The engine is mt19937_64, whose output sequence is
/// fixed by the standard; the distributions below are implemented here rather
/// than taken from <random>, whose algorithms vary between library vendors.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, bound); bound must be positive.
    std::uint64_t below(std::uint64_t bound)
    {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            std::uint64_t x = engine_();
            if (x >= threshold)
                return x % bound;
        }
    }

    int below(int bound) { return static_cast<int>(below(static_cast<std::uint64_t>(bound))); }

    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return unit() < p; }

    template <class T>
    void shuffle(std::vector<T>& v)
    {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(static_cast<std::uint64_t>(i)));
            std::swap(v[i - 1], v[j]);
        }
    }

    std::vector<int> permutation(int n)
    {
        std::vector<int> p(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            p[static_cast<std::size_t>(i)] = i;
        shuffle(p);
        return p;
    }

private:
    std::mt19937_64 engine_;
};

} // namespace ptile
