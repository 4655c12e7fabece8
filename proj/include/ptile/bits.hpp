#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <vector>

#include <boost/dynamic_bitset.hpp>

namespace ptile {

/// Per-part vertex subset. Every bitset attached to a part has exactly n bits.
using Bits = boost::dynamic_bitset<std::uint64_t>;

template <class F>
void for_each_bit(const Bits& b, F&& f)
{
    for (auto i = b.find_first(); i != Bits::npos; i = b.find_next(i))
        f(static_cast<int>(i));
}

inline std::vector<int> bits_to_vector(const Bits& b)
{
    std::vector<int> out;
    out.reserve(b.count());
    for_each_bit(b, [&](int i) { out.push_back(i); });
    return out;
}

inline Bits make_bits(std::size_t n, std::initializer_list<int> members)
{
    Bits b(n);
    for (int i : members)
        b.set(static_cast<std::size_t>(i));
    return b;
}

inline Bits make_bits(std::size_t n, const std::vector<int>& members)
{
    Bits b(n);
    for (int i : members)
        b.set(static_cast<std::size_t>(i));
    return b;
}

inline Bits full_bits(std::size_t n)
{
    Bits b(n);
    b.set();
    return b;
}

/// Index of the `rank`-th set bit (0-based); npos when out of range.
inline std::size_t nth_bit(const Bits& b, std::size_t rank)
{
    for (auto i = b.find_first(); i != Bits::npos; i = b.find_next(i)) {
        if (rank == 0)
            return i;
        --rank;
    }
    return Bits::npos;
}

} // namespace ptile
