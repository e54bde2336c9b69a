#include "grpsis/random.hpp"

#include <unordered_set>

namespace grpsis {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::vector<std::uint64_t> derive_seeds(std::uint64_t master, std::size_t count) {
    std::vector<std::uint64_t> seeds;
    seeds.reserve(count);
    std::unordered_set<std::uint64_t> seen;
    std::uint64_t state = master;
    while (seeds.size() < count) {
        const std::uint64_t s = splitmix64(state);
        if (seen.insert(s).second) seeds.push_back(s);
    }
    return seeds;
}

} // namespace grpsis
