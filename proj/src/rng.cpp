#include "stepsim/rng.hpp"

namespace stepsim {

namespace {

// FNV-1a over the label, folded with the run seed, then a splitmix64
// finalizer so nearby seeds land far apart in mt19937_64's seed space.
std::uint64_t stream_key(std::uint64_t seed, std::string_view label) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : label) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    std::uint64_t z = h ^ (seed + 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

} // namespace

RandomStream::RandomStream(std::uint64_t seed, std::string_view label)
    : gen_(stream_key(seed, label)), label_(label) {}

} // namespace stepsim
