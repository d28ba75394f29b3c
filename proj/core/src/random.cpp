#include "shepherd/random.hpp"

#include <cstdio>

namespace shepherd {

namespace {

std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view name, std::uint64_t index) {
    return mix64(mix64(master ^ fnv1a(name)) + index);
}

double hash_uniform(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    const std::uint64_t h = mix64(mix64(seed + mix64(a)) ^ b);
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

std::string fnv_digest(std::string_view text) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(text)));
    return buf;
}

int RandomStream::uniform_index(int n) {
    std::uniform_int_distribution<int> dist(0, n - 1);
    return dist(engine_);
}

double RandomStream::uniform_real() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

}  // namespace shepherd
