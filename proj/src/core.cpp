#include "qtk/core.hpp"

#include <algorithm>
#include <cmath>

namespace qtk {

namespace {

uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

Rng::Rng(uint64_t seed) : eng_(splitmix64(seed)) {}

uint64_t Rng::next_u64() { return eng_(); }

double Rng::uniform() { return (double)(next_u64() >> 11) * 0x1.0p-53; }

double Rng::normal(double sigma) {
    if (have_spare_) {
        have_spare_ = false;
        return spare_ * sigma;
    }
    double u1 = uniform();
    while (u1 <= 0) {
        u1 = uniform();
    }
    double u2 = uniform();
    double r = std::sqrt(-2 * std::log(u1));
    spare_ = r * std::sin(2 * kPi * u2);
    have_spare_ = true;
    return r * std::cos(2 * kPi * u2) * sigma;
}

uint64_t Rng::below(uint64_t n) {
    if (n == 0) {
        throw QtkError("Rng::below(0)");
    }
    // Rejection sampling keeps the draw exactly uniform.
    uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return x % n;
}

Rng Rng::split() { return Rng(splitmix64(next_u64() ^ 0x5851f42d4c957f2dULL)); }

std::string index_to_bits(uint64_t index, int n_bits) {
    std::string s(n_bits, '0');
    for (int q = 0; q < n_bits; q++) {
        if ((index >> (n_bits - 1 - q)) & 1) {
            s[q] = '1';
        }
    }
    return s;
}

uint64_t bits_to_index(const std::string &bits) {
    uint64_t v = 0;
    for (char c : bits) {
        if (c != '0' && c != '1') {
            throw QtkError("not a bit string: " + bits);
        }
        v = (v << 1) | (uint64_t)(c == '1');
    }
    return v;
}

std::string qiskit_order(const std::string &bits) { return std::string(bits.rbegin(), bits.rend()); }

}  // namespace qtk
