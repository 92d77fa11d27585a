#pragma once

#include <cstdint>
#include <random>

#include "ttra/common.hpp"

namespace ttra {

/// Seeded pseudo-random stream used by all generators and experiments.
///
/// The generator is std::mt19937_64 with a 64-bit seed; normal deviates come
/// from std::normal_distribution<double>. Runs are bit-reproducible for a
/// fixed seed on a given standard library implementation.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double normal() { return normal_(gen_); }
    double uniform() { return uniform_(gen_); }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(gen_);
    }

    Vector normal_vector(Index n) {
        Vector v(n);
        for (Index i = 0; i < n; ++i) v[i] = normal();
        return v;
    }

    std::mt19937_64 &engine() { return gen_; }

private:
    std::mt19937_64 gen_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

} // namespace ttra
