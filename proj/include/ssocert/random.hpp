#pragma once

#include "ssocert/linalg.hpp"

#include <cstdint>
#include <random>

namespace ssocert {

/// Seeded generator whose output depends only on the seed. The standard
/// distributions are implementation-defined, so the transforms live here.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t bits() { return engine_(); }

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    std::uint64_t index(std::uint64_t n) { return engine_() % n; }

    double normal();

    Vector normal_vector(int n);
    Matrix normal_matrix(int rows, int cols);
    Matrix symmetric_matrix(int m);
    /// Haar-distributed orthogonal matrix (QR of a Gaussian matrix, sign-fixed).
    Matrix orthogonal(int n);

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace ssocert
