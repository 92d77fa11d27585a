#pragma once

#include "ttra/common.hpp"

namespace ttra {

/// Non-increasing, non-negative singular value sequence.
struct SingularSpectrum {
    Vector values;

    explicit SingularSpectrum(Vector v) : values(std::move(v)) {
        for (Index j = 0; j < values.size(); ++j) {
            require(values[j] >= 0.0, "SingularSpectrum: values must be non-negative");
            if (j > 0)
                require(values[j] <= values[j - 1] * (1.0 + 1e-12),
                        "SingularSpectrum: values must be non-increasing");
        }
    }
};

struct TruncatedSvd {
    Matrix U;        // orthonormal columns, s of them
    Vector singular; // non-increasing
    Matrix V;        // orthonormal columns, s of them
    bool clamped = false; // s exceeded min(rows, cols) and was clamped
};

/// Best rank-s approximation factors U diag(singular) V^T of m.
/// s > min(dims) clamps to min(dims) and sets the flag.
TruncatedSvd truncated_svd(const Matrix &m, Index s);

/// All singular values of m, non-increasing.
Vector singular_values(const Matrix &m);

/// Thin unpivoted Householder QR with the R diagonal forced non-negative.
/// For an m x n input returns Q (m x k) and R (k x n), k = min(m, n).
void thin_qr(const Matrix &m, Matrix &q, Matrix &r);

/// Count of singular values above rel_tol * sigma_1 (0 for a zero matrix).
Index numerical_rank(const Vector &sigma, double rel_tol);

} // namespace ttra
