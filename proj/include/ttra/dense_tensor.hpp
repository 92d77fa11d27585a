#pragma once

#include <numeric>
#include <vector>

#include "ttra/common.hpp"

namespace ttra {

/// Dense order-d tensor with explicit shape.
///
/// Values are stored in column-major linearization with the first index
/// fastest: linear(i0,...,i_{d-1}) = i0 + n0*(i1 + n1*(i2 + ...)). All
/// unfoldings in this library are pure reshapes of this buffer.
class DenseTensor {
public:
    DenseTensor() = default;

    DenseTensor(std::vector<Index> shape, Vector values)
            : shape_(std::move(shape)), values_(std::move(values)) {
        require(shape_.size() >= 2, "DenseTensor: order must be at least 2");
        for (Index n : shape_) require(n >= 1, "DenseTensor: dims must be positive");
        require(values_.size() == element_count(shape_),
                "DenseTensor: values length must equal product of dims");
    }

    static DenseTensor zeros(std::vector<Index> shape) {
        Index n = element_count(shape);
        return DenseTensor(std::move(shape), Vector::Zero(n));
    }

    static Index element_count(const std::vector<Index> &shape) {
        Index n = 1;
        for (Index s : shape) {
            require(s >= 1, "DenseTensor: dims must be positive");
            n *= s;
        }
        return n;
    }

    Index order() const { return static_cast<Index>(shape_.size()); }
    const std::vector<Index> &shape() const { return shape_; }
    Index size() const { return values_.size(); }

    const Vector &values() const { return values_; }
    Vector &values() { return values_; }

    Index linear_index(const std::vector<Index> &idx) const {
        require(static_cast<Index>(idx.size()) == order(), "index order mismatch");
        Index lin = 0;
        for (Index k = order() - 1; k >= 0; --k) {
            require(idx[k] >= 0 && idx[k] < shape_[k], "index out of bounds");
            lin = lin * shape_[k] + idx[k];
        }
        return lin;
    }

    double operator()(const std::vector<Index> &idx) const {
        return values_[linear_index(idx)];
    }

    double norm() const { return values_.norm(); }

private:
    std::vector<Index> shape_;
    Vector values_;
};

/// Order-3 array with shape (r0, n, r1) stored column-major with r0 fastest.
///
/// Both matrix unfoldings are reshapes of the same buffer:
///   right(): (r0*n) x r1, rows indexed by (a, i) with a fastest;
///   left():  r0 x (n*r1), columns indexed by (i, b) with i fastest.
/// Doubles as a TT core and as the general merged-mode order-3 view.
class TTCore {
public:
    TTCore() = default;

    TTCore(Index r0, Index n, Index r1)
            : r0_(r0), n_(n), r1_(r1), data_(Vector::Zero(r0 * n * r1)) {
        require(r0 >= 1 && n >= 1 && r1 >= 1, "TTCore: dims must be positive");
    }

    TTCore(Index r0, Index n, Index r1, Vector data)
            : r0_(r0), n_(n), r1_(r1), data_(std::move(data)) {
        require(r0 >= 1 && n >= 1 && r1 >= 1, "TTCore: dims must be positive");
        require(data_.size() == r0 * n * r1, "TTCore: data length mismatch");
    }

    Index r0() const { return r0_; }
    Index n() const { return n_; }
    Index r1() const { return r1_; }
    Index size() const { return data_.size(); }

    const Vector &data() const { return data_; }
    Vector &data() { return data_; }

    double &operator()(Index a, Index i, Index b) {
        return data_[a + r0_ * (i + n_ * b)];
    }
    double operator()(Index a, Index i, Index b) const {
        return data_[a + r0_ * (i + n_ * b)];
    }

    Eigen::Map<Matrix> right() { return {data_.data(), r0_ * n_, r1_}; }
    Eigen::Map<const Matrix> right() const { return {data_.data(), r0_ * n_, r1_}; }

    Eigen::Map<Matrix> left() { return {data_.data(), r0_, n_ * r1_}; }
    Eigen::Map<const Matrix> left() const { return {data_.data(), r0_, n_ * r1_}; }

    /// Lateral slice (:, i, :) as an r0 x r1 strided view.
    Eigen::Map<const Matrix, 0, Eigen::OuterStride<>> slice(Index i) const {
        return {data_.data() + r0_ * i, r0_, r1_, Eigen::OuterStride<>(r0_ * n_)};
    }
    Eigen::Map<Matrix, 0, Eigen::OuterStride<>> slice(Index i) {
        return {data_.data() + r0_ * i, r0_, r1_, Eigen::OuterStride<>(r0_ * n_)};
    }

    static TTCore from_right(Index r0, Index n, const Matrix &right_unfolding) {
        require(right_unfolding.rows() == r0 * n, "from_right: row count mismatch");
        TTCore c(r0, n, right_unfolding.cols());
        Eigen::Map<const Vector> flat(right_unfolding.data(), right_unfolding.size());
        c.data_ = flat;
        return c;
    }

    static TTCore from_left(Index n, Index r1, const Matrix &left_unfolding) {
        require(left_unfolding.cols() == n * r1, "from_left: column count mismatch");
        TTCore c(left_unfolding.rows(), n, r1);
        Eigen::Map<const Vector> flat(left_unfolding.data(), left_unfolding.size());
        c.data_ = flat;
        return c;
    }

private:
    Index r0_ = 1, n_ = 1, r1_ = 1;
    Vector data_;
};

/// Matrix unfolding with the leading `split` modes on the rows.
/// split must satisfy 1 <= split <= d-1; the result is a pure reshape.
Matrix unfold(const DenseTensor &t, Index split);

/// Order-3 reshape with mode groups [0, i), [i, j), [j, d). The arguments
/// are mode counts, 0 <= i <= j <= d; i == j collapses the middle group to a
/// singleton and j == d the trailing group.
TTCore unfold3(const DenseTensor &t, Index i, Index j);

/// Contraction of the last mode of `a` with the first mode of `b`; the two
/// free middle modes are merged. Associative over chains.
TTCore contract(const TTCore &a, const TTCore &b);

} // namespace ttra
