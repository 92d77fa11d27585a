#include "ttra/dense_tensor.hpp"

namespace ttra {

Matrix unfold(const DenseTensor &t, Index split) {
    require(split >= 1 && split <= t.order() - 1, "unfold: mode out of range");
    Index rows = 1, cols = 1;
    const auto &shape = t.shape();
    for (Index k = 0; k < split; ++k) rows *= shape[k];
    for (Index k = split; k < t.order(); ++k) cols *= shape[k];
    return Eigen::Map<const Matrix>(t.values().data(), rows, cols);
}

TTCore unfold3(const DenseTensor &t, Index i, Index j) {
    require(i >= 0 && i <= j && j <= t.order(), "unfold3: index order violation");
    Index a = 1, b = 1, c = 1;
    const auto &shape = t.shape();
    for (Index k = 0; k < i; ++k) a *= shape[k];
    for (Index k = i; k < j; ++k) b *= shape[k];
    for (Index k = j; k < t.order(); ++k) c *= shape[k];
    return TTCore(a, b, c, t.values());
}

TTCore contract(const TTCore &a, const TTCore &b) {
    require(a.r1() == b.r0(), "contract: dimension mismatch");
    TTCore out(a.r0(), a.n() * b.n(), b.r1());
    // [out]^(r0*na) x (nb*r1) = a.right() * b.left(), which shares the
    // column-major buffer layout of the merged core.
    Eigen::Map<Matrix> flat(out.data().data(), a.r0() * a.n(), b.n() * b.r1());
    flat.noalias() = a.right() * b.left();
    return out;
}

} // namespace ttra
