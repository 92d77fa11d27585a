#include "ttra/svd.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

namespace ttra {

namespace {

Eigen::BDCSVD<Matrix> thin_svd(const Matrix &m) {
    Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return svd;
}

} // namespace

TruncatedSvd truncated_svd(const Matrix &m, Index s) {
    require(s >= 1, "truncated_svd: target rank must be at least 1");
    TruncatedSvd out;
    Index full = std::min(m.rows(), m.cols());
    if (s > full) {
        s = full;
        out.clamped = true;
    }
    auto svd = thin_svd(m);
    out.U = svd.matrixU().leftCols(s);
    out.singular = svd.singularValues().head(s);
    out.V = svd.matrixV().leftCols(s);
    return out;
}

Vector singular_values(const Matrix &m) {
    Eigen::BDCSVD<Matrix> svd(m);
    return svd.singularValues();
}

void thin_qr(const Matrix &m, Matrix &q, Matrix &r) {
    Index k = std::min(m.rows(), m.cols());
    Eigen::HouseholderQR<Matrix> qr(m);
    q = qr.householderQ() * Matrix::Identity(m.rows(), k);
    r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    for (Index j = 0; j < k; ++j) {
        if (r(j, j) < 0.0) {
            r.row(j) = -r.row(j);
            q.col(j) = -q.col(j);
        }
    }
}

Index numerical_rank(const Vector &sigma, double rel_tol) {
    if (sigma.size() == 0 || sigma[0] <= 0.0) return 0;
    double thresh = rel_tol * sigma[0];
    Index r = 0;
    while (r < sigma.size() && sigma[r] > thresh) ++r;
    return r;
}

} // namespace ttra
