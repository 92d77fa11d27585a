#include "ttra/sampling.hpp"

#include <algorithm>
#include <cmath>

namespace ttra {

void SampleSet::validate() const {
    const Index d = order();
    require(d >= 2, "SampleSet: order must be at least 2");
    require(static_cast<Index>(idx_flat.size()) == count() * d,
            "SampleSet: index storage length mismatch");
    Index total = 1;
    for (Index n : shape) {
        require(n >= 1, "SampleSet: dims must be positive");
        total *= n;
    }
    std::vector<Index> lin(count());
    for (Index s = 0; s < count(); ++s) {
        const Index *ix = index(s);
        Index l = 0;
        for (Index k = d - 1; k >= 0; --k) {
            require(ix[k] >= 0 && ix[k] < shape[k], "SampleSet: index out of range");
            l = l * shape[k] + ix[k];
        }
        lin[s] = l;
    }
    std::sort(lin.begin(), lin.end());
    require(std::adjacent_find(lin.begin(), lin.end()) == lin.end(),
            "SampleSet: indices must be unique");
    require(std::abs(ratio - static_cast<double>(count()) / static_cast<double>(total)) <=
                1e-12 * (1.0 + ratio),
            "SampleSet: ratio inconsistent with counts");
}

SampleSet SampleSet::from_indices(std::vector<Index> shape, std::vector<Index> idx_flat,
                                  Vector values) {
    SampleSet s;
    s.shape = std::move(shape);
    s.idx_flat = std::move(idx_flat);
    s.values = std::move(values);
    Index total = 1;
    for (Index n : s.shape) total *= n;
    s.ratio = static_cast<double>(s.count()) / static_cast<double>(total);
    s.validate();
    return s;
}

DenseTensor scatter_to_dense(const SampleSet &s, const Vector &values, Index dense_cap) {
    require(values.size() == s.count(), "scatter: value count mismatch");
    Index total = DenseTensor::element_count(s.shape);
    if (total > dense_cap)
        throw DenseBudgetExceeded("scatter: dense size exceeds cap");
    DenseTensor out = DenseTensor::zeros(s.shape);
    const Index d = s.order();
    for (Index i = 0; i < s.count(); ++i) {
        const Index *ix = s.index(i);
        Index lin = 0;
        for (Index k = d - 1; k >= 0; --k) lin = lin * s.shape[k] + ix[k];
        out.values()[lin] = values[i];
    }
    return out;
}

} // namespace ttra
