#pragma once

#include <vector>

#include "ttra/dense_tensor.hpp"
#include "ttra/tt_tensor.hpp"

namespace ttra {

/// A set of sampled entries: multi-indices with the data values at them,
/// plus the ambient shape and the sampling ratio |set| / prod(dims).
struct SampleSet {
    std::vector<Index> shape;
    std::vector<Index> idx_flat; // sample s occupies [s*d, s*d + d)
    Vector values;
    double ratio = 0.0;

    Index order() const { return static_cast<Index>(shape.size()); }
    Index count() const { return values.size(); }

    const Index *index(Index s) const { return idx_flat.data() + s * order(); }

    /// Validates ranges, uniqueness and the ratio bookkeeping.
    void validate() const;

    static SampleSet from_indices(std::vector<Index> shape,
                                  std::vector<Index> idx_flat, Vector values);
};

inline Vector gather(const TTTensor &x, const SampleSet &s) {
    require(x.shape() == s.shape, "gather: shape mismatch");
    return gather_flat(x, s.idx_flat, s.order());
}

/// Dense tensor with the sample values at the sample positions and zeros
/// elsewhere.
DenseTensor scatter_to_dense(const SampleSet &s, const Vector &values,
                             Index dense_cap = kDenseCapDefault);

} // namespace ttra
