#include "kmpe/sample_set.hpp"

#include "kmpe/errors.hpp"

namespace kmpe {

SampleSet SampleSet::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) return SampleSet{};
    const std::size_t dim = rows.front().size();
    SampleSet out(rows.size(), dim);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != dim) throw InputError("SampleSet: rows have differing dimensions");
        for (std::size_t d = 0; d < dim; ++d) {
            out.matrix()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = rows[i][d];
        }
    }
    return out;
}

SampleSet SampleSet::concat(const SampleSet& a, const SampleSet& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    if (a.dim() != b.dim()) throw InputError("SampleSet::concat: dimension mismatch");
    RowMatrix joined(a.matrix().rows() + b.matrix().rows(), a.matrix().cols());
    joined << a.matrix(), b.matrix();
    return SampleSet(std::move(joined));
}

}  // namespace kmpe
