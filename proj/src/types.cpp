#include "larn/types.hpp"

#include "larn/errors.hpp"

namespace larn {

void Dataset::validate() const
{
    if (X.rows() < 1 || X.cols() < 1 || Y.cols() < 1) {
        throw ConfigError("dataset: need n >= 1, p >= 1, q >= 1");
    }
    if (X.rows() != Y.rows()) {
        throw ConfigError("dataset: X has " + std::to_string(X.rows()) + " rows but Y has "
                          + std::to_string(Y.rows()));
    }
    if (!all_finite(X) || !all_finite(Y)) {
        throw DomainError("dataset: non-finite entries");
    }
}

Dataset Dataset::subset(const std::vector<Index>& rows) const
{
    Dataset out;
    out.X.resize(static_cast<Index>(rows.size()), X.cols());
    out.Y.resize(static_cast<Index>(rows.size()), Y.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.X.row(static_cast<Index>(i)) = X.row(rows[i]);
        out.Y.row(static_cast<Index>(i)) = Y.row(rows[i]);
    }
    return out;
}

Vector row_norms(const Matrix& B)
{
    return B.rowwise().norm();
}

std::vector<Index> row_support(const Matrix& B)
{
    std::vector<Index> support;
    for (Index j = 0; j < B.rows(); ++j) {
        if ((B.row(j).array() != 0.0).any()) support.push_back(j);
    }
    return support;
}

std::size_t element_support_size(const Matrix& B)
{
    return static_cast<std::size_t>((B.array() != 0.0).count());
}

bool all_finite(const Matrix& M)
{
    return M.allFinite();
}

} // namespace larn
