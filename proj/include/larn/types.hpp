#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace larn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Multitask regression data: Y (n x q) regressed on X (n x p).
struct Dataset {
    Matrix X;
    Matrix Y;

    Index n() const { return X.rows(); }
    Index p() const { return X.cols(); }
    Index q() const { return Y.cols(); }

    /// Throws ConfigError on empty or mismatched shapes, DomainError on non-finite entries.
    void validate() const;

    /// Rows selected by `rows`, in the given order.
    Dataset subset(const std::vector<Index>& rows) const;
};

/// Euclidean norms of the rows of B, recomputed on every call.
Vector row_norms(const Matrix& B);

/// Indices j with a nonzero row b_j.
std::vector<Index> row_support(const Matrix& B);

std::size_t element_support_size(const Matrix& B);

bool all_finite(const Matrix& M);

} // namespace larn
