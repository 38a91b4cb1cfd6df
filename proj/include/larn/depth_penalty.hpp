#pragma once

#include "larn/types.hpp"

#include <string>
#include <string_view>

namespace larn {

/// Reference distribution against which coefficient rows are scored. Only the
/// spherical standard Gaussian is supported, so every evaluation depends on a
/// row only through its Euclidean norm.
enum class ReferenceDistribution { StandardGaussianSpherical };

enum class DepthKind { Halfspace, Projection };

/// Projection depth constant Phi^{-1}(3/4) for a Gaussian reference.
double default_projection_constant();

struct DepthFamily {
    DepthKind kind = DepthKind::Halfspace;
    double c = default_projection_constant(); // used by Projection only

    static DepthFamily halfspace() { return {DepthKind::Halfspace, default_projection_constant()}; }
    static DepthFamily projection(double c = default_projection_constant()) { return {DepthKind::Projection, c}; }
};

/// Inverse-depth transforms:
///   MaxMinus: D^- = max D - D
///   ExpNeg:   D^- = exp(-D) - exp(-max D)
/// Both are shifted so the penalty vanishes at the origin.
enum class InverseTransform { MaxMinus, ExpNeg };

struct PenaltySpec {
    ReferenceDistribution distribution = ReferenceDistribution::StandardGaussianSpherical;
    DepthFamily family;
    InverseTransform transform = InverseTransform::MaxMinus;
    double lambda = 1.0;

    /// False for transforms whose induced p_F may fail to be concave (ExpNeg).
    bool concave() const { return transform == InverseTransform::MaxMinus; }

    /// Throws ConfigError on a non-positive projection constant or negative/NaN lambda.
    void validate() const;
};

/// Depth of any point at distance r from the center: 1 - Phi(r) (halfspace) or
/// c / (c + r) (projection).
double depth(double r, const DepthFamily& family,
             ReferenceDistribution dist = ReferenceDistribution::StandardGaussianSpherical);

/// Depth at the center of symmetry.
double max_depth(const DepthFamily& family);

/// p_F(r): the inverse depth as a function of the row norm. Nondecreasing and bounded.
double inverse_depth(double r, const PenaltySpec& spec);

/// p'_F(r), the group-lasso weight of a row with current norm r. At r = 0 the
/// positive right-limit is returned.
double penalty_weight(double r, const PenaltySpec& spec);

/// lambda * sum_j p_F(||b_j||).
double row_penalty(const Matrix& B, const PenaltySpec& spec);

/// Weights p'_F(||b_j||) for every row of B.
Vector penalty_weights(const Matrix& B, const PenaltySpec& spec);

DepthKind parse_depth_kind(std::string_view name);
InverseTransform parse_transform(std::string_view name);
std::string to_string(DepthKind kind);
std::string to_string(InverseTransform transform);

} // namespace larn
