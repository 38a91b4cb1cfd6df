#include "larn/depth_penalty.hpp"

#include "larn/errors.hpp"
#include "larn/normal.hpp"

#include <cmath>

namespace larn {

namespace {

void check_radius(double r)
{
    if (!std::isfinite(r)) throw DomainError("depth: non-finite radius");
    if (r < 0.0) throw DomainError("depth: negative radius");
}

// d/dr of the depth, which is nonpositive.
double depth_derivative(double r, const DepthFamily& family)
{
    switch (family.kind) {
    case DepthKind::Halfspace:
        return -normal::pdf(r);
    case DepthKind::Projection: {
        const double s = family.c + r;
        return -family.c / (s * s);
    }
    }
    return 0.0;
}

} // namespace

double default_projection_constant()
{
    static const double c = normal::quantile(0.75);
    return c;
}

void PenaltySpec::validate() const
{
    if (family.kind == DepthKind::Projection && !(family.c > 0.0 && std::isfinite(family.c))) {
        throw ConfigError("penalty: projection constant must be positive and finite");
    }
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw ConfigError("penalty: lambda must be a nonnegative finite number");
    }
}

double depth(double r, const DepthFamily& family, ReferenceDistribution)
{
    check_radius(r);
    switch (family.kind) {
    case DepthKind::Halfspace:
        return normal::ccdf(r);
    case DepthKind::Projection:
        return family.c / (family.c + r);
    }
    return 0.0;
}

double max_depth(const DepthFamily& family)
{
    return family.kind == DepthKind::Halfspace ? 0.5 : 1.0;
}

double inverse_depth(double r, const PenaltySpec& spec)
{
    check_radius(r);
    const DepthFamily& fam = spec.family;
    switch (spec.transform) {
    case InverseTransform::MaxMinus:
        // Closed forms avoid the cancellation in max D - D for small r.
        if (fam.kind == DepthKind::Halfspace) return 0.5 * std::erf(r / std::sqrt(2.0));
        return r / (fam.c + r);
    case InverseTransform::ExpNeg:
        return std::exp(-depth(r, fam, spec.distribution)) - std::exp(-max_depth(fam));
    }
    return 0.0;
}

double penalty_weight(double r, const PenaltySpec& spec)
{
    check_radius(r);
    const double slope = -depth_derivative(r, spec.family);
    switch (spec.transform) {
    case InverseTransform::MaxMinus:
        return slope;
    case InverseTransform::ExpNeg:
        return std::exp(-depth(r, spec.family, spec.distribution)) * slope;
    }
    return 0.0;
}

double row_penalty(const Matrix& B, const PenaltySpec& spec)
{
    if (!B.allFinite()) throw DomainError("row_penalty: non-finite coefficients");
    if (spec.lambda == 0.0) return 0.0;
    double total = 0.0;
    for (Index j = 0; j < B.rows(); ++j) total += inverse_depth(B.row(j).norm(), spec);
    return spec.lambda * total;
}

Vector penalty_weights(const Matrix& B, const PenaltySpec& spec)
{
    Vector w(B.rows());
    for (Index j = 0; j < B.rows(); ++j) w[j] = penalty_weight(B.row(j).norm(), spec);
    return w;
}

DepthKind parse_depth_kind(std::string_view name)
{
    if (name == "halfspace") return DepthKind::Halfspace;
    if (name == "projection") return DepthKind::Projection;
    throw ConfigError("unknown depth '" + std::string(name) + "' (expected halfspace or projection)");
}

InverseTransform parse_transform(std::string_view name)
{
    if (name == "max") return InverseTransform::MaxMinus;
    if (name == "exp") return InverseTransform::ExpNeg;
    throw ConfigError("unknown transform '" + std::string(name) + "' (expected max or exp)");
}

std::string to_string(DepthKind kind)
{
    return kind == DepthKind::Halfspace ? "halfspace" : "projection";
}

std::string to_string(InverseTransform transform)
{
    return transform == InverseTransform::MaxMinus ? "max" : "exp";
}

} // namespace larn
