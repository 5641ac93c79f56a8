#pragma once

#include <Eigen/Dense>

#include "zonopriv/rng.hpp"

namespace zonopriv {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Axis-aligned box [lower, upper].
struct IntervalBox {
    Vector lower;
    Vector upper;

    IntervalBox() = default;
    IntervalBox(Vector lo, Vector hi);

    Eigen::Index dim() const noexcept { return lower.size(); }
    Vector width() const { return upper - lower; }
    Vector midpoint() const { return 0.5 * (lower + upper); }
    bool contains(const Vector& x, double tol = 0.0) const;
};

/// Zonotope <c, G> = { c + G*beta : beta in [-1, 1]^gamma }.
///
/// Immutable value type; every set operation returns a new zonotope. A
/// zonotope may have zero generators (a point) or zero dimension (the
/// neutral factor of the Cartesian product).
class Zonotope {
public:
    Zonotope() = default;

    /// Throws std::invalid_argument when G does not have c.size() rows or
    /// any entry is not finite.
    Zonotope(Vector center, Matrix generators);

    static Zonotope point(Vector center);
    static Zonotope zero(Eigen::Index dim);
    /// Box with one axis-aligned generator per dimension.
    static Zonotope from_box(const IntervalBox& box);

    Eigen::Index dim() const noexcept { return center_.size(); }
    Eigen::Index num_generators() const noexcept { return generators_.cols(); }
    const Vector& center() const noexcept { return center_; }
    const Matrix& generators() const noexcept { return generators_; }

    /// gamma / n; zero for zero-dimensional zonotopes.
    double order() const noexcept;

private:
    Vector center_;
    Matrix generators_;
};

/// <M c, M G>.
Zonotope linear_map(const Matrix& m, const Zonotope& z);

/// <c1 + c2, [G1, G2]>.
Zonotope minkowski_sum(const Zonotope& a, const Zonotope& b);

/// Block-diagonal product; dimension n1 + n2.
Zonotope cartesian_product(const Zonotope& a, const Zonotope& b);

/// Girard order reduction to at most order * n generators. The returned set
/// contains z. Generators are ranked by ||g||_1 - ||g||_inf; the lowest
/// ranked are replaced by their interval hull, keeping n * (order - 1)
/// originals in their original column order followed by n box generators.
/// Equal ranks keep the lower column index. All-zero columns are dropped
/// before ranking. Throws std::invalid_argument for order < 1.
Zonotope reduce_order(const Zonotope& z, int order);

/// Tight axis-aligned bounds: c -/+ rowsum|G|.
IntervalBox interval_hull(const Zonotope& z);

/// Smallest ||beta||_inf with c + G*beta = x, or +infinity when x - c is not
/// in the range of G. Solved exactly as a linear program.
double generator_radius(const Zonotope& z, const Vector& x);

/// True iff x lies in z, i.e. generator_radius(z, x) <= 1 + tol. Points
/// outside the interval hull are rejected before the LP is set up.
bool contains_point(const Zonotope& z, const Vector& x, double tol = 1e-9);

/// c + G*beta with beta uniform on [-1, 1]^gamma.
Vector sample_point(const Zonotope& z, Rng& rng);

} // namespace zonopriv
