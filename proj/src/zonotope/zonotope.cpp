#include "zonopriv/zonotope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "zonopriv/lp.hpp"

namespace zonopriv {

IntervalBox::IntervalBox(Vector lo, Vector hi)
    : lower(std::move(lo))
    , upper(std::move(hi))
{
    if (lower.size() != upper.size())
        throw std::invalid_argument("IntervalBox: bound dimensions differ");
    for (Eigen::Index i = 0; i < lower.size(); ++i) {
        if (!(lower(i) <= upper(i)))
            throw std::invalid_argument("IntervalBox: lower bound exceeds upper bound");
    }
}

bool IntervalBox::contains(const Vector& x, double tol) const
{
    if (x.size() != dim())
        throw std::invalid_argument("IntervalBox::contains: dimension mismatch");
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (x(i) < lower(i) - tol || x(i) > upper(i) + tol)
            return false;
    }
    return true;
}

Zonotope::Zonotope(Vector center, Matrix generators)
    : center_(std::move(center))
    , generators_(std::move(generators))
{
    if (generators_.rows() != center_.size()) {
        if (generators_.size() == 0)
            generators_.resize(center_.size(), 0);
        else
            throw std::invalid_argument("Zonotope: generator rows do not match center dimension");
    }
    if (!center_.allFinite() || !generators_.allFinite())
        throw std::invalid_argument("Zonotope: non-finite entry");
}

Zonotope Zonotope::point(Vector center)
{
    const Eigen::Index n = center.size();
    return Zonotope(std::move(center), Matrix(n, 0));
}

Zonotope Zonotope::zero(Eigen::Index dim) { return point(Vector::Zero(dim)); }

Zonotope Zonotope::from_box(const IntervalBox& box)
{
    return Zonotope(box.midpoint(), (0.5 * box.width()).asDiagonal().toDenseMatrix());
}

double Zonotope::order() const noexcept
{
    return dim() == 0 ? 0.0 : static_cast<double>(num_generators()) / static_cast<double>(dim());
}

Zonotope linear_map(const Matrix& m, const Zonotope& z)
{
    if (m.cols() != z.dim())
        throw std::invalid_argument("linear_map: matrix columns do not match zonotope dimension");
    return Zonotope(m * z.center(), m * z.generators());
}

Zonotope minkowski_sum(const Zonotope& a, const Zonotope& b)
{
    if (a.dim() != b.dim())
        throw std::invalid_argument("minkowski_sum: dimension mismatch");
    Matrix g(a.dim(), a.num_generators() + b.num_generators());
    g << a.generators(), b.generators();
    return Zonotope(a.center() + b.center(), std::move(g));
}

Zonotope cartesian_product(const Zonotope& a, const Zonotope& b)
{
    Vector c(a.dim() + b.dim());
    c << a.center(), b.center();
    Matrix g = Matrix::Zero(a.dim() + b.dim(), a.num_generators() + b.num_generators());
    g.topLeftCorner(a.dim(), a.num_generators()) = a.generators();
    g.bottomRightCorner(b.dim(), b.num_generators()) = b.generators();
    return Zonotope(std::move(c), std::move(g));
}

Zonotope reduce_order(const Zonotope& z, int order)
{
    if (order < 1)
        throw std::invalid_argument("reduce_order: order must be at least 1");
    const Eigen::Index n = z.dim();
    const Eigen::Index limit = static_cast<Eigen::Index>(order) * n;
    if (z.num_generators() <= limit)
        return z;

    const Matrix& g = z.generators();
    std::vector<Eigen::Index> nonzero;
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
        if ((g.col(j).array() != 0.0).any())
            nonzero.push_back(j);
    }
    if (static_cast<Eigen::Index>(nonzero.size()) <= limit) {
        Matrix kept(n, static_cast<Eigen::Index>(nonzero.size()));
        for (std::size_t k = 0; k < nonzero.size(); ++k)
            kept.col(static_cast<Eigen::Index>(k)) = g.col(nonzero[k]);
        return Zonotope(z.center(), std::move(kept));
    }

    std::vector<double> rank(static_cast<std::size_t>(g.cols()));
    for (Eigen::Index j : nonzero)
        rank[static_cast<std::size_t>(j)] = g.col(j).lpNorm<1>() - g.col(j).lpNorm<Eigen::Infinity>();

    // Boxing order: smallest rank first; among equal ranks the higher column
    // index is boxed first so the lower index survives.
    std::vector<Eigen::Index> by_rank = nonzero;
    std::stable_sort(by_rank.begin(), by_rank.end(), [&](Eigen::Index lhs, Eigen::Index rhs) {
        const double rl = rank[static_cast<std::size_t>(lhs)];
        const double rr = rank[static_cast<std::size_t>(rhs)];
        if (rl != rr)
            return rl < rr;
        return lhs > rhs;
    });

    const std::size_t keep_count = static_cast<std::size_t>(n) * static_cast<std::size_t>(order - 1);
    const std::size_t box_count = by_rank.size() - keep_count;
    std::vector<bool> boxed(static_cast<std::size_t>(g.cols()), false);
    Vector box = Vector::Zero(n);
    for (std::size_t k = 0; k < box_count; ++k) {
        boxed[static_cast<std::size_t>(by_rank[k])] = true;
        box += g.col(by_rank[k]).cwiseAbs();
    }

    Matrix out(n, static_cast<Eigen::Index>(keep_count) + n);
    Eigen::Index col = 0;
    for (Eigen::Index j : nonzero) {
        if (!boxed[static_cast<std::size_t>(j)])
            out.col(col++) = g.col(j);
    }
    out.rightCols(n) = box.asDiagonal().toDenseMatrix();
    return Zonotope(z.center(), std::move(out));
}

IntervalBox interval_hull(const Zonotope& z)
{
    const Vector radius = z.generators().cwiseAbs().rowwise().sum();
    return IntervalBox(z.center() - radius, z.center() + radius);
}

double generator_radius(const Zonotope& z, const Vector& x)
{
    if (x.size() != z.dim())
        throw std::invalid_argument("generator_radius: dimension mismatch");
    const Eigen::Index n = z.dim();
    const Eigen::Index gamma = z.num_generators();
    const Vector r = x - z.center();
    if (gamma == 0)
        return r.lpNorm<Eigen::Infinity>() <= 1e-12 * (1.0 + x.lpNorm<Eigen::Infinity>())
            ? 0.0
            : std::numeric_limits<double>::infinity();

    // beta = p - q with p_j + q_j + s_j = t; minimize t.
    // Columns: [p (gamma), q (gamma), s (gamma), t].
    const Eigen::Index vars = 3 * gamma + 1;
    Matrix a = Matrix::Zero(n + gamma, vars);
    Vector b = Vector::Zero(n + gamma);
    a.block(0, 0, n, gamma) = z.generators();
    a.block(0, gamma, n, gamma) = -z.generators();
    b.head(n) = r;
    for (Eigen::Index j = 0; j < gamma; ++j) {
        a(n + j, j) = 1.0;
        a(n + j, gamma + j) = 1.0;
        a(n + j, 2 * gamma + j) = 1.0;
        a(n + j, 3 * gamma) = -1.0;
    }
    Vector cost = Vector::Zero(vars);
    cost(3 * gamma) = 1.0;

    const lp::Result res = lp::solve_standard_form(a, b, cost);
    if (res.status != lp::Status::Optimal)
        return std::numeric_limits<double>::infinity();
    return res.objective;
}

bool contains_point(const Zonotope& z, const Vector& x, double tol)
{
    if (x.size() != z.dim())
        throw std::invalid_argument("contains_point: dimension mismatch");
    const Vector radius = z.generators().cwiseAbs().rowwise().sum();
    const Vector offset = (x - z.center()).cwiseAbs();
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        // |x_i - c_i| <= ||beta||_inf * rowsum_i, so this rejection is exact.
        if (offset(i) > (1.0 + tol) * radius(i) + 1e-12)
            return false;
    }
    return generator_radius(z, x) <= 1.0 + tol;
}

Vector sample_point(const Zonotope& z, Rng& rng)
{
    Vector beta(z.num_generators());
    for (Eigen::Index j = 0; j < beta.size(); ++j)
        beta(j) = rng.uniform(-1.0, 1.0);
    return z.center() + z.generators() * beta;
}

} // namespace zonopriv
