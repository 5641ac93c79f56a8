#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "oracles.hpp"
#include "zonopriv/zonotope.hpp"

using namespace zonopriv;

namespace {

Matrix mat(std::initializer_list<std::initializer_list<double>> rows)
{
    const auto r = static_cast<Eigen::Index>(rows.size());
    const auto c = static_cast<Eigen::Index>(rows.begin()->size());
    Matrix m(r, c);
    Eigen::Index i = 0;
    for (const auto& row : rows) {
        Eigen::Index j = 0;
        for (double v : row)
            m(i, j++) = v;
        ++i;
    }
    return m;
}

Vector vec(std::initializer_list<double> v)
{
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v)
        out(i++) = x;
    return out;
}

Vector random_beta(Eigen::Index g, Rng& rng) { return oracle::random_vector(g, rng, -1.0, 1.0); }

} // namespace

TEST_CASE("construction validates shape and finiteness")
{
    CHECK_THROWS_AS(Zonotope(vec({1, 2}), Matrix::Zero(3, 1)), std::invalid_argument);
    CHECK_THROWS_AS(Zonotope(vec({NAN}), Matrix::Zero(1, 1)), std::invalid_argument);
    const Zonotope p = Zonotope::point(vec({1, 2}));
    CHECK(p.num_generators() == 0);
    CHECK(p.order() == 0.0);
    CHECK(Zonotope(vec({0, 0}), Matrix::Identity(2, 6)).order() == 3.0);
}

TEST_CASE("linear map examples")
{
    const Zonotope z(vec({1, 2}), Matrix::Identity(2, 2));
    const Zonotope id = linear_map(Matrix::Identity(2, 2), z);
    CHECK(id.center() == z.center());
    CHECK(id.generators() == z.generators());

    const Zonotope s = linear_map(mat({{2}}), Zonotope(vec({3}), mat({{1}})));
    CHECK(s.center()(0) == 6.0);
    CHECK(s.generators()(0, 0) == 2.0);

    const Zonotope proj = linear_map(mat({{1, 1}}), Zonotope(vec({0, 0}), Matrix::Identity(2, 2)));
    CHECK(proj.generators() == mat({{1, 1}}));
    const IntervalBox hull = interval_hull(proj);
    const auto [lo, hi] = oracle::vertex_bounds(Zonotope(vec({0, 0}), Matrix::Identity(2, 2)));
    CHECK(hull.lower(0) == lo(0) + lo(1));
    CHECK(hull.upper(0) == hi(0) + hi(1));
    CHECK(hull.lower(0) == -2.0);
    CHECK(hull.upper(0) == 2.0);

    CHECK_THROWS_AS(linear_map(Matrix::Identity(3, 3), z), std::invalid_argument);
}

TEST_CASE("Minkowski sum and Cartesian product examples")
{
    const Zonotope z2(vec({1, -1}), mat({{1, 2}, {0, 1}}));
    const Zonotope sum0 = minkowski_sum(Zonotope::point(Vector::Zero(2)), z2);
    CHECK(sum0.center() == z2.center());
    CHECK(sum0.generators() == z2.generators());

    const Zonotope s = minkowski_sum(Zonotope(vec({1}), mat({{1}})), Zonotope(vec({2}), mat({{3}})));
    CHECK(s.center() == vec({3}));
    CHECK(s.generators() == mat({{1, 3}}));
    CHECK_THROWS_AS(minkowski_sum(z2, Zonotope(vec({1}), mat({{1}}))), std::invalid_argument);

    const Zonotope p = cartesian_product(Zonotope(vec({1}), mat({{1}})), Zonotope(vec({2}), mat({{1}})));
    CHECK(p.center() == vec({1, 2}));
    CHECK(p.generators() == Matrix::Identity(2, 2));

    const Zonotope empty;
    const Zonotope left = cartesian_product(empty, z2);
    const Zonotope right = cartesian_product(z2, empty);
    CHECK(left.center() == z2.center());
    CHECK(left.generators() == z2.generators());
    CHECK(right.generators() == z2.generators());
}

TEST_CASE("interval hull examples")
{
    const IntervalBox h = interval_hull(Zonotope(vec({0}), mat({{1, 2}})));
    CHECK(h.lower(0) == -3.0);
    CHECK(h.upper(0) == 3.0);
    const IntervalBox pt = interval_hull(Zonotope::point(vec({4, 5})));
    CHECK(pt.lower == vec({4, 5}));
    CHECK(pt.upper == vec({4, 5}));
}

TEST_CASE("reduce_order examples")
{
    const Zonotope z(vec({0, 0}), mat({{1, 0.5, -0.2}, {0.3, 1, 0.1}}));
    const Zonotope same = reduce_order(z, 2);
    CHECK(same.generators() == z.generators());

    Rng rng(3);
    const Zonotope z4 = oracle::random_zonotope(2, 4, rng);
    const Zonotope box = reduce_order(z4, 1);
    REQUIRE(box.num_generators() == 2);
    // Box generators equal the absolute row sums.
    const Vector rows = z4.generators().cwiseAbs().rowwise().sum();
    CHECK(box.generators()(0, 0) == doctest::Approx(rows(0)).epsilon(1e-15));
    CHECK(box.generators()(1, 1) == doctest::Approx(rows(1)).epsilon(1e-15));
    CHECK(box.generators()(0, 1) == 0.0);
    CHECK(box.center() == z4.center());

    CHECK_THROWS_AS(reduce_order(z4, 0), std::invalid_argument);
}

TEST_CASE("reduce_order keeps the highest-ranked generators in column order")
{
    // Ranks ||g||_1 - ||g||_inf: col0 0, col1 1, col2 0.5, col3 1, col4 0.
    const Matrix g = mat({{1, 1, 0.5, 1, 3}, {0, 1, 1, 1, 0}});
    const Zonotope r = reduce_order(Zonotope(vec({0, 0}), g), 2);
    REQUIRE(r.num_generators() == 4);
    // n(q-1) = 2 survivors: the tie of cols 1 and 3 keeps both, in order.
    CHECK(r.generators().col(0) == g.col(1));
    CHECK(r.generators().col(1) == g.col(3));
    CHECK(r.generators()(0, 2) == doctest::Approx(1 + 0.5 + 3));
    CHECK(r.generators()(1, 3) == doctest::Approx(0 + 1 + 0));
}

TEST_CASE("reduce_order drops zero columns once reduction is triggered")
{
    const Matrix g = mat({{1, 0, 0.5}, {0, 0, 1}});
    CHECK(reduce_order(Zonotope(vec({0, 0}), g), 2).num_generators() == 3);
    const Zonotope r = reduce_order(Zonotope(vec({0, 0}), g), 1);
    CHECK(r.num_generators() == 2);
    const Matrix g2 = mat({{1, 0, 0.5, 0, 0}, {0, 0, 1, 0, 2}});
    const Zonotope r2 = reduce_order(Zonotope(vec({0, 0}), g2), 2);
    REQUIRE(r2.num_generators() == 3);
    CHECK(r2.generators().col(0) == g2.col(0));
    CHECK(r2.generators().col(1) == g2.col(2));
    CHECK(r2.generators().col(2) == g2.col(4));
}

TEST_CASE("contains_point examples")
{
    const Zonotope z(vec({0}), mat({{1}}));
    CHECK(contains_point(z, vec({0})));
    CHECK_FALSE(contains_point(z, vec({1.5})));
    CHECK(contains_point(z, vec({1.0})));
    CHECK(generator_radius(z, vec({0.5})) == doctest::Approx(0.5));

    // Degenerate: a segment in the plane.
    const Zonotope seg(vec({0, 0}), mat({{1}, {1}}));
    CHECK(contains_point(seg, vec({0.5, 0.5})));
    CHECK_FALSE(contains_point(seg, vec({0.5, 0.4})));
    CHECK(std::isinf(generator_radius(seg, vec({0.5, 0.4}))));

    Rng rng(17);
    for (int t = 0; t < 50; ++t) {
        const Zonotope r = oracle::random_zonotope(3, 7, rng);
        CHECK(contains_point(r, r.center()));
        CHECK(contains_point(r, r.center() + r.generators() * random_beta(7, rng)));
    }
}

TEST_CASE("contains_point agrees with the facet representation")
{
    Rng rng(23);
    int inside = 0, outside = 0;
    for (int t = 0; t < 300; ++t) {
        const Eigen::Index n = 2 + t % 2;
        const Zonotope z = oracle::random_zonotope(n, 2 + t % 6 + n, rng);
        const IntervalBox hull = interval_hull(z);
        Vector x(n);
        for (Eigen::Index i = 0; i < n; ++i)
            x(i) = rng.uniform(hull.lower(i), hull.upper(i));
        const double viol = oracle::facet_violation(z, x);
        if (std::abs(viol) < 1e-7)
            continue;
        const bool expect = viol < 0.0;
        CHECK(contains_point(z, x) == expect);
        (expect ? inside : outside) += 1;
    }
    CHECK(inside > 20);
    CHECK(outside > 20);
}

TEST_CASE("sample_point examples")
{
    Rng rng(1);
    const Zonotope pt = Zonotope::point(vec({2, 3}));
    for (int i = 0; i < 10; ++i)
        CHECK(sample_point(pt, rng) == vec({2, 3}));

    const Zonotope box(Vector::Zero(2), Matrix::Identity(2, 2));
    const IntervalBox hull = interval_hull(box);
    for (int i = 0; i < 10000; ++i)
        REQUIRE(hull.contains(sample_point(box, rng)));

    // Mean of c + G beta with beta uniform: per coordinate variance sum_j G_ij^2 / 3.
    const Zonotope z(vec({0, 0}), mat({{1, 2, 0.5}, {0, 1, -1}}));
    const int draws = 20000;
    Vector mean = Vector::Zero(2);
    for (int i = 0; i < draws; ++i)
        mean += sample_point(z, rng);
    mean /= draws;
    for (Eigen::Index i = 0; i < 2; ++i) {
        const double sigma = std::sqrt(z.generators().row(i).squaredNorm() / 3.0 / draws);
        CHECK(std::abs(mean(i)) <= 3.0 * sigma);
    }
}

TEST_CASE("linear map composition is exact")
{
    Rng rng(9);
    for (int t = 0; t < 100; ++t) {
        const Zonotope z = oracle::random_zonotope(3, 5, rng);
        // Integer-valued maps keep the products exact in floating point.
        Matrix a(2, 3), b(3, 3);
        for (Eigen::Index i = 0; i < a.size(); ++i)
            a.data()[i] = std::floor(rng.uniform(-3, 3));
        for (Eigen::Index i = 0; i < b.size(); ++i)
            b.data()[i] = std::floor(rng.uniform(-3, 3));
        const Zonotope zi(z.center().array().round().matrix(), z.generators().array().round().matrix());
        const Zonotope lhs = linear_map(a, linear_map(b, zi));
        const Zonotope rhs = linear_map(a * b, zi);
        CHECK(lhs.center() == rhs.center());
        CHECK(lhs.generators() == rhs.generators());
    }
}

TEST_CASE("reduce_order tie-break keeps the lowest column index")
{
    // In one dimension every rank is zero.
    const Zonotope r = reduce_order(Zonotope(vec({0}), mat({{3, 1, 2}})), 2);
    REQUIRE(r.num_generators() == 2);
    CHECK(r.generators()(0, 0) == 3.0);
    CHECK(r.generators()(0, 1) == 3.0);
}
