#include <doctest.h>

#include <cmath>
#include <map>
#include <stdexcept>

#include "oracles.hpp"
#include "zonopriv/mechanisms.hpp"

using namespace zonopriv;

namespace {

TruncatedDistribution small_dist(double eps = 0.5)
{
    const NoiseGrid g = build_grid(1.0, 4);
    return TruncatedDistribution(g, {0.05, 0.1, 0.15, 0.2, 0.2, 0.15, 0.1, 0.05}, eps, 0.25);
}

/// Output law of y + phi keyed by the output value in grid-spacing units.
std::map<long, double> output_law(const TruncatedDistribution& dist, double y)
{
    std::map<long, double> law;
    const double h = dist.grid().spacing();
    for (std::size_t l = 0; l < dist.p().size(); ++l)
        law[std::lround((y + dist.grid().phi[l]) / h * 2.0)] += dist.p()[l];
    return law;
}

/// max over unions S of output cells of P(M(y) in S) - e^eps P(M(y2) in S).
double exhaustive_gap(const TruncatedDistribution& dist, double y, double y2)
{
    const auto a = output_law(dist, y);
    const auto b = output_law(dist, y2);
    std::vector<std::pair<double, double>> cells;
    for (const auto& [key, pa] : a)
        cells.emplace_back(pa, b.count(key) ? b.at(key) : 0.0);
    for (const auto& [key, pb] : b)
        if (!a.count(key))
            cells.emplace_back(0.0, pb);
    double best = 0.0;
    const double scale = std::exp(dist.epsilon());
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << cells.size()); ++mask) {
        double lhs = 0.0, rhs = 0.0;
        for (std::size_t i = 0; i < cells.size(); ++i)
            if (mask >> i & 1) {
                lhs += cells[i].first;
                rhs += cells[i].second;
            }
        best = std::max(best, lhs - scale * rhs);
    }
    return best;
}

} // namespace

TEST_CASE("sensitivity bound must be positive")
{
    CHECK_THROWS_AS(SensitivitySpec(PrivacyModel::Local, 0.0), std::invalid_argument);
    CHECK(SensitivitySpec(PrivacyModel::Central, 2.0).s == 2.0);
}

TEST_CASE("centre point mass perturbs by half a bin")
{
    const NoiseGrid g = build_grid(1.0, 500);
    std::vector<double> p(1000, 0.0);
    p[499] = p[500] = 0.5;
    const TruncatedDistribution point(g, p, 0.3, 0.002);
    Rng rng(1);
    for (int i = 0; i < 100; ++i)
        CHECK(std::abs(ldp_perturb(3.0, point, rng) - 3.0) == doctest::Approx(0.5 * g.spacing()).epsilon(1e-9));
}

TEST_CASE("perturbed values stay within the range")
{
    const TruncatedDistribution d = small_dist();
    Rng rng(2);
    for (int i = 0; i < 1000; ++i)
        CHECK(std::abs(ldp_perturb(-4.0, d, rng) + 4.0) <= d.range() + 1e-15);
    Vector y = Vector::LinSpaced(8, 0.0, 7.0);
    for (int i = 0; i < 200; ++i) {
        const ProtectedMeasurements out = cdp_perturb(y, d, rng);
        CHECK((out.values - y - out.noise_applied).cwiseAbs().maxCoeff() <= 1e-15);
        CHECK(out.noise_applied.cwiseAbs().maxCoeff() <= d.range());
    }
    CHECK_THROWS_AS(cdp_perturb(Vector(), d, rng), std::invalid_argument);
}

TEST_CASE("ldp frequency test")
{
    const TruncatedDistribution d = small_dist();
    Rng rng(3);
    std::vector<int> counts(8, 0);
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
        const double noise = ldp_perturb(10.0, d, rng) - 10.0;
        const auto l = static_cast<std::size_t>(std::lround((noise + d.range()) / d.grid().spacing() - 0.5));
        REQUIRE(l < 8);
        ++counts[l];
    }
    for (std::size_t l = 0; l < 8; ++l) {
        const double p = d.p()[l];
        CHECK(std::abs(counts[l] - draws * p) <= 4.5 * std::sqrt(draws * p * (1 - p)));
    }
}

TEST_CASE("cdp coordinates are uncorrelated")
{
    const TruncatedDistribution d = small_dist();
    Rng rng(4);
    const int draws = 100000;
    const Vector y = Vector::Zero(3);
    Matrix cross = Matrix::Zero(3, 3);
    Vector mean = Vector::Zero(3);
    for (int i = 0; i < draws; ++i) {
        const Vector v = cdp_perturb(y, d, rng).noise_applied;
        mean += v;
        cross += v * v.transpose();
    }
    mean /= draws;
    const Matrix cov = cross / draws - mean * mean.transpose();
    const double var = d.variance();
    for (int i = 0; i < 3; ++i) {
        CHECK(cov(i, i) == doctest::Approx(var).epsilon(0.03));
        for (int j = 0; j < i; ++j)
            CHECK(std::abs(cov(i, j)) <= 4.0 * var / std::sqrt(static_cast<double>(draws)));
    }
}

TEST_CASE("ldp streams are per sensor")
{
    const TruncatedDistribution d = small_dist();
    std::vector<Rng> a{Rng::stream(9, 1000), Rng::stream(9, 1001)};
    std::vector<Rng> b{Rng::stream(9, 1000), Rng::stream(9, 1001)};
    const Vector y = Vector::Zero(2);
    const auto first = ldp_perturb_all(y, d, a);
    const auto second = ldp_perturb_all(y, d, b);
    CHECK(first.values == second.values);
    Rng solo = Rng::stream(9, 1001);
    CHECK(second.noise_applied(1) == d.sample(solo));
    std::vector<Rng> one{Rng(0)};
    CHECK_THROWS_AS(ldp_perturb_all(y, d, one), std::invalid_argument);
}

TEST_CASE("privacy noise zonotope bounds every draw")
{
    const NoiseGrid g = build_grid(1.0, 2);
    const TruncatedDistribution unit(g, {0.25, 0.25, 0.25, 0.25}, 0.3, 0.5);
    const Zonotope z = privacy_noise_zonotope(unit);
    CHECK(z.center()(0) == 0.0);
    CHECK(z.generators()(0, 0) == 1.0);
    const IntervalBox hull = interval_hull(z);
    CHECK(hull.lower(0) == -1.0);
    CHECK(hull.upper(0) == 1.0);
    const TruncatedDistribution d = small_dist();
    Rng rng(5);
    for (int i = 0; i < 1000; ++i) {
        Vector v(1);
        v << d.sample(rng);
        CHECK(contains_point(privacy_noise_zonotope(d), v));
    }
}

TEST_CASE("adjacent privacy gap equals the exhaustive union-of-cells maximum")
{
    Rng rng(6);
    for (int t = 0; t < 40; ++t) {
        const int half = 2 + t % 5;
        const NoiseGrid g = build_grid(1.0, half);
        const auto p = oracle::random_symmetric_monotone(half, rng);
        const std::size_t k = 1 + static_cast<std::size_t>(t) % static_cast<std::size_t>(half);
        const double s = static_cast<double>(k) * g.spacing();
        const TruncatedDistribution d(g, p, rng.uniform(0.0, 1.5), s);
        const double gap = adjacent_privacy_gap(d);
        const double up = exhaustive_gap(d, 0.0, s);
        const double down = exhaustive_gap(d, 0.0, -s);
        CHECK(gap == doctest::Approx(std::max(up, down)).epsilon(1e-12));
        CHECK(gap <= d.delta() + 1e-12);
    }
}

TEST_CASE("trained noise dominates random events on a large grid")
{
    const NoiseGrid g = build_grid(3.0, 201);
    TrainingSchedule sched;
    sched.epochs = 400;
    const TruncatedDistribution d = train(g, 0.3, 1.0, sched, 1);
    const std::size_t k = bin_shift(g, 1.0);
    const double scale = std::exp(0.3);
    Rng rng(7);
    for (int t = 0; t < 10000; ++t) {
        const double density = rng.uniform();
        double lhs = 0.0, rhs = 0.0;
        for (std::size_t l = 0; l < d.p().size(); ++l)
            if (rng.uniform() < density) {
                lhs += d.p()[l];
                if (l + k < d.p().size())
                    rhs += d.p()[l + k];
            }
        REQUIRE(lhs <= scale * rhs + d.delta() + 1e-10);
    }
}

TEST_CASE("max adjacent deviation")
{
    std::vector<Vector> stream(3, Vector::Zero(2));
    stream[1] << 3.0, 4.0;
    stream[2] << 3.0, 5.0;
    CHECK(max_adjacent_deviation(stream, PrivacyModel::Central) == doctest::Approx(5.0));
    CHECK(max_adjacent_deviation(stream, PrivacyModel::Local) == doctest::Approx(4.0));
    CHECK(max_adjacent_deviation({}, PrivacyModel::Local) == 0.0);
}
