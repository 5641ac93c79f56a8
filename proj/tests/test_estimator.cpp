#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "zonopriv/estimator.hpp"
#include "zonopriv/json_io.hpp"

using namespace zonopriv;

namespace {

Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

Zonotope seg(double c, double g) { return Zonotope(Vector::Constant(1, c), scalar(g)); }

NoiseBounds scalar_bounds(double w, double v, std::optional<double> p = std::nullopt)
{
    NoiseBounds b;
    b.process = w == 0.0 ? Zonotope::zero(1) : seg(0.0, w);
    b.measurement = {seg(0.0, v)};
    if (p)
        b.privacy = seg(0.0, *p);
    return b;
}

/// f(x) = x^2 in one dimension with the exact remainder (x - x*)^2 in [0, r^2].
SystemModel square_model()
{
    SystemModel m;
    m.n = 1;
    m.f = [](const Vector& x) { return Vector(x.array().square().matrix()); };
    m.f_jacobian = [](const Vector& x) { return Matrix(scalar(2.0 * x(0))); };
    m.f_remainder = [](const IntervalBox& box, const Vector& xs) {
        const double r = std::max(std::abs(box.upper(0) - xs(0)), std::abs(box.lower(0) - xs(0)));
        return seg(0.5 * r * r, 0.5 * r * r);
    };
    m.h.push_back([](const Vector& x) { return x(0); });
    m.h_jacobian.push_back([](const Vector&) { return RowVector::Ones(1); });
    m.h_remainder.push_back(zero_remainder(1));
    return m;
}

} // namespace

TEST_CASE("model and bounds validation")
{
    SystemModel m = fixture::linear_model(Matrix::Identity(2, 2), Matrix::Identity(2, 2));
    CHECK_NOTHROW(m.validate());
    m.h_jacobian.pop_back();
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);

    NoiseBounds b;
    b.process = Zonotope::zero(2);
    b.measurement = {seg(0, 1), seg(0, 1)};
    CHECK_NOTHROW(b.validate(2, 2));
    CHECK_THROWS_AS(b.validate(2, 3), std::invalid_argument);
    b.measurement[0] = seg(1.0, 1.0);
    CHECK_THROWS_AS(b.validate(2, 2), std::invalid_argument);
}

TEST_CASE("predict with identity dynamics and no process noise keeps the prior")
{
    const SystemModel m = fixture::linear_model(Matrix::Identity(2, 2), Matrix::Identity(1, 2));
    NoiseBounds b;
    b.process = Zonotope::zero(2);
    b.measurement = {seg(0, 0.1)};
    Rng rng(1);
    const Zonotope prior = oracle::random_zonotope(2, 3, rng);
    const Zonotope pred = predict(m, prior, b, prior.center());
    CHECK(pred.center() == prior.center());
    CHECK(pred.generators() == prior.generators());
}

TEST_CASE("predict with linear dynamics")
{
    Matrix f(2, 2);
    f << 0.9920, -0.1247, 0.1247, 0.9920;
    const SystemModel m = fixture::linear_model(f, Matrix::Identity(1, 2));
    NoiseBounds b;
    b.process = Zonotope(Vector::Zero(2), 0.5 * Matrix::Identity(2, 2));
    b.measurement = {seg(0, 0.1)};
    Rng rng(2);
    const Zonotope prior = oracle::random_zonotope(2, 4, rng);
    // The linear map is exact for any linearization point.
    const Zonotope pred = predict(m, prior, b, prior.center() + Vector::Constant(2, 3.0));
    CHECK((pred.center() - f * prior.center()).norm() < 1e-12);
    REQUIRE(pred.num_generators() == 6);
    CHECK((pred.generators().leftCols(4) - f * prior.generators()).norm() < 1e-14);
    CHECK(pred.generators().rightCols(2) == b.process.generators());
}

TEST_CASE("predict encloses the image of a nonlinear map")
{
    const SystemModel m = square_model();
    const NoiseBounds b = scalar_bounds(0.1, 0.1);
    Rng rng(3);
    const Zonotope prior(Vector::Constant(1, 1.5), Matrix::Constant(1, 2, 0.4));
    const Zonotope pred = predict(m, prior, b, prior.center());
    for (int i = 0; i < 1000; ++i) {
        const Vector x = sample_point(prior, rng);
        const Vector w = sample_point(b.process, rng);
        CHECK(contains_point(pred, Vector(m.f(x) + w)));
    }
}

TEST_CASE("scalar optimal weight")
{
    const double g = 0.8, v = 0.3;
    const SystemModel m = fixture::linear_model(scalar(1.0), scalar(1.0));
    const NoiseBounds b = scalar_bounds(0.0, v);
    const Zonotope pred = seg(2.0, g);
    const std::vector<Zonotope> rem{Zonotope::zero(1)};
    const LambdaSolution sol = optimize_lambda(m, pred, b, rem, pred.center(), EstimatorMode::NonPrivate);
    const double expect = g * g / (g * g + v * v);
    CHECK(sol.lambda(0, 0) == doctest::Approx(expect).epsilon(1e-14));
    CHECK_FALSE(sol.damped);

    // The centre moves toward a noiseless measurement by the factor lambda*.
    const double y = 2.5;
    const StateSetEstimate est = correct(m, pred, Vector::Constant(1, y), b, sol.lambda, pred.center(), 5, rem,
        EstimatorMode::NonPrivate);
    CHECK(est.unreduced.center()(0) == doctest::Approx(2.0 + expect * (y - 2.0)).epsilon(1e-14));
    CHECK(est.unreduced.generators()(0, 0) == doctest::Approx((1 - expect) * g));
    CHECK(est.unreduced.generators()(0, 1) == doctest::Approx(-expect * v));
}

TEST_CASE("point prediction gives zero weights")
{
    const SystemModel m = fixture::linear_model(Matrix::Identity(2, 2), Matrix::Identity(2, 2));
    NoiseBounds b;
    b.process = Zonotope::zero(2);
    b.measurement = {seg(0, 0.3), seg(0, 0.1)};
    b.privacy = seg(0, 1.0);
    const Zonotope pred = Zonotope::point(Vector::Ones(2));
    const std::vector<Zonotope> rem{Zonotope::zero(1), Zonotope::zero(1)};
    const LambdaSolution sol = optimize_lambda(m, pred, b, rem, pred.center());
    CHECK(sol.lambda.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("singular weight systems are damped")
{
    const SystemModel m = fixture::linear_model(Matrix::Identity(1, 1), Matrix::Ones(2, 1));
    NoiseBounds b;
    b.process = Zonotope::zero(1);
    b.measurement = {Zonotope::zero(1), Zonotope::zero(1)};
    const Zonotope pred = seg(0.0, 1.0);
    const std::vector<Zonotope> rem{Zonotope::zero(1), Zonotope::zero(1)};
    const LambdaSolution sol = optimize_lambda(m, pred, b, rem, pred.center(), EstimatorMode::NonPrivate);
    CHECK(sol.damped);
    CHECK(sol.lambda.allFinite());
    CHECK(sol.lambda.sum() == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("closed-form weights match the block objective")
{
    Rng rng(4);
    for (int t = 0; t < 30; ++t) {
        const fixture::LambdaConfig c = fixture::random_lambda_config(rng);
        const LambdaSolution sol = optimize_lambda(c.model, c.predicted, c.bounds, c.remainders, c.predicted.center());
        const double at_opt = fixture::objective(c, sol.lambda);
        CHECK(at_opt <= fixture::objective(c, Matrix::Zero(sol.lambda.rows(), sol.lambda.cols())) + 1e-12);
        CHECK(at_opt <= fixture::random_search_min(c, sol.lambda, 1000, rng) + 1e-9);
        CHECK(fixture::fd_gradient_norm(c, sol.lambda) <= 1e-6);

        // The library's generator matrix has the same Frobenius norm.
        const Matrix gens =
            correction_generators(c.predicted.generators(), c.h, sol.lambda, c.remainders, c.bounds, EstimatorMode::Private);
        CHECK(gens.squaredNorm() == doctest::Approx(at_opt).epsilon(1e-12));
    }
}

TEST_CASE("zero weights leave the predicted set")
{
    Rng rng(5);
    const fixture::LambdaConfig c = fixture::random_lambda_config(rng);
    const Eigen::Index n = c.predicted.dim();
    const auto m = static_cast<Eigen::Index>(c.remainders.size());
    const Vector y = oracle::random_vector(m, rng, -10.0, 10.0);
    const StateSetEstimate est =
        correct(c.model, c.predicted, y, c.bounds, Matrix::Zero(n, m), c.predicted.center(), 5, c.remainders);
    CHECK(est.unreduced.center() == c.predicted.center());
    CHECK(est.unreduced.generators() == c.predicted.generators());
}

TEST_CASE("privacy adds one column per sensor")
{
    Rng rng(6);
    const fixture::LambdaConfig c = fixture::random_lambda_config(rng);
    const Matrix lam = oracle::random_matrix(c.predicted.dim(), static_cast<Eigen::Index>(c.remainders.size()), rng);
    const Matrix on = correction_generators(c.predicted.generators(), c.h, lam, c.remainders, c.bounds, EstimatorMode::Private);
    const Matrix off =
        correction_generators(c.predicted.generators(), c.h, lam, c.remainders, c.bounds, EstimatorMode::NonPrivate);
    CHECK(on.cols() == off.cols() + static_cast<Eigen::Index>(c.remainders.size()));

    NoiseBounds missing = c.bounds;
    missing.privacy.reset();
    CHECK_THROWS(correction_generators(c.predicted.generators(), c.h, lam, c.remainders, missing, EstimatorMode::Private));
}

TEST_CASE("nonprivate mode equals private mode with a zero privacy zonotope")
{
    Matrix f(2, 2);
    f << 0.9920, -0.1247, 0.1247, 0.9920;
    Matrix h(4, 2);
    h << 1, 0, 0, 1, 1, 0, 0, 1;
    const SystemModel m = fixture::linear_model(f, h);
    NoiseBounds b;
    b.process = Zonotope(Vector::Zero(2), 0.5 * Matrix::Identity(2, 2));
    for (int i = 0; i < 4; ++i)
        b.measurement.push_back(seg(0.0, 0.01 * (i + 1)));
    NoiseBounds zero_priv = b;
    zero_priv.privacy = Zonotope(Vector::Zero(1), Matrix::Zero(1, 1));
    Rng rng(7);
    std::vector<Vector> ys;
    for (int k = 0; k < 30; ++k)
        ys.push_back(oracle::random_vector(4, rng, -1.0, 1.0));
    const Zonotope init(Vector::Zero(2), 5.0 * Matrix::Identity(2, 2));
    const auto a = run(m, init, ys, b, 5, EstimatorMode::NonPrivate);
    const auto p = run(m, init, ys, zero_priv, 5, EstimatorMode::Private);
    REQUIRE(a.size() == p.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].corrected.center() == p[k].corrected.center());
        CHECK(a[k].corrected.generators() == p[k].corrected.generators());
        CHECK(a[k].lambda == p[k].lambda);
    }
}

TEST_CASE("static state with exact measurements narrows monotonically")
{
    const SystemModel m = fixture::linear_model(scalar(1.0), scalar(1.0));
    const NoiseBounds b = scalar_bounds(0.0, 0.2);
    const double truth = 0.7;
    std::vector<Vector> ys(40, Vector::Constant(1, truth));
    const auto trace = run(m, seg(0.0, 3.0), ys, b, 5, EstimatorMode::NonPrivate);
    double prev = 6.0;
    for (const auto& est : trace) {
        const double width = interval_hull(est.corrected).width()(0);
        CHECK(width <= prev + 1e-12);
        CHECK(contains_point(est.corrected, Vector::Constant(1, truth)));
        prev = width;
    }
    CHECK(prev < 1.0);
}

TEST_CASE("run over an empty stream and trace length")
{
    const SystemModel m = fixture::linear_model(scalar(1.0), scalar(1.0));
    const NoiseBounds b = scalar_bounds(0.1, 0.2);
    CHECK(run(m, seg(0, 1), {}, b, 5, EstimatorMode::NonPrivate).empty());
    const std::vector<Vector> ys(17, Vector::Zero(1));
    const auto trace = run(m, seg(0, 1), ys, b, 5, EstimatorMode::NonPrivate);
    REQUIRE(trace.size() == 17);
    CHECK(trace.front().step == 1);
    CHECK(trace.back().step == 17);
}

TEST_CASE("linear system containment with noise drawn from its sets")
{
    Matrix f(2, 2);
    f << 0.9920, -0.1247, 0.1247, 0.9920;
    Matrix h(8, 2);
    for (int i = 0; i < 8; ++i)
        h.row(i) = i % 2 == 0 ? RowVector::Unit(2, 0) : RowVector::Unit(2, 1);
    const SystemModel m = fixture::linear_model(f, h);
    NoiseBounds b;
    b.process = Zonotope(Vector::Zero(2), 0.5 * Matrix::Identity(2, 2));
    for (int i = 0; i < 8; ++i)
        b.measurement.emplace_back(Vector::Zero(1), (Matrix(1, 2) << 0.01, 0.02).finished());
    b.privacy = seg(0.0, 2.0);
    Rng rng(8);
    Vector x(2);
    x << 50.0, 1.0;
    Zonotope est(Vector::Constant(2, 0.0) + x + Vector::Constant(2, 1.0), 5.0 * Matrix::Identity(2, 2));
    for (int k = 0; k < 100; ++k) {
        x = f * x + sample_point(b.process, rng);
        Vector y = h * x;
        for (int i = 0; i < 8; ++i)
            y(i) += sample_point(b.measurement[static_cast<std::size_t>(i)], rng)(0) + rng.uniform(-2.0, 2.0);
        const StateSetEstimate s = step(m, est, y, b, 5, EstimatorMode::Private);
        REQUIRE(contains_point(s.corrected, x));
        CHECK(s.corrected.num_generators() <= 10);
        est = s.corrected;
    }
}

TEST_CASE("reduction inside the pipeline encloses the unreduced set")
{
    Rng rng(9);
    for (int t = 0; t < 5; ++t) {
        const fixture::LambdaConfig c = fixture::random_lambda_config(rng);
        const auto m = static_cast<Eigen::Index>(c.remainders.size());
        const LambdaSolution sol = optimize_lambda(c.model, c.predicted, c.bounds, c.remainders, c.predicted.center());
        const StateSetEstimate est = correct(c.model, c.predicted, oracle::random_vector(m, rng), c.bounds, sol.lambda,
            c.predicted.center(), 1, c.remainders);
        for (int i = 0; i < 1000; ++i)
            REQUIRE(contains_point(est.corrected, sample_point(est.unreduced, rng)));
    }
}

TEST_CASE("trace writers")
{
    const SystemModel m = fixture::linear_model(scalar(1.0), scalar(1.0));
    const NoiseBounds b = scalar_bounds(0.1, 0.2);
    EstimateTrace trace;
    trace.steps = run(m, seg(0, 1), std::vector<Vector>(2, Vector::Zero(1)), b, 5, EstimatorMode::NonPrivate);
    trace.true_states = {Vector::Zero(1), Vector::Zero(1)};
    trace.contained = {true, true};
    trace.center_error = {0.0, 0.0};

    std::ostringstream jl;
    write_trace_jsonl(jl, trace);
    std::istringstream lines(jl.str());
    std::string line;
    int count = 0;
    while (std::getline(lines, line)) {
        const json j = json::parse(line);
        CHECK(j.at("k") == count + 1);
        CHECK(j.contains("predicted"));
        CHECK(j.contains("corrected"));
        CHECK(j.contains("lambda"));
        CHECK(j.at("contained") == true);
        ++count;
    }
    CHECK(count == 2);

    std::ostringstream csv;
    write_trace_csv(csv, trace);
    CHECK(csv.str().rfind("k,lower_0,upper_0,true_0,center_error\n", 0) == 0);
    std::ostringstream empty;
    write_trace_csv(empty, EstimateTrace{});
    CHECK(empty.str() == "k,center_error\n");
}
