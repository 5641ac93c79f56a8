#pragma once

// Small model builders shared by the estimator tests and the acceptance run.

#include <vector>

#include "oracles.hpp"
#include "zonopriv/estimator.hpp"

namespace fixture {

using namespace zonopriv;

/// x' = F x, y_i = H_i x.
inline SystemModel linear_model(const Matrix& f, const Matrix& h)
{
    SystemModel m;
    m.n = f.rows();
    m.f = [f](const Vector& x) { return Vector(f * x); };
    m.f_jacobian = [f](const Vector&) { return f; };
    m.f_remainder = zero_remainder(m.n);
    for (Eigen::Index i = 0; i < h.rows(); ++i) {
        const RowVector row = h.row(i);
        m.h.push_back([row](const Vector& x) { return row.dot(x); });
        m.h_jacobian.push_back([row](const Vector&) { return row; });
        m.h_remainder.push_back(zero_remainder(1));
    }
    return m;
}

/// One random optimize_lambda instance: a predicted set, Jacobian rows,
/// per-sensor remainder and measurement zonotopes, and a privacy zonotope.
struct LambdaConfig {
    SystemModel model;
    Zonotope predicted;
    NoiseBounds bounds;
    std::vector<Zonotope> remainders;
    Matrix h;
};

inline LambdaConfig random_lambda_config(Rng& rng)
{
    LambdaConfig c;
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng() % 3);
    const Eigen::Index m = 1 + static_cast<Eigen::Index>(rng() % 8);
    const Eigen::Index gamma = 1 + static_cast<Eigen::Index>(rng() % 10);
    c.h = oracle::random_matrix(m, n, rng);
    c.model = linear_model(Matrix::Identity(n, n), c.h);
    c.predicted = Zonotope(oracle::random_vector(n, rng), oracle::random_matrix(n, gamma, rng));
    c.bounds.process = Zonotope::zero(n);
    for (Eigen::Index i = 0; i < m; ++i) {
        c.bounds.measurement.emplace_back(Vector::Zero(1), oracle::random_matrix(1, 1 + static_cast<Eigen::Index>(rng() % 3), rng, 0.01, 0.5));
        c.remainders.emplace_back(Vector::Zero(1), oracle::random_matrix(1, static_cast<Eigen::Index>(rng() % 2), rng, 0.0, 0.3));
    }
    c.bounds.privacy = Zonotope(Vector::Zero(1), oracle::random_matrix(1, 1, rng, 0.0, 1.0));
    return c;
}

inline double objective(const LambdaConfig& c, const Matrix& lambda, bool private_mode = true)
{
    std::vector<Matrix> rem, meas;
    for (const auto& z : c.remainders)
        rem.push_back(z.generators());
    for (const auto& z : c.bounds.measurement)
        meas.push_back(z.generators());
    return oracle::lambda_objective(c.predicted.generators(), c.h, lambda, rem, c.bounds.privacy->generators(), meas,
        private_mode);
}

/// Central-difference gradient norm of the objective at lambda.
inline double fd_gradient_norm(const LambdaConfig& c, const Matrix& lambda, double step = 1e-6)
{
    double sq = 0.0;
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        Matrix plus = lambda, minus = lambda;
        plus.data()[i] += step;
        minus.data()[i] -= step;
        const double g = (objective(c, plus) - objective(c, minus)) / (2 * step);
        sq += g * g;
    }
    return std::sqrt(sq);
}

/// Smallest objective over `draws` random weight matrices: half uniform on
/// [-2, 2], half perturbations of `around` at random scales.
inline double random_search_min(const LambdaConfig& c, const Matrix& around, int draws, Rng& rng)
{
    double best = std::numeric_limits<double>::infinity();
    for (int t = 0; t < draws; ++t) {
        Matrix lam;
        if (t % 2 == 0) {
            lam = oracle::random_matrix(around.rows(), around.cols(), rng, -2.0, 2.0);
        } else {
            const double scale = std::pow(10.0, rng.uniform(-6.0, 0.0));
            lam = around + scale * oracle::random_matrix(around.rows(), around.cols(), rng);
        }
        best = std::min(best, objective(c, lam));
    }
    return best;
}

} // namespace fixture
