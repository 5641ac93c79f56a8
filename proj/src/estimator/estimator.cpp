#include "zonopriv/estimator.hpp"

#include <stdexcept>

namespace zonopriv {

void SystemModel::validate() const
{
    if (n < 1)
        throw std::invalid_argument("SystemModel: state dimension must be positive");
    if (!f || !f_jacobian || !f_remainder)
        throw std::invalid_argument("SystemModel: missing state map callbacks");
    if (h.empty() || h_jacobian.size() != h.size() || h_remainder.size() != h.size())
        throw std::invalid_argument("SystemModel: measurement callbacks must be given for every sensor");
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (!h[i] || !h_jacobian[i] || !h_remainder[i])
            throw std::invalid_argument("SystemModel: empty measurement callback");
    }
}

RemainderBound zero_remainder(Eigen::Index dim)
{
    return [dim](const IntervalBox&, const Vector&) { return Zonotope::zero(dim); };
}

void NoiseBounds::validate(Eigen::Index n, std::size_t sensors) const
{
    if (process.dim() != n)
        throw std::invalid_argument("NoiseBounds: process noise dimension mismatch");
    if (!process.center().isZero(0.0))
        throw std::invalid_argument("NoiseBounds: process noise must be centered at zero");
    if (measurement.size() != sensors)
        throw std::invalid_argument("NoiseBounds: need one measurement noise zonotope per sensor");
    for (const auto& v : measurement) {
        if (v.dim() != 1 || !v.center().isZero(0.0))
            throw std::invalid_argument("NoiseBounds: measurement noise must be 1-D and centered at zero");
    }
    if (privacy && (privacy->dim() != 1 || !privacy->center().isZero(0.0)))
        throw std::invalid_argument("NoiseBounds: privacy noise must be 1-D and centered at zero");
}

Zonotope predict(const SystemModel& model, const Zonotope& prior, const NoiseBounds& bounds,
    const Vector& linearization_point)
{
    if (prior.dim() != model.n || linearization_point.size() != model.n || bounds.process.dim() != model.n)
        throw std::invalid_argument("predict: dimension mismatch");
    const Matrix jac = model.f_jacobian(linearization_point);
    const Zonotope rem = model.f_remainder(interval_hull(prior), linearization_point);
    if (jac.rows() != model.n || jac.cols() != model.n || rem.dim() != model.n)
        throw std::invalid_argument("predict: model callbacks returned wrong dimensions");

    Vector center = model.f(linearization_point) + jac * (prior.center() - linearization_point) + rem.center();
    Matrix gens(model.n, prior.num_generators() + rem.num_generators() + bounds.process.num_generators());
    gens << jac * prior.generators(), rem.generators(), bounds.process.generators();
    return Zonotope(std::move(center), std::move(gens));
}

std::vector<Zonotope> measurement_remainders(
    const SystemModel& model, const Zonotope& predicted, const Vector& linearization_point)
{
    const IntervalBox box = interval_hull(predicted);
    std::vector<Zonotope> out;
    out.reserve(model.sensors());
    for (const auto& bound : model.h_remainder) {
        Zonotope r = bound(box, linearization_point);
        if (r.dim() != 1)
            throw std::invalid_argument("measurement_remainders: remainder must be 1-D");
        out.push_back(std::move(r));
    }
    return out;
}

Matrix measurement_jacobian(const SystemModel& model, const Vector& linearization_point)
{
    Matrix h(static_cast<Eigen::Index>(model.sensors()), model.n);
    for (std::size_t i = 0; i < model.sensors(); ++i) {
        const RowVector row = model.h_jacobian[i](linearization_point);
        if (row.size() != model.n)
            throw std::invalid_argument("measurement_jacobian: Jacobian row has wrong length");
        h.row(static_cast<Eigen::Index>(i)) = row;
    }
    return h;
}

namespace {

const Matrix& privacy_generators(const NoiseBounds& bounds, EstimatorMode mode)
{
    static const Matrix empty(1, 0);
    if (mode == EstimatorMode::NonPrivate)
        return empty;
    if (!bounds.privacy)
        throw std::invalid_argument("private estimation needs a privacy noise zonotope");
    return bounds.privacy->generators();
}

Matrix drop_zero_columns(const Matrix& g)
{
    Eigen::Index kept = 0;
    for (Eigen::Index j = 0; j < g.cols(); ++j)
        kept += (g.col(j).array() != 0.0).any() ? 1 : 0;
    if (kept == g.cols())
        return g;
    Matrix out(g.rows(), kept);
    Eigen::Index c = 0;
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
        if ((g.col(j).array() != 0.0).any())
            out.col(c++) = g.col(j);
    }
    return out;
}

} // namespace

Matrix correction_generators(const Matrix& predicted_generators, const Matrix& h, const Matrix& lambda,
    const std::vector<Zonotope>& remainders, const NoiseBounds& bounds, EstimatorMode mode)
{
    const Eigen::Index n = predicted_generators.rows();
    const auto m = static_cast<Eigen::Index>(remainders.size());
    if (lambda.rows() != n || lambda.cols() != m || h.rows() != m || h.cols() != n ||
        static_cast<Eigen::Index>(bounds.measurement.size()) != m)
        throw std::invalid_argument("correction_generators: dimension mismatch");
    const Matrix& gp = privacy_generators(bounds, mode);

    Eigen::Index cols = predicted_generators.cols();
    for (Eigen::Index i = 0; i < m; ++i)
        cols += remainders[static_cast<std::size_t>(i)].num_generators() + gp.cols() +
            bounds.measurement[static_cast<std::size_t>(i)].num_generators();

    Matrix out(n, cols);
    Eigen::Index c = 0;
    const Matrix shrink = Matrix::Identity(n, n) - lambda * h;
    out.leftCols(predicted_generators.cols()) = shrink * predicted_generators;
    c += predicted_generators.cols();
    auto append = [&](Eigen::Index i, const Matrix& row_gens) {
        out.middleCols(c, row_gens.cols()) = -lambda.col(i) * row_gens;
        c += row_gens.cols();
    };
    for (Eigen::Index i = 0; i < m; ++i)
        append(i, remainders[static_cast<std::size_t>(i)].generators());
    for (Eigen::Index i = 0; i < m; ++i)
        append(i, gp);
    for (Eigen::Index i = 0; i < m; ++i)
        append(i, bounds.measurement[static_cast<std::size_t>(i)].generators());
    return out;
}

LambdaSolution optimize_lambda(const SystemModel& model, const Zonotope& predicted, const NoiseBounds& bounds,
    const std::vector<Zonotope>& remainders, const Vector& linearization_point, EstimatorMode mode)
{
    const auto m = static_cast<Eigen::Index>(model.sensors());
    if (static_cast<Eigen::Index>(remainders.size()) != m)
        throw std::invalid_argument("optimize_lambda: need one remainder per sensor");
    const Matrix h = measurement_jacobian(model, linearization_point);
    const Matrix& gp = privacy_generators(bounds, mode);
    const double gp_sq = gp.squaredNorm();

    Vector w(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        w(i) = remainders[idx].generators().squaredNorm() + gp_sq + bounds.measurement[idx].generators().squaredNorm();
    }

    const Matrix& g = predicted.generators();
    const Matrix hg = h * g;                 // m x gamma
    const Matrix rhs = hg * g.transpose();   // H P, m x n
    Matrix system = hg * hg.transpose();     // H P H'
    system.diagonal() += w;

    LambdaSolution sol;
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(system, Eigen::EigenvaluesOnly);
    const double max_eig = eig.eigenvalues().cwiseAbs().maxCoeff();
    const double min_eig = eig.eigenvalues().minCoeff();
    if (!(max_eig > 0.0) || min_eig <= 1e-10 * max_eig) {
        system.diagonal().array() += 1e-9;
        sol.damped = true;
    }
    sol.lambda = system.ldlt().solve(rhs).transpose();
    return sol;
}

StateSetEstimate correct(const SystemModel& model, const Zonotope& predicted, const Vector& measurements,
    const NoiseBounds& bounds, const Matrix& lambda, const Vector& linearization_point, int reduction_order,
    const std::vector<Zonotope>& remainders, EstimatorMode mode)
{
    const auto m = static_cast<Eigen::Index>(model.sensors());
    if (measurements.size() != m || predicted.dim() != model.n || linearization_point.size() != model.n)
        throw std::invalid_argument("correct: dimension mismatch");
    const Matrix h = measurement_jacobian(model, linearization_point);

    Vector center = predicted.center();
    const Vector offset = predicted.center() - linearization_point;
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        const double innovation = measurements(i) - model.h[idx](linearization_point) - h.row(i).dot(offset) -
            remainders[idx].center()(0);
        center += lambda.col(i) * innovation;
    }

    Matrix gens = drop_zero_columns(
        correction_generators(predicted.generators(), h, lambda, remainders, bounds, mode));

    StateSetEstimate est;
    est.predicted = predicted;
    est.unreduced = Zonotope(std::move(center), std::move(gens));
    est.corrected = reduce_order(est.unreduced, reduction_order);
    est.lambda = lambda;
    return est;
}

StateSetEstimate step(const SystemModel& model, const Zonotope& prior, const Vector& measurements,
    const NoiseBounds& bounds, int reduction_order, EstimatorMode mode)
{
    const Zonotope predicted = predict(model, prior, bounds, prior.center());
    const Vector& x_star = predicted.center();
    const std::vector<Zonotope> remainders = measurement_remainders(model, predicted, x_star);
    const LambdaSolution weights = optimize_lambda(model, predicted, bounds, remainders, x_star, mode);
    StateSetEstimate est =
        correct(model, predicted, measurements, bounds, weights.lambda, x_star, reduction_order, remainders, mode);
    est.damped = weights.damped;
    return est;
}

std::vector<StateSetEstimate> run(const SystemModel& model, const Zonotope& initial,
    const std::vector<Vector>& measurement_stream, const NoiseBounds& bounds, int reduction_order,
    EstimatorMode mode)
{
    model.validate();
    bounds.validate(model.n, model.sensors());
    std::vector<StateSetEstimate> trace;
    trace.reserve(measurement_stream.size());
    Zonotope prior = initial;
    for (std::size_t k = 0; k < measurement_stream.size(); ++k) {
        StateSetEstimate est = step(model, prior, measurement_stream[k], bounds, reduction_order, mode);
        est.step = static_cast<int>(k) + 1;
        prior = est.corrected;
        trace.push_back(std::move(est));
    }
    return trace;
}

} // namespace zonopriv
