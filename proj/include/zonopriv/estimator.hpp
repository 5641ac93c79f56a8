#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "zonopriv/zonotope.hpp"

namespace zonopriv {

using RowVector = Eigen::RowVectorXd;

/// Remainder callback: given the interval hull of the set being linearized
/// and the linearization point, return a zonotope bounding the Taylor
/// residual of the map over that box.
using RemainderBound = std::function<Zonotope(const IntervalBox& box, const Vector& linearization_point)>;

/// x_{k+1} = f(x_k) + w_k,  y_k^(i) = h^(i)(x_k) + v_k^(i).
struct SystemModel {
    Eigen::Index n = 0;
    std::function<Vector(const Vector&)> f;
    std::function<Matrix(const Vector&)> f_jacobian;
    RemainderBound f_remainder;
    std::vector<std::function<double(const Vector&)>> h;
    std::vector<std::function<RowVector(const Vector&)>> h_jacobian;
    std::vector<RemainderBound> h_remainder;

    std::size_t sensors() const noexcept { return h.size(); }
    /// Throws std::invalid_argument when callbacks are missing or counts differ.
    void validate() const;
};

/// Zero remainder of the given dimension, for linear maps.
RemainderBound zero_remainder(Eigen::Index dim);

struct NoiseBounds {
    Zonotope process;                  // n-dimensional, centered at 0
    std::vector<Zonotope> measurement; // one 1-D zonotope per sensor
    std::optional<Zonotope> privacy;   // 1-D; absent for the non-private estimator

    void validate(Eigen::Index n, std::size_t sensors) const;
};

enum class EstimatorMode { Private, NonPrivate };

struct StateSetEstimate {
    int step = 0;
    Zonotope predicted;
    Zonotope corrected;
    /// Pre-reduction intersection enclosure <c', G'>.
    Zonotope unreduced;
    Matrix lambda;
    /// Tikhonov damping was needed in the weight solve.
    bool damped = false;
};

/// One estimator trace with ground truth, as written to JSON lines / CSV.
struct EstimateTrace {
    std::vector<StateSetEstimate> steps;
    std::vector<Vector> true_states;
    std::vector<bool> contained;
    std::vector<double> center_error;
};

/// Prediction with first-order linearization at `linearization_point` and
/// the model's Lagrange remainder over the prior's interval hull:
/// c = f(x*) + J (c_prev - x*) + c_L,  G = [J G_prev, G_L, G_w].
Zonotope predict(const SystemModel& model, const Zonotope& prior, const NoiseBounds& bounds,
    const Vector& linearization_point);

/// Per-sensor remainder zonotopes over the predicted set's interval hull.
std::vector<Zonotope> measurement_remainders(
    const SystemModel& model, const Zonotope& predicted, const Vector& linearization_point);

/// Stacked measurement Jacobian rows H (m x n) at x*.
Matrix measurement_jacobian(const SystemModel& model, const Vector& linearization_point);

/// Generator matrix of the intersection enclosure for weights lambda (n x m):
/// [(I - sum_i lambda_i H_i) G, -lambda_i G_L^(i)..., -lambda_i G_p..., -lambda_i G_v^(i)...].
/// Privacy blocks appear only in private mode.
Matrix correction_generators(const Matrix& predicted_generators, const Matrix& h, const Matrix& lambda,
    const std::vector<Zonotope>& remainders, const NoiseBounds& bounds, EstimatorMode mode);

struct LambdaSolution {
    Matrix lambda;
    bool damped = false;
};

/// Frobenius-optimal weights. The objective ||G'(lambda)||_F^2 is a convex
/// quadratic whose rows decouple; each row solves the same m x m system
/// (H P H' + W) with P = G G' and W = diag(||G_L^(i)||^2 + ||G_p||^2 + ||G_v^(i)||^2).
/// A system with condition below 1e-10 gets 1e-9 Tikhonov damping.
LambdaSolution optimize_lambda(const SystemModel& model, const Zonotope& predicted, const NoiseBounds& bounds,
    const std::vector<Zonotope>& remainders, const Vector& linearization_point,
    EstimatorMode mode = EstimatorMode::Private);

/// Correction for given weights; the corrected set is the Girard reduction
/// of the intersection enclosure with the unreduced center kept.
StateSetEstimate correct(const SystemModel& model, const Zonotope& predicted, const Vector& measurements,
    const NoiseBounds& bounds, const Matrix& lambda, const Vector& linearization_point, int reduction_order,
    const std::vector<Zonotope>& remainders, EstimatorMode mode = EstimatorMode::Private);

/// predict -> optimize_lambda -> correct. Prediction linearizes at the prior
/// center, correction at the predicted center.
StateSetEstimate step(const SystemModel& model, const Zonotope& prior, const Vector& measurements,
    const NoiseBounds& bounds, int reduction_order, EstimatorMode mode);

std::vector<StateSetEstimate> run(const SystemModel& model, const Zonotope& initial,
    const std::vector<Vector>& measurement_stream, const NoiseBounds& bounds, int reduction_order,
    EstimatorMode mode);

/// One JSON object per line: {"k", "predicted", "corrected", "lambda", "true_state", "contained"}.
void write_trace_jsonl(std::ostream& os, const EstimateTrace& trace);

/// Columns: k, lower_<i>, upper_<i>, true_<i> per dimension, center_error.
void write_trace_csv(std::ostream& os, const EstimateTrace& trace);

} // namespace zonopriv
