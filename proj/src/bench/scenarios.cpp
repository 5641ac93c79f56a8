#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "zonopriv/bench.hpp"

namespace zonopriv {

void Scenario::validate() const
{
    const Eigen::Index n = model.n;
    if (n < 1 || initial_true_state.size() != n || initial_set.dim() != n)
        throw std::invalid_argument("Scenario: state dimension mismatch");
    if (horizon < 0)
        throw std::invalid_argument("Scenario: horizon must be non-negative");
    if (kind == ScenarioKind::Range && anchors.size() != model.sensors())
        throw std::invalid_argument("Scenario: anchor count must equal the sensor count");
    if (kind == ScenarioKind::Linear &&
        (dynamics.rows() != n || dynamics.cols() != n || measurement_rows.rows() != static_cast<Eigen::Index>(model.sensors())))
        throw std::invalid_argument("Scenario: linear model matrices have wrong shape");
    model.validate();
    bounds.validate(n, model.sensors());
    if (!contains_point(initial_set, initial_true_state))
        throw std::invalid_argument("Scenario: initial true state is outside the initial set");
    if (trajectory.source == TrajectorySpec::Source::Synthetic && trajectory.region.dim() != n)
        throw std::invalid_argument("Scenario: trajectory region dimension mismatch");
}

RangeRemainder range_remainder(const Vector& anchor, const IntervalBox& box, const Vector& x_star)
{
    const Eigen::Index n = x_star.size();
    const Vector lo = box.lower - x_star;
    const Vector hi = box.upper - x_star;
    const Vector corner_offset = lo.cwiseAbs().cwiseMax(hi.cwiseAbs());
    const double r = corner_offset.norm();

    RangeRemainder out;
    out.lipschitz = 2.0 * r;
    const Vector nearest = anchor.cwiseMax(box.lower).cwiseMin(box.upper);
    const double dist_min = (anchor - nearest).norm();
    out.curvature = dist_min > 0.0 ? 0.5 * r * r / dist_min : std::numeric_limits<double>::infinity();

    const Vector radial = x_star - anchor;
    const double rho = radial.norm();
    if (rho > 0.0 && n <= 20) {
        const Vector u = radial / rho;
        // Along u the offset x - x* moves the range by t; only the
        // perpendicular part q bends it: residual = sqrt((rho+t)^2 + q^2) - (rho+t).
        const double s_min = rho + (u.array() * (u.array() > 0.0).select(lo.array(), hi.array())).sum();
        double q_max_sq = 0.0;
        Vector v(n);
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
            for (Eigen::Index i = 0; i < n; ++i)
                v(i) = (mask >> i & 1) ? hi(i) : lo(i);
            const double t = u.dot(v);
            q_max_sq = std::max(q_max_sq, v.squaredNorm() - t * t);
        }
        if (s_min > 0.0)
            out.geometric = std::sqrt(s_min * s_min + q_max_sq) - s_min;
    }
    return out;
}

double RangeRemainder::upper() const noexcept { return std::min({lipschitz, curvature, geometric}); }

void build_model(Scenario& sc)
{
    SystemModel& model = sc.model;
    model.h.clear();
    model.h_jacobian.clear();
    model.h_remainder.clear();

    if (sc.kind == ScenarioKind::Range) {
        if (sc.anchors.empty())
            throw std::invalid_argument("build_model: range scenario needs anchors");
        const Eigen::Index n = sc.anchors.front().size();
        model.n = n;
        model.f = [](const Vector& x) { return x; };
        model.f_jacobian = [n](const Vector&) { return Matrix(Matrix::Identity(n, n)); };
        model.f_remainder = zero_remainder(n);
        for (const Vector& a : sc.anchors) {
            if (a.size() != n)
                throw std::invalid_argument("build_model: anchors must share one dimension");
            model.h.emplace_back([a](const Vector& x) { return (x - a).norm(); });
            model.h_jacobian.emplace_back([a](const Vector& x) -> RowVector {
                const Vector diff = x - a;
                const double norm = diff.norm();
                if (norm == 0.0)
                    return RowVector::Zero(diff.size());
                return (diff / norm).transpose();
            });
            model.h_remainder.emplace_back([a](const IntervalBox& box, const Vector& x_star) {
                const double half = 0.5 * range_remainder(a, box, x_star).upper();
                return Zonotope(Vector::Constant(1, half), Matrix::Constant(1, 1, half));
            });
        }
        return;
    }

    const Matrix f = sc.dynamics;
    const Eigen::Index n = f.rows();
    if (f.cols() != n || sc.measurement_rows.cols() != n)
        throw std::invalid_argument("build_model: linear scenario matrices have wrong shape");
    model.n = n;
    model.f = [f](const Vector& x) { return Vector(f * x); };
    model.f_jacobian = [f](const Vector&) { return f; };
    model.f_remainder = zero_remainder(n);
    for (Eigen::Index i = 0; i < sc.measurement_rows.rows(); ++i) {
        const RowVector row = sc.measurement_rows.row(i);
        model.h.emplace_back([row](const Vector& x) { return row.dot(x); });
        model.h_jacobian.emplace_back([row](const Vector&) { return row; });
        model.h_remainder.emplace_back(zero_remainder(1));
    }
}

namespace {

Zonotope row_noise(std::initializer_list<double> gens)
{
    Matrix g(1, static_cast<Eigen::Index>(gens.size()));
    Eigen::Index j = 0;
    for (double v : gens)
        g(0, j++) = v;
    return Zonotope(Vector::Zero(1), g);
}

Vector jitter(const Vector& center, double half_width, Rng& rng)
{
    Vector x = center;
    for (Eigen::Index i = 0; i < x.size(); ++i)
        x(i) += rng.uniform(-half_width, half_width);
    return x;
}

} // namespace

Scenario quadcopter_scenario(std::uint64_t seed)
{
    Scenario sc;
    sc.name = "quadcopter";
    sc.kind = ScenarioKind::Range;
    for (int mask = 0; mask < 8; ++mask) {
        Vector a(3);
        for (int axis = 0; axis < 3; ++axis)
            a(axis) = (mask >> axis & 1) ? 9.0 : 1.0;
        sc.anchors.push_back(a);
    }
    build_model(sc);

    sc.bounds.process = Zonotope(Vector::Zero(3), 0.5 * Matrix::Identity(3, 3));
    sc.bounds.measurement.assign(8, row_noise({0.01, 0.02, 0.01}));

    Rng rng = Rng::stream(seed, 0x5CE1A210);
    const Vector center = Vector::Constant(3, 5.0);
    sc.initial_true_state = jitter(center, 0.5, rng);
    sc.initial_set = Zonotope(center, Matrix::Identity(3, 3));
    sc.horizon = 200;
    sc.arena = IntervalBox(Vector::Zero(3), Vector::Constant(3, 10.0));
    sc.trajectory.region = IntervalBox(Vector::Constant(3, 2.0), Vector::Constant(3, 8.0));
    sc.privacy = PrivacyDefaults{0.15, 0.3, 0.05};
    return sc;
}

Scenario rotating_object_scenario(std::uint64_t seed)
{
    Scenario sc;
    sc.name = "rotating_object";
    sc.kind = ScenarioKind::Linear;
    sc.dynamics.resize(2, 2);
    sc.dynamics << 0.9920, -0.1247, 0.1247, 0.9920;
    sc.measurement_rows.resize(8, 2);
    for (Eigen::Index i = 0; i < 8; ++i)
        sc.measurement_rows.row(i) = (i % 2 == 0) ? RowVector::Unit(2, 0) : RowVector::Unit(2, 1);
    build_model(sc);

    sc.bounds.process = Zonotope(Vector::Zero(2), 0.5 * Matrix::Identity(2, 2));
    sc.bounds.measurement.assign(8, row_noise({0.01, 0.02}));

    Rng rng = Rng::stream(seed, 0x5CE1A211);
    Vector center(2);
    center << 50.0, 0.0;
    sc.initial_true_state = jitter(center, 2.0, rng);
    sc.initial_set = Zonotope(center, 5.0 * Matrix::Identity(2, 2));
    sc.horizon = 200;
    sc.arena = IntervalBox(Vector::Constant(2, -90.0), Vector::Constant(2, 90.0));
    sc.trajectory.region = IntervalBox(Vector::Constant(2, -80.0), Vector::Constant(2, 80.0));
    sc.privacy = PrivacyDefaults{7.0, 0.3, 1.0};
    return sc;
}

Scenario scenario_by_name(const std::string& name, std::uint64_t seed)
{
    if (name == "quadcopter")
        return quadcopter_scenario(seed);
    if (name == "rotating_object" || name == "rotating-object")
        return rotating_object_scenario(seed);
    throw std::invalid_argument("unknown scenario '" + name + "' (expected quadcopter or rotating_object)");
}

} // namespace zonopriv
