#include "zonopriv/lp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace zonopriv::lp {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-12;
constexpr int kMaxIterations = 100000;

// Row-major tableau with the reduced-cost row stored separately.
struct Tableau {
    Eigen::Index rows = 0;
    Eigen::Index cols = 0; // variables, rhs is column `cols`
    Eigen::MatrixXd t;
    Eigen::RowVectorXd cost; // reduced costs, cost(cols) = -objective
    std::vector<Eigen::Index> basis;

    void pivot(Eigen::Index r, Eigen::Index c)
    {
        t.row(r) /= t(r, c);
        for (Eigen::Index i = 0; i < rows; ++i) {
            if (i != r && t(i, c) != 0.0)
                t.row(i) -= t(i, c) * t.row(r);
        }
        if (cost(c) != 0.0)
            cost -= cost(c) * t.row(r);
        basis[static_cast<std::size_t>(r)] = c;
    }

    /// Runs simplex iterations over columns [0, allowed). Returns false
    /// when unbounded.
    bool optimize(Eigen::Index allowed)
    {
        for (int iter = 0; iter < kMaxIterations; ++iter) {
            Eigen::Index enter = -1;
            for (Eigen::Index j = 0; j < allowed; ++j) {
                if (cost(j) < -kCostTol) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0)
                return true;

            Eigen::Index leave = -1;
            double best = std::numeric_limits<double>::infinity();
            for (Eigen::Index i = 0; i < rows; ++i) {
                const double a = t(i, enter);
                if (a <= kPivotTol)
                    continue;
                const double ratio = t(i, cols) / a;
                if (ratio < best - 1e-14 ||
                    (std::abs(ratio - best) <= 1e-14 && leave >= 0 &&
                        basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
                    best = ratio;
                    leave = i;
                }
            }
            if (leave < 0)
                return false;
            pivot(leave, enter);
        }
        throw std::runtime_error("lp: iteration limit reached");
    }
};

} // namespace

Result solve_standard_form(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c)
{
    const Eigen::Index m = a.rows();
    const Eigen::Index n = a.cols();
    if (b.size() != m || c.size() != n)
        throw std::invalid_argument("lp: inconsistent dimensions");

    Tableau tab;
    tab.rows = m;
    tab.cols = n + m;
    tab.t = Eigen::MatrixXd::Zero(m, n + m + 1);
    tab.basis.resize(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) {
        const double sign = b(i) < 0.0 ? -1.0 : 1.0;
        tab.t.row(i).head(n) = sign * a.row(i);
        tab.t(i, n + i) = 1.0;
        tab.t(i, n + m) = sign * b(i);
        tab.basis[static_cast<std::size_t>(i)] = n + i;
    }

    // Phase 1: minimize the sum of artificials.
    tab.cost = Eigen::RowVectorXd::Zero(n + m + 1);
    for (Eigen::Index i = 0; i < m; ++i)
        tab.cost -= tab.t.row(i);
    tab.cost.segment(n, m).setZero();
    tab.optimize(n + m);

    const double scale = 1.0 + (m > 0 ? b.cwiseAbs().maxCoeff() : 0.0);
    Result result;
    if (-tab.cost(n + m) > 1e-9 * scale) {
        result.status = Status::Infeasible;
        return result;
    }

    // Drive remaining artificials out of the basis; rows where that is
    // impossible are redundant and get dropped.
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < m; ++i) {
        if (tab.basis[static_cast<std::size_t>(i)] < n) {
            keep.push_back(i);
            continue;
        }
        Eigen::Index col = -1;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (std::abs(tab.t(i, j)) > kPivotTol) {
                col = j;
                break;
            }
        }
        if (col >= 0) {
            tab.pivot(i, col);
            keep.push_back(i);
        }
    }
    if (static_cast<Eigen::Index>(keep.size()) != m) {
        Tableau reduced;
        reduced.rows = static_cast<Eigen::Index>(keep.size());
        reduced.cols = tab.cols;
        reduced.t.resize(reduced.rows, tab.t.cols());
        for (std::size_t r = 0; r < keep.size(); ++r) {
            reduced.t.row(static_cast<Eigen::Index>(r)) = tab.t.row(keep[r]);
            reduced.basis.push_back(tab.basis[static_cast<std::size_t>(keep[r])]);
        }
        tab = std::move(reduced);
    }

    // Phase 2 over the original columns only.
    tab.cost = Eigen::RowVectorXd::Zero(n + m + 1);
    tab.cost.head(n) = c.transpose();
    for (Eigen::Index i = 0; i < tab.rows; ++i) {
        const Eigen::Index bi = tab.basis[static_cast<std::size_t>(i)];
        if (bi < n && c(bi) != 0.0)
            tab.cost -= c(bi) * tab.t.row(i);
    }
    if (!tab.optimize(n)) {
        result.status = Status::Unbounded;
        return result;
    }

    result.status = Status::Optimal;
    result.x = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < tab.rows; ++i) {
        const Eigen::Index bi = tab.basis[static_cast<std::size_t>(i)];
        if (bi < n)
            result.x(bi) = tab.t(i, tab.cols);
    }
    result.objective = c.dot(result.x);
    return result;
}

} // namespace zonopriv::lp
