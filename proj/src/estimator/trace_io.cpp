#include <iomanip>
#include <ostream>
#include <stdexcept>

#include "zonopriv/estimator.hpp"
#include "zonopriv/json_io.hpp"

namespace zonopriv {

namespace {

void check_trace(const EstimateTrace& trace)
{
    const std::size_t k = trace.steps.size();
    if (trace.true_states.size() != k || trace.contained.size() != k || trace.center_error.size() != k)
        throw std::invalid_argument("EstimateTrace: per-step arrays must have equal length");
}

} // namespace

void write_trace_jsonl(std::ostream& os, const EstimateTrace& trace)
{
    check_trace(trace);
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
        const StateSetEstimate& est = trace.steps[i];
        json rec;
        rec["k"] = est.step;
        rec["predicted"] = zonotope_to_json(est.predicted);
        rec["corrected"] = zonotope_to_json(est.corrected);
        rec["lambda"] = matrix_to_json(est.lambda);
        rec["true_state"] = vector_to_json(trace.true_states[i]);
        rec["contained"] = static_cast<bool>(trace.contained[i]);
        if (est.damped)
            rec["damped"] = true;
        os << rec.dump() << '\n';
    }
}

void write_trace_csv(std::ostream& os, const EstimateTrace& trace)
{
    check_trace(trace);
    if (trace.steps.empty()) {
        os << "k,center_error\n";
        return;
    }
    const Eigen::Index n = trace.steps.front().corrected.dim();
    os << "k";
    for (const char* prefix : {"lower_", "upper_", "true_"})
        for (Eigen::Index d = 0; d < n; ++d)
            os << ',' << prefix << d;
    os << ",center_error\n";

    os << std::setprecision(17);
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
        const IntervalBox box = interval_hull(trace.steps[i].corrected);
        os << trace.steps[i].step;
        for (Eigen::Index d = 0; d < n; ++d)
            os << ',' << box.lower(d);
        for (Eigen::Index d = 0; d < n; ++d)
            os << ',' << box.upper(d);
        for (Eigen::Index d = 0; d < n; ++d)
            os << ',' << trace.true_states[i](d);
        os << ',' << trace.center_error[i] << '\n';
    }
}

} // namespace zonopriv
