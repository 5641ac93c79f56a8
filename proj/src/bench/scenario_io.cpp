#include <fstream>
#include <stdexcept>

#include "zonopriv/bench.hpp"

namespace zonopriv {

namespace {

json box_to_json(const IntervalBox& box)
{
    return json{{"lower", vector_to_json(box.lower)}, {"upper", vector_to_json(box.upper)}};
}

IntervalBox box_from_json(const json& j)
{
    return IntervalBox(vector_from_json(j.at("lower")), vector_from_json(j.at("upper")));
}

} // namespace

json scenario_to_json(const Scenario& sc)
{
    json j;
    j["name"] = sc.name;
    j["kind"] = sc.kind == ScenarioKind::Range ? "range" : "linear";
    if (sc.kind == ScenarioKind::Range) {
        json anchors = json::array();
        for (const Vector& a : sc.anchors)
            anchors.push_back(vector_to_json(a));
        j["anchors"] = anchors;
    } else {
        j["dynamics"] = matrix_to_json(sc.dynamics);
        j["measurement_rows"] = matrix_to_json(sc.measurement_rows);
    }
    j["initial_true_state"] = vector_to_json(sc.initial_true_state);
    j["initial_set"] = zonotope_to_json(sc.initial_set);
    j["process_noise"] = zonotope_to_json(sc.bounds.process);
    json meas = json::array();
    for (const Zonotope& z : sc.bounds.measurement)
        meas.push_back(zonotope_to_json(z));
    j["measurement_noise"] = meas;
    j["horizon"] = sc.horizon;
    j["arena"] = box_to_json(sc.arena);
    json traj;
    if (sc.trajectory.source == TrajectorySpec::Source::Csv) {
        traj["type"] = "csv";
        traj["path"] = sc.trajectory.csv_path;
    } else {
        traj["type"] = "synthetic";
        traj["region"] = box_to_json(sc.trajectory.region);
        traj["smoothing"] = sc.trajectory.smoothing;
        traj["drift_scale"] = sc.trajectory.drift_scale;
    }
    j["trajectory"] = traj;
    j["privacy"] = json{{"d", sc.privacy.range}, {"epsilon", sc.privacy.epsilon}, {"s", sc.privacy.sensitivity}};
    return j;
}

Scenario scenario_from_json(const json& j)
{
    Scenario sc;
    sc.name = j.at("name").get<std::string>();
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "range") {
        sc.kind = ScenarioKind::Range;
        for (const json& a : j.at("anchors"))
            sc.anchors.push_back(vector_from_json(a));
    } else if (kind == "linear") {
        sc.kind = ScenarioKind::Linear;
        sc.dynamics = matrix_from_json(j.at("dynamics"));
        sc.measurement_rows = matrix_from_json(j.at("measurement_rows"));
    } else {
        throw std::invalid_argument("scenario kind must be 'range' or 'linear'");
    }
    build_model(sc);

    sc.initial_true_state = vector_from_json(j.at("initial_true_state"));
    sc.initial_set = zonotope_from_json(j.at("initial_set"));
    sc.bounds.process = zonotope_from_json(j.at("process_noise"));
    for (const json& z : j.at("measurement_noise"))
        sc.bounds.measurement.push_back(zonotope_from_json(z));
    sc.horizon = j.value("horizon", 200);
    sc.arena = box_from_json(j.at("arena"));

    const json& traj = j.at("trajectory");
    const std::string type = traj.at("type").get<std::string>();
    if (type == "csv") {
        sc.trajectory.source = TrajectorySpec::Source::Csv;
        sc.trajectory.csv_path = traj.at("path").get<std::string>();
    } else if (type == "synthetic") {
        sc.trajectory.region = box_from_json(traj.at("region"));
        sc.trajectory.smoothing = traj.value("smoothing", 0.9);
        sc.trajectory.drift_scale = traj.value("drift_scale", 1.0);
    } else {
        throw std::invalid_argument("trajectory type must be 'synthetic' or 'csv'");
    }
    if (j.contains("privacy")) {
        const json& p = j.at("privacy");
        sc.privacy = PrivacyDefaults{p.value("d", 1.0), p.value("epsilon", 0.3), p.value("s", 1.0)};
    }
    sc.validate();
    return sc;
}

Scenario load_scenario_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot open scenario file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::invalid_argument("scenario file '" + path + "': " + e.what());
    }
    return scenario_from_json(j);
}

} // namespace zonopriv
