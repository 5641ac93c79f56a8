#include <cmath>
#include <stdexcept>

#include "zonopriv/json_io.hpp"

namespace zonopriv {

json vector_to_json(const Vector& v)
{
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        out.push_back(v(i));
    return out;
}

Vector vector_from_json(const json& j)
{
    if (!j.is_array())
        throw std::invalid_argument("expected a JSON array of numbers");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i)
        v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    return v;
}

json matrix_to_json(const Matrix& m)
{
    json out = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row.push_back(m(r, c));
        out.push_back(std::move(row));
    }
    return out;
}

Matrix matrix_from_json(const json& j, Eigen::Index rows_hint)
{
    if (!j.is_array())
        throw std::invalid_argument("expected a JSON array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    if (rows == 0)
        return Matrix(std::max<Eigen::Index>(rows_hint, 0), 0);
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const json& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            throw std::invalid_argument("ragged matrix rows");
        for (Eigen::Index c = 0; c < cols; ++c)
            m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
    return m;
}

json zonotope_to_json(const Zonotope& z)
{
    return json{{"center", vector_to_json(z.center())}, {"generators", matrix_to_json(z.generators())}};
}

Zonotope zonotope_from_json(const json& j)
{
    Vector c = vector_from_json(j.at("center"));
    Matrix g = matrix_from_json(j.at("generators"), c.size());
    return Zonotope(std::move(c), std::move(g));
}

std::string_view noise_kind_name(NoiseKind kind) noexcept
{
    switch (kind) {
    case NoiseKind::Optimal: return "optimal";
    case NoiseKind::TruncatedLaplace: return "laplace";
    case NoiseKind::Custom: break;
    }
    return "custom";
}

json distribution_to_json(const TruncatedDistribution& dist)
{
    json j;
    j["kind"] = noise_kind_name(dist.kind());
    j["d"] = dist.range();
    j["N"] = dist.grid().half_bins;
    j["epsilon"] = dist.epsilon();
    j["s"] = dist.sensitivity();
    j["delta"] = dist.delta();
    j["degenerate"] = dist.degenerate();
    j["p"] = dist.p();
    if (const auto& params = dist.params()) {
        j["params"] = json{{"A", params->a}, {"B", params->b}, {"C", params->steepness}, {"F", params->f}};
    } else {
        j["params"] = nullptr;
    }
    if (const auto seed = dist.seed())
        j["seed"] = *seed;
    else
        j["seed"] = nullptr;
    return j;
}

TruncatedDistribution distribution_from_json(const json& j)
{
    NoiseGrid grid = build_grid(j.at("d").get<double>(), j.at("N").get<int>());
    std::vector<double> p = j.at("p").get<std::vector<double>>();
    NoiseKind kind = NoiseKind::Custom;
    if (j.contains("kind")) {
        const std::string k = j["kind"].get<std::string>();
        if (k == "optimal")
            kind = NoiseKind::Optimal;
        else if (k == "laplace")
            kind = NoiseKind::TruncatedLaplace;
    }
    TruncatedDistribution dist(std::move(grid), std::move(p), j.at("epsilon").get<double>(),
        j.at("s").get<double>(), kind);
    if (j.contains("delta") && std::abs(j["delta"].get<double>() - dist.delta()) > 1e-12)
        throw std::invalid_argument("distribution file: stored delta does not match the accountant");
    if (j.contains("params") && j["params"].is_object()) {
        const json& pj = j["params"];
        NoiseModelParams params;
        params.a = pj.at("A").get<double>();
        params.b = pj.at("B").get<std::vector<double>>();
        params.steepness = pj.at("C").get<double>();
        params.f = pj.at("F").get<std::vector<double>>();
        const std::uint64_t seed = j.contains("seed") && !j["seed"].is_null() ? j["seed"].get<std::uint64_t>() : 0;
        dist = dist.with_training_metadata(std::move(params), seed, j.value("degenerate", false));
    }
    return dist;
}

} // namespace zonopriv
