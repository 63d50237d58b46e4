#include "sdifflab/field_json.hpp"

namespace sdifflab {

using nlohmann::json;

namespace {

json mode_key(const Mode& m, int dim) {
    json k = json::array();
    for (int i = 0; i < dim; ++i) k.push_back(m.k[static_cast<size_t>(i)]);
    return k;
}

Mode mode_from(const json& rec) {
    Mode m;
    const auto& k = rec.at("k");
    if (!k.is_array() || k.size() > 3) throw std::invalid_argument("field json: bad wavevector");
    for (size_t i = 0; i < k.size(); ++i) m.k[i] = k[i].get<int>();
    std::string p = rec.at("parity").get<std::string>();
    if (p == "cos")
        m.parity = Parity::cos;
    else if (p == "sin")
        m.parity = Parity::sin;
    else
        throw std::invalid_argument("field json: parity must be cos or sin");
    return m;
}

}  // namespace

json to_json(const ScalarField& f) {
    json j;
    j["kind"] = "scalar";
    j["dim"] = f.dim();
    j["trunc"] = f.trunc();
    json modes = json::array();
    for (const auto& [m, a] : f.coeffs()) {
        modes.push_back(
            {{"k", mode_key(m, f.dim())}, {"parity", to_string(m.parity)}, {"coeff", a}});
    }
    j["modes"] = std::move(modes);
    return j;
}

json to_json(const VectorField& u) {
    json j;
    j["kind"] = "vector";
    j["dim"] = u.dim();
    j["trunc"] = u.trunc();
    j["div_free"] = u.div_free();
    json modes = json::array();
    for (const auto& [m, a] : u.coeffs()) {
        for (int c = 0; c < u.dim(); ++c) {
            modes.push_back({{"k", mode_key(m, u.dim())},
                             {"parity", to_string(m.parity)},
                             {"component", c},
                             {"coeff", a[static_cast<size_t>(c)]}});
        }
    }
    j["modes"] = std::move(modes);
    return j;
}

ScalarField scalar_from_json(const json& j) {
    if (j.at("kind").get<std::string>() != "scalar")
        throw std::invalid_argument("field json: expected a scalar field");
    ScalarField f(j.at("dim").get<int>(), j.at("trunc").get<int>());
    for (const auto& rec : j.at("modes")) f.add(mode_from(rec), rec.at("coeff").get<double>());
    return f;
}

VectorField vector_from_json(const json& j) {
    if (j.at("kind").get<std::string>() != "vector")
        throw std::invalid_argument("field json: expected a vector field");
    VectorField u(j.at("dim").get<int>(), j.at("trunc").get<int>());
    for (const auto& rec : j.at("modes"))
        u.add(mode_from(rec), rec.at("component").get<int>(), rec.at("coeff").get<double>());
    u.set_div_free(j.value("div_free", false));
    return u;
}

ScalarField scalar_from_spec(const json& spec) {
    const int dim = spec.at("dim").get<int>();
    int trunc = spec.value("trunc", 0);
    std::vector<std::pair<Mode, double>> entries;
    for (const auto& rec : spec.at("modes")) {
        Mode m = mode_from(rec);
        entries.emplace_back(m, rec.at("coeff").get<double>());
        trunc = std::max(trunc, m.norm_inf());
    }
    ScalarField f(dim, trunc);
    for (const auto& [m, a] : entries) f.add(m, a);
    return f;
}

}  // namespace sdifflab
