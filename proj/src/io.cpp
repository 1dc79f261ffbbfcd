#include "apm/io.hpp"

#include <cmath>
#include <fstream>

#include "apm/error.hpp"

namespace apm {

namespace {

double req(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number()) throw validation_error(std::string("missing numeric field '") + key + "'");
    return j.at(key).get<double>();
}

double opt(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) throw validation_error(std::string("field '") + key + "' must be numeric");
    return j.at(key).get<double>();
}

Jet2 jet_component(const json& terms, int order) {
    Jet2 r(order);
    if (!terms.is_array()) throw validation_error("jet component must be an array of [i, j, c]");
    for (const auto& t : terms) {
        if (!t.is_array() || t.size() != 3) throw validation_error("jet term must be [i, j, c]");
        const int i = t[0].get<int>(), k = t[1].get<int>();
        if (i < 0 || k < 0 || i + k > order) throw validation_error("jet term outside truncation order");
        r.add(i, k, t[2].get<double>());
    }
    return r;
}

json jet_terms(const Jet2& f) {
    json a = json::array();
    for (int n = 0; n <= f.order(); ++n)
        for (int j = 0; j <= n; ++j)
            if (const double c = f.coeff(n - j, j); c != 0.0) a.push_back({n - j, j, c});
    return a;
}

}  // namespace

ModelMap model_from_json(const json& j) {
    try {
        const json& s = j.at("saddle");
        std::vector<double> betas;
        if (s.contains("betas")) betas = s.at("betas").get<std::vector<double>>();
        const bool orientable = s.value("orientable", true);
        SaddleNormalForm saddle(req(s, "lambda"), betas, orientable);

        const json& g = j.at("global");
        const std::string family = g.value("family", "exact");
        ModelMap::Global global;
        if (family == "exact") {
            ExactGlobalMap e;
            e.x_plus = req(g, "x_plus");
            e.y_minus = req(g, "y_minus");
            e.mu = opt(g, "mu", 0.0);
            e.b = req(g, "b");
            e.c = req(g, "c");
            e.d = req(g, "d");
            e.sigma = opt(g, "sigma", 0.0);
            e.f03 = opt(g, "f03", 0.0);
            global = e;
        } else if (family == "jet") {
            GlobalMapCoeffs c;
            c.x_plus = req(g, "x_plus");
            c.y_minus = req(g, "y_minus");
            c.mu = opt(g, "mu", 0.0);
            c.a = opt(g, "a", 0.0);
            c.b = req(g, "b");
            c.c = req(g, "c");
            c.d = req(g, "d");
            c.e20 = opt(g, "e20", 0.0);
            c.e11 = opt(g, "e11", 0.0);
            c.e02 = opt(g, "e02", 0.0);
            c.f20 = opt(g, "f20", 0.0);
            c.f11 = opt(g, "f11", 0.0);
            c.f30 = opt(g, "f30", 0.0);
            c.f21 = opt(g, "f21", 0.0);
            c.f12 = opt(g, "f12", 0.0);
            c.f03 = opt(g, "f03", 0.0);
            c.bc_sign = c.b * c.c > 0.0 ? 1 : -1;
            const auto diag = validate_coeffs(c);
            if (!diag.clean()) throw validation_error("inconsistent global map: " + diag.messages.front());
            global = c;
        } else {
            throw validation_error("unknown global family '" + family + "'");
        }

        const int q = j.value("q", 1);
        std::optional<Chart> chart;
        if (j.contains("chart")) chart = Chart{req(j.at("chart"), "eps_x"), req(j.at("chart"), "eps_y")};
        return ModelMap(std::move(saddle), std::move(global), q, chart);
    } catch (const json::exception& e) {
        throw validation_error(std::string("malformed model: ") + e.what());
    }
}

json model_to_json(const ModelMap& m) {
    json j;
    j["saddle"] = {{"lambda", m.lambda()},
                   {"betas", std::vector<double>(m.saddle().betas().begin(), m.saddle().betas().end())},
                   {"orientable", m.saddle().orientable()}};
    if (const auto* e = std::get_if<ExactGlobalMap>(&m.global())) {
        j["global"] = {{"family", "exact"}, {"x_plus", e->x_plus}, {"y_minus", e->y_minus}, {"mu", e->mu},
                       {"b", e->b},         {"c", e->c},           {"d", e->d},             {"sigma", e->sigma},
                       {"f03", e->f03}};
    } else {
        const auto& c = std::get<GlobalMapCoeffs>(m.global());
        j["global"] = {{"family", "jet"}, {"x_plus", c.x_plus}, {"y_minus", c.y_minus}, {"mu", c.mu},
                       {"a", c.a},        {"b", c.b},           {"c", c.c},             {"d", c.d},
                       {"e20", c.e20},    {"e11", c.e11},       {"e02", c.e02},         {"f20", c.f20},
                       {"f11", c.f11},    {"f30", c.f30},       {"f21", c.f21},         {"f12", c.f12},
                       {"f03", c.f03}};
    }
    j["q"] = m.q();
    j["chart"] = {{"eps_x", m.chart().eps_x}, {"eps_y", m.chart().eps_y}};
    return j;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw validation_error("malformed JSON in '" + path + "': " + e.what());
    }
}

ModelMap load_model(const std::string& path) { return model_from_json(read_json_file(path)); }

JetMap2 jet_from_json(const json& j) {
    try {
        const int order = j.at("order").get<int>();
        if (order < 1) throw validation_error("jet order must be >= 1");
        JetMap2 f{jet_component(j.at("fx"), order), jet_component(j.at("fy"), order), 1.0, 1.0};
        f.lambda = f.fx.coeff(1, 0);
        f.gamma = f.fy.coeff(0, 1);
        if (std::abs(f.fx.coeff(0, 1)) > 1e-12 || std::abs(f.fy.coeff(1, 0)) > 1e-12)
            throw validation_error("jet linear part must be diagonal");
        return f;
    } catch (const json::exception& e) {
        throw validation_error(std::string("malformed jet: ") + e.what());
    }
}

json jet_to_json(const JetMap2& f) {
    return {{"order", f.order()}, {"fx", jet_terms(f.fx)}, {"fy", jet_terms(f.fy)}};
}

json normal_form_to_json(const NormalFormResult& r) {
    return {{"betas", r.betas},
            {"tilde_betas", r.tilde_betas},
            {"change", jet_to_json(r.change)},
            {"reduced", jet_to_json(r.reduced)}};
}

}  // namespace apm
