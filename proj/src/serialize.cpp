#include "larn/serialize.hpp"

#include "larn/csv.hpp"
#include "larn/errors.hpp"

#include <cmath>
#include <set>

namespace larn {

using nlohmann::json;

namespace {

std::vector<double> to_vec(const Vector& v)
{
    return {v.data(), v.data() + v.size()};
}

// JSON has no inf/nan; such values are written as null.
json number(double v)
{
    return std::isfinite(v) ? json(v) : json(nullptr);
}

template <class T>
T field(const json& j, const char* key, T fallback)
{
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("config field '") + key + "' has the wrong type");
    }
}

} // namespace

json to_json(const FitResult& fit)
{
    json j;
    j["lambda"] = fit.lambda;
    j["threshold"] = fit.threshold;
    j["outer_iters"] = fit.outer_iters;
    j["inner_solves"] = fit.inner_solves;
    j["converged"] = fit.converged;
    j["objective_trace"] = fit.objective_trace;
    j["q_trace"] = fit.q_trace;
    j["kkt_residuals"] = to_vec(fit.kkt_residuals);
    j["max_kkt_residual"] = fit.kkt_residuals.size() ? fit.kkt_residuals.maxCoeff() : 0.0;
    j["row_support"] = row_support(fit.B_hat);
    j["nonzeros"] = element_support_size(fit.B_hat);
    j["warnings"] = fit.warnings;
    return j;
}

json to_json(const CvResult& cv)
{
    json j;
    j["best_lambda"] = cv.best_lambda;
    j["best_threshold"] = cv.best_threshold;
    j["best_lambda_index"] = cv.best_lambda_index;
    j["best_threshold_index"] = cv.best_threshold_index;
    j["best_cv_rmse"] = number(cv.best_error);
    j["fold_fits"] = cv.fold_fits;
    j["reference_fits"] = cv.reference_fits;
    j["folds"] = cv.folds;
    json per_fold = json::array();
    for (const Matrix& m : cv.fold_sse) {
        per_fold.push_back(number(m(cv.best_lambda_index, cv.best_threshold_index)));
    }
    j["best_fold_sse"] = per_fold;
    j["lambdas"] = cv.lambdas;
    return j;
}

json to_json(const RiskReport& r)
{
    json j;
    j["n"] = r.n;
    j["lambda"] = number(r.lambda);
    j["c1"] = number(r.c1);
    j["c2"] = number(r.c2);
    j["p0"] = number(r.p0);
    j["monte_carlo_risk"] = number(r.monte_carlo_risk);
    j["monte_carlo_se"] = number(r.monte_carlo_se);
    j["ideal_risk"] = number(r.ideal_risk);
    j["bound"] = number(r.bound);
    j["replications"] = r.replications;
    j["within_bound"] = r.within_bound;
    j["within_bound_2se"] = r.within_bound_2se;
    j["theta"] = r.theta;
    return j;
}

json to_json(const SimConfig& c)
{
    return json{{"n", c.n},
                {"p", c.p},
                {"q", c.q},
                {"rho", c.rho},
                {"design_ar", c.design_ar},
                {"signal_mean", c.signal_mean},
                {"signal_sd", c.signal_sd},
                {"within_row_prob", c.within_row_prob},
                {"row_prob", c.row_prob},
                {"seed", c.seed},
                {"replications", c.replications}};
}

SimConfig sim_config_from_json(const json& j)
{
    if (!j.is_object()) throw ConfigError("sim config must be a JSON object");
    static const std::set<std::string> known{"n", "p", "q", "rho", "design_ar", "signal_mean", "signal_sd",
                                             "within_row_prob", "row_prob", "seed", "replications",
                                             "settings", "rhos", "methods", "lambda_scale"};
    for (const auto& [key, _] : j.items()) {
        if (!known.count(key)) throw ConfigError("unknown config field '" + key + "'");
    }
    SimConfig c;
    c.n = field<Index>(j, "n", c.n);
    c.p = field<Index>(j, "p", c.p);
    c.q = field<Index>(j, "q", c.q);
    c.rho = field<double>(j, "rho", c.rho);
    c.design_ar = field<double>(j, "design_ar", c.design_ar);
    c.signal_mean = field<double>(j, "signal_mean", c.signal_mean);
    c.signal_sd = field<double>(j, "signal_sd", c.signal_sd);
    c.within_row_prob = field<double>(j, "within_row_prob", c.within_row_prob);
    c.row_prob = field<double>(j, "row_prob", c.row_prob);
    c.seed = field<std::uint64_t>(j, "seed", c.seed);
    c.replications = field<int>(j, "replications", c.replications);

    auto check = [](bool ok, const char* name) {
        if (!ok) throw ConfigError(std::string("config field '") + name + "' is out of range");
    };
    check(c.n >= 1, "n");
    check(c.p >= 1, "p");
    check(c.q >= 1, "q");
    check(c.rho >= 0.0 && c.rho < 1.0, "rho");
    check(c.design_ar >= 0.0 && c.design_ar < 1.0, "design_ar");
    check(c.signal_sd >= 0.0, "signal_sd");
    check(c.within_row_prob >= 0.0 && c.within_row_prob <= 1.0, "within_row_prob");
    check(c.row_prob >= 0.0 && c.row_prob <= 1.0, "row_prob");
    check(c.replications >= 1, "replications");
    return c;
}

BenchmarkConfig benchmark_config_from_json(const json& j, bool full)
{
    BenchmarkConfig b;
    if (full) {
        b.settings = {{20, 20}, {20, 60}, {60, 60}, {100, 60}};
        b.base.replications = 100;
    }
    json base = j;
    if (full && !j.contains("replications")) base["replications"] = 100;
    b.base = sim_config_from_json(base);

    if (j.contains("settings")) {
        b.settings.clear();
        const auto& s = j.at("settings");
        if (!s.is_array() || s.empty()) throw ConfigError("config field 'settings' must be a nonempty array of [p, q]");
        for (const auto& pq : s) {
            if (!pq.is_array() || pq.size() != 2 || !pq[0].is_number_integer() || !pq[1].is_number_integer()
                || pq[0].get<Index>() < 1 || pq[1].get<Index>() < 1) {
                throw ConfigError("config field 'settings' entries must be [p, q] positive integer pairs");
            }
            b.settings.emplace_back(pq[0].get<Index>(), pq[1].get<Index>());
        }
    } else if (j.contains("p") || j.contains("q")) {
        b.settings = {{b.base.p, b.base.q}};
    }
    if (j.contains("rhos")) {
        b.rhos = field<std::vector<double>>(j, "rhos", {});
        if (b.rhos.empty()) throw ConfigError("config field 'rhos' must be nonempty");
        for (double r : b.rhos) {
            if (!(r >= 0.0 && r < 1.0)) throw ConfigError("config field 'rhos' is out of range");
        }
    } else {
        b.rhos = {b.base.rho};
    }
    if (j.contains("methods")) {
        b.methods.clear();
        for (const auto& name : field<std::vector<std::string>>(j, "methods", {})) b.methods.push_back(parse_method(name));
        if (b.methods.empty()) throw ConfigError("config field 'methods' must be nonempty");
    }
    if (j.contains("lambda_scale")) b.lambda_scale = parse_lambda_scale(field<std::string>(j, "lambda_scale", ""));
    return b;
}

std::string cv_surface_csv(const CvResult& cv)
{
    std::string out = "lambda_index,lambda,threshold_index,threshold,cv_rmse\n";
    for (Index i = 0; i < cv.cv_rmse.rows(); ++i) {
        for (Index t = 0; t < cv.cv_rmse.cols(); ++t) {
            out += std::to_string(i) + "," + format_double(cv.lambdas[static_cast<std::size_t>(i)]) + ","
                 + std::to_string(t) + ","
                 + format_double(cv.thresholds[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)]) + ","
                 + format_double(cv.cv_rmse(i, t)) + "\n";
        }
    }
    return out;
}

} // namespace larn
