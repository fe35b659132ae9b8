#include "nsm/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "nsm/consistency.hpp"
#include "nsm/curves.hpp"
#include "nsm/errors.hpp"
#include "nsm/io.hpp"
#include "nsm/models.hpp"
#include "nsm/simulation.hpp"

namespace nsm::cli {

using nlohmann::json;

double default_tau_max() {
    if (const char* env = std::getenv("NSM_DEFAULT_TAU_MAX")) {
        char* end = nullptr;
        const double v = std::strtod(env, &end);
        if (end != env && *end == '\0' && std::isfinite(v) && v > 0.0) return v;
    }
    return kDefaultTauMax;
}

std::vector<double> parse_lambda_grid(std::string_view spec) {
    std::vector<double> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = spec.find(':', start);
        const std::string field(spec.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        char* end = nullptr;
        const double v = std::strtod(field.c_str(), &end);
        if (field.empty() || *end != '\0' || !std::isfinite(v)) {
            throw std::invalid_argument("lambda grid '" + std::string(spec) + "': cannot parse '" + field + "'");
        }
        parts.push_back(v);
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    if (parts.size() != 3) throw std::invalid_argument("lambda grid must be lo:hi:step, got '" + std::string(spec) + "'");
    const double lo = parts[0], hi = parts[1], step = parts[2];
    if (!(lo > 0.0) || !(hi >= lo) || !(step > 0.0)) {
        throw std::invalid_argument("lambda grid needs 0 < lo <= hi and step > 0");
    }
    const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
    if (n > 100000) throw std::invalid_argument("lambda grid has too many points");
    std::vector<double> grid;
    for (std::size_t i = 0; i <= n; ++i) grid.push_back(lo + step * static_cast<double>(i));
    return grid;
}

std::vector<double> default_lambda_grid() {
    std::vector<double> g;
    for (int i = 1; i <= 30; ++i) g.push_back(i / 10.0);
    return g;
}

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json_file(const std::string& path) {
    const auto text = read_file(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError("'" + path + "': " + e.what());
    }
}

ShortRateModel load_model(const std::string& path) {
    if (path.empty()) throw InputError("--model FILE is required");
    return model_from_json(read_json_file(path));
}

std::vector<Sample> load_samples(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    try {
        return read_samples_csv(in);
    } catch (const InputError& e) {
        throw InputError("'" + path + "' " + e.what());
    }
}

void emit(const std::string& path, const std::string& content, std::ostream& out) {
    if (path.empty()) {
        out << content;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot write '" + path + "'");
    f << content;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::vector<double> tau_grid(double tau_max, int points) {
    if (points < 2) throw std::invalid_argument("--tau-points must be >= 2");
    if (!(tau_max > 0.0)) throw std::invalid_argument("--tau-max must be > 0");
    return uniform_grid(0.0, tau_max, static_cast<std::size_t>(points));
}

FactorBasis resolve_basis(const std::string& spec, std::optional<double> basis_lambda, const ShortRateModel& model) {
    const double lambda = basis_lambda.value_or(initial_curve(model).lambda);
    if (spec.empty() || spec == "model") {
        if (basis_lambda) return free_lambda_basis(model, lambda);
        return manifold_basis(model);
    }
    if (spec == "nelson_siegel") return FactorBasis::nelson_siegel(lambda);
    if (spec == "ho_lee") return FactorBasis::ho_lee(lambda);
    if (spec == "hull_white") {
        const auto* hw = std::get_if<HullWhiteModel>(&model);
        if (!hw) throw InputError("--basis hull_white needs a hull_white model (for a)");
        return FactorBasis::hull_white(hw->a(), lambda);
    }
    const auto j = read_json_file(spec);
    return basis_from_json(j.is_object() && j.contains("basis") ? j.at("basis") : j);
}

struct Options {
    std::string input;
    std::string model;
    std::string out;
    std::string grid_out;
    std::string basis;
    std::string lambda_grid;
    std::string kind;
    double t = 0.0;
    std::optional<double> r_t;
    std::optional<double> basis_lambda;
    std::optional<double> a;
    double sigma = 0.0;
    double tau_max = 0.0;
    int tau_points = kDefaultTauPoints;
    std::size_t paths = 0;
    int steps_per_year = kDefaultStepsPerYear;
    std::uint64_t seed = 0;
    double tolerance = kDefaultConsistencyTolerance;
};

int cmd_fit(const Options& o, std::ostream& out) {
    const auto samples = load_samples(o.input);
    const auto grid = o.lambda_grid.empty() ? default_lambda_grid() : parse_lambda_grid(o.lambda_grid);
    const auto fit = fit_ns(samples, grid);
    json j = {{"format_version", kFormatVersion}};
    j.update(ns_params_to_json(fit.params));
    j["residual"] = fit.residual;
    emit(o.out, dump(j), out);
    return kSuccess;
}

int cmd_calibrate(const Options& o, std::ostream& out) {
    const auto samples = load_samples(o.input);
    const auto grid = o.lambda_grid.empty() ? default_lambda_grid() : parse_lambda_grid(o.lambda_grid);
    const auto fit = fit_ns(samples, grid);
    ShortRateModel model = [&]() -> ShortRateModel {
        if (o.kind == "ho_lee") return HoLeeModel(o.sigma, fit.params);
        if (o.kind == "hull_white") {
            if (!o.a) throw InputError("--a is required for hull_white");
            return HullWhiteModel(*o.a, o.sigma, fit.params);
        }
        throw InputError("--kind must be ho_lee or hull_white");
    }();
    auto j = model_to_json(model);
    j["r0"] = r0(model);
    j["fit_residual"] = fit.residual;
    emit(o.out, dump(j), out);
    return kSuccess;
}

int cmd_evolve(const Options& o, std::ostream& out) {
    const auto model = load_model(o.model);
    if (!(o.t >= 0.0)) throw std::invalid_argument("--t must be >= 0");
    const double r_t = o.r_t.value_or(short_rate_moments(model, o.t).mean);
    const auto curve = forward_curve(model, o.t, r_t);

    auto j = curve_to_json(curve);
    j["model"] = std::string(model_kind_name(kind_of(model)));
    j["t"] = o.t;
    j["r_t"] = r_t;
    std::ostringstream csv;
    write_forward_csv(csv, curve, tau_grid(o.tau_max, o.tau_points));

    std::string csv_path = o.grid_out;
    if (csv_path.empty() && !o.out.empty()) csv_path = std::filesystem::path(o.out).replace_extension(".csv").string();
    if (!o.out.empty() && csv_path == o.out) throw InputError("--grid-out must differ from --out");
    emit(o.out, dump(j), out);
    if (csv_path.empty()) out << '\n';
    emit(csv_path, csv.str(), out);
    return kSuccess;
}

int cmd_simulate(const Options& o, std::ostream& out) {
    const auto model = load_model(o.model);
    const auto grid = TimeGrid::uniform(o.t, o.steps_per_year);
    const auto paths = simulate_ensemble(model, grid, o.paths, o.seed);
    std::ostringstream csv;
    write_ensemble_csv(csv, paths);
    emit(o.out, csv.str(), out);
    return kSuccess;
}

int cmd_price(const Options& o, std::ostream& out) {
    const auto model = load_model(o.model);
    const auto mc = mc_bond_price(model, o.t, o.paths, o.steps_per_year, o.seed);
    auto j = mc_to_json(mc);
    j["maturity"] = o.t;
    j["steps_per_year"] = o.steps_per_year;
    j["affine_price"] = bond_price(model, 0.0, o.t, r0(model));
    emit(o.out, dump(j), out);
    return kSuccess;
}

int cmd_check(const Options& o, std::ostream& out) {
    const auto model = load_model(o.model);
    auto check = model_consistency_check(model, resolve_basis(o.basis, o.basis_lambda, model));
    check.problem.tau_grid = tau_grid(o.tau_max, o.tau_points);
    const auto report = check_consistency(check.problem, check.z_samples, o.tolerance);
    auto j = report_to_json(report);
    j["model"] = std::string(model_kind_name(kind_of(model)));
    emit(o.out, dump(j), out);
    switch (report.verdict) {
        case Verdict::consistent:
            return kSuccess;
        case Verdict::inconsistent:
            return kInconsistent;
        case Verdict::indeterminate:
            return kIndeterminate;
    }
    return kIndeterminate;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Nelson-Siegel short-rate model toolkit (times in years, continuously compounded rates)", "nsm"};
    app.require_subcommand(1);
    Options o;
    o.tau_max = default_tau_max();

    auto add_model = [&](CLI::App* c) { c->add_option("--model", o.model, "Model parameter JSON")->required(); };
    auto add_out = [&](CLI::App* c) { c->add_option("--out", o.out, "Output path (stdout if omitted)"); };
    auto add_tau = [&](CLI::App* c) {
        c->add_option("--tau-max", o.tau_max, "Largest time to maturity of the tau grid, years");
        c->add_option("--tau-points", o.tau_points, "Number of tau grid points");
    };

    auto* fit = app.add_subcommand("fit", "Fit a Nelson-Siegel forward curve to tau_years,rate samples");
    fit->add_option("csv", o.input, "Sample CSV")->required();
    fit->add_option("--lambda-grid", o.lambda_grid, "lo:hi:step (default 0.1:3.0:0.1)");
    add_out(fit);

    auto* cal = app.add_subcommand("calibrate", "Fit samples and emit a calibrated model file");
    cal->add_option("csv", o.input, "Sample CSV")->required();
    cal->add_option("--kind", o.kind, "ho_lee | hull_white")->required();
    cal->add_option("--sigma", o.sigma, "Short-rate volatility")->required();
    cal->add_option("--a", o.a, "Hull-White mean reversion speed, 1/years");
    cal->add_option("--lambda-grid", o.lambda_grid, "lo:hi:step (default 0.1:3.0:0.1)");
    add_out(cal);

    auto* evo = app.add_subcommand("evolve", "Closed-form forward curve at time t");
    add_model(evo);
    evo->add_option("--t", o.t, "Evaluation time, years")->required();
    evo->add_option("--r-t", o.r_t, "Short rate at t (default: its mean under Q)");
    add_tau(evo);
    add_out(evo);
    evo->add_option("--grid-out", o.grid_out, "tau_years,forward_rate CSV path (default: --out with .csv)");

    auto* sim = app.add_subcommand("simulate", "Exact short-rate path ensemble as path_id,t_years,rate CSV");
    add_model(sim);
    sim->add_option("--t", o.t, "Horizon, years")->required();
    sim->add_option("--paths", o.paths, "Number of paths")->default_val(100);
    sim->add_option("--steps-per-year", o.steps_per_year, "Grid steps per year")->default_val(kDefaultStepsPerYear);
    sim->add_option("--seed", o.seed, "RNG seed")->required();
    add_out(sim);

    auto* price = app.add_subcommand("price", "Monte Carlo zero-coupon bond price P(0,T)");
    add_model(price);
    price->add_option("--t", o.t, "Bond maturity T, years")->required();
    price->add_option("--paths", o.paths, "Number of paths")->default_val(10000);
    price->add_option("--steps-per-year", o.steps_per_year, "Grid steps per year")->default_val(kDefaultStepsPerYear);
    price->add_option("--seed", o.seed, "RNG seed")->default_val(0);
    add_out(price);

    auto* chk = app.add_subcommand("check", "Consistency of a model with a forward-curve manifold");
    add_model(chk);
    chk->add_option("--basis", o.basis,
                    "model | nelson_siegel | ho_lee | hull_white | basis JSON file (default: the model's manifold)");
    chk->add_option("--basis-lambda", o.basis_lambda, "Decay rate of the Nelson-Siegel terms (default: model lambda)");
    chk->add_option("--tolerance", o.tolerance, "Sup-norm residual tolerance")->default_val(kDefaultConsistencyTolerance);
    add_tau(chk);
    add_out(chk);

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kInputError;
    }

    try {
        if (*fit) return cmd_fit(o, out);
        if (*cal) return cmd_calibrate(o, out);
        if (*evo) return cmd_evolve(o, out);
        if (*sim) return cmd_simulate(o, out);
        if (*price) return cmd_price(o, out);
        if (*chk) return cmd_check(o, out);
    } catch (const DegenerateParametersError& e) {
        err << "error: degenerate parameters: " << e.what() << '\n';
        return kDegenerate;
    } catch (const json::exception& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    }
    return kInputError;
}

}  // namespace nsm::cli
