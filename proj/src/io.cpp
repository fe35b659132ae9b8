#include "nsm/io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <string_view>

#include "nsm/errors.hpp"

namespace nsm {

using nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

double parse_number(std::string_view field, std::size_t row, std::size_t col) {
    double v = 0.0;
    const auto* first = field.data();
    const auto* last = field.data() + field.size();
    if (!field.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (field.empty() || ec != std::errc{} || ptr != last || !std::isfinite(v)) {
        throw InputError("row " + std::to_string(row) + ", column " + std::to_string(col) + ": cannot parse '" +
                         std::string(field) + "' as a number");
    }
    return v;
}

void write_header(std::ostream& out, std::string_view columns) {
    out << "# format_version: " << kFormatVersion << '\n' << columns << '\n';
}

const json& require(const json& j, const char* key, const char* where) {
    if (!j.is_object() || !j.contains(key)) {
        throw InputError(std::string(where) + ": missing field \"" + key + "\"");
    }
    return j.at(key);
}

double require_number(const json& j, const char* key, const char* where) {
    const auto& v = require(j, key, where);
    if (!v.is_number()) throw InputError(std::string(where) + ": field \"" + key + "\" must be a number");
    return v.get<double>();
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::vector<Sample> read_samples_csv(std::istream& in) {
    std::vector<Sample> samples;
    std::string line;
    std::size_t row = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++row;
        const auto text = trim(line);
        if (text.empty() || text.front() == '#') continue;
        const auto fields = split(text, ',');
        if (!header_seen) {
            if (fields.size() != 2 || fields[0] != "tau_years" || fields[1] != "rate") {
                throw InputError("row " + std::to_string(row) + ": expected header 'tau_years,rate', got '" +
                                 std::string(text) + "'");
            }
            header_seen = true;
            continue;
        }
        if (fields.size() != 2) {
            throw InputError("row " + std::to_string(row) + ": expected 2 columns, got " +
                             std::to_string(fields.size()));
        }
        const double tau = parse_number(fields[0], row, 1);
        const double rate = parse_number(fields[1], row, 2);
        if (tau < 0.0) throw InputError("row " + std::to_string(row) + ", column 1: tau_years must be >= 0");
        samples.push_back({tau, rate});
    }
    if (!header_seen) throw InputError("empty CSV: expected header 'tau_years,rate'");
    return samples;
}

void write_samples_csv(std::ostream& out, std::span<const Sample> samples) {
    write_header(out, "tau_years,rate");
    for (const auto& s : samples) out << format_double(s.tau) << ',' << format_double(s.value) << '\n';
}

void write_forward_csv(std::ostream& out, const CurveInBasis& curve, std::span<const double> tau_grid) {
    write_header(out, "tau_years,forward_rate");
    for (double tau : tau_grid) out << format_double(tau) << ',' << format_double(eval_curve(curve, tau)) << '\n';
}

void write_ensemble_csv(std::ostream& out, std::span<const ShortRatePath> paths) {
    write_header(out, "path_id,t_years,rate");
    for (std::size_t p = 0; p < paths.size(); ++p) {
        const auto& path = paths[p];
        for (std::size_t i = 0; i < path.rates.size(); ++i) {
            out << p << ',' << format_double(path.grid[i]) << ',' << format_double(path.rates[i]) << '\n';
        }
    }
}

json basis_to_json(const FactorBasis& basis) {
    json arr = json::array();
    for (const auto& fn : basis.functions()) {
        json e = {{"kind", std::string(kind_name(fn.kind))}};
        if (fn.is_exponential()) e["rate"] = fn.rate;
        arr.push_back(std::move(e));
    }
    return arr;
}

FactorBasis basis_from_json(const json& j) {
    if (!j.is_array()) throw InputError("basis: expected an array of basis functions");
    std::vector<BasisFunction> fns;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto where = "basis[" + std::to_string(i) + "]";
        const auto& kind_field = require(j[i], "kind", where.c_str());
        if (!kind_field.is_string()) throw InputError(where + ": \"kind\" must be a string");
        const auto kind = parse_kind(kind_field.get<std::string>());
        if (!kind) {
            throw InputError(where + ": unknown kind \"" + kind_field.get<std::string>() +
                             "\" (expected constant|linear|exp_decay|tau_exp_decay)");
        }
        BasisFunction fn{*kind, 0.0};
        if (fn.is_exponential()) fn.rate = require_number(j[i], "rate", where.c_str());
        fns.push_back(fn);
    }
    return FactorBasis(std::move(fns));
}

json curve_to_json(const CurveInBasis& curve) {
    return {{"format_version", kFormatVersion},
            {"basis", basis_to_json(curve.basis())},
            {"coefficients", curve.coefficients()}};
}

CurveInBasis curve_from_json(const json& j) {
    auto basis = basis_from_json(require(j, "basis", "curve"));
    const auto& c = require(j, "coefficients", "curve");
    if (!c.is_array()) throw InputError("curve: \"coefficients\" must be an array");
    std::vector<double> coeffs;
    for (const auto& v : c) {
        if (!v.is_number()) throw InputError("curve: coefficients must be numbers");
        coeffs.push_back(v.get<double>());
    }
    if (coeffs.size() != basis.size()) {
        throw InputError("curve: " + std::to_string(coeffs.size()) + " coefficients for " +
                         std::to_string(basis.size()) + " basis functions");
    }
    return CurveInBasis(std::move(basis), std::move(coeffs));
}

json ns_params_to_json(const NelsonSiegelParams& p) {
    return {{"z1", p.z1}, {"z2", p.z2}, {"z3", p.z3}, {"lambda", p.lambda}};
}

NelsonSiegelParams ns_params_from_json(const json& j) {
    NelsonSiegelParams p{require_number(j, "z1", "initial_curve"), require_number(j, "z2", "initial_curve"),
                         require_number(j, "z3", "initial_curve"), require_number(j, "lambda", "initial_curve")};
    p.validate();
    return p;
}

json model_to_json(const ShortRateModel& model) {
    json j = {{"format_version", kFormatVersion},
              {"model", std::string(model_kind_name(kind_of(model)))},
              {"sigma", sigma(model)},
              {"initial_curve", ns_params_to_json(initial_curve(model))}};
    if (const auto* hw = std::get_if<HullWhiteModel>(&model)) j["a"] = hw->a();
    return j;
}

ShortRateModel model_from_json(const json& j) {
    const auto& kind = require(j, "model", "model");
    if (!kind.is_string()) throw InputError("model: \"model\" must be a string");
    const auto name = kind.get<std::string>();
    const double sigma = require_number(j, "sigma", "model");
    const auto curve = ns_params_from_json(require(j, "initial_curve", "model"));
    if (name == "ho_lee") {
        if (j.contains("a")) throw InputError("model: field \"a\" is only valid for hull_white");
        return HoLeeModel(sigma, curve);
    }
    if (name == "hull_white") return HullWhiteModel(require_number(j, "a", "model"), sigma, curve);
    throw InputError("model: unknown model \"" + name + "\" (expected ho_lee|hull_white)");
}

json report_to_json(const ConsistencyReport& report) {
    json tests = json::array();
    for (const auto& t : report.tests) {
        tests.push_back({{"t", t.t},
                         {"z_index", t.z_index},
                         {"drift_residual", t.drift_residual},
                         {"volatility_residual", t.volatility_residual},
                         {"drift_coefficients", t.drift_coefficients},
                         {"volatility_coefficients", t.volatility_coefficients}});
    }
    return {{"format_version", kFormatVersion},
            {"verdict", std::string(verdict_name(report.verdict))},
            {"tolerance", report.tolerance},
            {"basis", basis_to_json(report.basis)},
            {"max_drift_residual", report.max_drift_residual()},
            {"max_volatility_residual", report.max_volatility_residual()},
            {"tests", std::move(tests)}};
}

json mc_to_json(const McEstimate& e) {
    return {{"format_version", kFormatVersion},
            {"estimate", e.estimate},
            {"std_error", e.std_error},
            {"n_paths", e.n_paths},
            {"seed", e.seed}};
}

}  // namespace nsm
