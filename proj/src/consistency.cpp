#include "nsm/consistency.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "nsm/errors.hpp"
#include "nsm/quadrature.hpp"
#include "nsm/rng.hpp"

namespace nsm {

Volatility Volatility::constant(double sigma) { return Volatility(Shape::constant, sigma, 0.0, {}); }

Volatility Volatility::exponential(double sigma, double decay) {
    if (!(decay > 0.0)) throw std::invalid_argument("exponential volatility needs decay > 0");
    return Volatility(Shape::exponential, sigma, decay, {});
}

Volatility Volatility::general(std::function<double(double, double)> fn) {
    if (!fn) throw std::invalid_argument("volatility function must be callable");
    return Volatility(Shape::general, 0.0, 0.0, std::move(fn));
}

double Volatility::operator()(double t, double tau) const {
    switch (shape_) {
        case Shape::constant:
            return sigma_;
        case Shape::exponential:
            return sigma_ * std::exp(-decay_ * tau);
        case Shape::general:
            return fn_(t, tau);
    }
    return 0.0;
}

double Volatility::integral(double t, double tau) const {
    switch (shape_) {
        case Shape::constant:
            return sigma_ * tau;
        case Shape::exponential:
            return sigma_ * -std::expm1(-decay_ * tau) / decay_;
        case Shape::general:
            return integrate([&](double s) { return fn_(t, s); }, 0.0, tau);
    }
    return 0.0;
}

Volatility model_volatility(const ShortRateModel& model) {
    if (const auto* hl = std::get_if<HoLeeModel>(&model)) return Volatility::constant(hl->sigma());
    const auto& hw = std::get<HullWhiteModel>(model);
    return Volatility::exponential(hw.sigma(), hw.a());
}

double musiela_drift_addon(const ShortRateModel& model, double tau) {
    return std::visit([&](const auto& m) { return m.musiela_drift_addon(tau); }, model);
}

void ConsistencyProblem::validate() const {
    if (tau_grid.size() < basis.size() + 2) {
        throw std::invalid_argument("tau grid needs at least basis size + 2 = " + std::to_string(basis.size() + 2) +
                                    " points, got " + std::to_string(tau_grid.size()));
    }
    for (double tau : tau_grid) {
        if (!(tau >= 0.0)) throw std::invalid_argument("tau grid entries must be >= 0");
    }
    if (t_samples.empty()) throw std::invalid_argument("need at least one t sample");
    for (double t : t_samples) {
        if (!(t >= 0.0)) throw std::invalid_argument("t samples must be >= 0");
    }
    if (!drift_addon) throw std::invalid_argument("drift add-on must be callable");
}

ConsistencyProblem make_problem(const ShortRateModel& model, FactorBasis basis) {
    return ConsistencyProblem{
        .basis = std::move(basis),
        .drift_addon = [model](double, double tau) { return musiela_drift_addon(model, tau); },
        .volatility = model_volatility(model),
        .state_basis = std::nullopt,
    };
}

std::string_view verdict_name(Verdict verdict) {
    switch (verdict) {
        case Verdict::consistent:
            return "consistent";
        case Verdict::inconsistent:
            return "inconsistent";
        case Verdict::indeterminate:
            return "indeterminate";
    }
    return "indeterminate";
}

double ConsistencyReport::max_drift_residual() const {
    double m = 0.0;
    for (const auto& t : tests) m = std::max(m, t.drift_residual);
    return m;
}

double ConsistencyReport::max_volatility_residual() const {
    double m = 0.0;
    for (const auto& t : tests) m = std::max(m, t.volatility_residual);
    return m;
}

Verdict classify(double max_residual, double tolerance) {
    if (max_residual <= tolerance) return Verdict::consistent;
    if (max_residual > kInconsistencyFactor * tolerance) return Verdict::inconsistent;
    return Verdict::indeterminate;
}

namespace {

std::vector<Sample> sample_on(std::span<const double> grid, const std::function<double(double)>& fn,
                              std::string_view what) {
    std::vector<Sample> out;
    out.reserve(grid.size());
    for (double tau : grid) {
        const double v = fn(tau);
        if (!std::isfinite(v)) {
            throw std::invalid_argument(std::string(what) + " is not finite at tau=" + std::to_string(tau));
        }
        out.push_back({tau, v});
    }
    return out;
}

// tau -> G_tau(tau; z), through the basis derivative when the state family is
// closed under d/dtau and pointwise otherwise.
std::function<double(double)> tau_derivative(const FactorBasis& state, const std::vector<double>& z) {
    CurveInBasis curve(state, z);
    try {
        return [d = differentiate_in_basis(curve)](double tau) { return d(tau); };
    } catch (const UnsupportedBasisError&) {
        return [curve](double tau) {
            double s = 0.0;
            for (std::size_t i = 0; i < curve.coefficients().size(); ++i) {
                s += curve.coefficients()[i] * curve.basis()[i].derivative(tau);
            }
            return s;
        };
    }
}

}  // namespace

ConsistencyReport check_consistency(const ConsistencyProblem& problem, std::span<const std::vector<double>> z_samples,
                                    double tolerance) {
    problem.validate();
    if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be > 0");
    if (z_samples.empty()) throw std::invalid_argument("need at least one z sample");
    for (const auto& z : z_samples) {
        if (z.size() != problem.state().size()) {
            throw std::invalid_argument("z sample has " + std::to_string(z.size()) + " entries, basis has " +
                                        std::to_string(problem.state().size()));
        }
    }

    ConsistencyReport report{.tolerance = tolerance, .basis = problem.basis, .tests = {}};
    for (double t : problem.t_samples) {
        const auto vol_samples =
            sample_on(problem.tau_grid, [&](double tau) { return problem.volatility(t, tau); }, "volatility");
        const auto vol_fit = fit_in_basis(vol_samples, problem.basis);

        for (std::size_t k = 0; k < z_samples.size(); ++k) {
            const auto g_tau = tau_derivative(problem.state(), z_samples[k]);
            const auto drift_samples = sample_on(
                problem.tau_grid,
                [&](double tau) {
                    return g_tau(tau) + problem.drift_addon(t, tau) + ConsistencyProblem::stratonovich_correction;
                },
                "drift");
            const auto drift_fit = fit_in_basis(drift_samples, problem.basis);
            report.tests.push_back({t, k, drift_fit.residual, vol_fit.residual, drift_fit.curve.coefficients(),
                                    vol_fit.curve.coefficients()});
        }
    }
    report.verdict = classify(std::max(report.max_drift_residual(), report.max_volatility_residual()), tolerance);
    return report;
}

FactorBasis free_lambda_basis(const ShortRateModel& model, double lambda_basis) {
    if (const auto* hw = std::get_if<HullWhiteModel>(&model)) return FactorBasis::hull_white(hw->a(), lambda_basis);
    return FactorBasis::ho_lee(lambda_basis);
}

ModelConsistencyCheck model_consistency_check(const ShortRateModel& model, FactorBasis basis, std::size_t extra_samples,
                                              std::uint64_t seed) {
    ModelConsistencyCheck out{make_problem(model, std::move(basis)), {}};
    out.problem.state_basis = manifold_basis(model);
    for (double t : out.problem.t_samples) {
        const double r_t = short_rate_moments(model, t).mean;
        out.z_samples.push_back(forward_curve(model, t, r_t).coefficients());
    }
    CounterRng rng(seed, 0);
    for (std::size_t k = 0; k < extra_samples; ++k) {
        std::vector<double> z(out.problem.state_basis->size());
        for (double& c : z) c = 0.02 * (2.0 * rng.uniform() - 1.0);
        out.z_samples.push_back(std::move(z));
    }
    return out;
}

ConsistencyReport check_model_consistency(const ShortRateModel& model, FactorBasis basis, double tolerance) {
    const auto check = model_consistency_check(model, std::move(basis));
    return check_consistency(check.problem, check.z_samples, tolerance);
}

ConsistencyReport check_free_lambda_failure(const ShortRateModel& model, double lambda_basis, double tolerance) {
    const double lambda_model = initial_curve(model).lambda;
    if (BasisFunction::exp_decay(lambda_model).collides_with(BasisFunction::exp_decay(lambda_basis))) {
        throw std::invalid_argument("free-lambda check needs lambda_basis != model lambda");
    }
    return check_model_consistency(model, free_lambda_basis(model, lambda_basis), tolerance);
}

}  // namespace nsm
