#include "nsm/curves.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "nsm/errors.hpp"

namespace nsm {

namespace {

void require_tau(double tau) {
    if (!(tau >= 0.0)) {
        throw DomainError("tau must be >= 0, got " + std::to_string(tau));
    }
}

Eigen::MatrixXd design_matrix(std::span<const double> taus, const FactorBasis& basis) {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(taus.size()), static_cast<Eigen::Index>(basis.size()));
    for (std::size_t i = 0; i < taus.size(); ++i) {
        for (std::size_t j = 0; j < basis.size(); ++j) {
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = basis[j].value(taus[i]);
        }
    }
    return x;
}

double condition_number(const Eigen::MatrixXd& x) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(x);
    const auto& s = svd.singularValues();
    if (s.size() == 0) return std::numeric_limits<double>::infinity();
    const double smallest = s(s.size() - 1);
    if (smallest <= 0.0) return std::numeric_limits<double>::infinity();
    return s(0) / smallest;
}

std::string format_rate(double r) {
    std::ostringstream os;
    os.precision(12);
    os << r;
    return os.str();
}

}  // namespace

void NelsonSiegelParams::validate() const {
    if (!std::isfinite(z1) || !std::isfinite(z2) || !std::isfinite(z3) || !std::isfinite(lambda)) {
        throw std::invalid_argument("Nelson-Siegel parameters must be finite");
    }
    if (!(lambda > 0.0)) {
        throw std::invalid_argument("Nelson-Siegel lambda must be > 0, got " + format_rate(lambda));
    }
}

double eval_ns(const NelsonSiegelParams& params, double tau) {
    require_tau(tau);
    const double e = std::exp(-params.lambda * tau);
    // Same operation order as eval_curve over ns_as_curve, so both agree bit for bit.
    double sum = params.z1;
    sum += params.z2 * e;
    sum += params.z3 * (tau * e);
    return sum;
}

std::string_view kind_name(BasisKind kind) {
    switch (kind) {
        case BasisKind::constant:
            return "constant";
        case BasisKind::linear:
            return "linear";
        case BasisKind::exp_decay:
            return "exp_decay";
        case BasisKind::tau_exp_decay:
            return "tau_exp_decay";
    }
    return "unknown";
}

std::optional<BasisKind> parse_kind(std::string_view name) {
    for (auto k : {BasisKind::constant, BasisKind::linear, BasisKind::exp_decay, BasisKind::tau_exp_decay}) {
        if (kind_name(k) == name) return k;
    }
    return std::nullopt;
}

double BasisFunction::value(double tau) const {
    switch (kind) {
        case BasisKind::constant:
            return 1.0;
        case BasisKind::linear:
            return tau;
        case BasisKind::exp_decay:
            return std::exp(-rate * tau);
        case BasisKind::tau_exp_decay:
            return tau * std::exp(-rate * tau);
    }
    return 0.0;
}

double BasisFunction::derivative(double tau) const {
    switch (kind) {
        case BasisKind::constant:
            return 0.0;
        case BasisKind::linear:
            return 1.0;
        case BasisKind::exp_decay:
            return -rate * std::exp(-rate * tau);
        case BasisKind::tau_exp_decay:
            return (1.0 - rate * tau) * std::exp(-rate * tau);
    }
    return 0.0;
}

bool BasisFunction::collides_with(const BasisFunction& other) const {
    if (kind != other.kind) return false;
    if (!is_exponential()) return true;
    const double scale = std::max(std::abs(rate), std::abs(other.rate));
    return std::abs(rate - other.rate) <= kRateCollisionTolerance * scale;
}

std::string BasisFunction::to_string() const {
    std::string s(kind_name(kind));
    if (is_exponential()) s += "(" + format_rate(rate) + ")";
    return s;
}

bool operator==(const BasisFunction& lhs, const BasisFunction& rhs) {
    return lhs.kind == rhs.kind && lhs.rate == rhs.rate;
}

FactorBasis::FactorBasis(std::vector<BasisFunction> functions) : functions_(std::move(functions)) {
    if (functions_.empty()) throw std::invalid_argument("factor basis must not be empty");
    for (const auto& fn : functions_) {
        if (fn.is_exponential() && !(std::isfinite(fn.rate) && fn.rate > 0.0)) {
            throw std::invalid_argument("decay rate must be finite and > 0 in " + fn.to_string());
        }
        if (!fn.is_exponential() && fn.rate != 0.0) {
            throw std::invalid_argument(std::string(kind_name(fn.kind)) + " basis function takes no rate");
        }
    }
    for (std::size_t i = 0; i < functions_.size(); ++i) {
        for (std::size_t j = i + 1; j < functions_.size(); ++j) {
            if (functions_[i].collides_with(functions_[j])) {
                throw DegenerateParametersError("duplicate basis functions " + functions_[i].to_string() +
                                                " and " + functions_[j].to_string() + " in " + to_string());
            }
        }
    }
    const auto grid = default_tau_grid();
    const double cond = condition_number(design_matrix(grid, *this));
    if (!(cond <= kMaxConditionNumber)) {
        throw IllConditionedError("basis " + to_string() + " is numerically dependent on the default grid (cond " +
                                  format_rate(cond) + ")");
    }
}

FactorBasis FactorBasis::nelson_siegel(double lambda) {
    return FactorBasis({BasisFunction::constant(), BasisFunction::exp_decay(lambda),
                        BasisFunction::tau_exp_decay(lambda)});
}

FactorBasis FactorBasis::ho_lee(double lambda) {
    return FactorBasis({BasisFunction::linear(), BasisFunction::constant(), BasisFunction::exp_decay(lambda),
                        BasisFunction::tau_exp_decay(lambda)});
}

FactorBasis FactorBasis::hull_white(double a, double lambda) {
    return FactorBasis({BasisFunction::exp_decay(a), BasisFunction::exp_decay(2.0 * a), BasisFunction::constant(),
                        BasisFunction::exp_decay(lambda), BasisFunction::tau_exp_decay(lambda)});
}

std::optional<std::size_t> FactorBasis::index_of(const BasisFunction& fn) const {
    for (std::size_t i = 0; i < functions_.size(); ++i) {
        if (functions_[i].collides_with(fn)) return i;
    }
    return std::nullopt;
}

std::string FactorBasis::to_string() const {
    std::string s = "{";
    for (std::size_t i = 0; i < functions_.size(); ++i) {
        if (i) s += ", ";
        s += functions_[i].to_string();
    }
    return s + "}";
}

CurveInBasis::CurveInBasis(FactorBasis basis, std::vector<double> coefficients)
    : basis_(std::move(basis)), coefficients_(std::move(coefficients)) {
    if (coefficients_.size() != basis_.size()) {
        throw std::invalid_argument("curve has " + std::to_string(coefficients_.size()) +
                                    " coefficients for a basis of size " + std::to_string(basis_.size()));
    }
    for (double c : coefficients_) {
        if (!std::isfinite(c)) throw std::invalid_argument("curve coefficients must be finite");
    }
}

double CurveInBasis::operator()(double tau) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < coefficients_.size(); ++i) sum += coefficients_[i] * basis_[i].value(tau);
    return sum;
}

double eval_curve(const CurveInBasis& curve, double tau) {
    require_tau(tau);
    return curve(tau);
}

CurveInBasis ns_as_curve(const NelsonSiegelParams& params) {
    params.validate();
    return CurveInBasis(FactorBasis::nelson_siegel(params.lambda), {params.z1, params.z2, params.z3});
}

CurveInBasis differentiate_in_basis(const CurveInBasis& curve) {
    const auto& basis = curve.basis();
    std::vector<double> out(basis.size(), 0.0);

    auto companion = [&](const BasisFunction& needed, const BasisFunction& from) {
        auto idx = basis.index_of(needed);
        if (!idx) {
            throw UnsupportedBasisError("basis " + basis.to_string() + " is not closed under d/dtau: derivative of " +
                                        from.to_string() + " needs " + needed.to_string());
        }
        return *idx;
    };

    for (std::size_t i = 0; i < basis.size(); ++i) {
        const auto& fn = basis[i];
        const double c = curve.coefficients()[i];
        switch (fn.kind) {
            case BasisKind::constant:
                break;
            case BasisKind::linear:
                out[companion(BasisFunction::constant(), fn)] += c;
                break;
            case BasisKind::exp_decay:
                out[i] += -fn.rate * c;
                break;
            case BasisKind::tau_exp_decay:
                out[companion(BasisFunction::exp_decay(fn.rate), fn)] += c;
                out[i] += -fn.rate * c;
                break;
        }
    }
    return CurveInBasis(basis, std::move(out));
}

BasisFit fit_in_basis(std::span<const Sample> samples, const FactorBasis& basis) {
    if (samples.size() < basis.size()) {
        throw std::invalid_argument("need at least " + std::to_string(basis.size()) + " samples to fit basis " +
                                    basis.to_string() + ", got " + std::to_string(samples.size()));
    }
    std::vector<double> taus;
    taus.reserve(samples.size());
    Eigen::VectorXd y(static_cast<Eigen::Index>(samples.size()));
    for (std::size_t i = 0; i < samples.size(); ++i) {
        require_tau(samples[i].tau);
        if (!std::isfinite(samples[i].value)) {
            throw std::invalid_argument("non-finite sample value at tau=" + format_rate(samples[i].tau));
        }
        taus.push_back(samples[i].tau);
        y(static_cast<Eigen::Index>(i)) = samples[i].value;
    }
    {
        auto sorted = taus;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw std::invalid_argument("sample tau values must be distinct");
        }
    }

    const Eigen::MatrixXd x = design_matrix(taus, basis);
    const double cond = condition_number(x);
    if (!(cond <= kMaxConditionNumber)) {
        throw IllConditionedError("design matrix for basis " + basis.to_string() + " is ill-conditioned (cond " +
                                  format_rate(cond) + ")");
    }

    const Eigen::VectorXd c = x.colPivHouseholderQr().solve(y);
    const double residual = (x * c - y).cwiseAbs().maxCoeff();
    return {CurveInBasis(basis, std::vector<double>(c.data(), c.data() + c.size())), residual};
}

BasisFit fit_function_in_basis(const std::function<double(double)>& fn, const FactorBasis& basis,
                               std::span<const double> tau_grid) {
    std::vector<double> fallback;
    if (tau_grid.empty()) {
        fallback = default_tau_grid();
        tau_grid = fallback;
    }
    std::vector<Sample> samples;
    samples.reserve(tau_grid.size());
    for (double tau : tau_grid) samples.push_back({tau, fn(tau)});
    return fit_in_basis(samples, basis);
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t points) {
    if (points < 2 || !(hi > lo)) throw std::invalid_argument("uniform grid needs hi > lo and at least 2 points");
    std::vector<double> g(points);
    const double step = (hi - lo) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) g[i] = lo + step * static_cast<double>(i);
    g.back() = hi;
    return g;
}

std::vector<double> default_tau_grid() { return uniform_grid(0.0, 30.0, 61); }

NelsonSiegelFit fit_ns(std::span<const Sample> samples, std::span<const double> lambda_grid) {
    if (samples.size() < 4) throw std::invalid_argument("need at least 4 samples");
    if (lambda_grid.empty()) throw std::invalid_argument("lambda grid must not be empty");
    for (double l : lambda_grid) {
        if (!(std::isfinite(l) && l > 0.0)) throw std::invalid_argument("lambda grid entries must be > 0");
    }
    std::vector<double> grid(lambda_grid.begin(), lambda_grid.end());
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    auto fit_at = [&](double lambda) { return fit_in_basis(samples, FactorBasis::nelson_siegel(lambda)); };

    double scale = 0.0;
    for (const auto& s : samples) scale = std::max(scale, std::abs(s.value));
    // Residual differences below this are rounding noise, not a better fit.
    const double tie = 1e-14 * std::max(1.0, scale);

    std::size_t best_idx = 0;
    BasisFit best = fit_at(grid[0]);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        auto candidate = fit_at(grid[i]);
        if (candidate.residual < best.residual - tie) {
            best = std::move(candidate);
            best_idx = i;
        }
    }
    double best_lambda = grid[best_idx];

    const double lo = grid[best_idx > 0 ? best_idx - 1 : best_idx];
    const double hi = grid[best_idx + 1 < grid.size() ? best_idx + 1 : best_idx];
    if (hi > lo) {
        const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
        auto objective = [&](double l) { return fit_at(l).residual; };
        double a = lo, b = hi;
        double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
        double f1 = objective(x1), f2 = objective(x2);
        while (b - a > 1e-10 * std::max(1.0, b)) {
            if (f1 <= f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - inv_phi * (b - a);
                f1 = objective(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + inv_phi * (b - a);
                f2 = objective(x2);
            }
        }
        const double refined = 0.5 * (a + b);
        auto candidate = fit_at(refined);
        if (candidate.residual < best.residual - tie) {
            best = std::move(candidate);
            best_lambda = refined;
        }
    }

    const auto& c = best.curve.coefficients();
    return {NelsonSiegelParams{c[0], c[1], c[2], best_lambda}, best.residual};
}

}  // namespace nsm
