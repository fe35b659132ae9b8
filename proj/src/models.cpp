#include "nsm/models.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>
#include <string>

#include "nsm/errors.hpp"

namespace nsm {

namespace {

void require_time(double t) {
    if (!(t >= 0.0)) throw DomainError("time must be >= 0, got " + std::to_string(t));
}

void require_ordered(double t, double T) {
    require_time(t);
    if (!(T >= t)) throw DomainError("need t <= T, got t=" + std::to_string(t) + " T=" + std::to_string(T));
}

void require_sigma(double sigma) {
    if (!(std::isfinite(sigma) && sigma >= 0.0)) {
        throw std::invalid_argument("sigma must be finite and >= 0");
    }
}

// 1 - e^{-x}
double one_minus_exp(double x) { return -std::expm1(-x); }

// (z2 + z3 s) e^{-lambda s}: the non-constant part of f*(0, s).
double ns_hump(const NelsonSiegelParams& p, double s) { return (p.z2 + p.z3 * s) * std::exp(-p.lambda * s); }

}  // namespace

double integrated_ns(const NelsonSiegelParams& p, double T) {
    require_time(T);
    const double l = p.lambda;
    const double e = std::exp(-l * T);
    // int_0^T s e^{-l s} ds = (1 - e^{-lT}(1 + lT)) / l^2
    const double tau_exp_integral = (one_minus_exp(l * T) - l * T * e) / (l * l);
    return p.z1 * T + p.z2 * one_minus_exp(l * T) / l + p.z3 * tau_exp_integral;
}

// ---------------------------------------------------------------- Ho-Lee

HoLeeModel::HoLeeModel(double sigma, NelsonSiegelParams initial_curve)
    : sigma_(sigma), curve_(initial_curve), r0_(initial_curve.z1 + initial_curve.z2) {
    require_sigma(sigma_);
    curve_.validate();
}

double HoLeeModel::theta(double t) const {
    require_time(t);
    const auto& [z1, z2, z3, l] = curve_;
    const double e = std::exp(-l * t);
    return sigma_ * sigma_ * t + (z3 - z2 * l) * e - z3 * l * t * e;
}

AffineCoefficients HoLeeModel::affine(double t, double T) const {
    require_ordered(t, T);
    const double tau = T - t;
    // ln P(t,T) = -int_t^T f(t,u) du with f(t,u) - r = sigma^2 t (u - t) + g(u) - g(t),
    // g the hump part of f*. The g integral is -(G(T) - G(t)) where
    // G(s) = -(z2 + z3 s) e^{-l s} / l - z3 e^{-l s} / l^2.
    const double l = curve_.lambda;
    auto antiderivative = [&](double s) {
        const double e = std::exp(-l * s);
        return -(curve_.z2 + curve_.z3 * s) * e / l - curve_.z3 * e / (l * l);
    };
    const double A = -0.5 * sigma_ * sigma_ * t * tau * tau - (antiderivative(T) - antiderivative(t)) +
                     ns_hump(curve_, t) * tau;
    return {A, tau};
}

double HoLeeModel::bond_price(double t, double T, double r_t) const {
    const auto [A, B] = affine(t, T);
    return std::exp(A - r_t * B);
}

CurveInBasis HoLeeModel::forward_curve(double t, double r_t) const {
    require_time(t);
    const auto& [z1, z2, z3, l] = curve_;
    const double e = std::exp(-l * t);
    const double c2 = (z2 + z3 * t) * e;
    return CurveInBasis(manifold_basis(), {sigma_ * sigma_ * t, r_t - c2, c2, z3 * e});
}

ShortRateMoments HoLeeModel::short_rate_moments(double t) const {
    require_time(t);
    const auto& [z1, z2, z3, l] = curve_;
    // Deterministic part of r(t) - r(0) as an antiderivative in t; its
    // additive constant is fixed by pinning mean(0) = r0.
    auto drift_part = [&](double s) { return 0.5 * sigma_ * sigma_ * s * s - z3 / l + ns_hump(curve_, s); };
    const double mean = r0_ + (drift_part(t) - drift_part(0.0));
    // r0 + int_0^t theta must agree with the pinned expression.
    assert(std::abs(mean - (r0_ + 0.5 * sigma_ * sigma_ * t * t + ns_hump(curve_, t) - z2)) <=
           1e-12 * (1.0 + std::abs(mean)));
    return {mean, sigma_ * sigma_ * t};
}

ShortRateMoments HoLeeModel::transition(double t_from, double r_from, double t_to) const {
    require_ordered(t_from, t_to);
    const double drift = short_rate_moments(t_to).mean - short_rate_moments(t_from).mean;
    return {r_from + drift, sigma_ * sigma_ * (t_to - t_from)};
}

double HoLeeModel::musiela_drift_addon(double tau) const { return sigma_ * sigma_ * tau; }

double HoLeeModel::musiela_volatility(double) const { return sigma_; }

// ------------------------------------------------------------ Hull-White

HullWhiteModel::HullWhiteModel(double a, double sigma, NelsonSiegelParams initial_curve)
    : a_(a), sigma_(sigma), curve_(initial_curve), r0_(initial_curve.z1 + initial_curve.z2) {
    if (!(std::isfinite(a_) && a_ > 0.0)) throw std::invalid_argument("mean reversion a must be finite and > 0");
    require_sigma(sigma_);
    curve_.validate();
    const auto lam = BasisFunction::exp_decay(curve_.lambda);
    if (lam.collides_with(BasisFunction::exp_decay(a_)) || lam.collides_with(BasisFunction::exp_decay(2.0 * a_))) {
        throw DegenerateParametersError("Hull-White forward curves need lambda distinct from a and 2a (lambda=" +
                                        std::to_string(curve_.lambda) + ", a=" + std::to_string(a_) +
                                        "); the extended Nelson-Siegel basis is rank deficient otherwise");
    }
}

double HullWhiteModel::theta(double t) const {
    require_time(t);
    const auto& [z1, z2, z3, l] = curve_;
    const double e = std::exp(-l * t);
    return a_ * z1 + (z3 - z2 * l + a_ * z2) * e + (a_ * z3 - z3 * l) * t * e +
           sigma_ * sigma_ / (2.0 * a_) * one_minus_exp(2.0 * a_ * t);
}

double HullWhiteModel::alpha(double t) const {
    require_time(t);
    const double g = one_minus_exp(a_ * t);
    return eval_ns(curve_, t) + sigma_ * sigma_ / (2.0 * a_ * a_) * g * g;
}

AffineCoefficients HullWhiteModel::affine(double t, double T) const {
    require_ordered(t, T);
    const double B = one_minus_exp(a_ * (T - t)) / a_;
    // ln P*(0,T) - ln P*(0,t) + B f*(0,t) - sigma^2/(4a) (1 - e^{-2at}) B^2
    const double A = -(integrated_ns(curve_, T) - integrated_ns(curve_, t)) + B * eval_ns(curve_, t) -
                     sigma_ * sigma_ / (4.0 * a_) * one_minus_exp(2.0 * a_ * t) * B * B;
    return {A, B};
}

double HullWhiteModel::bond_price(double t, double T, double r_t) const {
    const auto [A, B] = affine(t, T);
    return std::exp(A - r_t * B);
}

CurveInBasis HullWhiteModel::forward_curve(double t, double r_t) const {
    require_time(t);
    const auto& [z1, z2, z3, l] = curve_;
    const double s2 = sigma_ * sigma_ / (a_ * a_);
    const double e = std::exp(-l * t);
    const double c1 = s2 * one_minus_exp(a_ * t) - alpha(t) + r_t;
    const double c2 = -0.5 * s2 * one_minus_exp(2.0 * a_ * t);
    return CurveInBasis(manifold_basis(), {c1, c2, z1, (z2 + z3 * t) * e, z3 * e});
}

ShortRateMoments HullWhiteModel::short_rate_moments(double t) const {
    require_time(t);
    const double decay = std::exp(-a_ * t);
    const double mean = r0_ * decay + alpha(t) - alpha(0.0) * decay;
    return {mean, sigma_ * sigma_ * one_minus_exp(2.0 * a_ * t) / (2.0 * a_)};
}

ShortRateMoments HullWhiteModel::transition(double t_from, double r_from, double t_to) const {
    require_ordered(t_from, t_to);
    const double dt = t_to - t_from;
    const double decay = std::exp(-a_ * dt);
    return {r_from * decay + alpha(t_to) - alpha(t_from) * decay,
            sigma_ * sigma_ * one_minus_exp(2.0 * a_ * dt) / (2.0 * a_)};
}

double HullWhiteModel::musiela_drift_addon(double tau) const {
    const double e = std::exp(-a_ * tau);
    return sigma_ * sigma_ / a_ * e * (1.0 - e);
}

double HullWhiteModel::musiela_volatility(double tau) const { return sigma_ * std::exp(-a_ * tau); }

// ------------------------------------------------------------- dispatch

std::string_view model_kind_name(ModelKind kind) {
    return kind == ModelKind::ho_lee ? "ho_lee" : "hull_white";
}

ModelKind kind_of(const ShortRateModel& model) {
    return std::holds_alternative<HoLeeModel>(model) ? ModelKind::ho_lee : ModelKind::hull_white;
}

double r0(const ShortRateModel& model) {
    return std::visit([](const auto& m) { return m.r0(); }, model);
}

double sigma(const ShortRateModel& model) {
    return std::visit([](const auto& m) { return m.sigma(); }, model);
}

const NelsonSiegelParams& initial_curve(const ShortRateModel& model) {
    return std::visit([](const auto& m) -> const NelsonSiegelParams& { return m.initial_curve(); }, model);
}

double bond_price(const ShortRateModel& model, double t, double T, double r_t) {
    return std::visit([&](const auto& m) { return m.bond_price(t, T, r_t); }, model);
}

CurveInBasis forward_curve(const ShortRateModel& model, double t, double r_t) {
    return std::visit([&](const auto& m) { return m.forward_curve(t, r_t); }, model);
}

ShortRateMoments short_rate_moments(const ShortRateModel& model, double t) {
    return std::visit([&](const auto& m) { return m.short_rate_moments(t); }, model);
}

ShortRateMoments transition(const ShortRateModel& model, double t_from, double r_from, double t_to) {
    return std::visit([&](const auto& m) { return m.transition(t_from, r_from, t_to); }, model);
}

FactorBasis manifold_basis(const ShortRateModel& model) {
    return std::visit([](const auto& m) { return m.manifold_basis(); }, model);
}

}  // namespace nsm
