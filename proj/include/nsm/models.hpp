#pragma once

// Ho-Lee and Hull-White one-factor short-rate models calibrated to a
// Nelson-Siegel initial forward curve f*(0, T).
//
//   Ho-Lee:      dr = theta(t) dt + sigma dW
//   Hull-White:  dr = (theta(t) - a r) dt + sigma dW
//
// theta(t) is chosen so that the model reproduces f*(0, .) exactly. Both
// models are affine, P(t, T) = exp(A(t, T) - r(t) B(t, T)), and the Musiela
// forward curve tau -> f(t, t + tau) stays inside a fixed extended
// Nelson-Siegel family:
//
//   Ho-Lee:      {tau, 1, e^{-lambda tau}, tau e^{-lambda tau}}
//   Hull-White:  {e^{-a tau}, e^{-2a tau}, 1, e^{-lambda tau}, tau e^{-lambda tau}}
//
// All times in years, rates continuously compounded. The short rate r_t is
// always an explicit argument so the same code serves analytic study and
// path simulation.

#include <string_view>
#include <variant>

#include "nsm/curves.hpp"

namespace nsm {

struct AffineCoefficients {
    double A = 0.0;  // log-price intercept
    double B = 0.0;  // years
};

struct ShortRateMoments {
    double mean = 0.0;
    double variance = 0.0;
};

class HoLeeModel {
   public:
    // sigma >= 0; sigma == 0 gives the deterministic limit.
    HoLeeModel(double sigma, NelsonSiegelParams initial_curve);

    double sigma() const { return sigma_; }
    const NelsonSiegelParams& initial_curve() const { return curve_; }
    // f*(0, 0) = z1 + z2
    double r0() const { return r0_; }

    double theta(double t) const;
    AffineCoefficients affine(double t, double T) const;
    double bond_price(double t, double T, double r_t) const;

    // Coefficients [sigma^2 t, C1(t), C2(t), C3(t)] over manifold_basis().
    CurveInBasis forward_curve(double t, double r_t) const;

    ShortRateMoments short_rate_moments(double t) const;
    // Law of r(t_to) given r(t_from) = r_from.
    ShortRateMoments transition(double t_from, double r_from, double t_to) const;

    FactorBasis manifold_basis() const { return FactorBasis::ho_lee(curve_.lambda); }

    // sigma^2 tau
    double musiela_drift_addon(double tau) const;
    double musiela_volatility(double tau) const;

   private:
    double sigma_;
    NelsonSiegelParams curve_;
    double r0_;
};

class HullWhiteModel {
   public:
    // a > 0, sigma >= 0. Throws DegenerateParametersError when lambda
    // coincides with a or 2a (the forward-curve basis would collapse).
    HullWhiteModel(double a, double sigma, NelsonSiegelParams initial_curve);

    double a() const { return a_; }
    double sigma() const { return sigma_; }
    const NelsonSiegelParams& initial_curve() const { return curve_; }
    double r0() const { return r0_; }

    double theta(double t) const;
    // f*(0, t) + sigma^2 / (2 a^2) (1 - e^{-a t})^2
    double alpha(double t) const;
    AffineCoefficients affine(double t, double T) const;
    double bond_price(double t, double T, double r_t) const;

    // Coefficients [C1(t), C2(t), z1, C4(t), C5(t)] over manifold_basis().
    CurveInBasis forward_curve(double t, double r_t) const;

    ShortRateMoments short_rate_moments(double t) const;
    ShortRateMoments transition(double t_from, double r_from, double t_to) const;

    FactorBasis manifold_basis() const { return FactorBasis::hull_white(a_, curve_.lambda); }

    // (sigma^2 / a) e^{-a tau} (1 - e^{-a tau})
    double musiela_drift_addon(double tau) const;
    double musiela_volatility(double tau) const;

   private:
    double a_;
    double sigma_;
    NelsonSiegelParams curve_;
    double r0_;
};

enum class ModelKind { ho_lee, hull_white };

std::string_view model_kind_name(ModelKind kind);

using ShortRateModel = std::variant<HoLeeModel, HullWhiteModel>;

ModelKind kind_of(const ShortRateModel& model);

// Thin dispatchers so callers that hold either model need no visit boilerplate.
double r0(const ShortRateModel& model);
double sigma(const ShortRateModel& model);
const NelsonSiegelParams& initial_curve(const ShortRateModel& model);
double bond_price(const ShortRateModel& model, double t, double T, double r_t);
CurveInBasis forward_curve(const ShortRateModel& model, double t, double r_t);
ShortRateMoments short_rate_moments(const ShortRateModel& model, double t);
ShortRateMoments transition(const ShortRateModel& model, double t_from, double r_from, double t_to);
FactorBasis manifold_basis(const ShortRateModel& model);

// Integral of the initial forward curve, int_0^T f*(0, s) ds, in closed form.
double integrated_ns(const NelsonSiegelParams& params, double T);

}  // namespace nsm
