#pragma once

// Numerical consistency test between a short-rate model and a linear forward
// curve manifold G(tau; z) = sum_i z_i phi_i(tau).
//
// A manifold is invariant under the Musiela forward-rate dynamics
//
//   df(t, tau) = (d/dtau f + sigma(t,tau) int_0^tau sigma(t,s) ds + phi) dt + sigma(t,tau) dW
//
// iff, for every (t, z),
//
//   G_tau(.; z) + sigma(t,.) int_0^. sigma(t,s) ds + phi(t,.)  in  Im G_z
//   sigma(t,.)                                                 in  Im G_z
//
// For a family linear in z, Im G_z is the span of the basis itself. Span
// membership is decided by the sup-norm least-squares residual on an
// overdetermined tau grid. The Stratonovich correction phi vanishes for the
// deterministic volatilities handled here.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "nsm/curves.hpp"
#include "nsm/models.hpp"

namespace nsm {

inline constexpr double kDefaultConsistencyTolerance = 1e-9;
// Residuals above tolerance but at most this multiple of it are "indeterminate".
inline constexpr double kInconsistencyFactor = 100.0;

// Deterministic forward-rate volatility sigma(t, tau).
class Volatility {
   public:
    static Volatility constant(double sigma);
    // sigma e^{-decay tau}
    static Volatility exponential(double sigma, double decay);
    static Volatility general(std::function<double(double t, double tau)> fn);

    double operator()(double t, double tau) const;

    // int_0^tau sigma(t, s) ds: closed form for the constant and exponential
    // shapes, adaptive quadrature otherwise.
    double integral(double t, double tau) const;

    // sigma(t, tau) * int_0^tau sigma(t, s) ds
    double hjm_drift(double t, double tau) const { return (*this)(t, tau) * integral(t, tau); }

    bool has_closed_form() const { return shape_ != Shape::general; }

   private:
    enum class Shape { constant, exponential, general };
    Volatility(Shape shape, double sigma, double decay, std::function<double(double, double)> fn)
        : shape_(shape), sigma_(sigma), decay_(decay), fn_(std::move(fn)) {}

    Shape shape_;
    double sigma_ = 0.0;
    double decay_ = 0.0;
    std::function<double(double, double)> fn_;
};

// Constant sigma for Ho-Lee, sigma e^{-a tau} for Hull-White.
Volatility model_volatility(const ShortRateModel& model);

// Closed-form Musiela drift add-on of the model (t-independent for both models).
double musiela_drift_addon(const ShortRateModel& model, double tau);

struct ConsistencyProblem {
    // Manifold whose span is tested.
    FactorBasis basis;
    std::function<double(double t, double tau)> drift_addon;
    Volatility volatility;
    std::vector<double> tau_grid = default_tau_grid();
    std::vector<double> t_samples = {0.0, 1.0, 5.0};
    // Family the z-samples parametrise; G_tau is formed in it. Unset means
    // `basis`, i.e. the manifold tested at its own points. May differ from
    // `basis` in size.
    std::optional<FactorBasis> state_basis;

    // Stratonovich correction; identically zero for deterministic volatility.
    static constexpr double stratonovich_correction = 0.0;

    const FactorBasis& state() const { return state_basis ? *state_basis : basis; }

    // Throws std::invalid_argument on an underdetermined grid or bad times.
    void validate() const;
};

// Problem for `model` against `basis`, drift add-on and volatility taken from
// the model's closed forms.
ConsistencyProblem make_problem(const ShortRateModel& model, FactorBasis basis);

enum class Verdict { consistent, inconsistent, indeterminate };

std::string_view verdict_name(Verdict verdict);

struct ConsistencyTest {
    double t = 0.0;
    std::size_t z_index = 0;
    double drift_residual = 0.0;
    double volatility_residual = 0.0;
    std::vector<double> drift_coefficients;
    std::vector<double> volatility_coefficients;
};

struct ConsistencyReport {
    Verdict verdict = Verdict::indeterminate;
    double tolerance = kDefaultConsistencyTolerance;
    FactorBasis basis;
    std::vector<ConsistencyTest> tests;

    double max_drift_residual() const;
    double max_volatility_residual() const;
};

// consistent:    every residual <= tolerance
// inconsistent:  some residual > kInconsistencyFactor * tolerance
// indeterminate: otherwise
Verdict classify(double max_residual, double tolerance);

ConsistencyReport check_consistency(const ConsistencyProblem& problem, std::span<const std::vector<double>> z_samples,
                                    double tolerance = kDefaultConsistencyTolerance);

// Consistency of `model` with the manifold spanned by `basis`, evaluated at
// points of the model's own manifold: the z-samples are the model's forward
// curves at problem.t_samples (r_t at its mean) plus `extra_samples`
// pseudo-random coefficient vectors, all over manifold_basis(model).
struct ModelConsistencyCheck {
    ConsistencyProblem problem;
    std::vector<std::vector<double>> z_samples;
};

ModelConsistencyCheck model_consistency_check(const ShortRateModel& model, FactorBasis basis,
                                              std::size_t extra_samples = 3, std::uint64_t seed = 0);

ConsistencyReport check_model_consistency(const ShortRateModel& model, FactorBasis basis,
                                          double tolerance = kDefaultConsistencyTolerance);

// The model's manifold family with the Nelson-Siegel decay rate replaced by
// lambda_basis (extension terms unchanged).
FactorBasis free_lambda_basis(const ShortRateModel& model, double lambda_basis);

// Requires lambda_basis != model lambda (std::invalid_argument otherwise).
ConsistencyReport check_free_lambda_failure(const ShortRateModel& model, double lambda_basis,
                                            double tolerance = kDefaultConsistencyTolerance);

}  // namespace nsm
