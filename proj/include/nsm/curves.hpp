#pragma once

// Nelson-Siegel and extended Nelson-Siegel forward curves.
//
// A forward curve in Musiela form is a function of time to maturity tau >= 0.
// Every curve family used here is linear in its coefficients over a small,
// closed set of factor shapes:
//
//   constant        1
//   linear          tau
//   exp_decay(r)    exp(-r tau)
//   tau_exp_decay(r) tau exp(-r tau)
//
// so a curve is just (basis, coefficients). Differentiation in tau maps the
// span back into itself whenever the companion shapes are present, and fitting
// reduces to linear least squares.
//
// Units: tau in years, rates continuously compounded decimals per annum,
// decay rates in 1/years.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nsm {

// Design matrices whose 2-norm condition number exceeds this are rejected.
inline constexpr double kMaxConditionNumber = 1e12;

// Two decay rates closer than this (relative) are treated as the same shape.
inline constexpr double kRateCollisionTolerance = 1e-9;

// f(tau) = z1 + z2 exp(-lambda tau) + z3 tau exp(-lambda tau).
struct NelsonSiegelParams {
    double z1 = 0.0;  // level
    double z2 = 0.0;  // slope
    double z3 = 0.0;  // curvature
    double lambda = 1.0;  // shape parameter, 1/years

    // Throws std::invalid_argument unless all fields are finite and lambda > 0.
    void validate() const;
};

double eval_ns(const NelsonSiegelParams& params, double tau);

enum class BasisKind { constant, linear, exp_decay, tau_exp_decay };

std::string_view kind_name(BasisKind kind);
std::optional<BasisKind> parse_kind(std::string_view name);

struct BasisFunction {
    BasisKind kind = BasisKind::constant;
    double rate = 0.0;  // only meaningful for the exponential kinds

    static BasisFunction constant() { return {BasisKind::constant, 0.0}; }
    static BasisFunction linear() { return {BasisKind::linear, 0.0}; }
    static BasisFunction exp_decay(double rate) { return {BasisKind::exp_decay, rate}; }
    static BasisFunction tau_exp_decay(double rate) { return {BasisKind::tau_exp_decay, rate}; }

    bool is_exponential() const {
        return kind == BasisKind::exp_decay || kind == BasisKind::tau_exp_decay;
    }

    double value(double tau) const;
    double derivative(double tau) const;

    // Same kind and (for exponential kinds) rates equal within kRateCollisionTolerance.
    bool collides_with(const BasisFunction& other) const;

    std::string to_string() const;
};

bool operator==(const BasisFunction& lhs, const BasisFunction& rhs);

// Ordered, non-empty family of distinct basis functions.
//
// Construction rejects duplicates and any family whose design matrix on the
// default tau grid is numerically rank deficient.
class FactorBasis {
   public:
    explicit FactorBasis(std::vector<BasisFunction> functions);

    // {1, e^{-lambda tau}, tau e^{-lambda tau}}
    static FactorBasis nelson_siegel(double lambda);
    // {tau, 1, e^{-lambda tau}, tau e^{-lambda tau}}
    static FactorBasis ho_lee(double lambda);
    // {e^{-a tau}, e^{-2a tau}, 1, e^{-lambda tau}, tau e^{-lambda tau}}
    static FactorBasis hull_white(double a, double lambda);

    std::size_t size() const { return functions_.size(); }
    const BasisFunction& operator[](std::size_t i) const { return functions_[i]; }
    const std::vector<BasisFunction>& functions() const { return functions_; }

    std::optional<std::size_t> index_of(const BasisFunction& fn) const;

    std::string to_string() const;

    friend bool operator==(const FactorBasis&, const FactorBasis&) = default;

   private:
    std::vector<BasisFunction> functions_;
};

class CurveInBasis {
   public:
    CurveInBasis(FactorBasis basis, std::vector<double> coefficients);

    const FactorBasis& basis() const { return basis_; }
    const std::vector<double>& coefficients() const { return coefficients_; }

    // No domain check; see eval_curve for the checked entry point.
    double operator()(double tau) const;

   private:
    FactorBasis basis_;
    std::vector<double> coefficients_;
};

double eval_curve(const CurveInBasis& curve, double tau);

CurveInBasis ns_as_curve(const NelsonSiegelParams& params);

// d/dtau of the curve, expressed in the same basis. Throws
// UnsupportedBasisError when a derivative needs a shape the basis lacks.
CurveInBasis differentiate_in_basis(const CurveInBasis& curve);

struct Sample {
    double tau = 0.0;
    double value = 0.0;
};

struct BasisFit {
    CurveInBasis curve;
    double residual = 0.0;  // max |fit - value| over the samples
};

// Ordinary least squares via column-pivoted QR. Needs at least basis.size()
// samples with distinct tau >= 0; throws IllConditionedError when the design
// matrix condition number exceeds kMaxConditionNumber.
BasisFit fit_in_basis(std::span<const Sample> samples, const FactorBasis& basis);

// Samples fn on tau_grid (default_tau_grid() when empty) and fits.
BasisFit fit_function_in_basis(const std::function<double(double)>& fn, const FactorBasis& basis,
                               std::span<const double> tau_grid = {});

std::vector<double> uniform_grid(double lo, double hi, std::size_t points);

// 61 points on [0, 30] years.
std::vector<double> default_tau_grid();

struct NelsonSiegelFit {
    NelsonSiegelParams params;
    double residual = 0.0;
};

// Profiles out (z1, z2, z3) by least squares for every lambda on the grid,
// keeps the lambda with the smallest sup-norm residual (ties go to the
// smaller lambda) and refines it by golden-section search between the grid
// neighbours.
NelsonSiegelFit fit_ns(std::span<const Sample> samples, std::span<const double> lambda_grid);

}  // namespace nsm
