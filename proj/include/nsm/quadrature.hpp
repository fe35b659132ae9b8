#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>

namespace nsm {

// Adaptive Gauss-Kronrod (61 point) on [lo, hi]. The tolerance is relative to
// the L1 norm of the integrand; for the smooth integrands used here that
// resolves absolute errors well below 1e-12.
template <class F>
double integrate(F&& f, double lo, double hi, double rel_tol = 1e-14) {
    if (hi == lo) return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 20, rel_tol);
}

}  // namespace nsm
