#pragma once

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <limits>

namespace grpsis::quad {

/// Adaptive Gauss-Kronrod (61-point) integral over a finite interval.
template <class F>
double integrate(F&& f, double a, double b, double tolerance = 1e-12) {
    if (!(b > a)) return 0.0;
    double error = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        f, a, b, 20, tolerance, &error);
}

/// Integral over [a, inf) via the exp-sinh transform, which handles algebraic tails.
template <class F>
double integrate_to_infinity(F&& f, double a, double tolerance = 1e-12) {
    boost::math::quadrature::exp_sinh<double> integrator(12);
    double error = 0.0;
    double l1 = 0.0;
    std::size_t levels = 0;
    return integrator.integrate(f, a, std::numeric_limits<double>::infinity(), tolerance, &error,
                                &l1, &levels);
}

} // namespace grpsis::quad
