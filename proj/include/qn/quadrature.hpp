#pragma once

#include <cstddef>
#include <functional>

namespace qn {

/// Surface area of the unit sphere S^{n-1} in R^n (2 for n=1, 2*pi for n=2, ...).
double sphere_surface(int n);

/**
 * Composite Simpson rule for f over [a, b] with `steps` subintervals.
 * `steps` is rounded up to the next even count; steps >= 2 required.
 */
double simpson(const std::function<double(double)>& f, double a, double b,
               std::size_t steps);

/**
 * Integral over R^n of a radial profile g(|x|), computed as
 * Surf(n) * int_0^{r_max} g(rho) rho^{n-1} drho with composite Simpson.
 *
 * The caller is responsible for choosing r_max past the effective support
 * of g; the tail beyond r_max is dropped.
 */
double integrate_radial(const std::function<double(double)>& g, int n,
                        double r_max, std::size_t steps);

} // namespace qn
