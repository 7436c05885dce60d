#include "qn/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qn {

double sphere_surface(int n) {
    if (n < 1) throw std::invalid_argument("sphere_surface: dimension must be >= 1");
    return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

double simpson(const std::function<double(double)>& f, double a, double b,
               std::size_t steps) {
    if (steps < 2) throw std::invalid_argument("simpson: steps must be >= 2");
    if (steps % 2 != 0) ++steps;
    const double h = (b - a) / static_cast<double>(steps);
    double odd = 0.0, even = 0.0;
    for (std::size_t i = 1; i < steps; i += 2) odd += f(a + h * static_cast<double>(i));
    for (std::size_t i = 2; i < steps; i += 2) even += f(a + h * static_cast<double>(i));
    return h / 3.0 * (f(a) + f(b) + 4.0 * odd + 2.0 * even);
}

double integrate_radial(const std::function<double(double)>& g, int n,
                        double r_max, std::size_t steps) {
    if (r_max <= 0.0) throw std::invalid_argument("integrate_radial: r_max must be positive");
    const double surf = sphere_surface(n);
    auto integrand = [&](double rho) {
        return g(rho) * surf * std::pow(rho, n - 1);
    };
    return simpson(integrand, 0.0, r_max, steps);
}

} // namespace qn
