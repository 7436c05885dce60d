#pragma once

#include "qn/frame.hpp"
#include "qn/linalg.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace qn {

/**
 * Constant pack for the approximation-to-the-identity conditions on the
 * scaled kernels S_k over the quasi-metric |x-y|^n: size and smoothness
 * envelopes, admissibility radii, and the sigmoid envelope constant.
 */
struct AtIConstants {
    int n = 1;
    double epsilon = 1.0;   // in (0, 1/n]
    double zeta = 1.0;      // in (0, 1/n]
    double c = 1.0;         // envelope constant for the size/smoothness bound
    double c_rho = 1.0;     // quasi-metric weight
    double c_a = 0.5;       // admissibility factor, < 1
    double c_tilde = 1.0;   // second-difference envelope constant
    double c_tilde_a = 0.25; // second-difference admissibility factor, < 1/2
    double c_sigma = 1e6;   // sigmoid envelope constant
};

/**
 * Derive the constant pack for a given mother function: epsilon = zeta =
 * 1/n, C_rho = 1, C_A = 2^{-n}, C_tilde_A = 3^{-n}, C = c_multiplier *
 * C_d * C_sigma, C_tilde = 8 * 3^{n+3} * C_d * C_sigma.  The size bound
 * holds with c_multiplier = 1, the first-difference bound with 2^{n+2}.
 */
AtIConstants derive_constants(const MotherFunction& m, double c_sigma,
                              double c_multiplier = 1.0);

struct CheckReport {
    std::string id;
    std::size_t samples = 0;
    std::size_t violations = 0;
    double worst_margin = 0.0; // min over samples of (slack side); >= 0 on pass
    double accept_rate = 1.0;  // fraction of proposals admitted where sampling rejects
    std::string note;
};

struct SigmaDecayRow {
    double t = 0.0;
    std::array<double, 3> lhs{}; // |sigma^(i)(r^2 - t^2)|
    std::array<double, 3> rhs{}; // C_sigma (1 + |t|^n)^{-1-(2i+1)/n}
};

struct SigmaDecayResult {
    // Index 0..2: full t grid for derivative order i; 3..5: the same
    // inequality restricted to t >= 0, the radial form it is applied in.
    std::array<CheckReport, 6> reports;
    std::vector<SigmaDecayRow> curve;
};

/**
 * Pointwise envelope |sigma^(i)(r^2 - t^2)| <= C_sigma (1+|t|^n)^{-1-(2i+1)/n}
 * for i = 0,1,2 on a uniform t grid; the curve rows back log-scale plots.
 */
SigmaDecayResult check_sigma_decay(double c_sigma, int n, double r,
                                   double t_lo = -10.0, double t_hi = 10.0,
                                   double t_step = 1e-3);

/// Size bound: |S_k(x,y)| <= C 2^{-k eps} / (2^{-k} + C_rho |x-y|^n)^{1+eps}.
CheckReport check_size_bound(const MotherFunction& m, const AtIConstants& c,
                             std::size_t samples, std::uint64_t seed,
                             int k_lo = -6, int k_hi = 6, double box_halfwidth = 10.0);

/**
 * First-difference smoothness bound on admissible triples
 * C_rho |x-x'|^n <= C_A (2^{-k} + C_rho |x-y|^n), sampled by rejection
 * from uniform boxes with adaptive proposal shrinking.
 */
CheckReport check_lipschitz_bound(const MotherFunction& m, const AtIConstants& c,
                                  std::size_t samples, std::uint64_t seed,
                                  int k_lo = -6, int k_hi = 6, double box_halfwidth = 10.0);

/// Second-difference bound on quadruples admissible per max(|x-x'|^n, |y-y'|^n).
CheckReport check_double_lipschitz_bound(const MotherFunction& m, const AtIConstants& c,
                                         std::size_t samples, std::uint64_t seed,
                                         int k_lo = -6, int k_hi = 6,
                                         double box_halfwidth = 10.0);

/// Unit mass of S_k(., y) at selected scales, quadrature tolerance tol.
CheckReport check_unit_mass(const MotherFunction& m, const std::vector<int>& ks,
                            std::size_t steps = 65536, double tol = 1e-5);

/// Radial profile h_s with its first two derivatives; h(x) = h_s(|x|^2).
struct RadialProfile {
    std::string name;
    std::function<double(double)> h;
    std::function<double(double)> d1;
    std::function<double(double)> d2;
};

RadialProfile profile_linear();
RadialProfile profile_square();
RadialProfile profile_mother(const MotherFunction& m);

/**
 * Eigenvalues of the Hessian of x -> h_s(|x|^2) are 2 h_s' (multiplicity
 * n-1) and 4|x|^2 h_s'' + 2 h_s'; compares a central-difference Hessian's
 * spectrum against that multiset and the implied spectral-norm bound.
 */
CheckReport check_hessian_eigenvalues(const RadialProfile& p, const std::vector<int>& dims,
                                      std::size_t samples_per_dim, std::uint64_t seed,
                                      double fd_step = 1e-4, double tol = 1e-3);

/**
 * Segment geometry: for admissible triples and t in {0,.25,.5,.75,1},
 * |x + t(x'-x) - y|^n >= 2^{-n} |x-y|^n - 2^{-n} 2^{-k}; vacuously true
 * (negative right side) when |x-y|^n < 2^{-k}, and both regimes are sampled.
 */
CheckReport check_segment_geometry(int n, std::size_t samples, std::uint64_t seed,
                                   int k_lo = -6, int k_hi = 6, double box_halfwidth = 10.0);

/**
 * Two-segment geometry: for admissible quadruples and t_x, t_y on the same
 * grid, |x + t_x(x'-x) - y - t_y(y'-y)|^n >= 3^{-n} |x-y|^n - 3^{-n} 2^{1-k}.
 */
CheckReport check_double_segment_geometry(int n, std::size_t samples, std::uint64_t seed,
                                          int k_lo = -6, int k_hi = 6,
                                          double box_halfwidth = 10.0);

/// Power-mean inequality a^n + b^n >= 2^{1-n} (a+b)^n on random nonnegative pairs.
CheckReport check_jensen_two_term(int n_lo, int n_hi, std::size_t samples,
                                  std::uint64_t seed);

/// Three-term variant a^n + b^n + c^n >= 3^{1-n} (a+b+c)^n.
CheckReport check_jensen_three_term(int n_lo, int n_hi, std::size_t samples,
                                    std::uint64_t seed);

} // namespace qn
