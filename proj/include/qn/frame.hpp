#pragma once

#include "qn/linalg.hpp"
#include "qn/rng.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace qn {

/**
 * Normalised bump phi(x) = c_d * sigmoid(r^2 - |x|^2) on R^n with
 * integral exactly 1 (up to quadrature error).  r_max is the truncation
 * radius used for the normaliser; past it the integrand tail is below the
 * tolerance the normaliser was built with.
 */
struct MotherFunction {
    int n = 1;
    double r = 4.0;
    double c_d = 1.0;
    double r_max = 10.0;

    double value_radial(double rho) const;
    double value(const Vec& x) const;
};

/**
 * Compute c_d so that phi integrates to 1.  The truncation radius is grown
 * until an analytic tail bound for the sigmoid integrand drops below
 * tail_tol; failure to reach it raises std::runtime_error.
 */
MotherFunction normalize_mother(int n, double r, std::size_t steps = 65536,
                                double tail_tol = 1e-10);

/// Scaled kernel S_k(x, y) = 2^k phi(2^{k/n} (x - y)).
double kernel_S(const MotherFunction& m, int k, const Vec& x, const Vec& y);
double kernel_S_radial(const MotherFunction& m, int k, double dist);

/// Quadrature of S_k(., y) over R^n (should be 1 for every k).
double kernel_mass(const MotherFunction& m, int k, std::size_t steps = 65536);

/**
 * Frame atom at scale k sitting on the lattice 2^{-k/n} Z^n; idx holds the
 * exact integer lattice coordinates and point() the materialised position.
 */
struct FrameAtom {
    int k = 0;
    std::vector<long long> idx;

    Vec point(int n) const;
};

/// Lattice spacing at scale k: 2^{-k/n}.
double lattice_spacing(int n, int k);

/**
 * Wavelet atom psi_{k,b}(x) = 2^{-k/2} (S_k(x,b) - S_{k-1}(x,b)); equals
 * 2^{k/2} psi_{0,0}(2^{k/n} (x-b)) by the scaling identity.
 */
double atom_psi(const MotherFunction& m, int k, const Vec& b, const Vec& x);
double atom_psi_radial(const MotherFunction& m, int k, double dist);

/// Radius past which |psi_{0,0}| stays below rel_tol times its peak.
double psi_support_radius(const MotherFunction& m, double rel_tol = 1e-8);

struct FrameExpansion {
    MotherFunction mother;
    std::vector<FrameAtom> atoms;
    Vec coeffs;
};

/**
 * All lattice atoms for scales k_min..k_max whose effective support
 * intersects the box [lo, hi] (per axis).  Throws std::runtime_error with
 * the offending count if the grid would exceed `cap` atoms.
 */
std::vector<FrameAtom> build_grid(const MotherFunction& m, const Vec& lo, const Vec& hi,
                                  int k_min, int k_max, std::size_t cap = 1000000);

double synthesize(const FrameExpansion& e, const Vec& x);

/// Sum of absolute coefficients of the expansion at hand.
double l1_frame_norm(const FrameExpansion& e);

/**
 * Keep the N largest-|coefficient| atoms (all of them if N >= size); ties
 * broken toward smaller (k, idx) lexicographically.  The kept atoms are
 * returned sorted by (k, idx).
 */
FrameExpansion greedy_n_term(const FrameExpansion& e, std::size_t n_keep);

/// Tensor-grid Simpson L2 distance between two fields over a box.
double l2_error(const std::function<double(const Vec&)>& f,
                const std::function<double(const Vec&)>& g,
                const Vec& lo, const Vec& hi, std::size_t pts_per_axis);

/// Random target: natoms distinct grid atoms, |c| = 1/u with u uniform on
/// (0.1, 1], random signs.
FrameExpansion make_random_expansion(const MotherFunction& m, const Vec& lo, const Vec& hi,
                                     int k_min, int k_max, std::size_t natoms, Rng& rng);

struct RateRow {
    std::size_t n_kept = 0;
    double error = 0.0;
    double bound = 0.0;
    double log_ratio = 0.0;
};

/**
 * Greedy n-term approximation sweep.  For each N: L2 error of f - f_N over
 * the expansion's support box, the budget |f|_L1 (N+1)^{-1/2}, and
 * log(error/|f|_L1) / log(N+1).
 */
std::vector<RateRow> rate_experiment(const FrameExpansion& target,
                                     const std::vector<std::size_t>& ns,
                                     std::size_t pts_per_axis);

} // namespace qn
