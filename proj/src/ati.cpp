#include "qn/ati.hpp"

#include "qn/activation.hpp"
#include "qn/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace qn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double pow_int(double base, int n) {
    double r = 1.0;
    for (int i = 0; i < n; ++i) r *= base;
    return r;
}

double dist(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

Vec random_point(Rng& rng, int n, double halfwidth) {
    Vec x(n);
    for (int i = 0; i < n; ++i) x[i] = rng.uniform(-halfwidth, halfwidth);
    return x;
}

// Tracks a minimum slack and a violation count; geometric identities that
// can come arbitrarily close to equality get a small roundoff guard.
struct MarginTracker {
    double worst = kInf;
    std::size_t violations = 0;

    void push(double margin, double guard = 0.0) {
        worst = std::min(worst, margin);
        if (margin < -guard) ++violations;
    }
};

// Proposes a perturbation of x from shrinking uniform boxes until the
// admissibility predicate accepts; counts proposals for the accept rate.
template <typename Pred>
Vec sample_admissible(Rng& rng, const Vec& x, double start_halfwidth, Pred&& admissible,
                      std::size_t& proposals) {
    double s = start_halfwidth;
    while (true) {
        for (int attempt = 0; attempt < 100; ++attempt) {
            Vec cand(x.size());
            for (std::size_t i = 0; i < x.size(); ++i)
                cand[i] = x[i] + rng.uniform(-s, s);
            ++proposals;
            if (admissible(cand)) return cand;
        }
        s *= 0.5;
        if (s < 1e-300)
            throw std::runtime_error("sample_admissible: proposal scale underflow");
    }
}

} // namespace

AtIConstants derive_constants(const MotherFunction& m, double c_sigma, double c_multiplier) {
    if (!(c_sigma > 0.0) || !(c_multiplier > 0.0))
        throw std::invalid_argument("derive_constants: constants must be positive");
    AtIConstants c;
    c.n = m.n;
    c.epsilon = 1.0 / m.n;
    c.zeta = 1.0 / m.n;
    c.c_rho = 1.0;
    c.c_a = pow_int(0.5, m.n);
    c.c_tilde_a = pow_int(1.0 / 3.0, m.n);
    c.c_sigma = c_sigma;
    c.c = c_multiplier * m.c_d * c_sigma;
    c.c_tilde = 8.0 * pow_int(3.0, m.n + 3) * m.c_d * c_sigma;
    if (!(c.epsilon > 0.0 && c.epsilon <= 1.0 / m.n) || !(c.c_a < 1.0) || !(c.c_tilde_a < 0.5))
        throw std::runtime_error("derive_constants: constraint violation");
    return c;
}

SigmaDecayResult check_sigma_decay(double c_sigma, int n, double r, double t_lo,
                                   double t_hi, double t_step) {
    if (!(t_step > 0.0) || !(t_lo < t_hi))
        throw std::invalid_argument("check_sigma_decay: bad grid");
    SigmaDecayResult out;
    const char* names[3] = {"sigmoid_envelope_order0", "sigmoid_envelope_order1",
                            "sigmoid_envelope_order2"};
    const char* radial_names[3] = {"sigmoid_envelope_radial_order0",
                                   "sigmoid_envelope_radial_order1",
                                   "sigmoid_envelope_radial_order2"};
    std::array<MarginTracker, 6> track;

    const std::size_t count = static_cast<std::size_t>(std::llround((t_hi - t_lo) / t_step)) + 1;
    out.curve.reserve(count);
    std::array<std::size_t, 2> grid_samples{0, 0};
    for (std::size_t i = 0; i < count; ++i) {
        const double t = t_lo + static_cast<double>(i) * t_step;
        const double a = r * r - t * t;
        SigmaDecayRow row;
        row.t = t;
        row.lhs = {sigmoid(a), std::abs(sigmoid_d1(a)), std::abs(sigmoid_d2(a))};
        const double base = 1.0 + std::pow(std::abs(t), n);
        ++grid_samples[0];
        if (t >= 0.0) ++grid_samples[1];
        for (int d = 0; d < 3; ++d) {
            row.rhs[d] = c_sigma * std::pow(base, -1.0 - (2.0 * d + 1.0) / n);
            const double margin = row.rhs[d] - row.lhs[d];
            track[d].push(margin);
            if (t >= 0.0) track[3 + d].push(margin);
        }
        out.curve.push_back(row);
    }
    for (int d = 0; d < 3; ++d) {
        out.reports[d] = {names[d], grid_samples[0], track[d].violations, track[d].worst, 1.0, ""};
        out.reports[3 + d] = {radial_names[d], grid_samples[1], track[3 + d].violations,
                              track[3 + d].worst, 1.0, ""};
    }
    return out;
}

CheckReport check_size_bound(const MotherFunction& m, const AtIConstants& c,
                             std::size_t samples, std::uint64_t seed, int k_lo, int k_hi,
                             double box_halfwidth) {
    Rng rng(seed);
    MarginTracker track;
    for (std::size_t i = 0; i < samples; ++i) {
        const int k = k_lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(k_hi - k_lo + 1)));
        const Vec x = random_point(rng, m.n, box_halfwidth);
        const Vec y = random_point(rng, m.n, box_halfwidth);
        const double rho = c.c_rho * std::pow(dist(x, y), m.n);
        const double denom = std::pow(2.0, -k) + rho;
        const double rhs = c.c * std::pow(2.0, -k * c.epsilon) * std::pow(denom, -1.0 - c.epsilon);
        const double lhs = std::abs(kernel_S(m, k, x, y));
        track.push(rhs - lhs);
    }
    return {"kernel_size_bound", samples, track.violations, track.worst, 1.0, ""};
}

CheckReport check_lipschitz_bound(const MotherFunction& m, const AtIConstants& c,
                                  std::size_t samples, std::uint64_t seed, int k_lo,
                                  int k_hi, double box_halfwidth) {
    Rng rng(seed);
    MarginTracker track;
    std::size_t proposals = 0;
    for (std::size_t i = 0; i < samples; ++i) {
        const int k = k_lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(k_hi - k_lo + 1)));
        const Vec x = random_point(rng, m.n, box_halfwidth);
        const Vec y = random_point(rng, m.n, box_halfwidth);
        const double rho = c.c_rho * std::pow(dist(x, y), m.n);
        const double denom = std::pow(2.0, -k) + rho;
        const double budget = c.c_a * denom;
        const Vec xp = sample_admissible(rng, x, box_halfwidth, [&](const Vec& cand) {
            return c.c_rho * std::pow(dist(x, cand), m.n) <= budget;
        }, proposals);

        const double move = c.c_rho * std::pow(dist(x, xp), m.n);
        const double lhs = std::abs(kernel_S(m, k, x, y) - kernel_S(m, k, xp, y));
        const double rhs = c.c * std::pow(move / denom, c.zeta) *
                           std::pow(2.0, -k * c.epsilon) * std::pow(denom, -1.0 - c.epsilon);
        track.push(rhs - lhs);
    }
    CheckReport rep{"kernel_lipschitz_bound", samples, track.violations, track.worst, 1.0, ""};
    rep.accept_rate = static_cast<double>(samples) / static_cast<double>(proposals);
    return rep;
}

CheckReport check_double_lipschitz_bound(const MotherFunction& m, const AtIConstants& c,
                                         std::size_t samples, std::uint64_t seed, int k_lo,
                                         int k_hi, double box_halfwidth) {
    Rng rng(seed);
    MarginTracker track;
    std::size_t proposals = 0;
    for (std::size_t i = 0; i < samples; ++i) {
        const int k = k_lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(k_hi - k_lo + 1)));
        const Vec x = random_point(rng, m.n, box_halfwidth);
        const Vec y = random_point(rng, m.n, box_halfwidth);
        const double rho = c.c_rho * std::pow(dist(x, y), m.n);
        const double denom = std::pow(2.0, -k) + rho;
        const double budget = c.c_tilde_a * denom;
        const auto inside = [&](const Vec& base) {
            return [&, base](const Vec& cand) {
                return c.c_rho * std::pow(dist(base, cand), m.n) <= budget;
            };
        };
        const Vec xp = sample_admissible(rng, x, box_halfwidth, inside(x), proposals);
        const Vec yp = sample_admissible(rng, y, box_halfwidth, inside(y), proposals);

        const double move_x = c.c_rho * std::pow(dist(x, xp), m.n);
        const double move_y = c.c_rho * std::pow(dist(y, yp), m.n);
        const double lhs = std::abs(kernel_S(m, k, x, y) - kernel_S(m, k, xp, y) -
                                    kernel_S(m, k, x, yp) + kernel_S(m, k, xp, yp));
        const double rhs = c.c_tilde * std::pow(move_x / denom, c.zeta) *
                           std::pow(move_y / denom, c.zeta) *
                           std::pow(2.0, -k * c.epsilon) * std::pow(denom, -1.0 - c.epsilon);
        track.push(rhs - lhs);
    }
    CheckReport rep{"kernel_double_lipschitz_bound", samples, track.violations, track.worst, 1.0, ""};
    rep.accept_rate = (2.0 * static_cast<double>(samples)) / static_cast<double>(proposals);
    return rep;
}

CheckReport check_unit_mass(const MotherFunction& m, const std::vector<int>& ks,
                            std::size_t steps, double tol) {
    MarginTracker track;
    int worst_k = 0;
    double worst_dev = -1.0;
    for (int k : ks) {
        const double dev = std::abs(kernel_mass(m, k, steps) - 1.0);
        if (dev > worst_dev) {
            worst_dev = dev;
            worst_k = k;
        }
        track.push(tol - dev);
    }
    std::ostringstream note;
    note << "worst scale k=" << worst_k;
    return {"kernel_unit_mass", ks.size(), track.violations, track.worst, 1.0, note.str()};
}

RadialProfile profile_linear() {
    return {"radial_linear",
            [](double t) { return t; },
            [](double) { return 1.0; },
            [](double) { return 0.0; }};
}

RadialProfile profile_square() {
    return {"radial_square",
            [](double t) { return t * t; },
            [](double t) { return 2.0 * t; },
            [](double) { return 2.0; }};
}

RadialProfile profile_mother(const MotherFunction& m) {
    const double cd = m.c_d;
    const double r2 = m.r * m.r;
    return {"radial_mother",
            [cd, r2](double t) { return cd * sigmoid(r2 - t); },
            [cd, r2](double t) { return -cd * sigmoid_d1(r2 - t); },
            [cd, r2](double t) { return cd * sigmoid_d2(r2 - t); }};
}

CheckReport check_hessian_eigenvalues(const RadialProfile& p, const std::vector<int>& dims,
                                      std::size_t samples_per_dim, std::uint64_t seed,
                                      double fd_step, double tol) {
    Rng rng(seed);
    MarginTracker track;
    std::size_t total = 0;
    const double h = fd_step;

    for (int n : dims) {
        for (std::size_t s = 0; s < samples_per_dim; ++s) {
            Vec x = random_point(rng, n, 2.0);
            const auto f = [&](const Vec& v) {
                double q = 0.0;
                for (double vi : v) q += vi * vi;
                return p.h(q);
            };

            SymMat hess(n);
            for (int i = 0; i < n; ++i) {
                for (int j = i; j < n; ++j) {
                    Vec a = x, b = x, cpt = x, d = x;
                    if (i == j) {
                        a[i] += h;
                        b[i] -= h;
                        hess.set(i, i, (f(a) - 2.0 * f(x) + f(b)) / (h * h));
                    } else {
                        a[i] += h; a[j] += h;
                        b[i] += h; b[j] -= h;
                        cpt[i] -= h; cpt[j] += h;
                        d[i] -= h; d[j] -= h;
                        hess.set(i, j, (f(a) - f(b) - f(cpt) + f(d)) / (4.0 * h * h));
                    }
                }
            }

            double q = 0.0;
            for (double xi : x) q += xi * xi;
            Vec expected(static_cast<std::size_t>(n), 2.0 * p.d1(q));
            expected.back() = 4.0 * q * p.d2(q) + 2.0 * p.d1(q);
            std::sort(expected.begin(), expected.end(), std::greater<double>());

            const EigenResult eig = sym_eigen(hess);
            double max_err = 0.0;
            for (int i = 0; i < n; ++i)
                max_err = std::max(max_err, std::abs(eig.values[static_cast<std::size_t>(i)] -
                                                     expected[static_cast<std::size_t>(i)]));
            track.push(tol - max_err);

            const double spec_norm =
                std::max(std::abs(eig.values.front()), std::abs(eig.values.back()));
            const double bound = std::max(std::abs(4.0 * q * p.d2(q) + 2.0 * p.d1(q)),
                                          std::abs(2.0 * p.d1(q)));
            track.push(bound + tol - spec_norm);
            ++total;
        }
    }
    return {"hessian_eigenvalues_" + p.name, total, track.violations, track.worst, 1.0, ""};
}

namespace {

const double kSegmentGrid[5] = {0.0, 0.25, 0.5, 0.75, 1.0};

Vec lerp(const Vec& a, const Vec& b, double t) {
    Vec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + t * (b[i] - a[i]);
    return out;
}

double geometry_guard(double rhs) { return 1e-8 * std::max(1.0, std::abs(rhs)); }

} // namespace

CheckReport check_segment_geometry(int n, std::size_t samples, std::uint64_t seed,
                                   int k_lo, int k_hi, double box_halfwidth) {
    Rng rng(seed);
    MarginTracker track;
    std::size_t proposals = 0;
    const double c_a = pow_int(0.5, n);
    for (std::size_t i = 0; i < samples; ++i) {
        const int k = k_lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(k_hi - k_lo + 1)));
        const Vec x = random_point(rng, n, box_halfwidth);
        const Vec y = random_point(rng, n, box_halfwidth);
        const double rho = std::pow(dist(x, y), n);
        const double two_mk = std::pow(2.0, -k);
        const double budget = c_a * (two_mk + rho);
        const Vec xp = sample_admissible(rng, x, box_halfwidth, [&](const Vec& cand) {
            return std::pow(dist(x, cand), n) <= budget;
        }, proposals);

        const double rhs = pow_int(0.5, n) * rho - pow_int(0.5, n) * two_mk;
        for (double t : kSegmentGrid) {
            const double lhs = std::pow(dist(lerp(x, xp, t), y), n);
            track.push(lhs - rhs, geometry_guard(rhs));
        }
    }
    CheckReport rep{"segment_geometry_n" + std::to_string(n), samples, track.violations, track.worst, 1.0, ""};
    rep.accept_rate = static_cast<double>(samples) / static_cast<double>(proposals);
    return rep;
}

CheckReport check_double_segment_geometry(int n, std::size_t samples, std::uint64_t seed,
                                          int k_lo, int k_hi, double box_halfwidth) {
    Rng rng(seed);
    MarginTracker track;
    std::size_t proposals = 0;
    const double c_ta = pow_int(1.0 / 3.0, n);
    for (std::size_t i = 0; i < samples; ++i) {
        const int k = k_lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(k_hi - k_lo + 1)));
        const Vec x = random_point(rng, n, box_halfwidth);
        const Vec y = random_point(rng, n, box_halfwidth);
        const double rho = std::pow(dist(x, y), n);
        const double two_mk = std::pow(2.0, -k);
        const double budget = c_ta * (two_mk + rho);
        const auto inside = [&](const Vec& base) {
            return [&, base](const Vec& cand) {
                return std::pow(dist(base, cand), n) <= budget;
            };
        };
        const Vec xp = sample_admissible(rng, x, box_halfwidth, inside(x), proposals);
        const Vec yp = sample_admissible(rng, y, box_halfwidth, inside(y), proposals);

        const double rhs = pow_int(1.0 / 3.0, n) * rho - pow_int(1.0 / 3.0, n) * 2.0 * two_mk;
        for (double tx : kSegmentGrid) {
            const Vec zx = lerp(x, xp, tx);
            for (double ty : kSegmentGrid) {
                const Vec zy = lerp(y, yp, ty);
                const double lhs = std::pow(dist(zx, zy), n);
                track.push(lhs - rhs, geometry_guard(rhs));
            }
        }
    }
    CheckReport rep{"double_segment_geometry_n" + std::to_string(n), samples, track.violations, track.worst, 1.0, ""};
    rep.accept_rate = (2.0 * static_cast<double>(samples)) / static_cast<double>(proposals);
    return rep;
}

CheckReport check_jensen_two_term(int n_lo, int n_hi, std::size_t samples, std::uint64_t seed) {
    Rng rng(seed);
    MarginTracker track;
    std::size_t total = 0;
    for (int n = n_lo; n <= n_hi; ++n) {
        for (std::size_t i = 0; i < samples; ++i) {
            const double a = rng.uniform(0.0, 10.0);
            const double b = rng.uniform(0.0, 10.0);
            const double lhs = pow_int(a, n) + pow_int(b, n);
            const double rhs = std::pow(2.0, 1 - n) * pow_int(a + b, n);
            track.push(lhs - rhs, geometry_guard(rhs));
            ++total;
        }
    }
    return {"jensen_two_term", total, track.violations, track.worst, 1.0, ""};
}

CheckReport check_jensen_three_term(int n_lo, int n_hi, std::size_t samples, std::uint64_t seed) {
    Rng rng(seed);
    MarginTracker track;
    std::size_t total = 0;
    for (int n = n_lo; n <= n_hi; ++n) {
        for (std::size_t i = 0; i < samples; ++i) {
            const double a = rng.uniform(0.0, 10.0);
            const double b = rng.uniform(0.0, 10.0);
            const double c = rng.uniform(0.0, 10.0);
            const double lhs = pow_int(a, n) + pow_int(b, n) + pow_int(c, n);
            const double rhs = std::pow(3.0, 1 - n) * pow_int(a + b + c, n);
            track.push(lhs - rhs, geometry_guard(rhs));
            ++total;
        }
    }
    return {"jensen_three_term", total, track.violations, track.worst, 1.0, ""};
}

} // namespace qn
