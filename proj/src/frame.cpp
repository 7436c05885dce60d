#include "qn/frame.hpp"

#include "qn/activation.hpp"
#include "qn/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace qn {

namespace {

double norm2(const Vec& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

// Upper bound for the mass of sigmoid(r^2 - rho^2) rho^{n-1} beyond radius
// rho_0, valid once rho_0 >= max(2, n): the polynomial factor is absorbed
// into half the gaussian decay.
double tail_bound(int n, double r, double rho0) {
    return sphere_surface(n) * std::exp(r * r - 0.5 * rho0 * rho0) / rho0;
}

} // namespace

double MotherFunction::value_radial(double rho) const {
    return c_d * sigmoid(r * r - rho * rho);
}

double MotherFunction::value(const Vec& x) const {
    if (static_cast<int>(x.size()) != n)
        throw std::invalid_argument("MotherFunction::value: dimension mismatch");
    return value_radial(norm2(x));
}

MotherFunction normalize_mother(int n, double r, std::size_t steps, double tail_tol) {
    if (n < 1) throw std::invalid_argument("normalize_mother: n must be positive");
    if (!(r > 0.0)) throw std::invalid_argument("normalize_mother: r must be positive");
    if (!(tail_tol > 0.0)) throw std::invalid_argument("normalize_mother: tail_tol must be positive");

    double rho0 = std::max({r + 1.0, static_cast<double>(n), 2.0});
    while (tail_bound(n, r, rho0) > tail_tol) {
        rho0 += 0.5;
        if (rho0 > 1000.0)
            throw std::runtime_error("normalize_mother: truncation radius search did not converge");
    }

    MotherFunction m;
    m.n = n;
    m.r = r;
    m.r_max = rho0;
    const double mass = integrate_radial(
        [r](double rho) { return sigmoid(r * r - rho * rho); }, n, rho0, steps);
    if (!(mass > 0.0) || !std::isfinite(mass))
        throw std::runtime_error("normalize_mother: non-positive mass");
    m.c_d = 1.0 / mass;
    return m;
}

double kernel_S_radial(const MotherFunction& m, int k, double dist) {
    const double scale = std::pow(2.0, static_cast<double>(k) / m.n);
    return std::ldexp(m.value_radial(scale * dist), k);
}

double kernel_S(const MotherFunction& m, int k, const Vec& x, const Vec& y) {
    if (x.size() != y.size() || static_cast<int>(x.size()) != m.n)
        throw std::invalid_argument("kernel_S: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        s += d * d;
    }
    return kernel_S_radial(m, k, std::sqrt(s));
}

double kernel_mass(const MotherFunction& m, int k, std::size_t steps) {
    const double scale = std::pow(2.0, static_cast<double>(k) / m.n);
    // Substituting u = scale * rho shows the mass is scale-free, but the
    // check integrates the kernel as written to exercise the real thing.
    const double r_max = m.r_max / scale;
    return integrate_radial(
        [&](double rho) { return kernel_S_radial(m, k, rho); }, m.n, r_max, steps);
}

double lattice_spacing(int n, int k) {
    return std::pow(2.0, -static_cast<double>(k) / n);
}

Vec FrameAtom::point(int n) const {
    const double h = lattice_spacing(n, k);
    Vec b(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) b[i] = static_cast<double>(idx[i]) * h;
    return b;
}

double atom_psi_radial(const MotherFunction& m, int k, double dist) {
    return std::pow(2.0, -0.5 * k) *
           (kernel_S_radial(m, k, dist) - kernel_S_radial(m, k - 1, dist));
}

double atom_psi(const MotherFunction& m, int k, const Vec& b, const Vec& x) {
    if (b.size() != x.size() || static_cast<int>(x.size()) != m.n)
        throw std::invalid_argument("atom_psi: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - b[i];
        s += d * d;
    }
    return atom_psi_radial(m, k, std::sqrt(s));
}

double psi_support_radius(const MotherFunction& m, double rel_tol) {
    const double peak = std::abs(atom_psi_radial(m, 0, 0.0));
    if (!(peak > 0.0)) throw std::runtime_error("psi_support_radius: vanishing peak");
    const double cutoff = rel_tol * peak;
    const double hi = std::pow(2.0, 1.0 / m.n) * m.r_max + 4.0;
    const double step = 1e-3;
    double last = 0.0;
    for (double rho = 0.0; rho <= hi; rho += step) {
        if (std::abs(atom_psi_radial(m, 0, rho)) >= cutoff) last = rho;
    }
    return last + step;
}

std::vector<FrameAtom> build_grid(const MotherFunction& m, const Vec& lo, const Vec& hi,
                                  int k_min, int k_max, std::size_t cap) {
    if (lo.size() != hi.size() || static_cast<int>(lo.size()) != m.n)
        throw std::invalid_argument("build_grid: box dimension mismatch");
    if (k_min > k_max) throw std::invalid_argument("build_grid: empty scale range");
    for (std::size_t d = 0; d < lo.size(); ++d)
        if (lo[d] > hi[d]) return {};

    const double radius0 = psi_support_radius(m);
    std::vector<FrameAtom> atoms;
    double projected = 0.0;

    for (int k = k_min; k <= k_max; ++k) {
        const double h = lattice_spacing(m.n, k);
        const double margin = radius0 * h;
        std::vector<long long> i_lo(m.n), i_hi(m.n);
        double count_k = 1.0;
        for (int d = 0; d < m.n; ++d) {
            i_lo[d] = static_cast<long long>(std::ceil((lo[d] - margin) / h));
            i_hi[d] = static_cast<long long>(std::floor((hi[d] + margin) / h));
            count_k *= static_cast<double>(i_hi[d] - i_lo[d] + 1);
        }
        projected += count_k;
        if (projected > static_cast<double>(cap))
            throw std::runtime_error("build_grid: atom count " + std::to_string(projected) +
                                     " exceeds cap " + std::to_string(cap));

        std::vector<long long> cur = i_lo;
        while (true) {
            FrameAtom a;
            a.k = k;
            a.idx = cur;
            atoms.push_back(std::move(a));
            int d = m.n - 1;
            while (d >= 0) {
                if (++cur[d] <= i_hi[d]) break;
                cur[d] = i_lo[d];
                --d;
            }
            if (d < 0) break;
        }
    }
    return atoms;
}

double synthesize(const FrameExpansion& e, const Vec& x) {
    if (e.atoms.size() != e.coeffs.size())
        throw std::invalid_argument("synthesize: atom/coefficient count mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < e.atoms.size(); ++i) {
        const Vec b = e.atoms[i].point(e.mother.n);
        s += e.coeffs[i] * atom_psi(e.mother, e.atoms[i].k, b, x);
    }
    return s;
}

double l1_frame_norm(const FrameExpansion& e) {
    double s = 0.0;
    for (double c : e.coeffs) s += std::abs(c);
    return s;
}

namespace {

// Greedy keep order: larger |c| first, ties toward smaller scale then
// lexicographically smaller lattice index.
std::vector<std::size_t> greedy_order(const FrameExpansion& e) {
    std::vector<std::size_t> order(e.atoms.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double ca = std::abs(e.coeffs[a]);
        const double cb = std::abs(e.coeffs[b]);
        if (ca != cb) return ca > cb;
        if (e.atoms[a].k != e.atoms[b].k) return e.atoms[a].k < e.atoms[b].k;
        return e.atoms[a].idx < e.atoms[b].idx;
    });
    return order;
}

} // namespace

FrameExpansion greedy_n_term(const FrameExpansion& e, std::size_t n_keep) {
    if (e.atoms.size() != e.coeffs.size())
        throw std::invalid_argument("greedy_n_term: atom/coefficient count mismatch");
    std::vector<std::size_t> order = greedy_order(e);
    if (n_keep < order.size()) order.resize(n_keep);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (e.atoms[a].k != e.atoms[b].k) return e.atoms[a].k < e.atoms[b].k;
        return e.atoms[a].idx < e.atoms[b].idx;
    });

    FrameExpansion out;
    out.mother = e.mother;
    out.atoms.reserve(order.size());
    out.coeffs.reserve(order.size());
    for (std::size_t i : order) {
        out.atoms.push_back(e.atoms[i]);
        out.coeffs.push_back(e.coeffs[i]);
    }
    return out;
}

namespace {

struct TensorGrid {
    std::vector<Vec> axes;     // per-dimension sample points
    std::vector<Vec> weights;  // per-dimension Simpson weights
};

TensorGrid make_tensor_grid(const Vec& lo, const Vec& hi, std::size_t pts) {
    if (pts < 3 || pts % 2 == 0)
        throw std::invalid_argument("l2_error: pts_per_axis must be odd and >= 3");
    TensorGrid g;
    g.axes.resize(lo.size());
    g.weights.resize(lo.size());
    for (std::size_t d = 0; d < lo.size(); ++d) {
        const double h = (hi[d] - lo[d]) / static_cast<double>(pts - 1);
        g.axes[d].resize(pts);
        g.weights[d].resize(pts);
        for (std::size_t i = 0; i < pts; ++i) {
            g.axes[d][i] = lo[d] + h * static_cast<double>(i);
            double w;
            if (i == 0 || i + 1 == pts) w = 1.0;
            else if (i % 2 == 1) w = 4.0;
            else w = 2.0;
            g.weights[d][i] = w * h / 3.0;
        }
    }
    return g;
}

template <typename Fn>
double weighted_square_sum(const TensorGrid& g, Fn&& f) {
    const std::size_t dims = g.axes.size();
    std::vector<std::size_t> cur(dims, 0);
    Vec x(dims);
    double acc = 0.0;
    while (true) {
        double w = 1.0;
        for (std::size_t d = 0; d < dims; ++d) {
            x[d] = g.axes[d][cur[d]];
            w *= g.weights[d][cur[d]];
        }
        const double v = f(x);
        acc += w * v * v;
        std::size_t d = dims;
        while (d > 0) {
            --d;
            if (++cur[d] < g.axes[d].size()) break;
            cur[d] = 0;
            if (d == 0) return acc;
        }
        if (dims == 0) return acc;
    }
}

} // namespace

double l2_error(const std::function<double(const Vec&)>& f,
                const std::function<double(const Vec&)>& g,
                const Vec& lo, const Vec& hi, std::size_t pts_per_axis) {
    if (lo.size() != hi.size() || lo.empty())
        throw std::invalid_argument("l2_error: box dimension mismatch");
    const TensorGrid grid = make_tensor_grid(lo, hi, pts_per_axis);
    const double acc =
        weighted_square_sum(grid, [&](const Vec& x) { return f(x) - g(x); });
    return std::sqrt(std::max(0.0, acc));
}

FrameExpansion make_random_expansion(const MotherFunction& m, const Vec& lo, const Vec& hi,
                                     int k_min, int k_max, std::size_t natoms, Rng& rng) {
    std::vector<FrameAtom> grid = build_grid(m, lo, hi, k_min, k_max);
    if (natoms > grid.size())
        throw std::invalid_argument("make_random_expansion: more atoms requested than grid holds");

    for (std::size_t i = 0; i < natoms; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(grid.size() - i));
        std::swap(grid[i], grid[j]);
    }
    grid.resize(natoms);

    FrameExpansion e;
    e.mother = m;
    e.atoms = std::move(grid);
    e.coeffs.resize(natoms);
    for (std::size_t i = 0; i < natoms; ++i) {
        const double u = 1.0 - 0.9 * rng.uniform(); // lands in (0.1, 1]
        const double mag = 1.0 / u;
        const bool neg = (rng.next_u64() & 1ull) != 0;
        e.coeffs[i] = neg ? -mag : mag;
    }
    return e;
}

std::vector<RateRow> rate_experiment(const FrameExpansion& target,
                                     const std::vector<std::size_t>& ns,
                                     std::size_t pts_per_axis) {
    if (target.atoms.empty())
        throw std::invalid_argument("rate_experiment: empty target");

    const int n = target.mother.n;
    const double radius0 = psi_support_radius(target.mother);
    Vec lo(n, std::numeric_limits<double>::infinity());
    Vec hi(n, -std::numeric_limits<double>::infinity());
    for (const FrameAtom& a : target.atoms) {
        const Vec b = a.point(n);
        const double rad = radius0 * lattice_spacing(n, a.k);
        for (int d = 0; d < n; ++d) {
            lo[d] = std::min(lo[d], b[d] - rad);
            hi[d] = std::max(hi[d], b[d] + rad);
        }
    }

    const TensorGrid grid = make_tensor_grid(lo, hi, pts_per_axis);
    const std::size_t dims = grid.axes.size();

    // Flatten the tensor grid once; cache every atom's values on it so the
    // partial sums for increasing N are prefix sums in greedy order.
    std::vector<Vec> points;
    Vec wts;
    {
        std::vector<std::size_t> cur(dims, 0);
        while (true) {
            Vec x(dims);
            double w = 1.0;
            for (std::size_t d = 0; d < dims; ++d) {
                x[d] = grid.axes[d][cur[d]];
                w *= grid.weights[d][cur[d]];
            }
            points.push_back(std::move(x));
            wts.push_back(w);
            std::size_t d = dims;
            bool done = true;
            while (d > 0) {
                --d;
                if (++cur[d] < grid.axes[d].size()) { done = false; break; }
                cur[d] = 0;
            }
            if (done) break;
        }
    }

    const std::vector<std::size_t> order = greedy_order(target);
    Vec residual(points.size());
    for (std::size_t p = 0; p < points.size(); ++p)
        residual[p] = synthesize(target, points[p]);

    const double l1 = l1_frame_norm(target);

    std::vector<std::size_t> ns_sorted = ns;
    std::sort(ns_sorted.begin(), ns_sorted.end());

    std::vector<RateRow> rows;
    std::size_t taken = 0;
    for (std::size_t n_keep : ns_sorted) {
        while (taken < std::min(n_keep, order.size())) {
            const std::size_t i = order[taken];
            const Vec b = target.atoms[i].point(n);
            const double c = target.coeffs[i];
            const int k = target.atoms[i].k;
            for (std::size_t p = 0; p < points.size(); ++p)
                residual[p] -= c * atom_psi(target.mother, k, b, points[p]);
            ++taken;
        }
        double acc = 0.0;
        for (std::size_t p = 0; p < points.size(); ++p)
            acc += wts[p] * residual[p] * residual[p];
        RateRow row;
        row.n_kept = n_keep;
        row.error = std::sqrt(std::max(0.0, acc));
        row.bound = l1 / std::sqrt(static_cast<double>(n_keep + 1));
        row.log_ratio = std::log(row.error / l1) / std::log(static_cast<double>(n_keep + 1));
        rows.push_back(row);
    }
    return rows;
}

} // namespace qn
