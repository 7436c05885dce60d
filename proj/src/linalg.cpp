#include "qn/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qn {

SymMat SymMat::from_general(const Mat& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("SymMat: matrix must be square");
    SymMat s(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = i; j < m.cols(); ++j)
            s.set(i, j, 0.5 * (m(i, j) + m(j, i)));
    return s;
}

double SymMat::quad(const Vec& x) const {
    if (x.size() != n_) throw std::invalid_argument("SymMat::quad: dimension mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n_; ++j) row += a_(i, j) * x[j];
        acc += x[i] * row;
    }
    return acc;
}

namespace {

double offdiag_sum(const Mat& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j) s += std::abs(a(i, j));
    return s;
}

} // namespace

EigenResult sym_eigen(const SymMat& m) {
    const std::size_t n = m.dim();
    if (n == 0) throw std::invalid_argument("sym_eigen: empty matrix");
    if (n > 16) throw std::invalid_argument("sym_eigen: dimension above supported bound 16");

    Mat a = m.mat();
    Mat q(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) q(i, i) = 1.0;

    EigenResult res;
    res.converged = false;

    constexpr int kMaxSweeps = 100;
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(a(i, j)));
    const double tol = (scale == 0.0) ? 0.0 : scale * 1e-15 * static_cast<double>(n);

    int sweep = 0;
    for (; sweep < kMaxSweeps; ++sweep) {
        if (offdiag_sum(a) <= tol) { res.converged = true; break; }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t r = p + 1; r < n; ++r) {
                double apr = a(p, r);
                if (std::abs(apr) <= tol / static_cast<double>(n * n)) continue;
                double theta = (a(r, r) - a(p, p)) / (2.0 * apr);
                double t = std::copysign(1.0, theta) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    double akp = a(k, p), akr = a(k, r);
                    a(k, p) = c * akp - s * akr;
                    a(k, r) = s * akp + c * akr;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    double apk = a(p, k), ark = a(r, k);
                    a(p, k) = c * apk - s * ark;
                    a(r, k) = s * apk + c * ark;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    double qkp = q(k, p), qkr = q(k, r);
                    q(k, p) = c * qkp - s * qkr;
                    q(k, r) = s * qkp + c * qkr;
                }
            }
        }
    }
    if (!res.converged && offdiag_sum(a) <= tol) res.converged = true;
    res.sweeps = sweep;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

    res.values.resize(n);
    res.vectors = Mat(n, n, 0.0);
    for (std::size_t c = 0; c < n; ++c) {
        res.values[c] = a(order[c], order[c]);
        for (std::size_t rr = 0; rr < n; ++rr) res.vectors(rr, c) = q(rr, order[c]);
    }
    return res;
}

double eigen_residual(const SymMat& m, const EigenResult& e) {
    const std::size_t n = m.dim();
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double rec = 0.0;
            for (std::size_t k = 0; k < n; ++k)
                rec += e.vectors(i, k) * e.values[k] * e.vectors(j, k);
            double d = rec - m(i, j);
            acc += d * d;
        }
    }
    return std::sqrt(acc);
}

} // namespace qn
