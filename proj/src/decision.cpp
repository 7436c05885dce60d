#include "qn/decision.hpp"

#include <cmath>
#include <stdexcept>

namespace qn {

QuadraticForm::QuadraticForm(SymMat a, Vec w_in, double wq, double th)
    : A(std::move(a)), w(std::move(w_in)), w_q(wq), theta(th) {
    if (w.size() != A.dim())
        throw std::invalid_argument("QuadraticForm: w dimension does not match A");
    for (double v : w)
        if (!std::isfinite(v)) throw std::invalid_argument("QuadraticForm: nonfinite w entry");
    if (!std::isfinite(w_q) || !std::isfinite(theta))
        throw std::invalid_argument("QuadraticForm: nonfinite scalar parameter");
    for (std::size_t i = 0; i < A.dim(); ++i)
        for (std::size_t j = 0; j < A.dim(); ++j)
            if (!std::isfinite(A(i, j)))
                throw std::invalid_argument("QuadraticForm: nonfinite A entry");
}

double QuadraticForm::evaluate(const Vec& x) const {
    if (x.size() != dim())
        throw std::invalid_argument("QuadraticForm::evaluate: dimension mismatch");
    double lin = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) lin += w[i] * x[i];
    return w_q * A.quad(x) + lin + theta;
}

const char* to_string(FormClass c) {
    switch (c) {
        case FormClass::affine: return "affine";
        case FormClass::circular: return "circular";
        case FormClass::elliptic: return "elliptic";
        case FormClass::hyperbolic: return "hyperbolic";
        case FormClass::ultrahyperbolic: return "ultrahyperbolic";
        case FormClass::parabolic: return "parabolic";
        case FormClass::degenerate: return "degenerate";
    }
    return "unknown";
}

FormClass classify(const QuadraticForm& q, double tol) {
    EigenResult e = sym_eigen(q.A);
    if (!e.converged)
        throw std::runtime_error("classify: eigendecomposition did not converge");

    double lmax = 0.0;
    for (double v : e.values) lmax = std::max(lmax, std::abs(v));
    const double zero_tol = lmax * tol;

    const std::size_t n = q.dim();
    std::size_t pos = 0, neg = 0, zero = 0;
    for (double v : e.values) {
        if (std::abs(v) <= zero_tol) ++zero;
        else if (v > 0.0) ++pos;
        else ++neg;
    }

    if (zero == n) return FormClass::affine;
    if (zero == 1 && (pos == n - 1 || neg == n - 1)) return FormClass::parabolic;
    if (neg == 0 || pos == 0) {
        bool identity = true;
        for (std::size_t i = 0; i < n && identity; ++i)
            for (std::size_t j = 0; j < n && identity; ++j) {
                double want = (i == j) ? 1.0 : 0.0;
                if (std::abs(q.A(i, j) - want) > tol) identity = false;
            }
        return identity ? FormClass::circular : FormClass::elliptic;
    }
    if (zero == 0 && std::min(pos, neg) == 1) return FormClass::hyperbolic;
    if (zero == 0 && pos >= 2 && neg >= 2) return FormClass::ultrahyperbolic;
    return FormClass::degenerate;
}

CanonicalForm canonicalize(const QuadraticForm& q, double tol) {
    const std::size_t n = q.dim();
    double dmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) dmax = std::max(dmax, std::abs(q.A(i, i)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(q.A(i, j)) > tol * dmax)
                throw std::invalid_argument("canonicalize: A must be diagonal");
    if (q.w_q == 0.0)
        throw std::invalid_argument("canonicalize: w_q must be nonzero");

    CanonicalForm c;
    c.w_q = q.w_q;
    c.zeta.resize(n);
    double zAz = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double a = q.A(i, i);
        if (a == 0.0)
            throw std::invalid_argument("canonicalize: zero diagonal entry in A");
        c.zeta[i] = -q.w[i] / (2.0 * a * a * q.w_q);
        zAz += a * c.zeta[i] * c.zeta[i];
    }
    c.nu = q.w_q * zAz - q.theta;
    return c;
}

double canonical_evaluate(const CanonicalForm& c, const Vec& diag_a, const Vec& x) {
    if (diag_a.size() != c.zeta.size() || x.size() != c.zeta.size())
        throw std::invalid_argument("canonical_evaluate: dimension mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double a = diag_a[i];
        acc += a * x[i] * x[i] - 2.0 * c.zeta[i] * a * a * x[i] + a * c.zeta[i] * c.zeta[i];
    }
    return c.w_q * acc - c.nu;
}

} // namespace qn
