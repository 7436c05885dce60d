#pragma once

#include "qn/linalg.hpp"

#include <string>

namespace qn {

/**
 * Decision function x -> w_q * (x^T A x) + w . x + theta with symmetric A.
 * The taxonomy below sorts these by the eigenvalue sign pattern of A.
 */
struct QuadraticForm {
    SymMat A;
    Vec w;
    double w_q = 1.0;
    double theta = 0.0;

    QuadraticForm(SymMat a, Vec w_in, double wq, double th);

    std::size_t dim() const { return A.dim(); }
    double evaluate(const Vec& x) const;
};

enum class FormClass {
    affine,
    circular,
    elliptic,
    hyperbolic,
    ultrahyperbolic,
    parabolic,
    degenerate,
};

const char* to_string(FormClass c);

/**
 * Classify by the eigenvalue signs of A, with |lambda| <= tol * max|lambda|
 * treated as zero.  More specific classes win: exactly one zero eigenvalue
 * with the rest sharing a sign is parabolic even though such a spectrum is
 * also one-signed; A == I (entrywise within tol) refines elliptic to
 * circular.  Every remaining mixed-with-zero pattern lands in degenerate,
 * so the function is total.
 */
FormClass classify(const QuadraticForm& q, double tol = 1e-9);

/**
 * Completed-square form of a diagonal-A decision function:
 *   value(x) = w_q * offset_quad(x - zeta) - nu
 * where offset_quad is the mixed expansion
 *   sum_i a_i x_i^2 - 2 sum_i zeta_i a_i^2 x_i + sum_i a_i zeta_i^2
 * written around the centre zeta_i = -w_i / (2 a_i^2 w_q), and
 * nu = w_q * zeta^T A zeta - theta.
 */
struct CanonicalForm {
    Vec zeta;
    double nu = 0.0;
    double w_q = 1.0;
};

/**
 * Requires diagonal A (off-diagonal magnitude <= tol * max|a_ii|), every
 * diagonal entry nonzero, and w_q nonzero; throws std::invalid_argument
 * otherwise.
 */
CanonicalForm canonicalize(const QuadraticForm& q, double tol = 1e-12);

/// Evaluate the completed form; diag_a are the diagonal entries of A.
double canonical_evaluate(const CanonicalForm& c, const Vec& diag_a, const Vec& x);

} // namespace qn
