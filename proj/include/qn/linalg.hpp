#pragma once

#include <cstddef>
#include <vector>

namespace qn {

using Vec = std::vector<double>;

/// Dense row-major matrix, sized for the small problems used here.
class Mat {
public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::size_t size() const { return data_.size(); }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

/**
 * Symmetric matrix with entries kept exactly mirrored.  Construction from a
 * general square matrix symmetrizes it as (m + m^T) / 2.
 */
class SymMat {
public:
    explicit SymMat(std::size_t n) : n_(n), a_(n, n, 0.0) {}
    static SymMat from_general(const Mat& m);

    std::size_t dim() const { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return a_(i, j); }
    void set(std::size_t i, std::size_t j, double v) { a_(i, j) = v; a_(j, i) = v; }

    const Mat& mat() const { return a_; }

    /// x^T A x.
    double quad(const Vec& x) const;

private:
    std::size_t n_;
    Mat a_;
};

struct EigenResult {
    Vec values;        // descending
    Mat vectors;       // columns are the matching eigenvectors
    bool converged = true;
    int sweeps = 0;
};

/**
 * Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
 * Intended for small matrices (dim <= 16); a 100-sweep budget is far more
 * than the method ever needs at that size, and `converged` reports whether
 * the off-diagonal mass was annihilated within it.
 */
EigenResult sym_eigen(const SymMat& m);

/// Frobenius norm of the reconstruction residual Q diag(w) Q^T - m.
double eigen_residual(const SymMat& m, const EigenResult& e);

} // namespace qn
