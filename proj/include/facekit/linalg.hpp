#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace facekit {

// Dense row-major double matrix. Just enough for the subspace pipeline.
class Matrix {
  public:
    Matrix() = default;
    Matrix(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_((size_t)rows * cols, fill) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    double& operator()(int r, int c) { return data_[(size_t)r * cols_ + c]; }
    double operator()(int r, int c) const { return data_[(size_t)r * cols_ + c]; }
    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    double* row(int r) { return data_.data() + (size_t)r * cols_; }
    const double* row(int r) const { return data_.data() + (size_t)r * cols_; }

    static Matrix identity(int n);
    Matrix transposed() const;

    std::vector<double> col(int c) const;
    void set_col(int c, std::span<const double> v);

    bool operator==(const Matrix&) const = default;

  private:
    int rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

// Parallel kernels. Each output entry is a serial dot product, so results are
// bit-identical to the serial twins regardless of thread count.
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix matmul_transa(const Matrix& a, const Matrix& b);  // a^T * b
// scale * C^T C, symmetric fill.
Matrix gram(const Matrix& c, double scale);
std::vector<double> matvec(const Matrix& a, std::span<const double> x);
std::vector<double> matvec_transa(const Matrix& a, std::span<const double> x);

namespace serial {
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix gram(const Matrix& c, double scale);
}  // namespace serial

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

struct EigenDecomposition {
    std::vector<double> values;  // descending
    Matrix vectors;              // columns are eigenvectors, same order
};

// Cyclic Jacobi rotations on a symmetric matrix; off-diagonal norm driven to
// 1e-12 relative to the input Frobenius norm. Throws SymmetryError when the
// input is asymmetric beyond 1e-9 (relative to the largest entry).
EigenDecomposition jacobi_eig(const Matrix& s);

// Lower-triangular factor of an SPD matrix. Throws ValueError when a pivot
// falls below epsilon.
Matrix cholesky(const Matrix& s, double pivot_epsilon = 0.0);
// Solve L X = B (forward) and L^T X = B (backward) for lower-triangular L.
Matrix solve_lower(const Matrix& l, const Matrix& b);
Matrix solve_lower_transposed(const Matrix& l, const Matrix& b);

// Flips each column so its largest-magnitude entry is positive.
void canonicalize_column_signs(Matrix& m);

}  // namespace facekit
