#include "facekit/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "facekit/errors.hpp"

namespace facekit {

Matrix Matrix::identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    for (int r = 0; r < rows_; ++r)
        for (int c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
}

std::vector<double> Matrix::col(int c) const {
    std::vector<double> v((size_t)rows_);
    for (int r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
    return v;
}

void Matrix::set_col(int c, std::span<const double> v) {
    for (int r = 0; r < rows_; ++r) (*this)(r, c) = v[r];
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw DimensionError("matmul shape mismatch");
    Matrix out(a.rows(), b.cols());
#pragma omp parallel for schedule(static)
    for (int r = 0; r < a.rows(); ++r) {
        for (int k = 0; k < a.cols(); ++k) {
            const double av = a(r, k);
            const double* brow = b.row(k);
            double* orow = out.row(r);
            for (int c = 0; c < b.cols(); ++c) orow[c] += av * brow[c];
        }
    }
    return out;
}

Matrix matmul_transa(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) throw DimensionError("matmul_transa shape mismatch");
    Matrix out(a.cols(), b.cols());
#pragma omp parallel for schedule(static)
    for (int r = 0; r < a.cols(); ++r) {
        for (int k = 0; k < a.rows(); ++k) {
            const double av = a(k, r);
            const double* brow = b.row(k);
            double* orow = out.row(r);
            for (int c = 0; c < b.cols(); ++c) orow[c] += av * brow[c];
        }
    }
    return out;
}

Matrix gram(const Matrix& c, double scale) {
    const int n = c.cols();
    Matrix g(n, n);
#pragma omp parallel for schedule(dynamic, 4)
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            double s = 0;
            for (int r = 0; r < c.rows(); ++r) s += c(r, i) * c(r, j);
            s *= scale;
            g(i, j) = s;
            g(j, i) = s;
        }
    }
    return g;
}

std::vector<double> matvec(const Matrix& a, std::span<const double> x) {
    if ((size_t)a.cols() != x.size()) throw DimensionError("matvec shape mismatch");
    std::vector<double> y((size_t)a.rows());
#pragma omp parallel for schedule(static)
    for (int r = 0; r < a.rows(); ++r) y[r] = dot({a.row(r), (size_t)a.cols()}, x);
    return y;
}

std::vector<double> matvec_transa(const Matrix& a, std::span<const double> x) {
    if ((size_t)a.rows() != x.size()) throw DimensionError("matvec_transa shape mismatch");
    std::vector<double> y((size_t)a.cols());
#pragma omp parallel for schedule(static)
    for (int c = 0; c < a.cols(); ++c) {
        double s = 0;
        for (int r = 0; r < a.rows(); ++r) s += a(r, c) * x[r];
        y[c] = s;
    }
    return y;
}

namespace serial {

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw DimensionError("matmul shape mismatch");
    Matrix out(a.rows(), b.cols());
    for (int r = 0; r < a.rows(); ++r)
        for (int k = 0; k < a.cols(); ++k) {
            const double av = a(r, k);
            const double* brow = b.row(k);
            double* orow = out.row(r);
            for (int c = 0; c < b.cols(); ++c) orow[c] += av * brow[c];
        }
    return out;
}

Matrix gram(const Matrix& c, double scale) {
    const int n = c.cols();
    Matrix g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            double s = 0;
            for (int r = 0; r < c.rows(); ++r) s += c(r, i) * c(r, j);
            s *= scale;
            g(i, j) = s;
            g(j, i) = s;
        }
    return g;
}

}  // namespace serial

EigenDecomposition jacobi_eig(const Matrix& s) {
    const int n = s.rows();
    if (n != s.cols()) throw DimensionError("jacobi_eig expects a square matrix");
    double max_abs = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) max_abs = std::max(max_abs, std::abs(s(i, j)));
    const double sym_tol = 1e-9 * std::max(1.0, max_abs);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::abs(s(i, j) - s(j, i)) > sym_tol)
                throw SymmetryError("jacobi_eig input is not symmetric");

    Matrix a = s;
    Matrix v = Matrix::identity(n);
    double fro = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) fro += a(i, j) * a(i, j);
    fro = std::sqrt(fro);
    const double target = 1e-12 * std::max(fro, 1e-300);

    auto off_norm = [&a, n]() {
        double s2 = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) s2 += 2 * a(i, j) * a(i, j);
        return std::sqrt(s2);
    };

    const int max_sweeps = 100;
    for (int sweep = 0; sweep < max_sweeps && off_norm() > target; ++sweep) {
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double app = a(p, p), aqq = a(q, q);
                const double theta = (aqq - app) / (2 * apq);
                double t = 1.0 / (std::abs(theta) + std::sqrt(1 + theta * theta));
                if (theta < 0) t = -t;
                const double c = 1.0 / std::sqrt(1 + t * t);
                const double sn = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - sn * akq;
                    a(k, q) = sn * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - sn * aqk;
                    a(q, k) = sn * apk + c * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (int k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - sn * vkq;
                    v(k, q) = sn * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> diag(n);
    for (int i = 0; i < n; ++i) diag[i] = a(i, i);
    std::stable_sort(order.begin(), order.end(),
                     [&diag](int x, int y) { return diag[x] > diag[y]; });

    EigenDecomposition out;
    out.values.resize(n);
    out.vectors = Matrix(n, n);
    for (int k = 0; k < n; ++k) {
        out.values[k] = diag[order[k]];
        for (int r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[k]);
    }
    canonicalize_column_signs(out.vectors);
    return out;
}

Matrix cholesky(const Matrix& s, double pivot_epsilon) {
    const int n = s.rows();
    if (n != s.cols()) throw DimensionError("cholesky expects a square matrix");
    Matrix l(n, n);
    for (int j = 0; j < n; ++j) {
        double d = s(j, j);
        for (int k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (d <= pivot_epsilon)
            throw ValueError("cholesky pivot not positive at column " + std::to_string(j));
        l(j, j) = std::sqrt(d);
#pragma omp parallel for schedule(static)
        for (int i = j + 1; i < n; ++i) {
            double v = s(i, j);
            for (int k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
            l(i, j) = v / l(j, j);
        }
    }
    return l;
}

Matrix solve_lower(const Matrix& l, const Matrix& b) {
    const int n = l.rows();
    if (b.rows() != n) throw DimensionError("solve_lower shape mismatch");
    Matrix x = b;
    for (int i = 0; i < n; ++i) {
#pragma omp parallel for schedule(static)
        for (int c = 0; c < x.cols(); ++c) {
            double v = x(i, c);
            for (int k = 0; k < i; ++k) v -= l(i, k) * x(k, c);
            x(i, c) = v / l(i, i);
        }
    }
    return x;
}

Matrix solve_lower_transposed(const Matrix& l, const Matrix& b) {
    const int n = l.rows();
    if (b.rows() != n) throw DimensionError("solve_lower_transposed shape mismatch");
    Matrix x = b;
    for (int i = n - 1; i >= 0; --i) {
#pragma omp parallel for schedule(static)
        for (int c = 0; c < x.cols(); ++c) {
            double v = x(i, c);
            for (int k = i + 1; k < n; ++k) v -= l(k, i) * x(k, c);
            x(i, c) = v / l(i, i);
        }
    }
    return x;
}

void canonicalize_column_signs(Matrix& m) {
    for (int c = 0; c < m.cols(); ++c) {
        int arg = 0;
        double best = 0;
        for (int r = 0; r < m.rows(); ++r) {
            if (std::abs(m(r, c)) > best) {
                best = std::abs(m(r, c));
                arg = r;
            }
        }
        if (m(arg, c) < 0)
            for (int r = 0; r < m.rows(); ++r) m(r, c) = -m(r, c);
    }
}

}  // namespace facekit
