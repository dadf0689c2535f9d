#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "facekit/linalg.hpp"

namespace facekit {

// Gallery images as columns (n x N) with a class id per column.
struct DataMatrix {
    Matrix columns;           // n rows, N columns
    std::vector<int> labels;  // contiguous ids 0..C-1
    int n() const { return columns.rows(); }
    int N() const { return columns.cols(); }
    int class_count() const;
    void validate() const;
};

std::vector<double> mean_face(const DataMatrix& x);

// Direct covariance (n x n) when the pixel dimension is small, or the N x N
// Gram surrogate with the centered data kept for mapping eigenvectors back to
// image space (snapshot method).
struct CovarianceResult {
    Matrix mat;       // covariance or Gram, both scaled by 1/N
    bool is_gram;
    Matrix centered;  // n x N, only populated when is_gram
};
CovarianceResult covariance(const DataMatrix& x, std::span<const double> mean);
CovarianceResult covariance_direct(const DataMatrix& x, std::span<const double> mean);
CovarianceResult covariance_gram(const DataMatrix& x, std::span<const double> mean);

struct PcaOptions {
    double tol = 1e-10;   // on |1 - |phi_new . phi_old|| per iteration
    int max_iter = 1000;  // per eigenvector
    uint64_t seed = 1;
    // strict: max_iter without convergence throws ConvergenceError. Non-strict
    // accepts the (orthonormalized) iterate and counts it in `stalled`.
    bool strict = true;
};

struct PcaResult {
    Matrix vectors;              // n x p (image space), orthonormal columns
    std::vector<double> values;  // Rayleigh estimates, non-increasing
    std::vector<int> iterations;
    int stalled = 0;
};

// Deflated fixed-point power iteration for the leading p eigenvectors:
// update phi <- S phi, Gram-Schmidt against earlier vectors, normalize,
// repeat until converged. Gram surrogates are iterated in sample space and
// mapped back via phi = C u / |C u|.
PcaResult fast_pca(const CovarianceResult& cov, int p, const PcaOptions& opts = {});

// Independent dense oracle (cyclic Jacobi), used to cross-check fast_pca and
// to solve the whitened LDA eigenproblem.
EigenDecomposition oracle_eig(const Matrix& s);

struct ScatterPair {
    Matrix between;  // sum_i N_i (m_i - m)(m_i - m)^T
    Matrix within;   // sum_i sum_{x in i} (x - m_i)(x - m_i)^T
};
ScatterPair scatter_matrices(const Matrix& y, const std::vector<int>& labels);

struct SubspaceModel {
    int n = 0, N = 0, C = 0;
    uint64_t seed = 0;
    std::vector<double> mean;
    Matrix w_pca;                 // n x (N-C)
    Matrix w_lda;                 // (N-C) x (C-1), within-class whitened
    std::vector<double> eigvals;  // PCA eigenvalues
    Matrix gallery_weights;       // (C-1) x N, combined-space projections
    Matrix gallery_weights_pca;   // (N-C) x N
    std::vector<int> gallery_labels;
    // Derived at train/load time: 95th-percentile leave-one-out NN distances.
    double tau = 0, tau_pca = 0;
    bool ridge_applied = false;
    std::vector<int> pca_iterations;
};

struct LdaOptions {
    PcaOptions pca{.strict = false};
};

// The PCA->LDA training procedure: center, reduce to N-C dimensions with
// fast_pca, project scatters, solve the generalized eigenproblem by symmetric
// whitening, keep the C-1 leading directions, project the gallery.
SubspaceModel lda_train(const DataMatrix& x, const LdaOptions& opts = {});

std::vector<double> project(const SubspaceModel& m, std::span<const double> x);
std::vector<double> project_pca(const SubspaceModel& m, std::span<const double> x);

void save_model(const SubspaceModel& m, const std::filesystem::path& path);
SubspaceModel load_model(const std::filesystem::path& path);

// Recomputed from stored weights so a loaded model matches the trained one.
void compute_rejection_thresholds(SubspaceModel& m);

}  // namespace facekit
