#include "facekit/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>

#include "facekit/errors.hpp"
#include "facekit/util.hpp"
#include "json.hpp"

namespace facekit {

int DataMatrix::class_count() const {
    int c = 0;
    for (int l : labels) c = std::max(c, l + 1);
    return c;
}

void DataMatrix::validate() const {
    if (columns.rows() < 1 || columns.cols() < 1)
        throw DimensionError("data matrix is empty");
    if (static_cast<int>(labels.size()) != columns.cols())
        throw DimensionError("one label per column required");
    const int c = class_count();
    std::vector<int> counts(c, 0);
    for (int l : labels) {
        if (l < 0) throw ValueError("negative class label");
        ++counts[l];
    }
    for (int i = 0; i < c; ++i)
        if (counts[i] == 0) throw ValueError("class labels must be contiguous from 0");
}

std::vector<double> mean_face(const DataMatrix& x) {
    const int n = x.n(), N = x.N();
    std::vector<double> m(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double s = 0;
        for (int j = 0; j < N; ++j) s += x.columns(i, j);
        m[i] = s / N;
    }
    return m;
}

static Matrix centered_columns(const DataMatrix& x, std::span<const double> mean) {
    if (static_cast<int>(mean.size()) != x.n())
        throw DimensionError("mean length does not match data rows");
    Matrix c(x.n(), x.N());
    for (int i = 0; i < x.n(); ++i)
        for (int j = 0; j < x.N(); ++j) c(i, j) = x.columns(i, j) - mean[i];
    return c;
}

CovarianceResult covariance_direct(const DataMatrix& x, std::span<const double> mean) {
    Matrix c = centered_columns(x, mean);
    // (1/N) C C^T via the gram kernel on C^T
    return {gram(c.transposed(), 1.0 / x.N()), false, Matrix(0, 0)};
}

CovarianceResult covariance_gram(const DataMatrix& x, std::span<const double> mean) {
    Matrix c = centered_columns(x, mean);
    Matrix g = gram(c, 1.0 / x.N());
    return {std::move(g), true, std::move(c)};
}

CovarianceResult covariance(const DataMatrix& x, std::span<const double> mean) {
    return x.n() > x.N() ? covariance_gram(x, mean) : covariance_direct(x, mean);
}

PcaResult fast_pca(const CovarianceResult& cov, int p, const PcaOptions& opts) {
    const Matrix& s = cov.mat;
    const int dim = s.rows();
    if (s.cols() != dim) throw DimensionError("covariance must be square");
    if (p < 1 || p > dim) throw ValueError("component count outside [1, dim]");
    if (cov.is_gram && cov.centered.cols() != dim)
        throw DimensionError("gram surrogate does not match centered data");

    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);

    // Scale reference for rank exhaustion: once every direction with
    // measurable energy has been deflated away, the image of any iterate is
    // pure rounding residue, orders of magnitude below this.
    double frob = 0;
    for (int j = 0; j < dim; ++j)
        for (int i = 0; i < dim; ++i) frob += s(i, j) * s(i, j);
    const double collapse_tol = std::sqrt(frob) * 1e-11;

    Matrix basis(dim, p);  // converged iterates in the iteration space
    PcaResult res;
    res.values.resize(p);
    res.iterations.resize(p);

    auto deflate = [&](std::vector<double>& v, int k) {
        for (int j = 0; j < k; ++j) {
            double d = 0;
            for (int i = 0; i < dim; ++i) d += basis(i, j) * v[i];
            for (int i = 0; i < dim; ++i) v[i] -= d * basis(i, j);
        }
    };
    auto draw = [&](std::vector<double>& v, int k) {
        for (;;) {
            for (auto& e : v) e = unif(rng);
            deflate(v, k);
            double nn = norm2(v);
            if (nn > 1e-8) {
                for (auto& e : v) e /= nn;
                return;
            }
        }
    };

    std::vector<double> phi(dim);
    for (int k = 0; k < p; ++k) {
        draw(phi, k);
        bool converged = false;
        double delta = 0;
        int used = opts.max_iter;
        int collapses = 0;
        for (int it = 1; it <= opts.max_iter; ++it) {
            std::vector<double> next = matvec(s, phi);
            deflate(next, k);
            double nn = norm2(next);
            if (nn <= collapse_tol) {
                // iterate fell back into the span of the converged columns;
                // if fresh restarts keep doing the same, nothing measurable
                // is left at this index
                if (++collapses >= 3)
                    throw RankError("spectrum exhausted before requested component", k);
                draw(phi, k);
                continue;
            }
            collapses = 0;
            for (auto& e : next) e /= nn;
            delta = std::abs(1.0 - std::abs(dot(next, phi)));
            phi = std::move(next);
            if (delta <= opts.tol) {
                converged = true;
                used = it;
                break;
            }
        }
        double lambda = dot(phi, matvec(s, phi));  // Rayleigh estimate
        if (lambda < 1e-12)
            throw RankError("spectrum exhausted before requested component", k);
        if (!converged) {
            if (opts.strict)
                throw ConvergenceError("power iteration stalled", k, delta);
            ++res.stalled;
        }
        basis.set_col(k, phi);
        res.values[k] = lambda;
        res.iterations[k] = used;
    }

    // Rayleigh estimates of near-tied eigenvalues can land a hair out of
    // order; reorder so `values` is non-increasing as documented.
    std::vector<int> order(p);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&res](int a, int b) { return res.values[a] > res.values[b]; });
    if (!std::is_sorted(order.begin(), order.end())) {
        Matrix nb(dim, p);
        std::vector<double> nv(p);
        std::vector<int> ni(p);
        for (int k = 0; k < p; ++k) {
            nb.set_col(k, basis.col(order[k]));
            nv[k] = res.values[order[k]];
            ni[k] = res.iterations[order[k]];
        }
        basis = std::move(nb);
        res.values = std::move(nv);
        res.iterations = std::move(ni);
    }

    if (!cov.is_gram) {
        res.vectors = std::move(basis);
    } else {
        // Map sample-space vectors back through the centered data, then
        // re-orthonormalize in image space (the mapping is only orthogonal up
        // to rounding).
        const int n = cov.centered.rows();
        Matrix out(n, p);
        for (int k = 0; k < p; ++k) {
            std::vector<double> v = matvec(cov.centered, basis.col(k));
            double nn = norm2(v);
            if (nn < 1e-12) throw RankError("gram eigenvector maps to zero", k);
            for (auto& e : v) e /= nn;
            out.set_col(k, v);
        }
        for (int k = 0; k < p; ++k) {
            std::vector<double> v = out.col(k);
            for (int j = 0; j < k; ++j) {
                double d = 0;
                for (int i = 0; i < n; ++i) d += out(i, j) * v[i];
                for (int i = 0; i < n; ++i) v[i] -= d * out(i, j);
            }
            double nn = norm2(v);
            if (nn < 1e-12) throw RankError("mapped basis lost rank", k);
            for (auto& e : v) e /= nn;
            out.set_col(k, v);
        }
        res.vectors = std::move(out);
    }
    canonicalize_column_signs(res.vectors);
    return res;
}

EigenDecomposition oracle_eig(const Matrix& s) { return jacobi_eig(s); }

ScatterPair scatter_matrices(const Matrix& y, const std::vector<int>& labels) {
    const int d = y.rows(), N = y.cols();
    if (static_cast<int>(labels.size()) != N)
        throw DimensionError("one label per column required");
    int C = 0;
    for (int l : labels) {
        if (l < 0) throw ValueError("negative class label");
        C = std::max(C, l + 1);
    }
    std::vector<int> counts(C, 0);
    for (int l : labels) ++counts[l];
    for (int i = 0; i < C; ++i)
        if (counts[i] == 0) throw ValueError("class labels must be contiguous from 0");

    Matrix means(d, C, 0.0);
    std::vector<double> overall(d, 0.0);
    for (int j = 0; j < N; ++j)
        for (int i = 0; i < d; ++i) {
            means(i, labels[j]) += y(i, j);
            overall[i] += y(i, j);
        }
    for (int c = 0; c < C; ++c)
        for (int i = 0; i < d; ++i) means(i, c) /= counts[c];
    for (int i = 0; i < d; ++i) overall[i] /= N;

    // S_B = Zb Zb^T with Zb columns sqrt(N_c)(m_c - m);  S_W = Zw Zw^T with
    // Zw the per-class centered samples.
    Matrix zb(d, C);
    for (int c = 0; c < C; ++c) {
        double s = std::sqrt(static_cast<double>(counts[c]));
        for (int i = 0; i < d; ++i) zb(i, c) = s * (means(i, c) - overall[i]);
    }
    Matrix zw(d, N);
    for (int j = 0; j < N; ++j)
        for (int i = 0; i < d; ++i) zw(i, j) = y(i, j) - means(i, labels[j]);

    return {gram(zb.transposed(), 1.0), gram(zw.transposed(), 1.0)};
}

static std::vector<double> loo_nn_distances(const Matrix& w) {
    const int d = w.rows(), N = w.cols();
    std::vector<double> out;
    if (N < 2) return out;
    out.reserve(N);
    for (int j = 0; j < N; ++j) {
        double best = std::numeric_limits<double>::infinity();
        for (int k = 0; k < N; ++k) {
            if (k == j) continue;
            double s = 0;
            for (int i = 0; i < d; ++i) {
                double diff = w(i, j) - w(i, k);
                s += diff * diff;
            }
            best = std::min(best, s);
        }
        out.push_back(std::sqrt(best));
    }
    return out;
}

// Nearest-rank 95th percentile of leave-one-out neighbour distances. A
// single-image gallery has no pairs; accept everything in that case.
static double percentile95(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::infinity();
    std::sort(v.begin(), v.end());
    size_t idx = static_cast<size_t>(std::ceil(0.95 * v.size()));
    return v[std::min(idx == 0 ? 0 : idx - 1, v.size() - 1)];
}

void compute_rejection_thresholds(SubspaceModel& m) {
    m.tau = percentile95(loo_nn_distances(m.gallery_weights));
    m.tau_pca = percentile95(loo_nn_distances(m.gallery_weights_pca));
}

SubspaceModel lda_train(const DataMatrix& x, const LdaOptions& opts) {
    x.validate();
    const int n = x.n(), N = x.N(), C = x.class_count();
    if (C < 2) throw ValueError("discriminant training needs at least 2 classes");
    if (N - C < 1) throw ValueError("need more images than classes");
    const int p_pca = N - C;

    SubspaceModel m;
    m.n = n;
    m.N = N;
    m.C = C;
    m.seed = opts.pca.seed;
    m.mean = mean_face(x);
    m.gallery_labels = x.labels;

    CovarianceResult cov = covariance(x, m.mean);
    PcaResult pca = fast_pca(cov, p_pca, opts.pca);
    m.w_pca = std::move(pca.vectors);
    m.eigvals = std::move(pca.values);
    m.pca_iterations = std::move(pca.iterations);

    Matrix centered = centered_columns(x, m.mean);
    Matrix y = matmul_transa(m.w_pca, centered);  // (N-C) x N
    m.gallery_weights_pca = y;

    ScatterPair sc = scatter_matrices(y, x.labels);

    Matrix l(0, 0);
    try {
        l = cholesky(sc.within);
    } catch (const ValueError&) {
        double tr = 0;
        for (int i = 0; i < p_pca; ++i) tr += sc.within(i, i);
        double eps = 1e-8 * tr / p_pca;
        std::fprintf(stderr,
                     "warning: within-class scatter not positive definite; "
                     "adding ridge %.3e\n", eps);
        for (int i = 0; i < p_pca; ++i) sc.within(i, i) += eps;
        l = cholesky(sc.within);
        m.ridge_applied = true;
    }

    // Whiten: M = L^-1 S_B L^-T, symmetric up to rounding.
    Matrix a = solve_lower(l, sc.between);
    Matrix mw = solve_lower(l, a.transposed()).transposed();
    for (int i = 0; i < p_pca; ++i)
        for (int j = i + 1; j < p_pca; ++j) {
            double v = 0.5 * (mw(i, j) + mw(j, i));
            mw(i, j) = mw(j, i) = v;
        }
    EigenDecomposition eig = jacobi_eig(mw);

    Matrix v_top(p_pca, C - 1);
    for (int k = 0; k < C - 1; ++k) v_top.set_col(k, eig.vectors.col(k));
    m.w_lda = solve_lower_transposed(l, v_top);  // columns satisfy w^T S_W w = 1
    canonicalize_column_signs(m.w_lda);

    m.gallery_weights = matmul_transa(m.w_lda, y);  // (C-1) x N
    compute_rejection_thresholds(m);
    return m;
}

static std::vector<double> require_vector(std::span<const double> x, int n,
                                          const char* what) {
    if (static_cast<int>(x.size()) != n)
        throw DimensionError(std::string("input length does not match ") + what);
    return {x.begin(), x.end()};
}

std::vector<double> project_pca(const SubspaceModel& m, std::span<const double> x) {
    std::vector<double> d = require_vector(x, m.n, "model dimension");
    for (int i = 0; i < m.n; ++i) d[i] -= m.mean[i];
    return matvec_transa(m.w_pca, d);
}

std::vector<double> project(const SubspaceModel& m, std::span<const double> x) {
    std::vector<double> y = project_pca(m, x);
    return matvec_transa(m.w_lda, y);
}

namespace {

std::string encode_doubles(const double* p, size_t count) {
    // Serialized little-endian; this build is little-endian x86-64.
    return base64_encode(reinterpret_cast<const unsigned char*>(p),
                         count * sizeof(double));
}

std::vector<double> decode_doubles(const std::string& b64, size_t expect,
                                   const char* what) {
    std::vector<unsigned char> raw = base64_decode(b64);
    if (raw.size() != expect * sizeof(double))
        throw FormatError(std::string("model field has wrong size: ") + what);
    std::vector<double> out(expect);
    std::memcpy(out.data(), raw.data(), raw.size());
    return out;
}

Matrix decode_matrix(const std::string& b64, int rows, int cols, const char* what) {
    std::vector<double> v =
        decode_doubles(b64, static_cast<size_t>(rows) * cols, what);
    Matrix m(rows, cols);
    std::copy(v.begin(), v.end(), m.data());
    return m;
}

}  // namespace

void save_model(const SubspaceModel& m, const std::filesystem::path& path) {
    nlohmann::json j;
    j["version"] = 1;
    j["n"] = m.n;
    j["N"] = m.N;
    j["C"] = m.C;
    j["seed"] = m.seed;
    j["mean"] = encode_doubles(m.mean.data(), m.mean.size());
    j["eigvals"] = encode_doubles(m.eigvals.data(), m.eigvals.size());
    j["W_pca"] = encode_doubles(m.w_pca.data(), static_cast<size_t>(m.w_pca.rows()) * m.w_pca.cols());
    j["W_lda"] = encode_doubles(m.w_lda.data(), static_cast<size_t>(m.w_lda.rows()) * m.w_lda.cols());
    j["gallery_weights"] = encode_doubles(
        m.gallery_weights.data(),
        static_cast<size_t>(m.gallery_weights.rows()) * m.gallery_weights.cols());
    j["gallery_weights_pca"] = encode_doubles(
        m.gallery_weights_pca.data(),
        static_cast<size_t>(m.gallery_weights_pca.rows()) * m.gallery_weights_pca.cols());
    j["gallery_labels"] = m.gallery_labels;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write model file: " + path.string());
    out << j.dump(2) << '\n';
    if (!out.flush()) throw IoError("failed writing model file: " + path.string());
}

SubspaceModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open model file: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("model file is not valid JSON: ") + e.what());
    }
    try {
        if (j.at("version").get<int>() != 1)
            throw FormatError("unsupported model version");
        SubspaceModel m;
        m.n = j.at("n").get<int>();
        m.N = j.at("N").get<int>();
        m.C = j.at("C").get<int>();
        m.seed = j.at("seed").get<uint64_t>();
        if (m.n < 1 || m.N < 2 || m.C < 2 || m.N - m.C < 1)
            throw FormatError("model dimensions are inconsistent");
        const int p = m.N - m.C;
        m.mean = decode_doubles(j.at("mean").get<std::string>(), m.n, "mean");
        m.eigvals = decode_doubles(j.at("eigvals").get<std::string>(), p, "eigvals");
        m.w_pca = decode_matrix(j.at("W_pca").get<std::string>(), m.n, p, "W_pca");
        m.w_lda = decode_matrix(j.at("W_lda").get<std::string>(), p, m.C - 1, "W_lda");
        m.gallery_weights = decode_matrix(j.at("gallery_weights").get<std::string>(),
                                          m.C - 1, m.N, "gallery_weights");
        m.gallery_weights_pca = decode_matrix(
            j.at("gallery_weights_pca").get<std::string>(), p, m.N,
            "gallery_weights_pca");
        m.gallery_labels = j.at("gallery_labels").get<std::vector<int>>();
        if (static_cast<int>(m.gallery_labels.size()) != m.N)
            throw FormatError("gallery label count does not match N");
        for (int l : m.gallery_labels)
            if (l < 0 || l >= m.C) throw FormatError("gallery label out of range");
        compute_rejection_thresholds(m);
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("model file missing field: ") + e.what());
    }
}

}  // namespace facekit
