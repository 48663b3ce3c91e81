#include "bdlle/spectral.hpp"

#include "bdlle/rng.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace bdlle {

namespace {

using VecC = Eigen::VectorXcd;
using MatC = Eigen::MatrixXcd;

constexpr double kEps = std::numeric_limits<double>::epsilon();

double order_key(Complex z, Ordering ordering)
{
    return ordering == Ordering::by_real_desc ? z.real() : std::abs(z);
}

void normalize_phase(MatC& vectors)
{
    for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
        auto col = vectors.col(j);
        const double norm = col.norm();
        if (norm == 0.0) {
            continue;
        }
        Eigen::Index arg = 0;
        col.cwiseAbs().maxCoeff(&arg);
        const Complex pivot = col(arg);
        col *= std::conj(pivot) / (std::abs(pivot) * norm);
        col(arg) = Complex(col(arg).real(), 0.0);
    }
}

template <class Mat>
std::vector<double> residual_norms(const Mat& W, const std::vector<Complex>& values, const MatC& vectors)
{
    std::vector<double> out(values.size());
    for (size_t i = 0; i < values.size(); ++i) {
        const VecC v = vectors.col(static_cast<Eigen::Index>(i));
        const VecC wv = W.template cast<Complex>() * v;
        out[i] = (wv - values[i] * v).norm() / v.norm();
    }
    return out;
}

std::vector<double> residual_norms_sparse(const SparseRowMatrix& W, const std::vector<Complex>& values,
                                          const MatC& vectors)
{
    std::vector<double> out(values.size());
    for (size_t i = 0; i < values.size(); ++i) {
        const VecC v = vectors.col(static_cast<Eigen::Index>(i));
        const Eigen::VectorXd re = v.real();
        const Eigen::VectorXd im = v.imag();
        VecC wv(v.size());
        wv.real() = W * re;
        wv.imag() = W * im;
        out[i] = (wv - values[i] * v).norm() / v.norm();
    }
    return out;
}

/// Keeps the first k entries of an ordered spectrum, extended by one when the
/// k-th value's conjugate partner would otherwise be cut off.
void truncate_keeping_pairs(Spectrum& s, long k)
{
    if (k >= s.size()) {
        return;
    }
    long keep = k;
    const Complex last = s.values[static_cast<size_t>(k - 1)];
    if (std::abs(last.imag()) > 0.0) {
        const Complex partner = std::conj(last);
        const double tol = 1e-8 * std::max(1.0, std::abs(last));
        bool present = false;
        for (long i = 0; i < k; ++i) {
            present |= std::abs(s.values[static_cast<size_t>(i)] - partner) <= tol &&
                       i != k - 1;
        }
        if (!present && std::abs(s.values[static_cast<size_t>(k)] - partner) <= tol) {
            keep = k + 1;
        }
    }
    s.values.resize(static_cast<size_t>(keep));
    if (!s.residuals.empty()) {
        s.residuals.resize(static_cast<size_t>(keep));
    }
    if (s.vectors) {
        s.vectors = MatC(s.vectors->leftCols(keep));
    }
}

struct KrylovResult {
    std::vector<Complex> values; // in original spectrum coordinates
    MatC vectors;
    bool converged = false;
    long restarts = 0;
};

/// Implicitly restarted Arnoldi in complex arithmetic with exact shifts and
/// full (twice-iterated Gram-Schmidt) reorthogonalization.
KrylovResult restarted_arnoldi(const std::function<void(const VecC&, VecC&)>& apply, long n,
                               long nev, long m, long max_restarts, double tol,
                               std::uint64_t seed,
                               const std::function<double(Complex)>& key)
{
    MatC V = MatC::Zero(n, m + 1);
    MatC H = MatC::Zero(m + 1, m);
    CounterRng rng(seed);

    auto random_unit = [&](long ortho_cols) {
        VecC r(n);
        for (long i = 0; i < n; ++i) {
            r(i) = Complex(rng.uniform(-1.0, 1.0), 0.0);
        }
        for (int pass = 0; pass < 2 && ortho_cols > 0; ++pass) {
            r -= V.leftCols(ortho_cols) * (V.leftCols(ortho_cols).adjoint() * r);
        }
        return VecC(r / r.norm());
    };

    auto extend = [&](long j0) {
        VecC w(n);
        for (long j = j0; j < m; ++j) {
            apply(V.col(j), w);
            VecC h = V.leftCols(j + 1).adjoint() * w;
            w -= V.leftCols(j + 1) * h;
            const VecC h2 = V.leftCols(j + 1).adjoint() * w;
            w -= V.leftCols(j + 1) * h2;
            h += h2;
            H.col(j).head(j + 1) = h;
            const double beta = w.norm();
            if (beta <= 1e3 * kEps * h.norm()) {
                H(j + 1, j) = 0.0;
                V.col(j + 1) = random_unit(j + 1);
            } else {
                H(j + 1, j) = beta;
                V.col(j + 1) = w / beta;
            }
        }
    };

    V.col(0) = random_unit(0);
    const long keep = std::min(m - 1, nev + (m - nev) / 2);
    long j0 = 0;
    KrylovResult out;

    for (long restart = 0; restart <= max_restarts; ++restart) {
        extend(j0);
        MatC Hm = H.topLeftCorner(m, m);
        const Eigen::ComplexEigenSolver<MatC> ces(Hm);
        const VecC theta = ces.eigenvalues();
        const MatC S = ces.eigenvectors();

        std::vector<long> order(static_cast<size_t>(m));
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](long a, long b) {
            return key(theta(a)) > key(theta(b));
        });

        const double beta = std::abs(H(m, m - 1));
        const double hnorm = Hm.norm();
        bool all = true;
        for (long i = 0; i < nev; ++i) {
            const long idx = order[static_cast<size_t>(i)];
            const double est = beta * std::abs(S(m - 1, idx)) / S.col(idx).norm();
            all &= est <= tol * std::max(std::abs(theta(idx)), kEps * hnorm);
        }
        out.restarts = restart;
        if (all || restart == max_restarts) {
            out.converged = all;
            MatC X(n, nev);
            out.values.clear();
            for (long i = 0; i < nev; ++i) {
                const long idx = order[static_cast<size_t>(i)];
                X.col(i) = V.leftCols(m) * S.col(idx);
                out.values.push_back(theta(idx));
            }
            out.vectors = std::move(X);
            return out;
        }

        // Exact shifts: the unwanted Ritz values.
        MatC Q = MatC::Identity(m, m);
        for (long i = keep; i < m; ++i) {
            const Complex mu = theta(order[static_cast<size_t>(i)]);
            MatC shifted = Hm - mu * MatC::Identity(m, m);
            const Eigen::HouseholderQR<MatC> qr(shifted);
            const MatC Qi = qr.householderQ();
            Hm = Qi.adjoint() * Hm * Qi;
            for (long r = 2; r < m; ++r) {
                Hm.col(r - 2).tail(m - r).setZero();
            }
            Q = Q * Qi;
        }
        const MatC Vq = V.leftCols(m) * Q.leftCols(keep + 1);
        VecC f = Vq.col(keep) * Hm(keep, keep - 1) + V.col(m) * H(m, m - 1) * Q(m - 1, keep - 1);
        V.leftCols(keep) = Vq.leftCols(keep);
        H.setZero();
        H.topLeftCorner(keep, keep) = Hm.topLeftCorner(keep, keep);
        // Re-orthogonalize the residual against the kept basis.
        f -= V.leftCols(keep) * (V.leftCols(keep).adjoint() * f);
        const double fn = f.norm();
        if (fn <= 1e3 * kEps * hnorm) {
            H(keep, keep - 1) = 0.0;
            V.col(keep) = random_unit(keep);
        } else {
            H(keep, keep - 1) = fn;
            V.col(keep) = f / fn;
        }
        j0 = keep;
    }
    return out;
}

Spectrum finalize_dense(const Eigen::MatrixXd& W, std::vector<Complex> values,
                        std::optional<MatC> vectors, const EigOptions& opts, std::string method)
{
    Spectrum s;
    s.values = std::move(values);
    s.vectors = std::move(vectors);
    s.method = std::move(method);
    if (s.vectors) {
        normalize_phase(*s.vectors);
        s.residuals = residual_norms(W, s.values, *s.vectors);
    }
    sort_spectrum(s, opts.ordering);
    if (opts.k) {
        truncate_keeping_pairs(s, *opts.k);
    }
    return s;
}

void check_square(long rows, long cols)
{
    if (rows != cols) {
        throw DimensionError("eig: matrix must be square");
    }
    if (rows < 1) {
        throw EmptyInputError("eig: empty matrix");
    }
}

} // namespace

void sort_spectrum(Spectrum& s, Ordering ordering)
{
    std::vector<long> order(s.values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](long a, long b) {
        const Complex za = s.values[static_cast<size_t>(a)];
        const Complex zb = s.values[static_cast<size_t>(b)];
        const double ka = order_key(za, ordering);
        const double kb = order_key(zb, ordering);
        if (ka != kb) {
            return ka > kb;
        }
        return za.imag() > zb.imag();
    });
    Spectrum sorted;
    sorted.ordering = ordering;
    sorted.method = s.method;
    for (long i : order) {
        sorted.values.push_back(s.values[static_cast<size_t>(i)]);
        if (!s.residuals.empty()) {
            sorted.residuals.push_back(s.residuals[static_cast<size_t>(i)]);
        }
    }
    if (s.vectors) {
        MatC v(s.vectors->rows(), static_cast<long>(order.size()));
        for (size_t j = 0; j < order.size(); ++j) {
            v.col(static_cast<long>(j)) = s.vectors->col(order[j]);
        }
        sorted.vectors = std::move(v);
    }
    s = std::move(sorted);
}

Spectrum eig(const Eigen::MatrixXd& W, const EigOptions& opts)
{
    check_square(W.rows(), W.cols());
    if (opts.k && (*opts.k < 1 || *opts.k > W.rows())) {
        throw ParameterError("eig: need 1 <= k <= n");
    }
    const Eigen::EigenSolver<Eigen::MatrixXd> es(W, opts.vectors);
    if (es.info() != Eigen::Success) {
        throw ConvergenceError("eig: dense QR iteration did not converge", Spectrum{});
    }
    std::vector<Complex> values(es.eigenvalues().data(), es.eigenvalues().data() + W.rows());
    std::optional<MatC> vectors;
    if (opts.vectors) {
        vectors = es.eigenvectors();
    }
    return finalize_dense(W, std::move(values), std::move(vectors), opts, "dense-hessenberg-qr");
}

Spectrum eig(const SparseRowMatrix& W, const EigOptions& opts)
{
    check_square(W.rows(), W.cols());
    const long n = W.rows();
    if (opts.k && (*opts.k < 1 || *opts.k > n)) {
        throw ParameterError("eig: need 1 <= k <= n");
    }
    if (n <= opts.dense_limit && !opts.shift) {
        return eig(Eigen::MatrixXd(W), opts);
    }
    if (!opts.k) {
        throw ParameterError("eig: iterative path needs k");
    }
    const long k = *opts.k;
    // Two extra wanted values cover conjugate partners at the cut.
    const long nev = std::min(n - 1, k + 2);
    long m = opts.krylov_dim > 0 ? opts.krylov_dim : std::max(2 * nev + 10, 30L);
    m = std::min(m, n);
    if (m <= nev) {
        return eig(Eigen::MatrixXd(W), opts);
    }

    std::function<void(const VecC&, VecC&)> apply;
    std::function<double(Complex)> key;
    Eigen::SparseLU<Eigen::SparseMatrix<double, Eigen::ColMajor, int>> lu;
    std::string method;
    if (opts.shift) {
        Eigen::SparseMatrix<double, Eigen::ColMajor, int> A(n, n);
        {
            std::vector<Eigen::Triplet<double, int>> trips;
            for (long r = 0; r < n; ++r) {
                for (SparseRowMatrix::InnerIterator it(W, r); it; ++it) {
                    trips.emplace_back(static_cast<int>(r), static_cast<int>(it.col()), it.value());
                }
                trips.emplace_back(static_cast<int>(r), static_cast<int>(r), -*opts.shift);
            }
            A.setFromTriplets(trips.begin(), trips.end());
        }
        lu.analyzePattern(A);
        lu.factorize(A);
        if (lu.info() != Eigen::Success) {
            throw ConvergenceError("eig: shift-invert factorization failed (shift is an eigenvalue?)",
                                   Spectrum{});
        }
        apply = [&lu](const VecC& x, VecC& y) {
            const Eigen::VectorXd re = lu.solve(Eigen::VectorXd(x.real()));
            const Eigen::VectorXd im = lu.solve(Eigen::VectorXd(x.imag()));
            y.real() = re;
            y.imag() = im;
        };
        key = [](Complex z) { return std::abs(z); };
        method = "arnoldi-shift-invert";
    } else {
        apply = [&W](const VecC& x, VecC& y) {
            y.real() = W * Eigen::VectorXd(x.real());
            y.imag() = W * Eigen::VectorXd(x.imag());
        };
        const Ordering ord = opts.ordering;
        key = [ord](Complex z) { return order_key(z, ord); };
        method = "arnoldi-implicit-restart";
    }

    KrylovResult kr = restarted_arnoldi(apply, n, nev, m, opts.max_restarts, opts.tol, opts.seed, key);
    if (opts.shift) {
        for (auto& v : kr.values) {
            v = *opts.shift + 1.0 / v;
        }
    }

    // Snap numerically real values, then complete conjugate pairs.
    std::vector<Complex> values;
    std::vector<VecC> vecs;
    for (size_t i = 0; i < kr.values.size(); ++i) {
        Complex z = kr.values[i];
        if (std::abs(z.imag()) <= 1e-12 * std::max(1.0, std::abs(z))) {
            z = Complex(z.real(), 0.0);
        }
        values.push_back(z);
        vecs.emplace_back(kr.vectors.col(static_cast<long>(i)));
    }
    const size_t base = values.size();
    for (size_t i = 0; i < base; ++i) {
        const Complex z = values[i];
        if (z.imag() == 0.0) {
            continue;
        }
        const double tol = 1e-8 * std::max(1.0, std::abs(z));
        bool found = false;
        for (const auto& u : values) {
            found |= std::abs(u - std::conj(z)) <= tol;
        }
        if (!found) {
            values.push_back(std::conj(z));
            vecs.emplace_back(vecs[i].conjugate());
        }
    }

    Spectrum s;
    s.method = method;
    s.values = values;
    MatC X(n, static_cast<long>(vecs.size()));
    for (size_t j = 0; j < vecs.size(); ++j) {
        X.col(static_cast<long>(j)) = vecs[j];
    }
    normalize_phase(X);
    s.residuals = residual_norms_sparse(W, s.values, X);
    s.vectors = std::move(X);
    sort_spectrum(s, opts.ordering);
    truncate_keeping_pairs(s, std::min<long>(k, s.size()));
    if (!opts.vectors) {
        s.vectors.reset();
    }
    if (!kr.converged) {
        throw ConvergenceError("eig: Arnoldi did not converge within " +
                                   std::to_string(opts.max_restarts) + " restarts",
                               s);
    }
    return s;
}

std::vector<EigenCluster> cluster_eigenvalues(const std::vector<Complex>& values, double rel_tol)
{
    std::vector<Complex> sorted = values;
    std::sort(sorted.begin(), sorted.end(), [](Complex a, Complex b) {
        return a.real() > b.real() || (a.real() == b.real() && a.imag() > b.imag());
    });
    std::vector<EigenCluster> out;
    for (const Complex z : sorted) {
        bool merged = false;
        for (auto& c : out) {
            if (std::abs(z - c.value) <= rel_tol * std::max(1.0, std::abs(c.value))) {
                ++c.multiplicity;
                merged = true;
                break;
            }
        }
        if (!merged) {
            out.push_back({z, 1});
        }
    }
    return out;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> symmetric_split(const Eigen::MatrixXd& W)
{
    if (W.rows() != W.cols()) {
        throw DimensionError("symmetric_split: matrix must be square");
    }
    const Eigen::MatrixXd Wt = W.transpose();
    return {0.5 * (W + Wt), 0.5 * (W - Wt)};
}

std::pair<SparseRowMatrix, SparseRowMatrix> symmetric_split(const SparseRowMatrix& W)
{
    if (W.rows() != W.cols()) {
        throw DimensionError("symmetric_split: matrix must be square");
    }
    const SparseRowMatrix Wt = W.transpose();
    SparseRowMatrix plus = 0.5 * (W + Wt);
    SparseRowMatrix minus = 0.5 * (W - Wt);
    return {plus, minus};
}

ImaginaryDiagnostics imaginary_diagnostics(const Eigen::MatrixXd& W)
{
    const auto [plus, minus] = symmetric_split(W);
    ImaginaryDiagnostics d;
    const double norm1 = minus.cwiseAbs().colwise().sum().maxCoeff();
    const double norm_inf = minus.cwiseAbs().rowwise().sum().maxCoeff();
    d.bound = std::sqrt(norm1 * norm_inf);
    d.max_asym = 2.0 * minus.cwiseAbs().maxCoeff();

    EigOptions opts;
    opts.vectors = false;
    const Spectrum full = eig(W, opts);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> sym(plus, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd mu = sym.eigenvalues();

    const double slack = 1e-10 * std::max(1.0, W.cwiseAbs().rowwise().sum().maxCoeff());
    d.bauer_fike_ok = true;
    for (const Complex z : full.values) {
        d.max_abs_imag = std::max(d.max_abs_imag, std::abs(z.imag()));
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < mu.size(); ++j) {
            best = std::min(best, std::abs(z - Complex(mu(j), 0.0)));
        }
        d.worst_distance = std::max(d.worst_distance, best);
        d.bauer_fike_ok &= best <= d.bound + slack;
    }
    return d;
}

ImaginaryDiagnostics imaginary_diagnostics(const SparseRowMatrix& W)
{
    return imaginary_diagnostics(Eigen::MatrixXd(W));
}

namespace {

template <class Mat>
SpectralRadiusReport radius_report(const Mat& W, const Spectrum* known)
{
    SpectralRadiusReport r;
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(W.cols());
    r.row_sum_residual = (W * ones - ones).cwiseAbs().maxCoeff();
    r.has_eig_one = r.row_sum_residual <= 1e-12;
    Spectrum computed;
    if (!known) {
        EigOptions opts;
        opts.vectors = false;
        opts.ordering = Ordering::by_modulus_desc;
        if (W.rows() > opts.dense_limit) {
            opts.k = 1;
        }
        computed = eig(W, opts);
        known = &computed;
    }
    for (const Complex z : known->values) {
        r.rho_lower = std::max(r.rho_lower, std::abs(z));
    }
    r.rho_at_least_one = r.rho_lower >= 1.0 - 1e-10;
    return r;
}

} // namespace

SpectralRadiusReport spectral_radius_report(const SparseRowMatrix& W, const Spectrum* known)
{
    return radius_report(W, known);
}

SpectralRadiusReport spectral_radius_report(const Eigen::MatrixXd& W, const Spectrum* known)
{
    return radius_report(W, known);
}

} // namespace bdlle
