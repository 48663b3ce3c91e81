#pragma once

#include "bdlle/error.hpp"
#include "bdlle/lle_core.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace bdlle {

using Complex = std::complex<double>;

enum class Ordering { by_real_desc, by_modulus_desc };

/// Eigenpairs of a real square matrix. Eigenvector columns have unit 2-norm and
/// their largest-modulus component made real and positive.
struct Spectrum {
    std::vector<Complex> values;
    std::optional<Eigen::MatrixXcd> vectors;
    Ordering ordering = Ordering::by_real_desc;
    std::string method;
    std::vector<double> residuals; // ||W v - lambda v|| / ||v||, empty without vectors

    long size() const { return static_cast<long>(values.size()); }
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, Spectrum partial)
        : Error(what), partial_(std::move(partial)) {}
    const Spectrum& partial() const noexcept { return partial_; }

private:
    Spectrum partial_;
};

struct EigOptions {
    std::optional<long> k;              // number of eigenpairs; all when empty (dense)
    Ordering ordering = Ordering::by_real_desc;
    bool vectors = true;
    long dense_limit = 2000;            // dense Hessenberg solve up to this size
    std::optional<double> shift;        // shift-invert about this real point (sparse path)
    long krylov_dim = 0;                // 0: max(2k + 10, 30)
    long max_restarts = 3000;
    double tol = 1e-12;                 // Ritz residual tolerance, relative
    std::uint64_t seed = 0x5eed;        // starting vector
};

/// Dense solve: real Schur form of the Hessenberg reduction.
Spectrum eig(const Eigen::MatrixXd& W, const EigOptions& opts = {});

/// Dense solve for n <= dense_limit without shift; otherwise implicitly
/// restarted Arnoldi targeting the k eigenvalues of largest real part or
/// modulus (or nearest the shift under shift-invert). When the k-th value has
/// a conjugate partner that partner is returned as well.
Spectrum eig(const SparseRowMatrix& W, const EigOptions& opts = {});

void sort_spectrum(Spectrum& s, Ordering ordering);

struct EigenCluster {
    Complex value;
    long multiplicity;
};

/// Groups eigenvalues whose distance is within rel_tol * max(1, |lambda|).
std::vector<EigenCluster> cluster_eigenvalues(const std::vector<Complex>& values,
                                              double rel_tol = 1e-7);

/// W+ = (W + W^T) / 2 and W- = (W - W^T) / 2.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> symmetric_split(const Eigen::MatrixXd& W);
std::pair<SparseRowMatrix, SparseRowMatrix> symmetric_split(const SparseRowMatrix& W);

struct ImaginaryDiagnostics {
    double bound = 0.0;       // sqrt(||W-||_1 ||W-||_inf)
    double max_asym = 0.0;    // max |W_ij - W_ji|
    double max_abs_imag = 0.0;
    double worst_distance = 0.0; // max over lambda of distance to spec(W+)
    bool bauer_fike_ok = false;
};

/// Full dense spectra of W and W+; every eigenvalue of W must lie within the
/// bound of some eigenvalue of W+.
ImaginaryDiagnostics imaginary_diagnostics(const Eigen::MatrixXd& W);
ImaginaryDiagnostics imaginary_diagnostics(const SparseRowMatrix& W);

struct SpectralRadiusReport {
    double rho_lower = 0.0;
    double row_sum_residual = 0.0; // ||W 1 - 1||_inf
    bool has_eig_one = false;      // row_sum_residual <= 1e-12
    bool rho_at_least_one = false; // rho_lower >= 1 - 1e-10
};

SpectralRadiusReport spectral_radius_report(const SparseRowMatrix& W,
                                            const Spectrum* known = nullptr);
SpectralRadiusReport spectral_radius_report(const Eigen::MatrixXd& W,
                                            const Spectrum* known = nullptr);

} // namespace bdlle
