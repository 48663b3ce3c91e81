#pragma once

#include "bdlle/boundary.hpp"
#include "bdlle/lle_core.hpp"
#include "bdlle/samplers.hpp"
#include "bdlle/spectral.hpp"

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace bdlle::harness {

enum class TestFunction { constant, coordinate, squared_radius, trig };

std::string_view to_string(TestFunction f);
TestFunction test_function_from_string(std::string_view name);

struct ExperimentConfig {
    ManifoldTag manifold = ManifoldTag::interval;
    long n = 0;                     // n, or n_raw for rejection samplers; 0 takes the preset
    std::optional<double> eps;
    std::optional<long> knn;
    std::string c_rule = "paper";   // "paper" or "fixed"
    std::optional<double> c;
    std::uint64_t seed = 1;
    long k_eigs = 10;
    double alpha = 0.5;
    std::filesystem::path out = "out";
    bool tstar_clip = false;
    long scale = 1;                 // divides the preset sample size
    long p = 200;                   // ambient dimension of the Gaussian null case
    std::optional<double> tau;
    TestFunction f_test = TestFunction::squared_radius;
    std::vector<long> sweep_n;
    std::vector<double> sweep_eps;
    bool write = true;
};

/// Sample sizes and bandwidths used for the figures: interval 8000 / 0.01,
/// disk 20000 raw / 0.1, curve 8000 / 0.01, surface 20000 raw / 0.1,
/// torus 25000 raw / 0.3, Gaussian 400 x 200 with 50-NN and c = 1e-3.
ExperimentConfig preset(ManifoldTag tag);

/// Fills unset fields from the preset for cfg.manifold and applies scale.
ExperimentConfig resolved(const ExperimentConfig& cfg);

/// key=value, one per line; '#' starts a comment. Keys are the CLI flag names
/// without dashes.
void set_option(ExperimentConfig& cfg, const std::string& key, const std::string& value);
void apply_config(ExperimentConfig& cfg, std::istream& in);
void apply_config_file(ExperimentConfig& cfg, const std::filesystem::path& path);

PointCloud sample(const ExperimentConfig& cfg);
NeighborScheme scheme_of(const ExperimentConfig& cfg);
RegularizerRule rule_of(const ExperimentConfig& cfg);

struct Pipeline {
    PointCloud cloud;
    NeighborGraph graph;
    LleMatrix W;
};

Pipeline build_pipeline(const ExperimentConfig& cfg);

struct EigenfunctionResult {
    Pipeline pipe;
    std::optional<ClippedMatrix> clipped;
    Spectrum spectrum;
    /// |v| at the retained points nearest each end over max |v|, per
    /// eigenvector (one-dimensional clouds only).
    std::vector<double> endpoint_ratio;
};

/// Largest-real-part eigenpairs of W (or W_r when tstar_clip is set). Above
/// the dense limit the solve is shift-invert about 1.001.
EigenfunctionResult run_eigenfunctions(const ExperimentConfig& cfg);

struct ConvergenceRow {
    long n = 0;
    double eps = 0.0;
    double c = 0.0;
    long interior_count = 0;
    double interior_mean = 0.0;  // mean of [(W - I) f]_k / eps^2
    double interior_target = 0.0;
    double interior_error = 0.0; // mean |observed - target|
    long collar_count = 0;
    double collar_error = 0.0;
};

/// Sweeps (n, eps) pairs for flat analytic clouds (interval, disk). Targets use
/// the analytic operator with the exact test-function derivatives.
std::vector<ConvergenceRow> run_convergence(const ExperimentConfig& cfg);

struct NullCaseResult {
    Spectrum spectrum;
    ImaginaryDiagnostics diagnostics;
    SpectralRadiusReport radius;
};

NullCaseResult run_null_case(const ExperimentConfig& cfg);

struct IndicatorResult {
    Pipeline pipe;
    BoundaryReport report;
    double mean_b_collar = 0.0;   // points with dist < eps / 4
    double mean_abs_b_interior = 0.0; // dist > 2 eps, and t in [2 eps, 1 - 2 eps] on the interval
    double recall = 0.0;          // labeled boundary among dist < eps / 2
    double false_positive = 0.0;  // labeled boundary among dist > 2 eps
};

IndicatorResult run_indicator(const ExperimentConfig& cfg);

} // namespace bdlle::harness
