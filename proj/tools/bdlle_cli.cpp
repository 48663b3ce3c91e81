// Command-line front end: sampling, matrix construction, spectra, boundary
// indicator, clipping and the desk-scale experiments.
#include "bdlle/analytic.hpp"
#include "bdlle/boundary.hpp"
#include "bdlle/error.hpp"
#include "bdlle/harness.hpp"
#include "bdlle/io.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

using namespace bdlle;

namespace {

const char* const kFlags[] = {"manifold", "n",   "eps",   "knn", "c",          "c-rule",
                              "seed",     "k-eigs", "alpha", "out", "tstar-clip", "scale",
                              "p",        "tau", "f-test", "sweep-n", "sweep-eps"};

struct Common {
    std::map<std::string, std::string> values;
    std::string config;
    bool clip = false;
};

void add_common(CLI::App* app, Common& common)
{
    for (const char* flag : kFlags) {
        if (std::string(flag) == "tstar-clip") {
            app->add_flag("--tstar-clip", common.clip, "clip the wave region before solving");
        } else {
            app->add_option(std::string("--") + flag, common.values[flag]);
        }
    }
    app->add_option("--config", common.config, "key=value file; flags given here override it");
}

harness::ExperimentConfig make_config(CLI::App* app, const Common& common)
{
    harness::ExperimentConfig cfg;
    if (!common.config.empty()) {
        harness::apply_config_file(cfg, common.config);
    }
    for (const char* flag : kFlags) {
        if (app->count(std::string("--") + flag) == 0) {
            continue;
        }
        if (std::string(flag) == "tstar-clip") {
            cfg.tstar_clip = common.clip;
        } else {
            harness::set_option(cfg, flag, common.values.at(flag));
        }
    }
    return cfg;
}

void print_spectrum_head(const Spectrum& s, long count)
{
    for (long i = 0; i < std::min(count, s.size()); ++i) {
        std::printf("%3ld  %+.12f %+.12fi", i + 1, s.values[static_cast<size_t>(i)].real(),
                    s.values[static_cast<size_t>(i)].imag());
        if (!s.residuals.empty()) {
            std::printf("  res %.2e", s.residuals[static_cast<size_t>(i)]);
        }
        std::printf("\n");
    }
}

int cmd_sample(const harness::ExperimentConfig& in)
{
    const harness::ExperimentConfig cfg = harness::resolved(in);
    const PointCloud cloud = harness::sample(cfg);
    std::filesystem::create_directories(cfg.out);
    std::ofstream out(cfg.out / "cloud.csv");
    write_cloud_csv(out, cloud);
    std::printf("%ld points, p = %ld, d = %d -> %s\n", cloud.size(), cloud.ambient_dim(),
                cloud.intrinsic_dim, (cfg.out / "cloud.csv").c_str());
    return 0;
}

LleMetadata metadata_for(const harness::ExperimentConfig& cfg, const LleMatrix& W)
{
    LleMetadata meta = W.meta;
    meta.seed = cfg.seed;
    return meta;
}

int cmd_build(const harness::ExperimentConfig& in)
{
    const harness::ExperimentConfig cfg = harness::resolved(in);
    const harness::Pipeline p = harness::build_pipeline(cfg);
    std::filesystem::create_directories(cfg.out);
    io::save_matrix(p.W.W, metadata_for(cfg, p.W), cfg.out / "W.csv");
    std::printf("W: %ld x %ld, nnz %ld, c = %.6g -> %s\n", p.W.size(), p.W.size(),
                static_cast<long>(p.W.W.nonZeros()), p.W.meta.c, (cfg.out / "W.csv").c_str());
    return 0;
}

int cmd_spectrum(const harness::ExperimentConfig& in, const std::string& matrix_path)
{
    const harness::ExperimentConfig cfg = harness::resolved(in);
    SparseRowMatrix W;
    if (!matrix_path.empty()) {
        W = io::load_matrix(matrix_path).W;
    } else {
        W = harness::build_pipeline(cfg).W.W;
    }
    EigOptions opts;
    opts.k = std::min(cfg.k_eigs, static_cast<long>(W.rows()));
    if (W.rows() > opts.dense_limit) {
        opts.shift = 1.001;
    }
    const Spectrum s = eig(W, opts);
    std::filesystem::create_directories(cfg.out);
    std::ofstream out(cfg.out / "spectrum.csv");
    io::write_spectrum_csv(out, s);
    print_spectrum_head(s, cfg.k_eigs);
    const SpectralRadiusReport rr = spectral_radius_report(W, &s);
    std::printf("||W1 - 1||_inf = %.3e, rho >= %.6f\n", rr.row_sum_residual, rr.rho_lower);
    return 0;
}

int cmd_eigenfunctions(const harness::ExperimentConfig& cfg)
{
    const harness::EigenfunctionResult r = harness::run_eigenfunctions(cfg);
    print_spectrum_head(r.spectrum, cfg.k_eigs);
    for (size_t j = 0; j < r.endpoint_ratio.size(); ++j) {
        std::printf("endpoint ratio %zu: %.4f\n", j + 1, r.endpoint_ratio[j]);
    }
    return 0;
}

int cmd_indicator(const harness::ExperimentConfig& cfg)
{
    const harness::IndicatorResult r = harness::run_indicator(cfg);
    std::printf("threshold %.6f\n", r.report.threshold);
    std::printf("mean B (dist < eps/4) %.4f, mean |B| interior %.4f\n", r.mean_b_collar,
                r.mean_abs_b_interior);
    std::printf("recall %.4f, false positives %.4f\n", r.recall, r.false_positive);
    return 0;
}

int cmd_clip(const harness::ExperimentConfig& in)
{
    harness::ExperimentConfig cfg = harness::resolved(in);
    if (!cfg.eps) {
        throw ParameterError("clip needs --eps");
    }
    const harness::Pipeline p = harness::build_pipeline(cfg);
    const double ts = analytic::tstar(analytic::Coeffs(p.cloud.intrinsic_dim, *cfg.eps));
    const BoundaryReport rep = indicator(p.W);
    const auto regions = partition_regions(p.cloud, *cfg.eps, ts, &rep);
    const ClippedMatrix cm = clip(p.W.W, regions);
    std::filesystem::create_directories(cfg.out);
    io::save_matrix(cm.W, metadata_for(cfg, p.W), cfg.out / "W_clipped.csv");
    std::ofstream map(cfg.out / "index_map.csv");
    map << "new,old\n";
    for (size_t i = 0; i < cm.new_to_old.size(); ++i) {
        map << i << ',' << cm.new_to_old[i] << '\n';
    }
    std::printf("t* = %.6g; kept %zu of %ld points\n", ts, cm.new_to_old.size(), p.cloud.size());
    return 0;
}

int cmd_convergence(const harness::ExperimentConfig& cfg)
{
    const auto rows = harness::run_convergence(cfg);
    std::printf("%8s %8s %10s %12s %12s %12s %12s\n", "n", "eps", "interior", "mean", "target",
                "error", "collar err");
    for (const auto& r : rows) {
        std::printf("%8ld %8.4f %10ld %12.6f %12.6f %12.6f %12.6f\n", r.n, r.eps, r.interior_count,
                    r.interior_mean, r.interior_target, r.interior_error, r.collar_error);
    }
    return 0;
}

int cmd_nullcase(const harness::ExperimentConfig& cfg)
{
    const harness::NullCaseResult r = harness::run_null_case(cfg);
    print_spectrum_head(r.spectrum, 5);
    std::printf("max |Im| %.4f, bound %.4f, worst distance %.4f, contained %s\n",
                r.diagnostics.max_abs_imag, r.diagnostics.bound, r.diagnostics.worst_distance,
                r.diagnostics.bauer_fike_ok ? "yes" : "no");
    return 0;
}

int cmd_sigma_table(int d, double eps, int points, double density, const std::string& out_path)
{
    if (points < 2) {
        throw ParameterError("--points must be at least 2");
    }
    const analytic::Coeffs c(d, eps);
    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) {
            throw Error("cannot open " + out_path);
        }
    }
    std::ostream& out = out_path.empty() ? std::cout : file;
    out << "t/eps,s0,s1d,s2,s2d,s3,s3d,phi1,phi2,V,B\n";
    using analytic::Sigma;
    for (int i = 0; i < points; ++i) {
        const double s = 1.2 * i / (points - 1);
        const double t = s * eps;
        const analytic::Phi ph = analytic::phi(t, c);
        const double row[] = {s,
                              analytic::sigma(Sigma::s0, t, c),
                              analytic::sigma(Sigma::s1d, t, c),
                              analytic::sigma(Sigma::s2, t, c),
                              analytic::sigma(Sigma::s2d, t, c),
                              analytic::sigma(Sigma::s3, t, c),
                              analytic::sigma(Sigma::s3d, t, c),
                              ph.phi1,
                              ph.phi2,
                              analytic::potential_V(t, density, c),
                              analytic::b_function(t, c)};
        for (size_t j = 0; j < std::size(row); ++j) {
            out << (j ? "," : "") << io::format_double(row[j]);
        }
        out << '\n';
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Boundary-aware locally linear embedding toolkit"};
    app.require_subcommand(1);

    struct Sub {
        CLI::App* app;
        Common common;
    };
    std::map<std::string, Sub> subs;
    const std::pair<const char*, const char*> names[] = {
        {"sample", "Sample a point cloud to cloud.csv"},
        {"build", "Build the LLE matrix and save it as triplets plus sidecar"},
        {"spectrum", "Leading eigenvalues of W (built or loaded with --matrix)"},
        {"eigenfunctions", "Eigenvectors of W or the clipped W_r"},
        {"indicator", "Boundary indicator, labels and the profile against t/eps"},
        {"clip", "Remove the wave region and save W_r with its index map"},
        {"convergence", "Pointwise error of (W - I) f / eps^2 against the limit operator"},
        {"nullcase", "Spectrum of the Gaussian null case"},
    };
    for (const auto& [name, help] : names) {
        Sub& s = subs[name];
        s.app = app.add_subcommand(name, help);
        add_common(s.app, s.common);
    }
    std::string matrix_path;
    subs["spectrum"].app->add_option("--matrix", matrix_path, "triplet CSV written by `build`");

    int d = 1;
    double eps = 1.0;
    int points = 121;
    double density = 1.0;
    std::string table_out;
    CLI::App* table = app.add_subcommand("sigma-table", "Tabulate the boundary-layer coefficients");
    table->add_option("--d", d, "intrinsic dimension")->check(CLI::PositiveNumber);
    table->add_option("--eps", eps, "bandwidth")->check(CLI::PositiveNumber);
    table->add_option("--points", points, "grid size over t/eps in [0, 1.2]");
    table->add_option("--density", density, "density P used in V")->check(CLI::PositiveNumber);
    table->add_option("--out", table_out, "CSV path (stdout when omitted)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (table->parsed()) {
            return cmd_sigma_table(d, eps, points, density, table_out);
        }
        for (auto& [name, s] : subs) {
            if (!s.app->parsed()) {
                continue;
            }
            const harness::ExperimentConfig cfg = make_config(s.app, s.common);
            if (name == "sample") return cmd_sample(cfg);
            if (name == "build") return cmd_build(cfg);
            if (name == "spectrum") return cmd_spectrum(cfg, matrix_path);
            if (name == "eigenfunctions") return cmd_eigenfunctions(cfg);
            if (name == "indicator") return cmd_indicator(cfg);
            if (name == "clip") return cmd_clip(cfg);
            if (name == "convergence") return cmd_convergence(cfg);
            if (name == "nullcase") return cmd_nullcase(cfg);
        }
    } catch (const bdlle::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 1;
}
