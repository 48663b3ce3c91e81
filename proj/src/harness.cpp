#include "bdlle/harness.hpp"

#include "bdlle/analytic.hpp"
#include "bdlle/error.hpp"
#include "bdlle/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

namespace bdlle::harness {

using nlohmann::json;

std::string_view to_string(TestFunction f)
{
    switch (f) {
    case TestFunction::constant: return "constant";
    case TestFunction::coordinate: return "coordinate";
    case TestFunction::squared_radius: return "squared-radius";
    case TestFunction::trig: return "trig";
    }
    return "constant";
}

TestFunction test_function_from_string(std::string_view name)
{
    for (TestFunction f : {TestFunction::constant, TestFunction::coordinate,
                           TestFunction::squared_radius, TestFunction::trig}) {
        if (name == to_string(f)) {
            return f;
        }
    }
    throw ParameterError("unknown test function '" + std::string(name) + "'");
}

ExperimentConfig preset(ManifoldTag tag)
{
    ExperimentConfig cfg;
    cfg.manifold = tag;
    switch (tag) {
    case ManifoldTag::interval:
    case ManifoldTag::curve_m3:
        cfg.n = 8000;
        cfg.eps = 0.01;
        break;
    case ManifoldTag::disk:
        cfg.n = 20000;
        cfg.eps = 0.1;
        break;
    case ManifoldTag::surface:
        cfg.n = 20000;
        cfg.eps = 0.1;
        break;
    case ManifoldTag::torus:
        cfg.n = 25000;
        cfg.eps = 0.3;
        break;
    case ManifoldTag::gaussian_null:
        cfg.n = 400;
        cfg.p = 200;
        cfg.knn = 50;
        cfg.c_rule = "fixed";
        cfg.c = 1e-3;
        break;
    case ManifoldTag::custom:
        throw ParameterError("no preset for custom clouds");
    }
    return cfg;
}

ExperimentConfig resolved(const ExperimentConfig& cfg)
{
    ExperimentConfig out = cfg;
    const ExperimentConfig base = preset(cfg.manifold);
    if (out.n <= 0) {
        if (cfg.scale < 1) {
            throw ParameterError("scale must be at least 1");
        }
        out.n = std::max(1L, base.n / cfg.scale);
    }
    if (!out.eps && !out.knn) {
        out.eps = base.eps;
        out.knn = base.knn;
    }
    if (cfg.manifold == ManifoldTag::gaussian_null && !cfg.c && cfg.c_rule == "paper") {
        out.c_rule = base.c_rule;
        out.c = base.c;
    }
    return out;
}

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& value)
{
    std::istringstream ss(value);
    T v{};
    ss >> v;
    if (ss.fail() || !ss.eof()) {
        throw ParameterError("option " + key + ": cannot parse '" + value + "'");
    }
    return v;
}

bool parse_bool(const std::string& key, const std::string& value)
{
    if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
    if (value == "0" || value == "false" || value == "no" || value == "off") return false;
    throw ParameterError("option " + key + ": expected a boolean, got '" + value + "'");
}

template <class T>
std::vector<T> parse_list(const std::string& key, const std::string& value)
{
    std::vector<T> out;
    std::istringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(parse_number<T>(key, trim(item)));
    }
    return out;
}

std::filesystem::path prepare_out(const ExperimentConfig& cfg)
{
    if (cfg.write) {
        std::filesystem::create_directories(cfg.out);
    }
    return cfg.out;
}

json config_json(const ExperimentConfig& cfg)
{
    json j;
    j["manifold"] = std::string(to_string(cfg.manifold));
    j["n"] = cfg.n;
    j["epsilon"] = cfg.eps ? json(*cfg.eps) : json(nullptr);
    j["K"] = cfg.knn ? json(*cfg.knn) : json(nullptr);
    j["c_rule"] = cfg.c_rule;
    j["c"] = cfg.c ? json(*cfg.c) : json(nullptr);
    j["seed"] = cfg.seed;
    j["scale"] = cfg.scale;
    return j;
}

json spectrum_json(const Spectrum& s)
{
    json vals = json::array();
    for (const Complex& z : s.values) {
        vals.push_back({z.real(), z.imag()});
    }
    json j;
    j["method"] = s.method;
    j["eigenvalues"] = vals;
    j["residuals"] = s.residuals;
    return j;
}

void write_json(const std::filesystem::path& path, const json& j)
{
    io::write_text(path, j.dump(2) + "\n");
}

struct FunctionJet {
    double value;
    Eigen::VectorXd grad;
    Eigen::MatrixXd hess;
};

FunctionJet evaluate(TestFunction f, const Eigen::VectorXd& x)
{
    const long p = x.size();
    FunctionJet jet{0.0, Eigen::VectorXd::Zero(p), Eigen::MatrixXd::Zero(p, p)};
    constexpr double pi = std::numbers::pi;
    switch (f) {
    case TestFunction::constant:
        jet.value = 1.0;
        break;
    case TestFunction::coordinate:
        jet.value = x(0);
        jet.grad(0) = 1.0;
        break;
    case TestFunction::squared_radius:
        jet.value = x.squaredNorm();
        jet.grad = 2.0 * x;
        jet.hess = 2.0 * Eigen::MatrixXd::Identity(p, p);
        break;
    case TestFunction::trig:
        jet.value = std::cos(pi * x(0));
        jet.grad(0) = -pi * std::sin(pi * x(0));
        jet.hess(0, 0) = -pi * pi * std::cos(pi * x(0));
        break;
    }
    return jet;
}

/// Outward unit normal of the nearest boundary component and the density.
std::pair<Eigen::VectorXd, double> flat_geometry(ManifoldTag tag, const Eigen::VectorXd& x)
{
    if (tag == ManifoldTag::interval) {
        return {Eigen::VectorXd::Constant(1, x(0) < 0.5 ? -1.0 : 1.0), 1.0};
    }
    const double r = x.norm();
    Eigen::VectorXd nrm = r > 0.0 ? Eigen::VectorXd(x / r) : Eigen::VectorXd::Unit(2, 0);
    return {nrm, 1.0 / std::numbers::pi};
}

double mean(const std::vector<double>& v)
{
    if (v.empty()) {
        return std::nan("");
    }
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

} // namespace

void set_option(ExperimentConfig& cfg, const std::string& raw_key, const std::string& raw_value)
{
    const std::string key = trim(raw_key);
    const std::string value = trim(raw_value);
    if (key == "manifold") cfg.manifold = manifold_from_string(value);
    else if (key == "n") cfg.n = parse_number<long>(key, value);
    else if (key == "eps") cfg.eps = parse_number<double>(key, value);
    else if (key == "knn") cfg.knn = parse_number<long>(key, value);
    else if (key == "c") cfg.c = parse_number<double>(key, value);
    else if (key == "c-rule") {
        if (value != "paper" && value != "fixed") {
            throw ParameterError("c-rule must be 'paper' or 'fixed'");
        }
        cfg.c_rule = value;
    }
    else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "k-eigs") cfg.k_eigs = parse_number<long>(key, value);
    else if (key == "alpha") cfg.alpha = parse_number<double>(key, value);
    else if (key == "out") cfg.out = value;
    else if (key == "tstar-clip") cfg.tstar_clip = parse_bool(key, value);
    else if (key == "scale") cfg.scale = parse_number<long>(key, value);
    else if (key == "p") cfg.p = parse_number<long>(key, value);
    else if (key == "tau") cfg.tau = parse_number<double>(key, value);
    else if (key == "f-test") cfg.f_test = test_function_from_string(value);
    else if (key == "sweep-n") cfg.sweep_n = parse_list<long>(key, value);
    else if (key == "sweep-eps") cfg.sweep_eps = parse_list<double>(key, value);
    else throw ParameterError("unknown option '" + key + "'");
}

void apply_config(ExperimentConfig& cfg, std::istream& in)
{
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.resize(hash);
        }
        if (trim(line).empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError("config line " + std::to_string(lineno) + ": expected key=value", lineno);
        }
        set_option(cfg, line.substr(0, eq), line.substr(eq + 1));
    }
}

void apply_config_file(ExperimentConfig& cfg, const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open config " + path.string());
    }
    apply_config(cfg, in);
}

PointCloud sample(const ExperimentConfig& cfg)
{
    switch (cfg.manifold) {
    case ManifoldTag::interval: return sample_interval(cfg.n, cfg.seed);
    case ManifoldTag::disk: return sample_disk(cfg.n, cfg.seed);
    case ManifoldTag::curve_m3: return sample_curve_m3(cfg.n, cfg.seed);
    case ManifoldTag::surface: return sample_surface(cfg.n, cfg.seed);
    case ManifoldTag::torus: return sample_truncated_torus(cfg.n, cfg.seed);
    case ManifoldTag::gaussian_null: return sample_gaussian_null(cfg.n, cfg.p, cfg.seed);
    case ManifoldTag::custom: break;
    }
    throw ParameterError("cannot sample a custom manifold");
}

NeighborScheme scheme_of(const ExperimentConfig& cfg)
{
    if (cfg.knn) {
        return Knn{*cfg.knn};
    }
    if (!cfg.eps) {
        throw ParameterError("either eps or knn must be set");
    }
    return EpsilonBall{*cfg.eps};
}

RegularizerRule rule_of(const ExperimentConfig& cfg)
{
    if (cfg.c_rule == "fixed") {
        if (!cfg.c) {
            throw ParameterError("c-rule fixed needs --c");
        }
        return FixedRegularizer{*cfg.c};
    }
    return PaperRegularizer{cfg.eps};
}

Pipeline build_pipeline(const ExperimentConfig& cfg)
{
    Pipeline p;
    p.cloud = sample(cfg);
    p.graph = build_graph(p.cloud, scheme_of(cfg));
    p.W = build_lle_matrix(p.cloud, p.graph, rule_of(cfg));
    return p;
}

EigenfunctionResult run_eigenfunctions(const ExperimentConfig& cfg_in)
{
    const ExperimentConfig cfg = resolved(cfg_in);
    EigenfunctionResult r;
    r.pipe = build_pipeline(cfg);
    const PointCloud& cloud = r.pipe.cloud;

    const SparseRowMatrix* target = &r.pipe.W.W;
    if (cfg.tstar_clip) {
        if (!cfg.eps) {
            throw ParameterError("tstar-clip needs an eps-ball bandwidth");
        }
        const analytic::Coeffs coeffs(cloud.intrinsic_dim, *cfg.eps);
        const double ts = analytic::tstar(coeffs);
        std::vector<Region> regions;
        if (cloud.has_boundary_dist()) {
            regions = partition_regions(cloud, *cfg.eps, ts);
        } else {
            const BoundaryReport rep = indicator(r.pipe.W);
            regions = partition_regions(cloud, *cfg.eps, ts, &rep);
        }
        r.clipped = clip(r.pipe.W.W, regions);
        target = &r.clipped->W;
    }

    EigOptions opts;
    opts.k = std::min(cfg.k_eigs, target->rows());
    if (target->rows() > opts.dense_limit) {
        opts.shift = 1.001;
    }
    r.spectrum = eig(*target, opts);

    const std::vector<long>* map = r.clipped ? &r.clipped->new_to_old : nullptr;
    const long m = target->rows();
    auto original = [&](long i) { return map ? (*map)[static_cast<size_t>(i)] : i; };

    if (cloud.intrinsic_dim == 1 && cloud.has_boundary_dist() && m > 0) {
        long lo = 0;
        long hi = 0;
        for (long i = 0; i < m; ++i) {
            const double t = cloud.ground_truth[static_cast<size_t>(original(i))].param_coords(0);
            const double tlo = cloud.ground_truth[static_cast<size_t>(original(lo))].param_coords(0);
            const double thi = cloud.ground_truth[static_cast<size_t>(original(hi))].param_coords(0);
            if (t < tlo) lo = i;
            if (t > thi) hi = i;
        }
        const Eigen::MatrixXcd& V = *r.spectrum.vectors;
        for (Eigen::Index j = 0; j < V.cols(); ++j) {
            const double vmax = V.col(j).cwiseAbs().maxCoeff();
            r.endpoint_ratio.push_back(std::max(std::abs(V(lo, j)), std::abs(V(hi, j))) / vmax);
        }
    }

    if (cfg.write) {
        const auto dir = prepare_out(cfg);
        {
            std::ofstream out(dir / "spectrum.csv");
            io::write_spectrum_csv(out, r.spectrum);
        }
        std::ofstream out(dir / "eigenvectors.csv");
        out << "idx";
        for (long c = 0; c < cloud.ambient_dim(); ++c) out << ",x" << c + 1;
        if (cloud.has_boundary_dist()) out << ",bdist";
        const Eigen::MatrixXcd& V = *r.spectrum.vectors;
        for (Eigen::Index j = 0; j < V.cols(); ++j) out << ",re" << j + 1 << ",im" << j + 1;
        out << '\n';
        for (long i = 0; i < m; ++i) {
            const long k = original(i);
            out << k;
            for (long c = 0; c < cloud.ambient_dim(); ++c) out << ',' << io::format_double(cloud.points(k, c));
            if (cloud.has_boundary_dist()) {
                out << ',' << io::format_double(cloud.ground_truth[static_cast<size_t>(k)].boundary_dist);
            }
            for (Eigen::Index j = 0; j < V.cols(); ++j) {
                out << ',' << io::format_double(V(i, j).real()) << ',' << io::format_double(V(i, j).imag());
            }
            out << '\n';
        }
        json summary;
        summary["config"] = config_json(cfg);
        summary["n_points"] = cloud.size();
        summary["n_retained"] = m;
        summary["c"] = r.pipe.W.meta.c;
        summary["clipped"] = cfg.tstar_clip;
        summary["spectrum"] = spectrum_json(r.spectrum);
        summary["endpoint_ratio"] = r.endpoint_ratio;
        write_json(dir / "summary.json", summary);
    }
    return r;
}

std::vector<ConvergenceRow> run_convergence(const ExperimentConfig& cfg_in)
{
    const ExperimentConfig base = resolved(cfg_in);
    if (base.manifold != ManifoldTag::interval && base.manifold != ManifoldTag::disk) {
        throw ParameterError("convergence runs need a flat analytic cloud (interval or disk)");
    }
    std::vector<long> ns = base.sweep_n.empty() ? std::vector<long>{base.n} : base.sweep_n;
    std::vector<double> es = base.sweep_eps.empty() ? std::vector<double>{*base.eps} : base.sweep_eps;

    std::vector<ConvergenceRow> rows;
    for (long n : ns) {
        for (double eps : es) {
            ExperimentConfig cfg = base;
            cfg.n = n;
            cfg.eps = eps;
            cfg.knn.reset();
            const Pipeline pipe = build_pipeline(cfg);
            const PointCloud& cloud = pipe.cloud;
            const long m = cloud.size();
            Eigen::VectorXd f(m);
            for (long k = 0; k < m; ++k) {
                f(k) = evaluate(cfg.f_test, cloud.points.row(k).transpose()).value;
            }
            const Eigen::VectorXd Lf = apply_shifted(pipe.W, f) / (eps * eps);
            const analytic::Coeffs coeffs(cloud.intrinsic_dim, eps);

            ConvergenceRow row;
            row.n = m;
            row.eps = eps;
            row.c = pipe.W.meta.c;
            std::vector<double> obs, tgt, err, collar;
            for (long k = 0; k < m; ++k) {
                const double dist = cloud.ground_truth[static_cast<size_t>(k)].boundary_dist;
                const Eigen::VectorXd x = cloud.points.row(k).transpose();
                const FunctionJet jet = evaluate(cfg.f_test, x);
                const auto [nrm, P] = flat_geometry(cfg.manifold, x);
                const double fd = jet.grad.dot(nrm);
                const double fdd = nrm.dot(jet.hess * nrm);
                const double tang = jet.hess.trace() - fdd;
                const double target = analytic::d_epsilon(dist, P, tang, fdd, fd, coeffs);
                if (dist > 2.0 * eps) {
                    obs.push_back(Lf(k));
                    tgt.push_back(target);
                    err.push_back(std::abs(Lf(k) - target));
                } else if (dist < eps) {
                    collar.push_back(std::abs(Lf(k) - target));
                }
            }
            row.interior_count = static_cast<long>(obs.size());
            row.interior_mean = mean(obs);
            row.interior_target = mean(tgt);
            row.interior_error = mean(err);
            row.collar_count = static_cast<long>(collar.size());
            row.collar_error = mean(collar);
            rows.push_back(row);
        }
    }

    if (base.write) {
        const auto dir = prepare_out(base);
        std::ofstream out(dir / "convergence.csv");
        out << "n,eps,c,interior_count,interior_mean,interior_target,interior_error,collar_count,collar_error\n";
        for (const auto& r : rows) {
            out << r.n << ',' << io::format_double(r.eps) << ',' << io::format_double(r.c) << ','
                << r.interior_count << ',' << io::format_double(r.interior_mean) << ','
                << io::format_double(r.interior_target) << ',' << io::format_double(r.interior_error)
                << ',' << r.collar_count << ',' << io::format_double(r.collar_error) << '\n';
        }
    }
    return rows;
}

NullCaseResult run_null_case(const ExperimentConfig& cfg_in)
{
    ExperimentConfig cfg = cfg_in;
    cfg.manifold = ManifoldTag::gaussian_null;
    cfg = resolved(cfg);
    const PointCloud cloud = sample(cfg);
    const NeighborGraph graph = build_graph(cloud, scheme_of(cfg));
    const LleMatrix W = build_lle_matrix(cloud, graph, rule_of(cfg));

    NullCaseResult r;
    const Eigen::MatrixXd dense(W.W);
    EigOptions opts;
    opts.ordering = Ordering::by_modulus_desc;
    r.spectrum = eig(dense, opts);
    r.diagnostics = imaginary_diagnostics(dense);
    r.radius = spectral_radius_report(dense, &r.spectrum);

    if (cfg.write) {
        const auto dir = prepare_out(cfg);
        {
            std::ofstream out(dir / "null_spectrum.csv");
            io::write_spectrum_csv(out, r.spectrum);
        }
        json j;
        j["config"] = config_json(cfg);
        j["c"] = W.meta.c;
        j["bound"] = r.diagnostics.bound;
        j["max_asym"] = r.diagnostics.max_asym;
        j["max_abs_imag"] = r.diagnostics.max_abs_imag;
        j["worst_distance"] = r.diagnostics.worst_distance;
        j["bauer_fike_ok"] = r.diagnostics.bauer_fike_ok;
        j["rho_lower"] = r.radius.rho_lower;
        j["row_sum_residual"] = r.radius.row_sum_residual;
        write_json(dir / "summary.json", j);
    }
    return r;
}

IndicatorResult run_indicator(const ExperimentConfig& cfg_in)
{
    const ExperimentConfig cfg = resolved(cfg_in);
    if (!cfg.eps) {
        throw ParameterError("the indicator needs an eps-ball bandwidth");
    }
    const double eps = *cfg.eps;
    IndicatorResult r;
    r.pipe = build_pipeline(cfg);
    const PointCloud& cloud = r.pipe.cloud;
    r.report = indicator(r.pipe.W);
    const int d = cloud.intrinsic_dim;
    classify(r.report, cfg.tau.value_or(default_threshold(d)), &std::cerr);
    const analytic::Coeffs coeffs(d, eps);
    const double ts = analytic::tstar(coeffs);

    if (cloud.has_boundary_dist()) {
        r.report.bdist = cloud.boundary_distances();
        r.report.regions = partition_regions(*r.report.bdist, eps, ts);
        std::vector<double> collar, interior;
        long near = 0, near_hit = 0, far = 0, far_hit = 0;
        for (long k = 0; k < cloud.size(); ++k) {
            if (r.report.missing[static_cast<size_t>(k)]) {
                continue;
            }
            const double dist = (*r.report.bdist)(k);
            const double b = r.report.b_values(k);
            const bool hit = r.report.labels[static_cast<size_t>(k)] == BoundaryLabel::boundary;
            if (dist < eps / 4) collar.push_back(b);
            if (dist >= 2 * eps) interior.push_back(std::abs(b));
            if (dist < eps / 2) { ++near; near_hit += hit; }
            if (dist > 2 * eps) { ++far; far_hit += hit; }
        }
        r.mean_b_collar = mean(collar);
        r.mean_abs_b_interior = mean(interior);
        r.recall = near ? static_cast<double>(near_hit) / static_cast<double>(near) : std::nan("");
        r.false_positive = far ? static_cast<double>(far_hit) / static_cast<double>(far) : std::nan("");
    }

    if (cfg.write) {
        const auto dir = prepare_out(cfg);
        {
            std::ofstream out(dir / "indicator.csv");
            write_report_csv(out, r.report);
        }
        if (r.report.bdist) {
            // Mean B_k against t / eps in 40 bins over [0, 2], next to the limit profile.
            constexpr int bins = 40;
            std::vector<double> sum(bins, 0.0);
            std::vector<long> count(bins, 0);
            for (long k = 0; k < cloud.size(); ++k) {
                if (r.report.missing[static_cast<size_t>(k)]) continue;
                const int b = static_cast<int>((*r.report.bdist)(k) / eps * bins / 2.0);
                if (b < bins) {
                    sum[static_cast<size_t>(b)] += r.report.b_values(k);
                    ++count[static_cast<size_t>(b)];
                }
            }
            std::ofstream out(dir / "profile.csv");
            out << "t_over_eps,count,mean_B,limit_B\n";
            for (int b = 0; b < bins; ++b) {
                const double s = (b + 0.5) * 2.0 / bins;
                const size_t i = static_cast<size_t>(b);
                out << io::format_double(s) << ',' << count[i] << ','
                    << (count[i] ? io::format_double(sum[i] / static_cast<double>(count[i])) : "nan") << ','
                    << io::format_double(analytic::b_function(s * eps, coeffs)) << '\n';
            }
        }
        json j;
        j["config"] = config_json(cfg);
        j["c"] = r.pipe.W.meta.c;
        j["threshold"] = r.report.threshold;
        j["tstar"] = ts;
        j["b_at_boundary"] = analytic::b_at_boundary(d);
        j["mean_b_collar"] = r.mean_b_collar;
        j["mean_abs_b_interior"] = r.mean_abs_b_interior;
        j["recall"] = r.recall;
        j["false_positive"] = r.false_positive;
        write_json(dir / "summary.json", j);
    }
    return r;
}

} // namespace bdlle::harness
