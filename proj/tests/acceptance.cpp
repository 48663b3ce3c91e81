// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include "bdlle/analytic.hpp"
#include "bdlle/boundary.hpp"
#include "bdlle/lle_core.hpp"
#include "bdlle/samplers.hpp"
#include "bdlle/spectral.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <utility>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <numbers>
#include <string>
#include <vector>

using namespace bdlle;
namespace an = bdlle::analytic;

namespace {

constexpr double kPi = std::numbers::pi;
const double kTstar1 = 2.0 - std::sqrt(3.0);

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail, double seconds)
{
    std::printf("[%s] %2d %s: %s (%.2f s)\n", ok ? "PASS" : "FAIL", id, name, detail.c_str(), seconds);
    std::fflush(stdout);
    failures += !ok;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

class Timer {
public:
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// Every matrix built during the run, for the row-sum / spectral-radius criterion.
struct RadiusLedger {
    double worst_row_sum = 0.0;
    double worst_rho = std::numeric_limits<double>::infinity();
    long count = 0;

    void add(const SparseRowMatrix& W, const Spectrum* known = nullptr)
    {
        const SpectralRadiusReport r = spectral_radius_report(W, known);
        worst_row_sum = std::max(worst_row_sum, r.row_sum_residual);
        worst_rho = std::min(worst_rho, r.rho_lower);
        ++count;
    }
} ledger;

/// Eigenvalues nearest 1 from above via shift-invert; contains the eigenvalue
/// 1 with its residual, so it certifies rho >= 1 for large matrices.
Spectrum top_spectrum(const SparseRowMatrix& W, long k)
{
    EigOptions o;
    o.k = k;
    o.shift = 1.001;
    return eig(W, o);
}

void criterion_1()
{
    Timer t;
    bool ok = true;
    double worst = 0.0;
    for (long m : {4L, 10L, 25L}) {
        const PointCloud c = circle_grid(2 * m);
        const LleMatrix W = build_lle_matrix(c, build_graph(c, Knn{2}), FixedRegularizer{1e-3});
        const Spectrum s = eig(Eigen::MatrixXd(W.W));
        ledger.add(W.W, &s);
        std::vector<Complex> expected{-1.0, 1.0};
        for (long i = 1; i <= m - 1; ++i) {
            const double v = std::cos(kPi * static_cast<double>(m - i) / static_cast<double>(m));
            expected.push_back(v);
            expected.push_back(v);
        }
        const auto got = cluster_eigenvalues(s.values);
        const auto want = cluster_eigenvalues(expected);
        if (got.size() != want.size()) {
            ok = false;
            continue;
        }
        for (size_t i = 0; i < got.size(); ++i) {
            worst = std::max(worst, std::abs(got[i].value - want[i].value));
            ok &= got[i].multiplicity == want[i].multiplicity;
        }
    }
    ok &= worst <= 1e-8;
    const double sec = t.seconds();
    report(1, "circle-grid spectrum", ok && sec < 1.0, fmt("max deviation %.2e, multiplicities match", worst), sec);
}

void criterion_2()
{
    Timer t;
    const PointCloud f = ten_point_fixture();
    const LleMatrix W = build_lle_matrix(f, build_graph(f, Knn{5}), FixedRegularizer{1e-3});
    const Spectrum s = eig(Eigen::MatrixXd(W.W));
    ledger.add(W.W, &s);
    double best = std::numeric_limits<double>::infinity();
    Complex at;
    for (const Complex& z : s.values) {
        if (std::abs(z - Complex(-2.4233, 0.0)) < best) {
            best = std::abs(z - Complex(-2.4233, 0.0));
            at = z;
        }
    }
    const double sec = t.seconds();
    report(2, "ten-point fixture eigenvalue", best <= 5e-4 && sec < 1.0,
           fmt("closest eigenvalue %.6f%+.6fi, distance %.2e", at.real(), at.imag(), best), sec);
}

// Every multi-index of order <= 3 in d dimensions.
std::vector<std::vector<int>> multi_indices(int d)
{
    std::vector<std::vector<int>> out;
    std::vector<int> v(static_cast<size_t>(d), 0);
    std::function<void(int, int)> rec = [&](int pos, int left) {
        if (pos == d) {
            out.push_back(v);
            return;
        }
        for (int k = 0; k <= left; ++k) {
            v[static_cast<size_t>(pos)] = k;
            rec(pos + 1, left - k);
        }
        v[static_cast<size_t>(pos)] = 0;
    };
    rec(0, 3);
    return out;
}

// Closed-form counterpart of a moment, if it has one.
std::optional<an::Sigma> sigma_for(const std::vector<int>& v)
{
    const int d = static_cast<int>(v.size());
    const int vd = v.back();
    int two = 0, other = 0;
    for (int i = 0; i + 1 < d; ++i) {
        if (v[static_cast<size_t>(i)] == 2) ++two;
        else if (v[static_cast<size_t>(i)] != 0) ++other;
    }
    if (other > 0 || two > 1) return std::nullopt;
    if (two == 1) {
        if (vd == 0) return an::Sigma::s2;
        if (vd == 1) return an::Sigma::s3;
        return std::nullopt;
    }
    switch (vd) {
    case 0: return an::Sigma::s0;
    case 1: return an::Sigma::s1d;
    case 2: return an::Sigma::s2d;
    default: return an::Sigma::s3d;
    }
}

void criterion_4()
{
    Timer t;
    const double eps = 0.3;
    double worst = 0.0;
    double worst_odd = 0.0;
    long compared = 0;
    for (int d = 1; d <= 3; ++d) {
        const an::Coeffs c(d, eps);
        for (double r : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            const double tb = r * eps;
            for (const auto& v : multi_indices(d)) {
                const int order = std::accumulate(v.begin(), v.end(), 0);
                const double m = an::moments_oracle(d, eps, tb, v) / std::pow(eps, d + order);
                bool odd = false;
                for (int i = 0; i + 1 < d; ++i) odd |= v[static_cast<size_t>(i)] % 2 == 1;
                if (odd) {
                    worst_odd = std::max(worst_odd, std::abs(m));
                } else if (const auto which = sigma_for(v)) {
                    worst = std::max(worst, std::abs(m - an::sigma(*which, tb, c)));
                    ++compared;
                }
            }
        }
    }
    const double sec = t.seconds();
    report(4, "sigma/moment equivalence", worst <= 1e-4 && worst_odd <= 1e-10 && sec < 30.0,
           fmt("%.0f moments, max |mu/eps^k - sigma| %.2e, max odd moment %.2e", static_cast<double>(compared),
               worst, worst_odd),
           sec);
}

void criterion_5()
{
    Timer t;
    bool ok = true;
    double worst = 0.0;
    for (int d = 1; d <= 10; ++d) {
        const an::Coeffs c(d, 0.1);
        for (double tt : {0.1, 0.15, 1.0}) {
            const an::Phi p = an::phi(tt, c);
            ok &= p.phi1 == 1.0 / (2.0 * (d + 2)) && p.phi2 == 1.0 / (2.0 * (d + 2));
        }
        ok &= an::phi(0.0, c).phi2 < 0.0;
    }
    const an::Coeffs c1(1, 1.0);
    const double checks[][2] = {
        {an::phi(0.0, c1).phi2, -1.0 / 12.0},
        {an::potential_V(0.0, 1.0, c1), -6.0},
        {an::potential_V(0.5, 1.0, c1), -8.0 / 9.0},
        {an::b_function(0.0, c1), 0.75},
        {an::kernel_inf(1), -0.5},
        // The same values through the one-dimensional collar formulas.
        {an::one_dim_coefficients(0.03, 1.0, 0.1, 1.0).second, an::phi(0.03, an::Coeffs(1, 0.1)).phi2},
        {an::one_dim_coefficients(0.03, 1.0, 0.1, 1.0).first, -an::potential_V(0.03, 1.0, an::Coeffs(1, 0.1))},
        {an::one_dim_coefficients(0.0, 1.0, 0.1, 1.0).first, 6.0},
        {an::b_at_boundary(1), 0.75},
    };
    for (const auto& row : checks) {
        worst = std::max(worst, std::abs(row[0] - row[1]));
    }
    ok &= worst <= 1e-10;
    const double sec = t.seconds();
    report(5, "coefficient ledger", ok, fmt("interior values exact, max d=1 deviation %.2e", worst), sec);
}

void criterion_6()
{
    Timer t;
    const double eps = 0.01;
    const double err = std::abs(an::tstar(an::Coeffs(1, eps)) - kTstar1 * eps);
    bool brackets = true;
    bool decreasing = true;
    for (int d = 1; d <= 10; ++d) {
        const double ts = an::tstar(an::Coeffs(d, eps));
        brackets &= an::delta1(d) * eps < ts && ts < an::delta2(d) * eps;
        if (d > 1) {
            decreasing &= an::delta2(d) < an::delta2(d - 1);
        }
    }
    const double sec = t.seconds();
    report(6, "degeneracy locus", err <= 1e-10 && brackets && decreasing,
           fmt("|t* - (2-sqrt3) eps| %.2e; brackets", err) +
               (brackets ? " yes" : " no") + "; delta2 decreasing" + (decreasing ? " yes" : " no"),
           sec);
}

void criterion_7()
{
    Timer t;
    const double eps = 0.01;
    const double a = 1.0;
    const double t1 = kTstar1 * eps;
    double worst_a = 0.0;
    double worst_b = 0.0;
    for (int i = 1; i <= 200; ++i) {
        const double tt = eps * i / 201.0;
        if (std::abs(tt - t1) < 1e-3 * eps) {
            continue;
        }
        const an::SlFunctions f = an::sl_functions(tt, eps, a);
        const double h = 1e-6 * eps;
        const double dp = (an::sl_functions(tt + h, eps, a).p - an::sl_functions(tt - h, eps, a).p) / (2 * h);
        const an::OneDimCoefficients k = an::one_dim_coefficients(tt, a, eps, 1.0 / a);
        worst_a = std::max(worst_a, std::abs(f.p / f.w - k.second));
        worst_b = std::max(worst_b, std::abs(dp / f.w - k.first));
    }
    const double sec = t.seconds();
    report(7, "Sturm-Liouville identity", worst_a <= 1e-5 && worst_b <= 1e-4,
           fmt("max |p/w - A| %.2e, max |p'/w - B| %.2e", worst_a, worst_b), sec);
}

struct DiskRun {
    double interior_mean = 0.0;
    double min_interior_y = 0.0;
    double collar_negative_fraction = 0.0;
    double min_row_sum = 0.0;
    double mean_b_collar = 0.0;
    long n = 0;
};

DiskRun disk_run(std::uint64_t seed)
{
    const double eps = 0.1;
    const PointCloud c = sample_disk(20000, seed);
    const NeighborGraph g = build_graph(c, EpsilonBall{eps});
    const LleMatrix W = build_lle_matrix(c, g, PaperRegularizer{});
    ledger.add(W.W, nullptr);

    DiskRun r;
    r.n = c.size();
    Eigen::VectorXd f(c.size());
    for (long k = 0; k < c.size(); ++k) f(k) = c.points.row(k).squaredNorm();
    const Eigen::VectorXd Lf = apply_shifted(W, f) / (eps * eps);
    const BoundaryReport b = indicator(W);

    double sum = 0.0, bsum = 0.0;
    long count = 0, collar = 0, negative = 0;
    r.min_interior_y = std::numeric_limits<double>::infinity();
    r.min_row_sum = std::numeric_limits<double>::infinity();
    for (long k = 0; k < c.size(); ++k) {
        const double dist = c.ground_truth[static_cast<size_t>(k)].boundary_dist;
        const Eigen::VectorXd& y = W.y[static_cast<size_t>(k)];
        r.min_row_sum = std::min(r.min_row_sum, W.y_sum[static_cast<size_t>(k)]);
        if (dist > 2 * eps) {
            sum += Lf(k);
            ++count;
        }
        if (dist > eps) {
            r.min_interior_y = std::min(r.min_interior_y, y.minCoeff());
        }
        if (dist < eps / 4) {
            ++collar;
            negative += y.minCoeff() < 0.0;
            bsum += b.b_values(k);
        }
    }
    r.interior_mean = sum / static_cast<double>(count);
    r.collar_negative_fraction = static_cast<double>(negative) / static_cast<double>(collar);
    r.mean_b_collar = bsum / static_cast<double>(collar);
    return r;
}

struct IntervalRun {
    double mean_b_collar = 0.0;
    double mean_abs_b_interior = 0.0;
};

IntervalRun interval_run(std::uint64_t seed)
{
    const double eps = 0.01;
    const PointCloud c = sample_interval(8000, seed);
    const LleMatrix W = build_lle_matrix(c, build_graph(c, EpsilonBall{eps}), PaperRegularizer{});
    ledger.add(W.W, nullptr);
    const BoundaryReport b = indicator(W);
    double s1 = 0.0, s2 = 0.0;
    long n1 = 0, n2 = 0;
    for (long k = 0; k < c.size(); ++k) {
        const double t = c.points(k, 0);
        const double dist = std::min(t, 1.0 - t);
        if (dist < eps / 4) {
            s1 += b.b_values(k);
            ++n1;
        }
        if (t >= 2 * eps && t <= 1 - 2 * eps) {
            s2 += std::abs(b.b_values(k));
            ++n2;
        }
    }
    return {s1 / static_cast<double>(n1), s2 / static_cast<double>(n2)};
}

void criteria_8_9_10()
{
    std::vector<DiskRun> disks;
    std::vector<double> disk_seconds;
    for (std::uint64_t seed : {1, 2, 3}) {
        Timer t;
        disks.push_back(disk_run(seed));
        disk_seconds.push_back(t.seconds());
    }
    double total = 0.0;
    for (double s : disk_seconds) total += s;

    bool ok8 = true;
    std::string d8;
    for (size_t i = 0; i < disks.size(); ++i) {
        ok8 &= disks[i].interior_mean >= 0.425 && disks[i].interior_mean <= 0.575 && disk_seconds[i] < 300;
        d8 += (i ? ", " : "") + fmt("%.4f", disks[i].interior_mean);
    }
    report(8, "pointwise convergence on the disk", ok8, "interior means " + d8 + " (target 0.5)", total);

    bool interior_ok = true, collar_ok = true, sums_ok = true;
    std::string d9;
    for (size_t i = 0; i < disks.size(); ++i) {
        interior_ok &= disks[i].min_interior_y >= -1e-10;
        collar_ok &= disks[i].collar_negative_fraction >= 0.95;
        sums_ok &= disks[i].min_row_sum > 0.0;
        d9 += (i ? "; " : "") + fmt("min interior y %.2e, collar rows with a negative entry %.3f, min row sum %.3e",
                                    disks[i].min_interior_y, disks[i].collar_negative_fraction,
                                    disks[i].min_row_sum);
    }
    report(9, "kernel sign structure", interior_ok && collar_ok && sums_ok,
           d9 + (collar_ok ? "" : " [collar fraction below 0.95]"), 0.0);

    Timer t;
    bool ok10 = true;
    std::string d10;
    const double b_disk = an::b_at_boundary(2);
    for (std::uint64_t seed : {1, 2, 3}) {
        const IntervalRun r = interval_run(seed);
        ok10 &= std::abs(r.mean_b_collar - 0.75) <= 0.15 && r.mean_abs_b_interior <= 0.1;
        d10 += (seed > 1 ? "; " : "") + fmt("interval B %.4f, |B| interior %.4f", r.mean_b_collar, r.mean_abs_b_interior);
    }
    for (size_t i = 0; i < disks.size(); ++i) {
        ok10 &= std::abs(disks[i].mean_b_collar - b_disk) <= 0.15;
        d10 += fmt("; disk B %.4f", disks[i].mean_b_collar);
    }
    report(10, "indicator profile", ok10, d10 + fmt(" (limits 0.75, %.4f)", b_disk), t.seconds());
}

void criterion_11()
{
    Timer t;
    const PointCloud c = sample_gaussian_null(400, 200, 1);
    const LleMatrix W = build_lle_matrix(c, build_graph(c, Knn{50}), FixedRegularizer{1e-3});
    const Eigen::MatrixXd Wd(W.W);
    EigOptions o;
    o.vectors = false;
    const Spectrum s = eig(Wd, o);
    ledger.add(W.W, &s);
    const Complex top = s.values.front();
    const ImaginaryDiagnostics d = imaginary_diagnostics(Wd);
    const bool ok = std::abs(top.real() - 1.0) <= 1e-8 && std::abs(top.imag()) <= 1e-8 &&
                    d.max_abs_imag > 0.01 && d.bauer_fike_ok;
    const double sec = t.seconds();
    report(11, "null-case spectrum", ok && sec < 60.0,
           fmt("top %.12f%+.1ei, max |Im| %.4f, worst distance %.4f", top.real(), top.imag(), d.max_abs_imag,
               d.worst_distance) + fmt(" <= bound %.4f", d.bound),
           sec);
}

std::vector<double> endpoint_ratios(const Spectrum& s, const std::vector<long>& index, const PointCloud& c)
{
    long lo = 0, hi = 0;
    for (long i = 0; i < static_cast<long>(index.size()); ++i) {
        if (c.points(index[i], 0) < c.points(index[lo], 0)) lo = i;
        if (c.points(index[i], 0) > c.points(index[hi], 0)) hi = i;
    }
    std::vector<double> out;
    for (Eigen::Index j = 2; j < 6; ++j) {
        const Eigen::VectorXcd v = s.vectors->col(j);
        out.push_back(std::max(std::abs(v(lo)), std::abs(v(hi))) / v.cwiseAbs().maxCoeff());
    }
    return out;
}

void criterion_12()
{
    Timer t;
    const double eps = 0.01;
    const PointCloud c = sample_interval(8000, 1);
    const LleMatrix W = build_lle_matrix(c, build_graph(c, EpsilonBall{eps}), PaperRegularizer{});
    const double ts = an::tstar(an::Coeffs(1, eps));
    const ClippedMatrix cm = clip(W.W, partition_regions(c, eps, ts));

    const Spectrum full = top_spectrum(W.W, 8);
    ledger.add(W.W, &full);
    const Spectrum clipped = top_spectrum(cm.W, 8);
    std::vector<long> all(static_cast<size_t>(c.size()));
    for (long k = 0; k < c.size(); ++k) all[static_cast<size_t>(k)] = k;
    const auto rc = endpoint_ratios(clipped, cm.new_to_old, c);
    const auto ru = endpoint_ratios(full, all, c);
    bool clipped_ok = true, unclipped_violates = false;
    std::string detail = "clipped";
    for (double r : rc) {
        clipped_ok &= r <= 0.1;
        detail += fmt(" %.3f", r);
    }
    detail += "; unclipped";
    for (double r : ru) {
        unclipped_violates |= r > 0.1;
        detail += fmt(" %.3f", r);
    }
    report(12, "clipped Dirichlet behavior", clipped_ok && unclipped_violates, detail, t.seconds());
}

} // namespace

int main()
{
    std::printf("acceptance criteria\n");
    const std::pair<const char*, void (*)()> runs[] = {
        {"1", criterion_1},   {"2", criterion_2},   {"4", criterion_4},   {"5", criterion_5},
        {"6", criterion_6},   {"7", criterion_7},   {"11", criterion_11}, {"12", criterion_12},
        {"8-10", criteria_8_9_10},
    };
    for (const auto& [id, run] : runs) {
        try {
            run();
        } catch (const std::exception& e) {
            std::printf("[FAIL] %s threw: %s\n", id, e.what());
            ++failures;
        }
    }
    report(3, "row sums and spectral radius",
           ledger.worst_row_sum <= 1e-12 && ledger.worst_rho >= 1.0 - 1e-10,
           fmt("%.0f matrices, max ||W1 - 1|| %.2e, min rho %.12f", static_cast<double>(ledger.count),
               ledger.worst_row_sum, ledger.worst_rho),
           0.0);
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
