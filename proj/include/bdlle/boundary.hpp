#pragma once

#include "bdlle/analytic.hpp"
#include "bdlle/lle_core.hpp"

#include <Eigen/Dense>

#include <optional>
#include <ostream>
#include <string_view>
#include <vector>

namespace bdlle {

enum class BoundaryLabel { boundary, interior };
enum class Region { wave, near_boundary, transition, interior };

std::string_view to_string(BoundaryLabel label);
std::string_view to_string(Region region);

struct BoundaryReport {
    Eigen::VectorXd b_values;     // NaN where the row is missing
    std::vector<bool> missing;    // N_k = 0
    int d = 1;
    double threshold = 0.0;
    std::vector<BoundaryLabel> labels; // empty until classified
    std::vector<Region> regions;       // empty until partitioned
    std::optional<Eigen::VectorXd> bdist;

    long size() const { return b_values.size(); }
    bool labeled() const { return !labels.empty(); }
};

/// B_k = (N_k - c 1^T y_k) / N_k from the kernel vectors already stored in W.
BoundaryReport indicator(const LleMatrix& W);

/// Same quantity straight from the graph; isolated points are marked missing
/// instead of failing.
BoundaryReport indicator(const PointCloud& cloud, const NeighborGraph& graph,
                         const RegularizerRule& rule);

/// Half the limit value at depth eps / 2: B(0) (3/4)^(d+1) / 2.
double default_threshold(int d);

/// Labels B_k > tau as boundary. Missing rows are labeled interior.
/// tau <= 0 labels everything and prints a warning to `warn` when given.
void classify(BoundaryReport& report, double tau, std::ostream* warn = nullptr);

/// wave: dist < t*, near_boundary: t* <= dist < eps, transition: eps <= dist <= 2 eps,
/// interior beyond.
Region region_of(double dist, double eps, double tstar_val);
std::vector<Region> partition_regions(const Eigen::VectorXd& dist, double eps, double tstar_val);

/// Inverse of analytic::b_function on [0, eps]. Values at or above B(0) map
/// to 0 and nonpositive values to +infinity. Heuristic distance for clouds
/// without ground truth.
double distance_proxy(double b, const analytic::Coeffs& c);

/// Uses ground-truth distances when the cloud has them, otherwise the proxy
/// from `report`. Throws when neither is available.
std::vector<Region> partition_regions(const PointCloud& cloud, double eps, double tstar_val,
                                      const BoundaryReport* report = nullptr);

struct ClippedMatrix {
    SparseRowMatrix W;
    std::vector<long> new_to_old;
    std::vector<long> old_to_new; // -1 for clipped points
};

/// Principal submatrix on the non-wave points. Rows keep their original
/// values and need not sum to one.
ClippedMatrix clip(const SparseRowMatrix& W, const std::vector<Region>& regions);

/// idx,B,label,region[,bdist]
void write_report_csv(std::ostream& out, const BoundaryReport& report);

} // namespace bdlle
