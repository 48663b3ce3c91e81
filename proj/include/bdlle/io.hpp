#pragma once

#include "bdlle/lle_core.hpp"
#include "bdlle/spectral.hpp"

#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <string>

namespace bdlle::io {

/// "%.17g": enough digits for an exact double round trip.
std::string format_double(double x);

/// Triplets `row,col,value` in lexicographic (row, col) order, zeros skipped.
void write_triplets(std::ostream& out, const SparseRowMatrix& W);

/// Reads triplets into an n x n matrix. Line numbers in errors are 1-based and
/// count the header.
SparseRowMatrix read_triplets(std::istream& in, long n);

std::string metadata_json(const LleMetadata& meta, long n);
LleMetadata parse_metadata(const std::string& json_text, long& n);

/// `W.csv` -> `W.json`
std::filesystem::path sidecar_path(const std::filesystem::path& csv);

void save_matrix(const SparseRowMatrix& W, const LleMetadata& meta, const std::filesystem::path& csv);

struct LoadedMatrix {
    SparseRowMatrix W;
    LleMetadata meta;
};

/// Validates the sidecar; `expected`, when given, must match it field by field.
LoadedMatrix load_matrix(const std::filesystem::path& csv,
                         const std::optional<LleMetadata>& expected = std::nullopt);

/// re,im[,residual]
void write_spectrum_csv(std::ostream& out, const Spectrum& s);
Spectrum read_spectrum_csv(std::istream& in);

/// Column-major `vec,idx,re,im` plus a sidecar with shape and eigenvalues.
void save_eigenvectors(const Spectrum& s, const std::filesystem::path& csv);
Eigen::MatrixXcd load_eigenvectors(const std::filesystem::path& csv);

/// Reads the x1..xp[,bdist] format written by write_cloud_csv.
PointCloud read_cloud_csv(std::istream& in, int intrinsic_dim);

void write_text(const std::filesystem::path& path, const std::string& text);

} // namespace bdlle::io
