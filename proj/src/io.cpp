#include "bdlle/io.hpp"

#include "bdlle/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace bdlle::io {

using nlohmann::json;

namespace {

std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) {
        out.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

std::string strip_cr(std::string s)
{
    if (!s.empty() && s.back() == '\r') {
        s.pop_back();
    }
    return s;
}

double parse_double(const std::string& s, long line)
{
    if (s == "nan") {
        return std::nan("");
    }
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) {
        throw ParseError("line " + std::to_string(line) + ": not a number: '" + s + "'", line);
    }
    return v;
}

long parse_long(const std::string& s, long line)
{
    long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ParseError("line " + std::to_string(line) + ": not an integer: '" + s + "'", line);
    }
    return v;
}

std::ofstream open_out(const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot open " + path.string() + " for writing");
    }
    return out;
}

std::ifstream open_in(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    return in;
}

std::string slurp(const std::filesystem::path& path)
{
    std::ifstream in = open_in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

std::string format_double(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_triplets(std::ostream& out, const SparseRowMatrix& W)
{
    out << "row,col,value\n";
    // Row-major storage iterates in (row, col) order once compressed.
    SparseRowMatrix C = W;
    C.makeCompressed();
    for (long r = 0; r < C.outerSize(); ++r) {
        std::vector<std::pair<long, double>> row;
        for (SparseRowMatrix::InnerIterator it(C, r); it; ++it) {
            if (it.value() != 0.0) {
                row.emplace_back(it.col(), it.value());
            }
        }
        std::sort(row.begin(), row.end());
        for (const auto& [col, v] : row) {
            out << r << ',' << col << ',' << format_double(v) << '\n';
        }
    }
}

SparseRowMatrix read_triplets(std::istream& in, long n)
{
    std::string line;
    long lineno = 1;
    if (!std::getline(in, line) || strip_cr(line) != "row,col,value") {
        throw ParseError("line 1: expected header 'row,col,value'", 1);
    }
    std::vector<Eigen::Triplet<double, long>> trip;
    long prev_r = -1;
    long prev_c = -1;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip_cr(line);
        if (line.empty()) {
            continue;
        }
        const auto f = split_csv(line);
        if (f.size() != 3) {
            throw ParseError("line " + std::to_string(lineno) + ": expected 3 fields", lineno);
        }
        const long r = parse_long(f[0], lineno);
        const long c = parse_long(f[1], lineno);
        const double v = parse_double(f[2], lineno);
        if (r < 0 || c < 0 || r >= n || c >= n) {
            throw ValidationError("line " + std::to_string(lineno) + ": index outside " +
                                  std::to_string(n) + " x " + std::to_string(n));
        }
        if (r < prev_r || (r == prev_r && c <= prev_c)) {
            throw ParseError("line " + std::to_string(lineno) + ": triplets out of canonical order",
                             lineno);
        }
        prev_r = r;
        prev_c = c;
        trip.emplace_back(r, c, v);
    }
    SparseRowMatrix W(n, n);
    W.setFromTriplets(trip.begin(), trip.end());
    W.makeCompressed();
    return W;
}

std::string metadata_json(const LleMetadata& meta, long n)
{
    json j;
    j["n"] = n;
    j["scheme"] = std::holds_alternative<EpsilonBall>(meta.scheme) ? "epsilon_ball" : "knn";
    j["epsilon"] = meta.eps ? json(*meta.eps) : json(nullptr);
    j["K"] = meta.k ? json(*meta.k) : json(nullptr);
    j["c"] = meta.c;
    j["d"] = meta.d;
    j["seed"] = meta.seed;
    return j.dump(2) + "\n";
}

LleMetadata parse_metadata(const std::string& json_text, long& n)
{
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("sidecar is not valid JSON: ") + e.what());
    }
    for (const char* key : {"n", "scheme", "epsilon", "K", "c", "d", "seed"}) {
        if (!j.contains(key)) {
            throw ValidationError(std::string("sidecar is missing '") + key + "'");
        }
    }
    LleMetadata meta;
    try {
        n = j.at("n").get<long>();
        const std::string scheme = j.at("scheme").get<std::string>();
        if (!j.at("epsilon").is_null()) meta.eps = j.at("epsilon").get<double>();
        if (!j.at("K").is_null()) meta.k = j.at("K").get<long>();
        if (scheme == "epsilon_ball") {
            meta.scheme = EpsilonBall{meta.eps.value_or(0.0)};
        } else if (scheme == "knn") {
            meta.scheme = Knn{meta.k.value_or(0)};
        } else {
            throw ValidationError("sidecar: unknown scheme '" + scheme + "'");
        }
        meta.c = j.at("c").get<double>();
        meta.d = j.at("d").get<int>();
        meta.seed = j.at("seed").get<std::uint64_t>();
    } catch (const json::exception& e) {
        throw ValidationError(std::string("sidecar field has the wrong type: ") + e.what());
    }
    if (n < 0) {
        throw ValidationError("sidecar: negative n");
    }
    return meta;
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv)
{
    std::filesystem::path p = csv;
    return p.replace_extension(".json");
}

void save_matrix(const SparseRowMatrix& W, const LleMetadata& meta, const std::filesystem::path& csv)
{
    if (W.rows() != W.cols()) {
        throw DimensionError("save_matrix: matrix must be square");
    }
    {
        std::ofstream out = open_out(csv);
        write_triplets(out, W);
    }
    write_text(sidecar_path(csv), metadata_json(meta, W.rows()));
}

LoadedMatrix load_matrix(const std::filesystem::path& csv, const std::optional<LleMetadata>& expected)
{
    long n = 0;
    LoadedMatrix out;
    out.meta = parse_metadata(slurp(sidecar_path(csv)), n);
    if (expected) {
        const LleMetadata& e = *expected;
        const bool same = e.scheme.index() == out.meta.scheme.index() && e.eps == out.meta.eps &&
                          e.k == out.meta.k && e.c == out.meta.c && e.d == out.meta.d &&
                          e.seed == out.meta.seed;
        if (!same) {
            throw ValidationError("load_matrix: sidecar metadata does not match the expected values");
        }
    }
    std::ifstream in = open_in(csv);
    out.W = read_triplets(in, n);
    return out;
}

void write_spectrum_csv(std::ostream& out, const Spectrum& s)
{
    const bool res = !s.residuals.empty();
    out << (res ? "re,im,residual\n" : "re,im\n");
    for (size_t i = 0; i < s.values.size(); ++i) {
        out << format_double(s.values[i].real()) << ',' << format_double(s.values[i].imag());
        if (res) {
            out << ',' << format_double(s.residuals[i]);
        }
        out << '\n';
    }
}

Spectrum read_spectrum_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError("line 1: missing header", 1);
    }
    line = strip_cr(line);
    bool res = false;
    if (line == "re,im,residual") {
        res = true;
    } else if (line != "re,im") {
        throw ParseError("line 1: expected header 're,im[,residual]'", 1);
    }
    Spectrum s;
    s.method = "file";
    long lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip_cr(line);
        if (line.empty()) {
            continue;
        }
        const auto f = split_csv(line);
        if (f.size() != (res ? 3u : 2u)) {
            throw ParseError("line " + std::to_string(lineno) + ": wrong field count", lineno);
        }
        s.values.emplace_back(parse_double(f[0], lineno), parse_double(f[1], lineno));
        if (res) {
            s.residuals.push_back(parse_double(f[2], lineno));
        }
    }
    return s;
}

void save_eigenvectors(const Spectrum& s, const std::filesystem::path& csv)
{
    if (!s.vectors) {
        throw ValidationError("save_eigenvectors: spectrum carries no eigenvectors");
    }
    const Eigen::MatrixXcd& V = *s.vectors;
    {
        std::ofstream out = open_out(csv);
        out << "vec,idx,re,im\n";
        for (Eigen::Index j = 0; j < V.cols(); ++j) {
            for (Eigen::Index i = 0; i < V.rows(); ++i) {
                out << j << ',' << i << ',' << format_double(V(i, j).real()) << ','
                    << format_double(V(i, j).imag()) << '\n';
            }
        }
    }
    json j;
    j["rows"] = V.rows();
    j["cols"] = V.cols();
    j["method"] = s.method;
    j["ordering"] = s.ordering == Ordering::by_real_desc ? "by_real_desc" : "by_modulus_desc";
    json vals = json::array();
    for (const Complex& z : s.values) {
        vals.push_back({z.real(), z.imag()});
    }
    j["eigenvalues"] = vals;
    j["residuals"] = s.residuals;
    write_text(sidecar_path(csv), j.dump(2) + "\n");
}

Eigen::MatrixXcd load_eigenvectors(const std::filesystem::path& csv)
{
    json j;
    try {
        j = json::parse(slurp(sidecar_path(csv)));
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("eigenvector sidecar is not valid JSON: ") + e.what());
    }
    if (!j.contains("rows") || !j.contains("cols")) {
        throw ValidationError("eigenvector sidecar lacks rows/cols");
    }
    const long rows = j.at("rows").get<long>();
    const long cols = j.at("cols").get<long>();
    Eigen::MatrixXcd V(rows, cols);
    std::ifstream in = open_in(csv);
    std::string line;
    long lineno = 1;
    if (!std::getline(in, line) || strip_cr(line) != "vec,idx,re,im") {
        throw ParseError("line 1: expected header 'vec,idx,re,im'", 1);
    }
    long count = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip_cr(line);
        if (line.empty()) {
            continue;
        }
        const auto f = split_csv(line);
        if (f.size() != 4) {
            throw ParseError("line " + std::to_string(lineno) + ": expected 4 fields", lineno);
        }
        const long c = parse_long(f[0], lineno);
        const long r = parse_long(f[1], lineno);
        if (c != count / std::max(rows, 1L) || r != count % std::max(rows, 1L)) {
            throw ParseError("line " + std::to_string(lineno) + ": entries not column-major", lineno);
        }
        V(r, c) = Complex(parse_double(f[2], lineno), parse_double(f[3], lineno));
        ++count;
    }
    if (count != rows * cols) {
        throw ValidationError("eigenvector file has " + std::to_string(count) + " entries, sidecar says " +
                              std::to_string(rows * cols));
    }
    return V;
}

PointCloud read_cloud_csv(std::istream& in, int intrinsic_dim)
{
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError("line 1: missing header", 1);
    }
    const auto header = split_csv(strip_cr(line));
    long p = 0;
    bool with_dist = false;
    for (const auto& h : header) {
        if (h == "bdist") {
            with_dist = true;
        } else if (h == "x" + std::to_string(p + 1) && !with_dist) {
            ++p;
        } else {
            throw ParseError("line 1: unexpected column '" + h + "'", 1);
        }
    }
    if (p == 0) {
        throw ParseError("line 1: no coordinate columns", 1);
    }
    std::vector<double> coords;
    std::vector<double> dist;
    long lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip_cr(line);
        if (line.empty()) {
            continue;
        }
        const auto f = split_csv(line);
        if (static_cast<long>(f.size()) != p + (with_dist ? 1 : 0)) {
            throw ParseError("line " + std::to_string(lineno) + ": wrong field count", lineno);
        }
        for (long i = 0; i < p; ++i) {
            coords.push_back(parse_double(f[static_cast<size_t>(i)], lineno));
        }
        if (with_dist) {
            dist.push_back(parse_double(f.back(), lineno));
        }
    }
    const long n = static_cast<long>(coords.size()) / p;
    if (n == 0) {
        throw EmptyInputError("cloud file has no points");
    }
    Eigen::MatrixXd X = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        coords.data(), n, p);
    PointCloud cloud = make_cloud(std::move(X), intrinsic_dim);
    if (with_dist) {
        cloud.ground_truth.resize(static_cast<size_t>(n));
        for (long k = 0; k < n; ++k) {
            cloud.ground_truth[static_cast<size_t>(k)].boundary_dist = dist[static_cast<size_t>(k)];
        }
    }
    return cloud;
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out = open_out(path);
    out << text;
    if (!out) {
        throw Error("write failed: " + path.string());
    }
}

} // namespace bdlle::io
