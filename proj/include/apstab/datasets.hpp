#pragma once

// Labeled CSV ingestion, the dataset registry, unit-range normalization,
// ground-truth-initialized Lloyd and the label-matching recovery score.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "core.hpp"
#include "kmeans.hpp"

namespace apstab {

struct CsvOptions {
    char delimiter = ',';
    bool has_header = false;
    // Label column by index (negative counts from the end) or header name.
    std::optional<std::variant<long, std::string>> label_column;
    // Keep the label column among the features as well.
    bool label_is_feature = false;
};

struct DatasetSpec {
    std::string name;
    std::string file_name;
    std::size_t expected_n = 0;
    std::size_t expected_k = 0;
    std::size_t expected_d = 0;
    CsvOptions csv;
    std::string source_note;
    std::string sha256; // optional, informational
};

inline const std::vector<DatasetSpec>& dataset_registry() {
    static const std::vector<DatasetSpec> registry = {
        {"wine", "wine.data", 178, 3, 13, {',', false, long{0}, false},
         "UCI Machine Learning Repository, Wine (wine.data); class in the first column", ""},
        {"iris", "iris.data", 150, 3, 4, {',', false, long{-1}, false},
         "UCI Machine Learning Repository, Iris (iris.data); class in the last column", ""},
        {"banknote", "data_banknote_authentication.txt", 1372, 2, 5, {',', false, long{-1}, true},
         "UCI Machine Learning Repository, Banknote Authentication; class in the last column, also kept as a feature", ""},
        {"letter", "letter-recognition.data", 20000, 26, 16, {',', false, long{0}, false},
         "UCI Machine Learning Repository, Letter Recognition; letter in the first column", ""},
    };
    return registry;
}

inline const DatasetSpec& dataset_spec(const std::string& name) {
    for (const auto& s : dataset_registry())
        if (s.name == name) return s;
    throw Error(ErrorKind::InvalidArgument, "unknown dataset '" + name + "'");
}

inline constexpr const char* kDataDirEnv = "APSTAB_DATA_DIR";

// Directory holding the dataset files: $APSTAB_DATA_DIR, else `fallback`.
inline std::filesystem::path data_dir(const std::filesystem::path& fallback = ".") {
    if (const char* env = std::getenv(kDataDirEnv); env && *env) return env;
    return fallback;
}

namespace detail {

inline std::vector<std::string> split_fields(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == delim) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(trim(cur));
    return out;
}

inline std::optional<double> parse_double(const std::string& s) {
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    if (*begin == '+') ++begin;
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end) return std::nullopt;
    return v;
}

} // namespace detail

// Parses a delimited file. Labels map to 0..k-1 by first appearance.
inline Instance parse_csv(std::istream& in, const CsvOptions& opt, const std::string& source = "<stream>") {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    std::optional<std::size_t> label_col;
    std::vector<Vector> rows;
    std::vector<int> labels;
    std::map<std::string, int> label_ids;
    std::size_t width = 0;

    auto resolve_label = [&](std::size_t cols) {
        if (!opt.label_column) return;
        if (const long* idx = std::get_if<long>(&*opt.label_column)) {
            const long c = *idx < 0 ? static_cast<long>(cols) + *idx : *idx;
            if (c < 0 || c >= static_cast<long>(cols))
                throw Error(ErrorKind::ParseError, source + ": label column out of range");
            label_col = static_cast<std::size_t>(c);
        } else {
            const auto& name = std::get<std::string>(*opt.label_column);
            const auto it = std::find(header.begin(), header.end(), name);
            if (it == header.end()) throw Error(ErrorKind::ParseError, source + ": no column named '" + name + "'");
            label_col = static_cast<std::size_t>(it - header.begin());
        }
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        auto fields = detail::split_fields(line, opt.delimiter);
        if (opt.has_header && header.empty()) {
            header = fields;
            continue;
        }
        if (width == 0) {
            width = fields.size();
            resolve_label(width);
        }
        if (fields.size() != width)
            throw Error(ErrorKind::ParseError, source + ": row " + std::to_string(line_no) + " has " +
                                                   std::to_string(fields.size()) + " fields, expected " +
                                                   std::to_string(width));
        Vector row;
        for (std::size_t c = 0; c < width; ++c) {
            const bool is_label = label_col && *label_col == c;
            if (is_label) {
                auto [it, inserted] = label_ids.try_emplace(fields[c], static_cast<int>(label_ids.size()));
                labels.push_back(it->second);
                if (!opt.label_is_feature) continue;
            }
            const auto v = detail::parse_double(fields[c]);
            if (!v)
                throw Error(ErrorKind::ParseError, source + ": row " + std::to_string(line_no) + ", column " +
                                                       std::to_string(c + 1) + ": not a number: '" + fields[c] + "'");
            if (!std::isfinite(*v))
                throw Error(ErrorKind::NonFiniteValue, source + ": row " + std::to_string(line_no) + ", column " +
                                                           std::to_string(c + 1) + " is not finite");
            row.push_back(*v);
        }
        rows.push_back(std::move(row));
    }
    Instance inst;
    inst.points = Matrix::from_rows(rows);
    if (label_col) inst.labels = std::move(labels);
    inst.name = source;
    return inst;
}

inline Instance load_csv(const std::filesystem::path& path, const CsvOptions& opt) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
    return parse_csv(in, opt, path.string());
}

inline Instance load_csv(const std::filesystem::path& path, const DatasetSpec& spec) {
    if (!std::filesystem::exists(path))
        throw Error(ErrorKind::MissingDataset, spec.name + ": file not found: " + path.string() + " (" + spec.source_note + ")");
    Instance inst = load_csv(path, spec.csv);
    const std::size_t k = inst.label_count();
    auto mismatch = [&](const char* what, std::size_t found, std::size_t expected) {
        throw Error(ErrorKind::ShapeMismatch, spec.name + ": found " + what + "=" + std::to_string(found) +
                                                  ", expected " + std::to_string(expected));
    };
    if (spec.expected_n && inst.n() != spec.expected_n) mismatch("n", inst.n(), spec.expected_n);
    if (spec.expected_d && inst.d() != spec.expected_d) mismatch("d", inst.d(), spec.expected_d);
    if (spec.expected_k && k != spec.expected_k) mismatch("k", k, spec.expected_k);
    inst.name = spec.name;
    return inst;
}

inline Instance load_registered(const std::string& name, const std::filesystem::path& dir) {
    const auto& spec = dataset_spec(name);
    return load_csv(dir / spec.file_name, spec);
}

// Writes points (17 significant digits, so values round-trip) with an
// optional leading label column.
inline void write_csv(std::ostream& out, const Instance& inst, const std::vector<int>* labels = nullptr) {
    out << std::setprecision(17);
    for (std::size_t p = 0; p < inst.n(); ++p) {
        if (labels) out << (*labels)[p] << ',';
        for (std::size_t c = 0; c < inst.d(); ++c) out << (c ? "," : "") << inst.points(p, c);
        out << '\n';
    }
}

// Per feature (x - min)/(max - min); constant features become 0 and their
// indices are reported.
inline Instance normalize_unit_range(const Instance& inst, std::vector<std::size_t>* constant_features = nullptr) {
    Instance out = inst;
    for (std::size_t c = 0; c < inst.d(); ++c) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (std::size_t p = 0; p < inst.n(); ++p) {
            lo = std::min(lo, inst.points(p, c));
            hi = std::max(hi, inst.points(p, c));
        }
        if (!(hi > lo)) {
            if (constant_features) constant_features->push_back(c);
            for (std::size_t p = 0; p < inst.n(); ++p) out.points(p, c) = 0.0;
            continue;
        }
        const double span = hi - lo;
        for (std::size_t p = 0; p < inst.n(); ++p) out.points(p, c) = (inst.points(p, c) - lo) / span;
    }
    if (!inst.name.empty()) out.name = inst.name + "-norm";
    return out;
}

inline Matrix label_centroids(const Instance& inst) {
    if (!inst.labels) throw Error(ErrorKind::MissingLabels, "instance has no labels");
    return centroids(inst, *inst.labels, inst.label_count()).centers;
}

// Lloyd started from the centroids of the ground-truth labels.
inline Clustering ground_truth_lloyd(const Instance& inst, double tol = 1e-9, std::size_t max_iter = 300) {
    return lloyd(inst, label_centroids(inst), tol, max_iter);
}

// Lloyd with a center-shift stopping rule: stop when labels repeat or the
// total squared center movement drops to tol * (mean feature variance), then
// reassign to the final centers. This is the convention of common library
// implementations and is kept as a diagnostic reference only.
inline Clustering center_shift_lloyd(const Instance& inst, const Matrix& init, double tol, std::size_t max_iter = 300) {
    const std::size_t n = inst.n(), d = inst.d(), k = init.rows();
    double mean_var = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
        double mu = 0.0, m2 = 0.0;
        for (std::size_t p = 0; p < n; ++p) mu += inst.points(p, c);
        mu /= static_cast<double>(n);
        for (std::size_t p = 0; p < n; ++p) m2 += (inst.points(p, c) - mu) * (inst.points(p, c) - mu);
        mean_var += m2 / static_cast<double>(n);
    }
    const double abs_tol = tol * mean_var / static_cast<double>(d);

    Matrix centers = init;
    Assignment labels, old(n, -1);
    bool strict = false;
    std::size_t iters = 0;
    for (std::size_t it = 0; it < max_iter; ++it) {
        ++iters;
        labels = assign(inst, centers);
        auto next = centroids(inst, labels, k).centers;
        for (std::size_t e = 0; e < k; ++e)
            if (!std::isfinite(next(e, 0)))
                for (std::size_t c = 0; c < d; ++c) next(e, c) = centers(e, c);
        double shift = 0.0;
        for (std::size_t e = 0; e < k; ++e) shift += squared_distance(next.row(e), centers.row(e));
        centers = std::move(next);
        if (labels == old) {
            strict = true;
            break;
        }
        if (shift <= abs_tol) break;
        old = labels;
    }
    if (!strict) labels = assign(inst, centers);
    Clustering out = partition_clustering(inst, labels, k);
    out.iterations = iters;
    return out;
}

namespace detail {

// Minimum-cost perfect matching on a square cost matrix (Hungarian method,
// O(m^3)). Returns the column matched to each row.
inline std::vector<std::size_t> hungarian(const std::vector<std::vector<double>>& cost) {
    const std::size_t m = cost.size();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(m + 1, 0.0), v(m + 1, 0.0);
    std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
    for (std::size_t i = 1; i <= m; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(m + 1, inf);
        std::vector<bool> used(m + 1, false);
        do {
            used[j0] = true;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<std::size_t> match(m, 0);
    for (std::size_t j = 1; j <= m; ++j)
        if (p[j]) match[p[j] - 1] = j - 1;
    return match;
}

} // namespace detail

// Largest fraction of points whose labels agree under a one-to-one mapping
// of a's labels onto b's.
inline double recovery_score(const Assignment& a, const Assignment& b) {
    if (a.size() != b.size()) throw Error(ErrorKind::SizeMismatch, "clusterings have different lengths");
    if (a.empty()) return 1.0;
    const int ka = *std::max_element(a.begin(), a.end()) + 1;
    const int kb = *std::max_element(b.begin(), b.end()) + 1;
    const auto m = static_cast<std::size_t>(std::max(ka, kb));
    std::vector<std::vector<double>> conf(m, std::vector<double>(m, 0.0));
    for (std::size_t p = 0; p < a.size(); ++p) {
        if (a[p] < 0 || b[p] < 0) throw Error(ErrorKind::InvalidArgument, "negative label");
        conf[static_cast<std::size_t>(a[p])][static_cast<std::size_t>(b[p])] += 1.0;
    }
    std::vector<std::vector<double>> cost(m, std::vector<double>(m));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) cost[i][j] = -conf[i][j];
    const auto match = detail::hungarian(cost);
    double agree = 0.0;
    for (std::size_t i = 0; i < m; ++i) agree += conf[i][match[i]];
    return agree / static_cast<double>(a.size());
}

inline double recovery_score(const Clustering& a, const Clustering& b) {
    return recovery_score(a.assignment, b.assignment);
}

} // namespace apstab
