#pragma once

// Shared value types and numeric kernels: a dense row-major matrix, the
// library error type, and deterministic summation.

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace apstab {

enum class ErrorKind {
    DegenerateCenters,
    DimensionMismatch,
    MissingPairGeometry,
    InvalidArgument,
    KTooLarge,
    TooLarge,
    Insufficient,
    EtaTooLarge,
    ZeroVectorSample,
    CoincidentPair,
    EmptyCluster,
    NotUnique,
    Infeasible,
    ParseError,
    ShapeMismatch,
    NonFiniteValue,
    MissingLabels,
    SizeMismatch,
    ConfigParseError,
    MissingDataset,
    UnknownSuite,
    IoError,
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::DegenerateCenters: return "DegenerateCenters";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::MissingPairGeometry: return "MissingPairGeometry";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::KTooLarge: return "KTooLarge";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::Insufficient: return "Insufficient";
    case ErrorKind::EtaTooLarge: return "EtaTooLarge";
    case ErrorKind::ZeroVectorSample: return "ZeroVectorSample";
    case ErrorKind::CoincidentPair: return "CoincidentPair";
    case ErrorKind::EmptyCluster: return "EmptyCluster";
    case ErrorKind::NotUnique: return "NotUnique";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::NonFiniteValue: return "NonFiniteValue";
    case ErrorKind::MissingLabels: return "MissingLabels";
    case ErrorKind::SizeMismatch: return "SizeMismatch";
    case ErrorKind::ConfigParseError: return "ConfigParseError";
    case ErrorKind::MissingDataset: return "MissingDataset";
    case ErrorKind::UnknownSuite: return "UnknownSuite";
    case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

using Vector = std::vector<double>;
using ConstRow = std::span<const double>;
using Row = std::span<double>;

// Dense row-major matrix; rows are points.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    Matrix(std::initializer_list<std::initializer_list<double>> init) {
        rows_ = init.size();
        cols_ = rows_ ? init.begin()->size() : 0;
        data_.reserve(rows_ * cols_);
        for (const auto& r : init) {
            if (r.size() != cols_)
                throw Error(ErrorKind::DimensionMismatch, "ragged matrix initializer");
            data_.insert(data_.end(), r.begin(), r.end());
        }
    }

    static Matrix from_rows(const std::vector<Vector>& rows) {
        Matrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != m.cols_)
                throw Error(ErrorKind::DimensionMismatch, "ragged row list");
            std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
        }
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return rows_ == 0; }

    Row row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
    ConstRow row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }

    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    Vector row_vector(std::size_t i) const { return {row(i).begin(), row(i).end()}; }

    void append_row(ConstRow r) {
        if (rows_ == 0 && cols_ == 0) cols_ = r.size();
        if (r.size() != cols_) throw Error(ErrorKind::DimensionMismatch, "append_row width");
        data_.insert(data_.end(), r.begin(), r.end());
        ++rows_;
    }

    const std::vector<double>& data() const noexcept { return data_; }
    std::vector<double>& data() noexcept { return data_; }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline double dot(ConstRow a, ConstRow b) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double squared_distance(ConstRow a, ConstRow b) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double t = a[i] - b[i];
        s += t * t;
    }
    return s;
}

inline double distance(ConstRow a, ConstRow b) noexcept { return std::sqrt(squared_distance(a, b)); }

inline double norm(ConstRow a) noexcept { return std::sqrt(dot(a, a)); }

inline Vector subtract(ConstRow a, ConstRow b) {
    Vector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

inline bool all_finite(ConstRow a) noexcept {
    for (double v : a)
        if (!std::isfinite(v)) return false;
    return true;
}

// Pairwise (cascade) summation. The reduction tree depends only on the length,
// so results are reproducible regardless of how the terms were produced.
inline double pairwise_sum(std::span<const double> values) noexcept {
    constexpr std::size_t kBlock = 8;
    if (values.size() <= kBlock) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

inline void require_same_dim(std::size_t a, std::size_t b, const char* what) {
    if (a != b)
        throw Error(ErrorKind::DimensionMismatch,
                    std::string(what) + ": " + std::to_string(a) + " vs " + std::to_string(b));
}

namespace detail {

inline std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

} // namespace detail

} // namespace apstab
