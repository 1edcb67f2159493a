#include "amsad/matrix.hpp"

#include "amsad/error.hpp"
#include "amsad/features.hpp"

#include <algorithm>

namespace amsad {

Matrix Matrix::from_rows(std::span<const std::vector<double>> rows) {
    if (rows.empty()) return {};
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != m.cols()) throw Error(ErrorKind::input, "rows differ in dimensionality");
        std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
    }
    return m;
}

Matrix Matrix::from_feature_rows(std::span<const FeatureRow> rows) {
    if (rows.empty()) return {};
    Matrix m(rows.size(), rows.front().values.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].values.size() != m.cols()) throw Error(ErrorKind::input, "rows differ in dimensionality");
        std::copy(rows[i].values.begin(), rows[i].values.end(), m.row(i).begin());
    }
    return m;
}

void Matrix::swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    auto ra = row(a);
    auto rb = row(b);
    for (std::size_t j = 0; j < cols_; ++j) std::swap(ra[j], rb[j]);
}

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
    double acc = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double d = a[j] - b[j];
        acc += d * d;
    }
    return acc;
}

}  // namespace amsad
