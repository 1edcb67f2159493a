#pragma once

// Labeled synthetic point sets shared by the unit and acceptance tests.

#include "amsad/features.hpp"
#include "amsad/matrix.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <random>
#include <vector>

namespace fixtures {

struct Labeled {
    amsad::Matrix x;
    std::vector<amsad::Label> labels;
};

// n points per class from N(centre_c, sd^2 I) in `dims` dimensions; class 1 is
// shifted by `separation` along every axis.
inline Labeled gaussian_pair(std::size_t n, std::size_t dims, double separation, double sd, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, sd);
    Labeled out;
    out.x = amsad::Matrix(2 * n, dims);
    for (std::size_t i = 0; i < 2 * n; ++i) {
        const bool second = i >= n;
        for (std::size_t d = 0; d < dims; ++d) out.x(i, d) = (second ? separation : 0.0) + z(rng);
        out.labels.push_back(second ? amsad::Label::anomalous : amsad::Label::normal);
    }
    return out;
}

// The canonical 200-point, two-blob fixture: 2-D, centres 8 sigma apart, min-max normalized.
inline Labeled canonical_blobs() {
    auto f = gaussian_pair(100, 2, 8.0, 1.0, 2024);
    for (std::size_t d = 0; d < f.x.cols(); ++d) {
        double lo = f.x(0, d), hi = f.x(0, d);
        for (std::size_t i = 0; i < f.x.rows(); ++i) {
            lo = std::min(lo, f.x(i, d));
            hi = std::max(hi, f.x(i, d));
        }
        for (std::size_t i = 0; i < f.x.rows(); ++i) f.x(i, d) = (f.x(i, d) - lo) / (hi - lo);
    }
    return f;
}

inline amsad::Matrix column(const std::vector<double>& v) {
    amsad::Matrix m(v.size(), 1);
    for (std::size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
    return m;
}

}  // namespace fixtures

#include "amsad/error.hpp"

namespace fixtures {

// Kind of the amsad::Error thrown by f, or nullopt when nothing (or something else) is thrown.
template <typename F>
std::optional<amsad::ErrorKind> error_kind(F&& f) {
    try {
        f();
    } catch (const amsad::Error& e) {
        return e.kind();
    } catch (...) {
    }
    return std::nullopt;
}

template <typename F>
std::string error_key(F&& f) {
    try {
        f();
    } catch (const amsad::Error& e) {
        return e.key();
    }
    return "<no error>";
}

}  // namespace fixtures
