#pragma once

#include <cmath>
#include <vector>

#include "satbridge/error.hpp"
#include "satbridge/rng.hpp"

namespace satbridge {

// Dense row-major matrix of doubles. Vectors are 1xN or Nx1 matrices.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(int r, int c, double fill = 0.0) : rows(r), cols(c), a(static_cast<size_t>(r) * c, fill) {}

    double& at(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
    double at(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }
    size_t size() const { return a.size(); }
    bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }

    bool all_finite() const {
        for (double v : a)
            if (!std::isfinite(v)) return false;
        return true;
    }

    void fill(double v) { std::fill(a.begin(), a.end(), v); }

    static Matrix glorot_uniform(int rows, int cols, Rng& rng) {
        Matrix m(rows, cols);
        double limit = std::sqrt(6.0 / (rows + cols));
        for (auto& v : m.a) v = (2.0 * rng.next_double() - 1.0) * limit;
        return m;
    }

    friend bool operator==(const Matrix&, const Matrix&) = default;
};

}  // namespace satbridge
