#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <vector>

#include "mns/errors.hpp"

namespace mns {

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), v_(rows * cols, fill) {}

    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
        const std::size_t r = rows.size();
        const std::size_t c = r == 0 ? 0 : rows.begin()->size();
        Matrix m(r, c);
        std::size_t i = 0;
        for (const auto& row : rows) {
            if (row.size() != c) throw ShapeMismatch("ragged initializer rows");
            std::size_t j = 0;
            for (double x : row) m(i, j++) = x;
            ++i;
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return v_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return v_[r * cols_ + c]; }

    double* row(std::size_t r) { return v_.data() + r * cols_; }
    const double* row(std::size_t r) const { return v_.data() + r * cols_; }

    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> v_;
};

/// Dense row-major 0/1 matrix.
class BinaryMatrix {
public:
    BinaryMatrix() = default;
    BinaryMatrix(std::size_t rows, std::size_t cols, std::uint8_t fill = 0)
        : rows_(rows), cols_(cols), v_(rows * cols, fill) {}

    static BinaryMatrix identity(std::size_t n) {
        BinaryMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    std::uint8_t& operator()(std::size_t r, std::size_t c) { return v_[r * cols_ + c]; }
    std::uint8_t operator()(std::size_t r, std::size_t c) const { return v_[r * cols_ + c]; }

    std::uint8_t* row(std::size_t r) { return v_.data() + r * cols_; }
    const std::uint8_t* row(std::size_t r) const { return v_.data() + r * cols_; }

    std::size_t row_sum(std::size_t r) const {
        std::size_t s = 0;
        const std::uint8_t* p = row(r);
        for (std::size_t c = 0; c < cols_; ++c) s += p[c];
        return s;
    }

    bool operator==(const BinaryMatrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::uint8_t> v_;
};

}  // namespace mns
