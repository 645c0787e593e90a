#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lrtf/rng.hpp"

namespace lrtf {

using Vec = std::vector<double>;

/// Dense N-way array with row-major flat storage (last index fastest).
class DenseTensor {
public:
    DenseTensor() = default;

    /// Zero-filled tensor of the given shape.
    explicit DenseTensor(std::vector<std::size_t> shape);

    DenseTensor(std::vector<std::size_t> shape, Vec values);

    static DenseTensor random(std::vector<std::size_t> shape, Rng& rng, double lo, double hi);

    std::size_t order() const { return shape_.size(); }
    std::size_t size() const { return data_.size(); }
    const std::vector<std::size_t>& shape() const { return shape_; }

    std::span<const double> values() const { return data_; }
    std::span<double> values() { return data_; }

    double at(std::span<const std::size_t> idx) const { return data_[flat_index(idx)]; }
    double& at(std::span<const std::size_t> idx) { return data_[flat_index(idx)]; }

    std::size_t flat_index(std::span<const std::size_t> idx) const;

private:
    std::vector<std::size_t> shape_;
    Vec data_;
};

/// Small dense row-major matrix.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
    Matrix(std::size_t rows, std::size_t cols, Vec values);

    static Matrix identity(std::size_t n);
    static Matrix random(std::size_t rows, std::size_t cols, Rng& rng, double lo, double hi);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }

    std::span<const double> values() const { return data_; }
    std::span<double> values() { return data_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    Vec data_;
};

Matrix matmul(const Matrix& a, const Matrix& b);
Vec matvec(const Matrix& a, std::span<const double> x);    // A x
Vec matvec_t(const Matrix& a, std::span<const double> x);  // A^T x
double dot(std::span<const double> a, std::span<const double> b);
double trace(const Matrix& a);

/// Contract mode n of t with v; the result drops that mode and keeps the
/// others in order. Requires order(t) >= 2 (scalar results are produced by
/// multi_mode_contract instead, which finishes with a dot product).
DenseTensor mode_n_vec_product(const DenseTensor& t, std::size_t n, std::span<const double> v);

/// Full contraction of an order-N core with one vector per mode.
double multi_mode_contract(const DenseTensor& core, const std::vector<Vec>& factors);

/// Product C_1 C_2 ... C_N with boundary ranks 1, read out as a scalar.
double matrix_chain_contract(const std::vector<Matrix>& mats);

/// trace(C_1 C_2 ... C_N) with cyclically matching ranks.
double ring_contract(const std::vector<Matrix>& mats);

}  // namespace lrtf
