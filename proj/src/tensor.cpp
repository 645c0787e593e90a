#include "lrtf/tensor.hpp"

#include <string>

#include "lrtf/errors.hpp"

namespace lrtf {

namespace {

std::size_t checked_size(const std::vector<std::size_t>& shape) {
    if (shape.empty()) throw DimensionError("DenseTensor: shape must be non-empty");
    std::size_t n = 1;
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (shape[i] == 0)
            throw DimensionError("DenseTensor: mode " + std::to_string(i) + " has extent 0");
        n *= shape[i];
    }
    return n;
}

}  // namespace

DenseTensor::DenseTensor(std::vector<std::size_t> shape) : shape_(std::move(shape)) {
    data_.assign(checked_size(shape_), 0.0);
}

DenseTensor::DenseTensor(std::vector<std::size_t> shape, Vec values) : shape_(std::move(shape)), data_(std::move(values)) {
    if (checked_size(shape_) != data_.size())
        throw DimensionError("DenseTensor: data length " + std::to_string(data_.size()) +
                             " does not match shape product");
}

DenseTensor DenseTensor::random(std::vector<std::size_t> shape, Rng& rng, double lo, double hi) {
    DenseTensor t(std::move(shape));
    for (double& x : t.data_) x = rng.uniform(lo, hi);
    return t;
}

std::size_t DenseTensor::flat_index(std::span<const std::size_t> idx) const {
    if (idx.size() != shape_.size()) throw DimensionError("DenseTensor: index arity mismatch");
    std::size_t flat = 0;
    for (std::size_t i = 0; i < shape_.size(); ++i) {
        if (idx[i] >= shape_[i])
            throw DimensionError("DenseTensor: index out of range at mode " + std::to_string(i));
        flat = flat * shape_[i] + idx[i];
    }
    return flat;
}

Matrix::Matrix(std::size_t rows, std::size_t cols, Vec values) : rows_(rows), cols_(cols), data_(std::move(values)) {
    if (data_.size() != rows_ * cols_) throw DimensionError("Matrix: data length does not match rows*cols");
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::random(std::size_t rows, std::size_t cols, Rng& rng, double lo, double hi) {
    Matrix m(rows, cols);
    for (double& x : m.data_) x = rng.uniform(lo, hi);
    return m;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw DimensionError("matmul: inner dimensions disagree");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

Vec matvec(const Matrix& a, std::span<const double> x) {
    if (a.cols() != x.size()) throw DimensionError("matvec: length mismatch");
    Vec y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

Vec matvec_t(const Matrix& a, std::span<const double> x) {
    if (a.rows() != x.size()) throw DimensionError("matvec_t: length mismatch");
    Vec y(a.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double xi = x[i];
        for (std::size_t j = 0; j < a.cols(); ++j) y[j] += a(i, j) * xi;
    }
    return y;
}

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw DimensionError("dot: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double trace(const Matrix& a) {
    if (a.rows() != a.cols()) throw DimensionError("trace: matrix is not square");
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) s += a(i, i);
    return s;
}

DenseTensor mode_n_vec_product(const DenseTensor& t, std::size_t n, std::span<const double> v) {
    const auto& shape = t.shape();
    if (t.order() < 2) throw DimensionError("mode_n_vec_product: tensor order must be >= 2");
    if (n >= t.order()) throw DimensionError("mode_n_vec_product: mode " + std::to_string(n) + " out of range");
    if (v.size() != shape[n])
        throw DimensionError("mode_n_vec_product: vector length " + std::to_string(v.size()) +
                             " does not match extent " + std::to_string(shape[n]) + " of mode " +
                             std::to_string(n));

    std::vector<std::size_t> out_shape;
    out_shape.reserve(t.order() - 1);
    for (std::size_t i = 0; i < t.order(); ++i)
        if (i != n) out_shape.push_back(shape[i]);

    // inner = stride of mode n, outer blocks cover everything before it
    std::size_t inner = 1;
    for (std::size_t i = n + 1; i < shape.size(); ++i) inner *= shape[i];
    std::size_t outer = 1;
    for (std::size_t i = 0; i < n; ++i) outer *= shape[i];

    DenseTensor out(std::move(out_shape));
    auto src = t.values();
    auto dst = out.values();
    const std::size_t block = shape[n] * inner;
    for (std::size_t o = 0; o < outer; ++o) {
        const double* base = src.data() + o * block;
        double* res = dst.data() + o * inner;
        for (std::size_t k = 0; k < shape[n]; ++k) {
            const double vk = v[k];
            const double* slice = base + k * inner;
            for (std::size_t i = 0; i < inner; ++i) res[i] += vk * slice[i];
        }
    }
    return out;
}

double multi_mode_contract(const DenseTensor& core, const std::vector<Vec>& factors) {
    if (factors.size() != core.order())
        throw DimensionError("multi_mode_contract: got " + std::to_string(factors.size()) +
                             " factors for an order-" + std::to_string(core.order()) + " core");
    for (std::size_t i = 0; i < factors.size(); ++i)
        if (factors[i].size() != core.shape()[i])
            throw DimensionError("multi_mode_contract: factor " + std::to_string(i) + " length " +
                                 std::to_string(factors[i].size()) + " does not match extent " +
                                 std::to_string(core.shape()[i]));

    DenseTensor cur = core;
    for (std::size_t i = 0; i + 1 < factors.size(); ++i) cur = mode_n_vec_product(cur, 0, factors[i]);
    return dot(cur.values(), factors.back());
}

double matrix_chain_contract(const std::vector<Matrix>& mats) {
    if (mats.empty()) throw DimensionError("matrix_chain_contract: empty chain");
    if (mats.front().rows() != 1)
        throw DimensionError("matrix_chain_contract: leading rank is " + std::to_string(mats.front().rows()) +
                             ", expected 1");
    if (mats.back().cols() != 1)
        throw DimensionError("matrix_chain_contract: trailing rank is " + std::to_string(mats.back().cols()) +
                             ", expected 1");
    for (std::size_t i = 0; i + 1 < mats.size(); ++i)
        if (mats[i].cols() != mats[i + 1].rows())
            throw DimensionError("matrix_chain_contract: inner dimensions of cores (" + std::to_string(i) +
                                 ", " + std::to_string(i + 1) + ") disagree");

    // carry a row vector through the chain
    Vec row(mats[0].cols());
    for (std::size_t j = 0; j < row.size(); ++j) row[j] = mats[0](0, j);
    for (std::size_t i = 1; i < mats.size(); ++i) row = matvec_t(mats[i], row);
    return row[0];
}

double ring_contract(const std::vector<Matrix>& mats) {
    if (mats.empty()) throw DimensionError("ring_contract: empty ring");
    for (std::size_t i = 0; i + 1 < mats.size(); ++i)
        if (mats[i].cols() != mats[i + 1].rows())
            throw DimensionError("ring_contract: inner dimensions of cores (" + std::to_string(i) + ", " +
                                 std::to_string(i + 1) + ") disagree");
    if (mats.back().cols() != mats.front().rows())
        throw DimensionError("ring_contract: closure ranks disagree (last core has " +
                             std::to_string(mats.back().cols()) + " columns, first has " +
                             std::to_string(mats.front().rows()) + " rows)");

    Matrix prod = mats[0];
    for (std::size_t i = 1; i < mats.size(); ++i) prod = matmul(prod, mats[i]);
    return trace(prod);
}

}  // namespace lrtf
