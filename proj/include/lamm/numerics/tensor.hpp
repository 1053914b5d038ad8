// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lamm::num {

using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape& shape);
std::string shape_str(const Shape& shape);

/// Dense row-major tensor of 64-bit reals with an optional gradient buffer.
///
/// Invariants: numel(shape) == data.size(); a present grad has the same
/// extent as data.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(Shape shape, double fill = 0.0);
    Tensor(Shape shape, std::vector<double> data);

    static Tensor zeros(Shape shape) { return Tensor(std::move(shape)); }
    static Tensor scalar(double v) { return Tensor({1}, std::vector<double>{v}); }
    static Tensor vector(std::vector<double> v);
    static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    const Shape& shape() const noexcept { return shape_; }
    std::size_t rank() const noexcept { return shape_.size(); }
    std::size_t size() const noexcept { return data_.size(); }
    std::size_t dim(std::size_t axis) const;
    /// Leading extent for rank-2 tensors, 1 for vectors.
    std::size_t rows() const;
    /// Trailing extent.
    std::size_t cols() const;

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }
    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }
    double& at(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }
    double item() const;

    std::span<double> row(std::size_t r);
    std::span<const double> row(std::size_t r) const;
    Tensor row_copy(std::size_t r) const;

    bool requires_grad() const noexcept { return requires_grad_; }
    Tensor& set_requires_grad(bool on) {
        requires_grad_ = on;
        return *this;
    }

    bool has_grad() const noexcept { return grad_.has_value(); }
    std::span<const double> grad() const;
    /// Grad buffer, allocated as zeros on first use.
    std::span<double> mutable_grad();
    void zero_grad();
    void clear_grad() { grad_.reset(); }

    Tensor reshaped(Shape shape) const;
    bool all_finite() const;

    /// Exact equality of shape and values (no gradient comparison).
    bool same_values(const Tensor& other) const;

private:
    Shape shape_;
    std::vector<double> data_;
    bool requires_grad_ = false;
    std::optional<std::vector<double>> grad_;
};

/// 64-bit FNV-1a over the shape and raw value bytes. Stable across processes.
std::uint64_t content_hash(const Tensor& t, std::uint64_t seed = 0xcbf29ce484222325ULL);

double dot(std::span<const double> a, std::span<const double> b);
double l2_norm(std::span<const double> a);

}  // namespace lamm::num
