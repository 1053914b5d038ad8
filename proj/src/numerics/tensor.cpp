// SPDX-License-Identifier: Apache-2.0

#include "lamm/numerics/tensor.hpp"

#include <bit>
#include <cmath>
#include <sstream>

#include "lamm/errors.hpp"

namespace lamm::num {

std::size_t numel(const Shape& shape) {
    std::size_t n = 1;
    for (auto e : shape) n *= e;
    return n;
}

std::string shape_str(const Shape& shape) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "x" : "") << shape[i];
    os << ']';
    return os.str();
}

Tensor::Tensor(Shape shape, double fill) : shape_(std::move(shape)), data_(numel(shape_), fill) {}

Tensor::Tensor(Shape shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data)) {
    if (numel(shape_) != data_.size()) {
        throw UsageError("tensor shape " + shape_str(shape_) + " does not match " +
                         std::to_string(data_.size()) + " values");
    }
}

Tensor Tensor::vector(std::vector<double> v) {
    Shape s{v.size()};
    return Tensor(std::move(s), std::move(v));
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> data) {
    return Tensor({rows, cols}, std::move(data));
}

std::size_t Tensor::dim(std::size_t axis) const {
    if (axis >= shape_.size()) throw UsageError("axis out of range for shape " + shape_str(shape_));
    return shape_[axis];
}

std::size_t Tensor::rows() const {
    if (shape_.size() == 2) return shape_[0];
    if (shape_.size() <= 1) return 1;
    throw UsageError("rows() needs a rank <= 2 tensor, got " + shape_str(shape_));
}

std::size_t Tensor::cols() const {
    if (shape_.empty()) return 1;
    return shape_.back();
}

double Tensor::item() const {
    if (data_.size() != 1) throw UsageError("item() on tensor of shape " + shape_str(shape_));
    return data_[0];
}

std::span<double> Tensor::row(std::size_t r) {
    const auto c = cols();
    return std::span<double>(data_).subspan(r * c, c);
}

std::span<const double> Tensor::row(std::size_t r) const {
    const auto c = cols();
    return std::span<const double>(data_).subspan(r * c, c);
}

Tensor Tensor::row_copy(std::size_t r) const {
    if (r >= rows()) throw UsageError("row " + std::to_string(r) + " out of range for " + shape_str(shape_));
    auto src = row(r);
    return Tensor({1, src.size()}, std::vector<double>(src.begin(), src.end()));
}

std::span<const double> Tensor::grad() const {
    if (!grad_) return {};
    return *grad_;
}

std::span<double> Tensor::mutable_grad() {
    if (!grad_) grad_.emplace(data_.size(), 0.0);
    return *grad_;
}

void Tensor::zero_grad() {
    if (grad_) std::fill(grad_->begin(), grad_->end(), 0.0);
}

Tensor Tensor::reshaped(Shape shape) const {
    return Tensor(std::move(shape), data_);
}

bool Tensor::all_finite() const {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

bool Tensor::same_values(const Tensor& other) const {
    if (shape_ != other.shape_) return false;
    for (std::size_t i = 0; i < data_.size(); ++i)
        if (std::bit_cast<std::uint64_t>(data_[i]) != std::bit_cast<std::uint64_t>(other.data_[i])) return false;
    return true;
}

namespace {

constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

std::uint64_t mix_u64(std::uint64_t h, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        h ^= (v >> (8 * i)) & 0xffu;
        h *= kFnvPrime;
    }
    return h;
}

}  // namespace

std::uint64_t content_hash(const Tensor& t, std::uint64_t seed) {
    std::uint64_t h = seed;
    h = mix_u64(h, t.rank());
    for (auto e : t.shape()) h = mix_u64(h, e);
    for (double v : t.data()) h = mix_u64(h, std::bit_cast<std::uint64_t>(v));
    return h;
}

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw UsageError("dot: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double l2_norm(std::span<const double> a) {
    return std::sqrt(dot(a, a));
}

}  // namespace lamm::num
