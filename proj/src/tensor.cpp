#include "usleep/tensor.hpp"

#include <cmath>
#include <sstream>

namespace usleep {

std::int64_t shape_numel(const std::vector<std::int64_t>& shape) {
    std::int64_t n = 1;
    for (auto e : shape) {
        if (e <= 0) throw ContractViolation("tensor shape has non-positive extent " + std::to_string(e));
        n *= e;
    }
    return n;
}

std::string shape_str(const std::vector<std::int64_t>& shape) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << ',';
        os << shape[i];
    }
    os << ']';
    return os.str();
}

Tensor::Tensor(std::vector<std::int64_t> s, std::vector<double> d)
    : shape(std::move(s)), data(std::move(d)) {
    if (shape_numel(shape) != static_cast<std::int64_t>(data.size())) {
        throw ContractViolation("tensor data size " + std::to_string(data.size()) +
                                " does not match shape " + shape_str(shape));
    }
}

Tensor Tensor::zeros(std::vector<std::int64_t> shape) {
    auto n = shape_numel(shape);
    return Tensor(std::move(shape), std::vector<double>(static_cast<std::size_t>(n), 0.0));
}

Tensor Tensor::full(std::vector<std::int64_t> shape, double value) {
    auto n = shape_numel(shape);
    return Tensor(std::move(shape), std::vector<double>(static_cast<std::size_t>(n), value));
}

Tensor Tensor::from(std::vector<std::int64_t> shape, std::vector<double> values) {
    return Tensor(std::move(shape), std::move(values));
}

Tensor Tensor::uniform(std::vector<std::int64_t> shape, double limit, Rng& rng) {
    auto t = Tensor::zeros(std::move(shape));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (auto& v : t.data) v = dist(rng);
    return t;
}

Tensor Tensor::randn(std::vector<std::int64_t> shape, Rng& rng, double mean, double stddev) {
    auto t = Tensor::zeros(std::move(shape));
    std::normal_distribution<double> dist(mean, stddev);
    for (auto& v : t.data) v = dist(rng);
    return t;
}

std::int64_t Tensor::extent(int axis) const {
    if (axis < 0 || axis >= rank()) {
        throw ContractViolation("axis " + std::to_string(axis) + " out of range for rank " +
                                std::to_string(rank()));
    }
    return shape[static_cast<std::size_t>(axis)];
}

bool Tensor::all_finite() const {
    for (double v : data) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

void require(bool cond, const std::string& msg) {
    if (!cond) throw ContractViolation(msg);
}

void require_rank(const Tensor& t, int rank, const std::string& name) {
    if (t.rank() != rank) {
        throw ContractViolation(name + ": expected rank " + std::to_string(rank) + ", got shape " +
                                shape_str(t.shape));
    }
}

void require_extent(const Tensor& t, int axis, std::int64_t extent, const std::string& name) {
    if (t.extent(axis) != extent) {
        throw ContractViolation(name + ": axis " + std::to_string(axis) + " has extent " +
                                std::to_string(t.extent(axis)) + ", expected " +
                                std::to_string(extent));
    }
}

}  // namespace usleep
