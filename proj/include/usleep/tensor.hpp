#ifndef USLEEP_TENSOR_HPP_
#define USLEEP_TENSOR_HPP_

#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "usleep/errors.hpp"

namespace usleep {

using Rng = std::mt19937_64;

// Dense row-major tensor of doubles. Immutable by convention once built;
// ops return fresh tensors.
struct Tensor {
    std::vector<std::int64_t> shape;
    std::vector<double> data;

    Tensor() = default;
    Tensor(std::vector<std::int64_t> s, std::vector<double> d);

    static Tensor zeros(std::vector<std::int64_t> shape);
    static Tensor full(std::vector<std::int64_t> shape, double value);
    static Tensor from(std::vector<std::int64_t> shape, std::vector<double> values);
    // Uniform on [-limit, limit].
    static Tensor uniform(std::vector<std::int64_t> shape, double limit, Rng& rng);
    static Tensor randn(std::vector<std::int64_t> shape, Rng& rng, double mean = 0.0,
                        double stddev = 1.0);

    std::int64_t numel() const { return static_cast<std::int64_t>(data.size()); }
    int rank() const { return static_cast<int>(shape.size()); }
    std::int64_t extent(int axis) const;

    // Rank-3 [B, C, T] accessors, the layout every layer op works in.
    double& at3(std::int64_t b, std::int64_t c, std::int64_t t) {
        return data[(b * shape[1] + c) * shape[2] + t];
    }
    double at3(std::int64_t b, std::int64_t c, std::int64_t t) const {
        return data[(b * shape[1] + c) * shape[2] + t];
    }
    double* ptr3(std::int64_t b, std::int64_t c, std::int64_t t) {
        return data.data() + (b * shape[1] + c) * shape[2] + t;
    }
    const double* ptr3(std::int64_t b, std::int64_t c, std::int64_t t) const {
        return data.data() + (b * shape[1] + c) * shape[2] + t;
    }

    bool same_shape(const Tensor& other) const { return shape == other.shape; }
    bool all_finite() const;
};

std::int64_t shape_numel(const std::vector<std::int64_t>& shape);
std::string shape_str(const std::vector<std::int64_t>& shape);

// Contract helpers; throw ContractViolation naming the offending axis.
void require(bool cond, const std::string& msg);
void require_rank(const Tensor& t, int rank, const std::string& name);
void require_extent(const Tensor& t, int axis, std::int64_t extent, const std::string& name);

}  // namespace usleep

#endif  // USLEEP_TENSOR_HPP_
