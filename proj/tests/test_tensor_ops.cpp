#include <cmath>
#include <vector>

#include "doctest.h"
#include "usleep/grad_check.hpp"
#include "usleep/nn_ops.hpp"
#include "usleep/tensor.hpp"

using namespace usleep;

namespace {

Tensor row(std::vector<double> v) {
    auto n = static_cast<std::int64_t>(v.size());
    return Tensor::from({1, 1, n}, std::move(v));
}

double sum(const Tensor& t) {
    double s = 0.0;
    for (double v : t.data) s += v;
    return s;
}

}  // namespace

TEST_CASE("conv1d identity kernel") {
    Tensor in = row({1, 2, 3, 4});
    Tensor k = Tensor::from({1, 1, 1}, {1.0});
    Tensor b = Tensor::zeros({1});
    Tensor out = conv1d(in, k, b);
    CHECK(out.data == std::vector<double>{1, 2, 3, 4});
}

TEST_CASE("conv1d ones kernel sums with zero padding") {
    Tensor in = row({1, 1, 1, 1});
    Tensor k = Tensor::from({1, 1, 3}, {1.0, 1.0, 1.0});
    Tensor b = Tensor::zeros({1});
    Tensor out = conv1d(in, k, b);
    CHECK(out.data == std::vector<double>{2, 3, 3, 2});
}

TEST_CASE("conv1d zero kernel passes bias through") {
    Rng rng(7);
    Tensor in = Tensor::randn({2, 3, 16}, rng);
    Tensor k = Tensor::zeros({4, 3, 5});
    Tensor b = Tensor::full({4}, 5.0);
    Tensor out = conv1d(in, k, b);
    for (double v : out.data) CHECK(v == 5.0);
}

TEST_CASE("conv1d rejects even kernels and shape mismatches") {
    Tensor in = row({1, 2, 3, 4});
    CHECK_THROWS_AS(conv1d(in, Tensor::zeros({1, 1, 2}), Tensor::zeros({1})), ContractViolation);
    CHECK_THROWS_AS(conv1d(in, Tensor::zeros({1, 2, 3}), Tensor::zeros({1})), ContractViolation);
    CHECK_THROWS_AS(conv1d(in, Tensor::zeros({1, 1, 3}), Tensor::zeros({2})), ContractViolation);
}

TEST_CASE("conv1d is linear in its input") {
    Rng rng(11);
    Tensor x = Tensor::randn({2, 2, 20}, rng);
    Tensor y = Tensor::randn({2, 2, 20}, rng);
    Tensor k = Tensor::randn({3, 2, 5}, rng);
    Tensor b = Tensor::zeros({3});
    const double a = 1.7, c = -0.3;

    Tensor mix = x;
    for (std::size_t i = 0; i < mix.data.size(); ++i) mix.data[i] = a * x.data[i] + c * y.data[i];
    Tensor lhs = conv1d(mix, k, b);
    Tensor fx = conv1d(x, k, b);
    Tensor fy = conv1d(y, k, b);
    for (std::size_t i = 0; i < lhs.data.size(); ++i) {
        CHECK(lhs.data[i] == doctest::Approx(a * fx.data[i] + c * fy.data[i]).epsilon(1e-10));
    }
}

TEST_CASE("maxpool1d basics") {
    auto r = maxpool1d(row({1, 3, 2, 5}));
    CHECK(r.output.data == std::vector<double>{3, 5});

    auto c = maxpool1d(row({4, 4, 4, 4, 4, 4}));
    CHECK(c.output.data == std::vector<double>{4, 4, 4});

    CHECK_THROWS_AS(maxpool1d(row({1, 2, 3})), ContractViolation);
}

TEST_CASE("maxpool1d routes tie gradient to the first maximum") {
    auto r = maxpool1d(row({2, 2}));
    CHECK(r.output.data == std::vector<double>{2});
    Tensor g = maxpool1d_backward(r, row({1.0}), 2);
    CHECK(g.data[0] == 1.0);
    CHECK(g.data[1] == 0.0);
}

TEST_CASE("upsample_nearest repeats and its backward sums") {
    Tensor out = upsample_nearest(row({1, 2}), 2);
    CHECK(out.data == std::vector<double>{1, 1, 2, 2});

    Tensor same = upsample_nearest(row({3, 1, 4}), 1);
    CHECK(same.data == std::vector<double>{3, 1, 4});

    Tensor gi = upsample_nearest_backward(row({1, 2, 3, 4}), 2);
    CHECK(gi.data == std::vector<double>{3, 7});
}

TEST_CASE("avgpool1d window means") {
    Tensor out = avgpool1d(row({1, 3}), 2);
    CHECK(out.data == std::vector<double>{2});

    Tensor c = avgpool1d(row({7, 7, 7, 7, 7, 7}), 3);
    CHECK(c.data == std::vector<double>{7, 7});

    CHECK_THROWS_AS(avgpool1d(row({1, 2, 3}), 2), ContractViolation);
}

TEST_CASE("avgpool1d collapses one 30s epoch at 128 Hz to one value") {
    const std::int64_t k = 30 * 128;
    Tensor in = Tensor::zeros({1, 1, k});
    double expect = 0.0;
    for (std::int64_t t = 0; t < k; ++t) {
        in.data[static_cast<std::size_t>(t)] = static_cast<double>(t % 17);
        expect += in.data[static_cast<std::size_t>(t)];
    }
    expect /= static_cast<double>(k);
    Tensor out = avgpool1d(in, k);
    CHECK(out.numel() == 1);
    CHECK(out.data[0] == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("elu values") {
    Tensor out = elu(row({0.0, 1.0, -1.0}));
    CHECK(out.data[0] == 0.0);
    CHECK(out.data[1] == 1.0);
    CHECK(out.data[2] == doctest::Approx(std::exp(-1.0) - 1.0).epsilon(1e-12));
}

TEST_CASE("softmax of a constant vector is uniform") {
    Tensor in = Tensor::full({1, 5, 1}, 3.25);
    Tensor out = softmax(in, 1);
    for (double v : out.data) CHECK(v == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("softmax rows form a probability simplex") {
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        Tensor in = Tensor::randn({2, 5, 4}, rng, 0.0, 50.0);
        Tensor out = softmax(in, 1);
        for (std::int64_t b = 0; b < 2; ++b) {
            for (std::int64_t t = 0; t < 4; ++t) {
                double s = 0.0;
                for (std::int64_t c = 0; c < 5; ++c) {
                    CHECK(out.at3(b, c, t) >= 0.0);
                    s += out.at3(b, c, t);
                }
                CHECK(std::abs(s - 1.0) < 1e-9);
            }
        }
    }
}

TEST_CASE("concat and split are inverse") {
    Rng rng(5);
    Tensor a = Tensor::randn({2, 3, 6}, rng);
    Tensor b = Tensor::randn({2, 2, 6}, rng);
    Tensor cat = concat_channels(a, b);
    CHECK(cat.shape == std::vector<std::int64_t>{2, 5, 6});
    Tensor ga, gb;
    split_channels(cat, 3, ga, gb);
    CHECK(ga.data == a.data);
    CHECK(gb.data == b.data);
}

TEST_CASE("pad and crop round-trip") {
    Rng rng(9);
    Tensor x = Tensor::randn({1, 2, 10}, rng);
    Tensor padded = pad_time(x, 3, 5);
    CHECK(padded.shape[2] == 18);
    CHECK(padded.at3(0, 0, 0) == 0.0);
    CHECK(padded.at3(0, 1, 17) == 0.0);
    Tensor back = crop_time(padded, 3, 10);
    CHECK(back.data == x.data);
}

TEST_CASE("finite differences confirm every layer gradient") {
    Rng rng(42);
    for (int seed = 0; seed < 5; ++seed) {
        Tensor x = Tensor::randn({2, 2, 8}, rng);
        Tensor k = Tensor::randn({3, 2, 3}, rng);
        Tensor b = Tensor::randn({3}, rng);
        Tensor upstream = Tensor::randn({2, 3, 8}, rng);

        // conv1d: weighted-sum loss so every gradient element is exercised
        {
            auto loss = [&] {
                Tensor out = conv1d(x, k, b);
                double s = 0.0;
                for (std::size_t i = 0; i < out.data.size(); ++i) s += out.data[i] * upstream.data[i];
                return s;
            };
            ConvGrads g = conv1d_backward(x, k, upstream);
            double err = grad_check(loss, {&x, &k, &b}, {&g.input, &g.kernel, &g.bias});
            CHECK(err < 1e-6);
        }
        // maxpool (ties are measure-zero under randn)
        {
            auto loss = [&] { return sum(maxpool1d(x).output); };
            auto pooled = maxpool1d(x);
            Tensor ones = Tensor::full(pooled.output.shape, 1.0);
            Tensor gi = maxpool1d_backward(pooled, ones, x.shape[2]);
            double err = grad_check(loss, {&x}, {&gi});
            CHECK(err < 1e-6);
        }
        // upsample
        {
            Tensor up_upstream = Tensor::randn({2, 2, 16}, rng);
            auto loss = [&] {
                Tensor out = upsample_nearest(x, 2);
                double s = 0.0;
                for (std::size_t i = 0; i < out.data.size(); ++i) s += out.data[i] * up_upstream.data[i];
                return s;
            };
            Tensor gi = upsample_nearest_backward(up_upstream, 2);
            double err = grad_check(loss, {&x}, {&gi});
            CHECK(err < 1e-6);
        }
        // avgpool
        {
            auto loss = [&] { return sum(avgpool1d(x, 2)); };
            Tensor ones = Tensor::full({2, 2, 4}, 1.0);
            Tensor gi = avgpool1d_backward(ones, 8, 2);
            double err = grad_check(loss, {&x}, {&gi});
            CHECK(err < 1e-6);
        }
        // elu, tanh
        {
            Tensor w = Tensor::randn({2, 2, 8}, rng);
            auto loss_elu = [&] {
                Tensor out = elu(x);
                double s = 0.0;
                for (std::size_t i = 0; i < out.data.size(); ++i) s += out.data[i] * w.data[i];
                return s;
            };
            Tensor y = elu(x);
            Tensor gi = elu_backward(y, w);
            CHECK(grad_check(loss_elu, {&x}, {&gi}) < 1e-6);

            auto loss_tanh = [&] {
                Tensor out = tanh_op(x);
                double s = 0.0;
                for (std::size_t i = 0; i < out.data.size(); ++i) s += out.data[i] * w.data[i];
                return s;
            };
            Tensor ty = tanh_op(x);
            Tensor tgi = tanh_backward(ty, w);
            CHECK(grad_check(loss_tanh, {&x}, {&tgi}) < 1e-5);
        }
        // softmax
        {
            Tensor w = Tensor::randn({2, 2, 8}, rng);
            auto loss = [&] {
                Tensor out = softmax(x, 1);
                double s = 0.0;
                for (std::size_t i = 0; i < out.data.size(); ++i) s += out.data[i] * w.data[i];
                return s;
            };
            Tensor p = softmax(x, 1);
            Tensor gi = softmax_backward(p, w, 1);
            CHECK(grad_check(loss, {&x}, {&gi}) < 1e-5);
        }
    }
}
