#include <cmath>

#include "doctest.h"
#include "usleep/batchnorm.hpp"
#include "usleep/grad_check.hpp"
#include "usleep/nn_ops.hpp"

using namespace usleep;

TEST_CASE("grad_check is essentially exact on a linear map") {
    Rng rng(1);
    Tensor x = Tensor::randn({1, 1, 10}, rng);
    Tensor w = Tensor::randn({1, 1, 10}, rng);
    auto loss = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < x.data.size(); ++i) s += w.data[i] * x.data[i];
        return s;
    };
    CHECK(grad_check(loss, {&x}, {&w}) < 1e-10);
}

TEST_CASE("grad_check flags a wrong gradient") {
    Rng rng(2);
    Tensor x = Tensor::randn({1, 1, 4}, rng);
    Tensor wrong = Tensor::full({1, 1, 4}, 0.123);
    auto loss = [&] {
        double s = 0.0;
        for (double v : x.data) s += v * v;
        return s;
    };
    CHECK(grad_check(loss, {&x}, {&wrong}) > 0.1);
}

TEST_CASE("conv+elu+bn composite passes at 1e-4") {
    Rng rng(3);
    Tensor x = Tensor::randn({2, 2, 12}, rng);
    Tensor k = Tensor::randn({3, 2, 3}, rng, 0.0, 0.5);
    Tensor b = Tensor::randn({3}, rng, 0.0, 0.1);
    BatchNormState bn = BatchNormState::vanilla_init(3);
    Rng pr(4);
    bn.gamma = Tensor::randn({3}, pr, 1.0, 0.1);
    bn.beta = Tensor::randn({3}, pr, 0.0, 0.1);
    Tensor w = Tensor::randn({2, 3, 12}, rng);

    auto forward = [&](BnCache* cache, Tensor* conv_out, Tensor* elu_out) {
        Tensor c = conv1d(x, k, b);
        Tensor e = elu(c);
        BatchNormState local = bn;
        Tensor o = batch_norm(e, local, BnMode::train, cache);
        if (conv_out) *conv_out = c;
        if (elu_out) *elu_out = e;
        return o;
    };
    auto loss = [&] {
        Tensor o = forward(nullptr, nullptr, nullptr);
        double s = 0.0;
        for (std::size_t i = 0; i < o.data.size(); ++i) s += o.data[i] * w.data[i];
        return s;
    };

    BnCache cache;
    Tensor conv_out, elu_out;
    forward(&cache, &conv_out, &elu_out);
    BnGrads bng = batch_norm_backward(bn, cache, w);
    Tensor g_elu = elu_backward(elu_out, bng.input);
    ConvGrads cg = conv1d_backward(x, k, g_elu);

    double err = grad_check(loss, {&x, &k, &b, &bn.gamma, &bn.beta},
                            {&cg.input, &cg.kernel, &cg.bias, &bng.gamma, &bng.beta});
    CHECK(err < 1e-4);
}

TEST_CASE("softmax + cross-entropy composite passes at 1e-4") {
    Rng rng(5);
    Tensor logits = Tensor::randn({2, 5, 3}, rng);
    std::vector<int> targets{0, 3, 4, 1, 1, 2};  // per (b, t)

    auto loss = [&] {
        Tensor p = softmax(logits, 1);
        double s = 0.0;
        int n = 0;
        for (std::int64_t bt = 0; bt < 6; ++bt) {
            const std::int64_t b = bt / 3, t = bt % 3;
            s -= std::log(p.at3(b, targets[static_cast<std::size_t>(bt)], t));
            ++n;
        }
        return s / n;
    };

    // Analytic: d/dlogits = (p - onehot) / n
    Tensor p = softmax(logits, 1);
    Tensor g = Tensor::zeros(logits.shape);
    for (std::int64_t bt = 0; bt < 6; ++bt) {
        const std::int64_t b = bt / 3, t = bt % 3;
        for (std::int64_t c = 0; c < 5; ++c) {
            g.at3(b, c, t) = (p.at3(b, c, t) - (c == targets[static_cast<std::size_t>(bt)] ? 1.0 : 0.0)) / 6.0;
        }
    }
    CHECK(grad_check(loss, {&logits}, {&g}) < 1e-4);
}

TEST_CASE("subsampling probes only the requested element count") {
    Rng rng(6);
    Tensor x = Tensor::randn({1, 1, 100}, rng);
    Tensor g = x;  // d/dx of 0.5*sum(x^2) = x
    for (auto& v : g.data) v = v;
    int calls = 0;
    auto loss = [&] {
        ++calls;
        double s = 0.0;
        for (double v : x.data) s += 0.5 * v * v;
        return s;
    };
    double err = grad_check(loss, {&x}, {&g}, 1e-5, 10, 7);
    CHECK(err < 1e-8);
    CHECK(calls == 20);  // 10 elements, two evaluations each
}
