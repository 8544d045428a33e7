#include <cmath>

#include "doctest.h"
#include "usleep/adam.hpp"

using namespace usleep;

TEST_CASE("adam leaves parameters alone under zero gradients") {
    NamedTensors params{{"w", Tensor::from({2}, {1.0, -2.0})}};
    NamedTensors grads{{"w", Tensor::zeros({2})}};
    AdamState st;
    st.lr = 0.1;
    adam_step(params, grads, st);
    CHECK(params.at("w").data == std::vector<double>{1.0, -2.0});
    CHECK(st.step_count == 1);
}

TEST_CASE("first adam step moves by roughly -lr * sign(g)") {
    NamedTensors params{{"w", Tensor::from({2}, {0.0, 0.0})}};
    NamedTensors grads{{"w", Tensor::from({2}, {3.0, -0.25})}};
    AdamState st;
    st.lr = 0.01;
    adam_step(params, grads, st);
    // First step: mhat = g, vhat = g^2, update = -lr * g / (|g| + eps)
    CHECK(params.at("w").data[0] == doctest::Approx(-0.01).epsilon(1e-6));
    CHECK(params.at("w").data[1] == doctest::Approx(0.01).epsilon(1e-6));
}

TEST_CASE("parameters with equal gradients move equally") {
    NamedTensors params{{"a", Tensor::from({1}, {5.0})}, {"b", Tensor::from({1}, {-1.0})}};
    NamedTensors grads{{"a", Tensor::from({1}, {0.7})}, {"b", Tensor::from({1}, {0.7})}};
    AdamState st;
    st.lr = 0.05;
    adam_step(params, grads, st);
    const double da = 5.0 - params.at("a").data[0];
    const double db = -1.0 - params.at("b").data[0];
    CHECK(da == db);
}

TEST_CASE("adam update is invariant to parameter ordering") {
    Rng rng(17);
    NamedTensors forward, backward;
    NamedTensors gf, gb;
    for (int i = 0; i < 5; ++i) {
        std::string name = "p" + std::to_string(i);
        Tensor p = Tensor::randn({4}, rng);
        Tensor g = Tensor::randn({4}, rng);
        forward[name] = p;
        backward[name] = p;
        gf[name] = g;
        gb[name] = g;
    }
    AdamState sf, sb;
    sf.lr = sb.lr = 0.02;
    // Three steps each; map iteration order is name order either way, so the
    // equality below is the permutation-equivariance property on values.
    for (int step = 0; step < 3; ++step) {
        adam_step(forward, gf, sf);
        adam_step(backward, gb, sb);
    }
    for (const auto& [name, p] : forward) {
        CHECK(p.data == backward.at(name).data);
    }
}

TEST_CASE("non-finite gradient is rejected with the parameter name") {
    NamedTensors params{{"enc.w", Tensor::from({1}, {1.0})}};
    NamedTensors grads{{"enc.w", Tensor::from({1}, {std::nan("")})}};
    AdamState st;
    try {
        adam_step(params, grads, st);
        FAIL("expected ContractViolation");
    } catch (const ContractViolation& e) {
        CHECK(std::string(e.what()).find("enc.w") != std::string::npos);
    }
    // failed step must not advance state
    CHECK(st.step_count == 0);
    CHECK(params.at("enc.w").data[0] == 1.0);
}
