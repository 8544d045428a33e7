#include <cmath>
#include <vector>

#include "doctest.h"
#include "usleep/batchnorm.hpp"
#include "usleep/grad_check.hpp"

using namespace usleep;

namespace {

// Identity running stats so eval mode normalizes to the raw value; lets the
// per-group affine arithmetic be checked against hand evaluation.
BatchNormState eval_identity_state(BnVariant variant, std::int64_t groups) {
    BatchNormState s = variant == BnVariant::ccbn ? BatchNormState::ccbn_init(1, groups)
                       : variant == BnVariant::sabn ? BatchNormState::sabn_init(1, groups)
                                                    : BatchNormState::vanilla_init(1);
    s.epsilon = 0.0;
    return s;
}

}  // namespace

TEST_CASE("batch_norm normalizes {0,2} to {-1,+1}") {
    BatchNormState s = BatchNormState::vanilla_init(1);
    s.epsilon = 1e-12;
    Tensor in = Tensor::from({2, 1, 1}, {0.0, 2.0});
    Tensor out = batch_norm(in, s, BnMode::train);
    CHECK(out.data[0] == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(out.data[1] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("batch_norm is near-identity on a standardized batch") {
    Rng rng(1);
    Tensor in = Tensor::randn({4, 1, 32}, rng);
    // standardize exactly
    double m = 0.0;
    for (double v : in.data) m += v;
    m /= static_cast<double>(in.numel());
    double var = 0.0;
    for (double v : in.data) var += (v - m) * (v - m);
    var /= static_cast<double>(in.numel());
    for (auto& v : in.data) v = (v - m) / std::sqrt(var);

    BatchNormState s = BatchNormState::vanilla_init(1);
    Tensor out = batch_norm(in, s, BnMode::train);
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        CHECK(out.data[i] == doctest::Approx(in.data[i]).epsilon(1e-4));
    }
}

TEST_CASE("batch_norm gamma=0 beta=7 emits constant 7") {
    Rng rng(2);
    Tensor in = Tensor::randn({3, 2, 8}, rng);
    BatchNormState s = BatchNormState::vanilla_init(2);
    s.gamma = Tensor::zeros({2});
    s.beta = Tensor::full({2}, 7.0);
    Tensor out = batch_norm(in, s, BnMode::train);
    for (double v : out.data) CHECK(v == 7.0);
}

TEST_CASE("train-mode output is standardized per channel") {
    Rng rng(3);
    Tensor in = Tensor::randn({4, 3, 32}, rng, 5.0, 3.0);
    BatchNormState s = BatchNormState::vanilla_init(3);
    Tensor out = batch_norm(in, s, BnMode::train);
    const double n = 4 * 32;
    for (std::int64_t c = 0; c < 3; ++c) {
        double m = 0.0;
        for (std::int64_t b = 0; b < 4; ++b)
            for (std::int64_t t = 0; t < 32; ++t) m += out.at3(b, c, t);
        m /= n;
        double var = 0.0;
        for (std::int64_t b = 0; b < 4; ++b)
            for (std::int64_t t = 0; t < 32; ++t) var += (out.at3(b, c, t) - m) * (out.at3(b, c, t) - m);
        var /= n;
        CHECK(std::abs(m) < 1e-7);
        CHECK(std::abs(var - 1.0) < 1e-3);  // eps=1e-5 shifts variance slightly
    }
}

TEST_CASE("running statistics move by momentum and drive eval mode") {
    BatchNormState s = BatchNormState::vanilla_init(1);
    Tensor in = Tensor::from({2, 1, 1}, {0.0, 2.0});  // batch mean 1, var 1
    batch_norm(in, s, BnMode::train);
    CHECK(s.running_mean.data[0] == doctest::Approx(0.99 * 0.0 + 0.01 * 1.0));
    CHECK(s.running_var.data[0] == doctest::Approx(0.99 * 1.0 + 0.01 * 1.0));

    BatchNormState fixed = BatchNormState::vanilla_init(1);
    fixed.epsilon = 0.0;
    Tensor probe = Tensor::from({1, 1, 1}, {0.5});
    Tensor out = batch_norm(probe, fixed, BnMode::eval);
    CHECK(out.data[0] == 0.5);  // identity running stats
    CHECK(fixed.running_mean.data[0] == 0.0);  // eval never touches stats
}

TEST_CASE("batch_norm rejects zero batch and bad groups") {
    BatchNormState s = BatchNormState::ccbn_init(1, 2);
    Tensor in = Tensor::from({1, 1, 1}, {0.5});
    CHECK_THROWS_AS(batch_norm(in, s, BnMode::eval, std::vector<int>{2}), ContractViolation);
    CHECK_THROWS_AS(batch_norm(in, s, BnMode::eval, std::vector<int>{}), ContractViolation);
}

TEST_CASE("categorical BN applies the selected group affine") {
    BatchNormState s = eval_identity_state(BnVariant::ccbn, 2);
    s.gamma_g[0] = Tensor::full({1}, 2.0);
    s.beta_g[0] = Tensor::zeros({1});
    s.gamma_g[1] = Tensor::full({1}, 1.0);
    s.beta_g[1] = Tensor::full({1}, 1.0);

    Tensor in = Tensor::from({1, 1, 1}, {0.5});
    Tensor out0 = batch_norm(in, s, BnMode::eval, std::vector<int>{0});
    Tensor out1 = batch_norm(in, s, BnMode::eval, std::vector<int>{1});
    CHECK(out0.data[0] == 1.0);
    CHECK(out1.data[0] == 1.5);
}

TEST_CASE("categorical BN with G=1 reduces to vanilla") {
    Rng rng(4);
    Tensor in = Tensor::randn({3, 2, 16}, rng);
    BatchNormState cc = BatchNormState::ccbn_init(2, 1);
    BatchNormState va = BatchNormState::vanilla_init(2);
    Tensor a = batch_norm(in, cc, BnMode::train, std::vector<int>(3, 0));
    Tensor b = batch_norm(in, va, BnMode::train);
    CHECK(a.data == b.data);
}

TEST_CASE("categorical BN groups with identical affines agree") {
    Rng rng(5);
    Tensor in = Tensor::randn({2, 2, 8}, rng);
    BatchNormState s = BatchNormState::ccbn_init(2, 3);
    Tensor a = batch_norm(in, s, BnMode::train, std::vector<int>{0, 0});
    BatchNormState s2 = BatchNormState::ccbn_init(2, 3);
    Tensor b = batch_norm(in, s2, BnMode::train, std::vector<int>{2, 1});
    CHECK(a.data == b.data);
}

TEST_CASE("sandwich BN evaluates Eq-style cascade") {
    BatchNormState s = eval_identity_state(BnVariant::sabn, 1);
    s.gamma = Tensor::full({1}, 2.0);   // shared scale
    s.beta = Tensor::full({1}, 1.0);    // shared shift
    s.gamma_g[0] = Tensor::full({1}, 3.0);
    s.beta_g[0] = Tensor::full({1}, -1.0);
    Tensor in = Tensor::from({1, 1, 1}, {1.0});
    Tensor out = batch_norm(in, s, BnMode::eval, std::vector<int>{0});
    CHECK(out.data[0] == 8.0);  // 3*(2*1+1)-1
}

TEST_CASE("identity sandwich equals categorical BN bitwise") {
    Rng rng(6);
    Tensor in = Tensor::randn({4, 3, 16}, rng);
    BatchNormState sa = BatchNormState::sabn_init(3, 2);
    BatchNormState cc = BatchNormState::ccbn_init(3, 2);
    for (int g = 0; g < 2; ++g) {
        Rng pr(100 + g);
        sa.gamma_g[g] = Tensor::randn({3}, pr);
        sa.beta_g[g] = Tensor::randn({3}, pr);
        cc.gamma_g[g] = sa.gamma_g[g];
        cc.beta_g[g] = sa.beta_g[g];
    }
    std::vector<int> groups{0, 1, 1, 0};
    Tensor a = batch_norm(in, sa, BnMode::train, groups);
    Tensor b = batch_norm(in, cc, BnMode::train, groups);
    CHECK(a.data == b.data);
}

TEST_CASE("identity per-group sandwich equals vanilla with the shared pair") {
    Rng rng(7);
    Tensor in = Tensor::randn({2, 2, 8}, rng);
    BatchNormState sa = BatchNormState::sabn_init(2, 3);
    Rng pr(8);
    sa.gamma = Tensor::randn({2}, pr);
    sa.beta = Tensor::randn({2}, pr);

    BatchNormState va = BatchNormState::vanilla_init(2);
    va.gamma = sa.gamma;
    va.beta = sa.beta;

    Tensor a = batch_norm(in, sa, BnMode::train, std::vector<int>{1, 2});
    Tensor b = batch_norm(in, va, BnMode::train);
    CHECK(a.data == b.data);
}

TEST_CASE("finite differences confirm all three BN backward passes") {
    Rng rng(12);
    for (int trial = 0; trial < 3; ++trial) {
        Tensor x = Tensor::randn({3, 2, 6}, rng, 1.0, 2.0);
        Tensor w = Tensor::randn({3, 2, 6}, rng);
        std::vector<int> groups{0, 1, 0};

        auto weighted = [&](const Tensor& out) {
            double s = 0.0;
            for (std::size_t i = 0; i < out.data.size(); ++i) s += out.data[i] * w.data[i];
            return s;
        };

        // vanilla, train mode
        {
            BatchNormState s = BatchNormState::vanilla_init(2);
            Rng pr(20 + trial);
            s.gamma = Tensor::randn({2}, pr, 1.0, 0.2);
            s.beta = Tensor::randn({2}, pr);
            auto loss = [&] {
                BatchNormState local = s;
                return weighted(batch_norm(x, local, BnMode::train));
            };
            BatchNormState local = s;
            BnCache cache;
            batch_norm(x, local, BnMode::train, &cache);
            BnGrads g = batch_norm_backward(s, cache, w);
            CHECK(grad_check(loss, {&x, &s.gamma, &s.beta}, {&g.input, &g.gamma, &g.beta}) < 1e-6);
        }
        // ccbn, train mode with mixed groups
        {
            BatchNormState s = BatchNormState::ccbn_init(2, 2);
            Rng pr(40 + trial);
            for (int g = 0; g < 2; ++g) {
                s.gamma_g[g] = Tensor::randn({2}, pr, 1.0, 0.2);
                s.beta_g[g] = Tensor::randn({2}, pr);
            }
            auto loss = [&] {
                BatchNormState local = s;
                return weighted(batch_norm(x, local, BnMode::train, groups));
            };
            BatchNormState local = s;
            BnCache cache;
            batch_norm(x, local, BnMode::train, groups, &cache);
            BnGrads g = batch_norm_backward(s, cache, w);
            CHECK(grad_check(loss,
                             {&x, &s.gamma_g[0], &s.beta_g[0], &s.gamma_g[1], &s.beta_g[1]},
                             {&g.input, &g.gamma_g[0], &g.beta_g[0], &g.gamma_g[1], &g.beta_g[1]}) <
                  1e-6);
        }
        // sabn, train mode with mixed groups
        {
            BatchNormState s = BatchNormState::sabn_init(2, 2);
            Rng pr(60 + trial);
            s.gamma = Tensor::randn({2}, pr, 1.0, 0.2);
            s.beta = Tensor::randn({2}, pr);
            for (int g = 0; g < 2; ++g) {
                s.gamma_g[g] = Tensor::randn({2}, pr, 1.0, 0.2);
                s.beta_g[g] = Tensor::randn({2}, pr);
            }
            auto loss = [&] {
                BatchNormState local = s;
                return weighted(batch_norm(x, local, BnMode::train, groups));
            };
            BatchNormState local = s;
            BnCache cache;
            batch_norm(x, local, BnMode::train, groups, &cache);
            BnGrads g = batch_norm_backward(s, cache, w);
            CHECK(grad_check(loss,
                             {&x, &s.gamma, &s.beta, &s.gamma_g[0], &s.beta_g[0], &s.gamma_g[1],
                              &s.beta_g[1]},
                             {&g.input, &g.gamma, &g.beta, &g.gamma_g[0], &g.beta_g[0],
                              &g.gamma_g[1], &g.beta_g[1]}) < 1e-6);
        }
    }
}
