#include "usleep/adam.hpp"

#include <cmath>

namespace usleep {

void adam_step(NamedTensors& params, const NamedTensors& grads, AdamState& state) {
    require(state.beta1 > 0.0 && state.beta1 < 1.0, "adam: beta1 must be in (0,1)");
    require(state.beta2 > 0.0 && state.beta2 < 1.0, "adam: beta2 must be in (0,1)");

    for (const auto& [name, grad] : grads) {
        auto it = params.find(name);
        require(it != params.end(), "adam: gradient for unknown parameter '" + name + "'");
        require(grad.shape == it->second.shape, "adam: gradient shape mismatch for '" + name + "'");
        if (!grad.all_finite()) {
            throw ContractViolation("adam: non-finite gradient for parameter '" + name + "'");
        }
    }

    state.step_count += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step_count));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step_count));

    for (const auto& [name, grad] : grads) {
        Tensor& p = params.at(name);
        auto [m_it, m_new] = state.first_moment.try_emplace(name, Tensor::zeros(p.shape));
        auto [v_it, v_new] = state.second_moment.try_emplace(name, Tensor::zeros(p.shape));
        Tensor& m = m_it->second;
        Tensor& v = v_it->second;
        require(m.shape == p.shape, "adam: stale moment shape for '" + name + "'");

        for (std::size_t i = 0; i < p.data.size(); ++i) {
            const double g = grad.data[i];
            m.data[i] = state.beta1 * m.data[i] + (1.0 - state.beta1) * g;
            v.data[i] = state.beta2 * v.data[i] + (1.0 - state.beta2) * g * g;
            const double mhat = m.data[i] / bc1;
            const double vhat = v.data[i] / bc2;
            p.data[i] -= state.lr * mhat / (std::sqrt(vhat) + state.eps_adam);
        }
    }
}

}  // namespace usleep
