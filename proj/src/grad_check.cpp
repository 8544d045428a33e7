#include "usleep/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace usleep {

double grad_check(const std::function<double()>& loss, const std::vector<Tensor*>& inputs,
                  const std::vector<const Tensor*>& analytic, double h,
                  std::int64_t max_elements_per_tensor, std::uint64_t subsample_seed) {
    require(inputs.size() == analytic.size(), "grad_check: inputs/analytic size mismatch");
    double max_rel = 0.0;
    Rng rng(subsample_seed);

    for (std::size_t i = 0; i < inputs.size(); ++i) {
        Tensor& x = *inputs[i];
        const Tensor& g = *analytic[i];
        require(x.shape == g.shape, "grad_check: gradient shape mismatch at input " + std::to_string(i));

        std::vector<std::size_t> idx(x.data.size());
        std::iota(idx.begin(), idx.end(), 0);
        if (max_elements_per_tensor > 0 &&
            static_cast<std::int64_t>(idx.size()) > max_elements_per_tensor) {
            std::shuffle(idx.begin(), idx.end(), rng);
            idx.resize(static_cast<std::size_t>(max_elements_per_tensor));
        }

        for (std::size_t j : idx) {
            const double orig = x.data[j];
            x.data[j] = orig + h;
            const double up = loss();
            x.data[j] = orig - h;
            const double down = loss();
            x.data[j] = orig;

            const double numeric = (up - down) / (2.0 * h);
            const double a = g.data[j];
            const double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-8});
            max_rel = std::max(max_rel, rel);
        }
    }
    return max_rel;
}

}  // namespace usleep
