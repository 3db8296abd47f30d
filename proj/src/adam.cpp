#include "satbridge/adam.hpp"

#include <cmath>

#include "satbridge/error.hpp"

namespace satbridge {

AdamState init_adam(const ModelParams& params) {
    AdamState s;
    for (const auto& [name, mat] : param_entries(params)) {
        s.m.emplace_back(mat->rows, mat->cols);
        s.v.emplace_back(mat->rows, mat->cols);
    }
    return s;
}

void adam_step(ModelParams& params, const std::vector<Matrix>& grads, AdamState& state,
               const TrainConfig& cfg, int epoch, bool apply_freezing) {
    auto entries = param_entries(params);
    if (grads.size() != entries.size() || state.m.size() != entries.size())
        throw ArgumentError("adam_step: gradient/state size mismatch");
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    const double lr_eff =
        cfg.lr * std::min(1.0, static_cast<double>(epoch + 1) / cfg.warmup_epochs);
    ++state.step;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));
    for (size_t t = 0; t < entries.size(); ++t) {
        Matrix* mat = entries[t].second;
        if (!grads[t].same_shape(*mat)) throw ArgumentError("adam_step: shape mismatch");
        if (apply_freezing && is_frozen_param(cfg, entries[t].first)) continue;
        for (size_t i = 0; i < mat->size(); ++i) {
            double g = grads[t].a[i];
            state.m[t].a[i] = beta1 * state.m[t].a[i] + (1.0 - beta1) * g;
            state.v[t].a[i] = beta2 * state.v[t].a[i] + (1.0 - beta2) * g * g;
            double mhat = state.m[t].a[i] / bc1;
            double vhat = state.v[t].a[i] / bc2;
            mat->a[i] -= lr_eff * (mhat / (std::sqrt(vhat) + eps) + cfg.weight_decay * mat->a[i]);
        }
    }
}

}  // namespace satbridge
