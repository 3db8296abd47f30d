#pragma once

#include <vector>

#include "satbridge/model.hpp"

namespace satbridge {

// First/second moment buffers aligned with param_entries order.
struct AdamState {
    std::vector<Matrix> m, v;
    long step = 0;
};

AdamState init_adam(const ModelParams& params);

// Adam with beta = (0.9, 0.999), eps = 1e-8, decoupled weight decay and a
// linear warm-up on the learning rate: lr_eff = lr * min(1, (epoch+1)/warmup).
// Parameters whose names match the frozen set are left untouched when
// `apply_freezing` is set.
void adam_step(ModelParams& params, const std::vector<Matrix>& grads, AdamState& state,
               const TrainConfig& cfg, int epoch, bool apply_freezing = false);

}  // namespace satbridge
