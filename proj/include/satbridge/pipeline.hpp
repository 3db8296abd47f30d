#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "satbridge/checkpoint.hpp"
#include "satbridge/oracle.hpp"

namespace satbridge {

// Line-delimited training metrics; replayable under a fixed seed.
struct MetricsLog {
    std::vector<std::string> lines;
    std::ostream* sink = nullptr;  // optional tee

    void record(const std::string& line);
};

struct EpochMetrics {
    int epoch = 0;
    double mean_loss = 0;            // classification part
    double mean_total_loss = 0;      // L_c + lambda * L_d (equal to mean_loss when no DA)
    double accuracy = 0;             // variable-label accuracy
    long optimizer_steps = 0;
};

struct TrainResult {
    Checkpoint checkpoint;
    std::vector<EpochMetrics> epochs;
};

// Supervised pre-training over labeled Max-SAT instances. Deterministic for
// a fixed config: per-epoch shuffling and parameter init derive from
// cfg.seed. Gradients are averaged over fixed-size instance groups before
// each optimizer step.
TrainResult pretrain(const std::vector<LabeledInstance>& dataset, const TrainConfig& cfg,
                     MetricsLog* log = nullptr);

struct DomainBatch {
    std::vector<LabeledInstance> source;
    std::vector<LabeledInstance> target;
};

// Domain-adversarial fine-tuning from a pre-trained checkpoint. The target
// head starts as a copy of the pre-trained classifier; the configured
// leading layers are frozen; source/target instances are mixed 1:1.
TrainResult finetune(const DomainBatch& batch, const Checkpoint& pretrained,
                     const TrainConfig& cfg, MetricsLog* log = nullptr);

// reduce -> lift -> forward -> sigmoid; one probability per graph node.
std::vector<double> predict(const Checkpoint& ckpt, const CoInstance& instance,
                            const ReduceOptions& opts = {});

// Variable-label accuracy of a checkpoint on labeled instances (threshold
// at logit 0), used by evaluation paths and tests.
double label_accuracy(const Checkpoint& ckpt, const std::vector<LabeledInstance>& dataset,
                      bool use_target_head = false);

}  // namespace satbridge
