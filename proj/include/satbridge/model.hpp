#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "satbridge/autodiff.hpp"
#include "satbridge/reduce.hpp"
#include "satbridge/tensor.hpp"

namespace satbridge {

struct TrainConfig {
    int d = 128;
    int layers = 5;
    int heads = 8;
    int d_head = 16;
    double lr = 1e-5;
    double weight_decay = 1e-10;
    int epochs_pretrain = 400;
    int epochs_finetune = 100;
    int warmup_epochs = 10;
    double lambda = 0.2;
    int frozen_layers = 2;
    std::uint64_t seed = 0;
    std::string precision = "f64";
    int batch_size = 8;
    bool degree_channel = true;   // off reproduces the all-ones-only init
    bool polarity_edges = true;
    bool unsupervised_target = false;  // drop the target classification loss

    int attr_width() const { return degree_channel ? 2 : 1; }
    void validate() const;
};

struct MlpParams {
    Matrix W1, b1, W2, b2;  // out = W2 * tanh(W1 * in + b1) + b2
};

struct AttentionSideParams {
    std::vector<Matrix> Wq, Wk, Wv;  // per head, d_head x d
    MlpParams combine;               // (d + heads*d_head) -> d
};

struct AttentionLayerParams {
    AttentionSideParams clause_side, var_side;
    Matrix polarity;  // 2 x d, rows: positive / negated literal offset
};

struct ModelParams {
    TrainConfig cfg;
    MlpParams var_init, clause_init;
    std::vector<AttentionLayerParams> layers;
    MlpParams classifier;   // source head
    MlpParams target_head;  // valid iff has_target_head
    bool has_target_head = false;
    MlpParams discriminator;

    static ModelParams init(const TrainConfig& cfg);
};

// Stable enumeration of every learnable tensor; the same order backs the
// optimizer state, checkpoint layout, and gradient collection.
std::vector<std::pair<std::string, Matrix*>> param_entries(ModelParams& p);
std::vector<std::pair<std::string, const Matrix*>> param_entries(const ModelParams& p);

// Tape leaves for one training step, in param_entries order.
struct BoundModel {
    std::vector<Tape::Id> leaves;             // aligned with param_entries
    std::vector<std::string> names;
    const ModelParams* params = nullptr;

    Tape::Id id_of(const std::string& name) const;
};

BoundModel bind_model(Tape& tape, const ModelParams& params);

struct ForwardResult {
    Tape::Id logits = -1;    // n x 1
    Tape::Id features = -1;  // n x d, final variable features
    struct AlphaInfo {
        Tape::Id alpha;        // per-edge attention weight column
        std::vector<int> seg;  // owning target node per edge
        int n_seg;
        int layer;
        bool clause_side;
        int head;
    };
    std::vector<AlphaInfo> alphas;  // filled when record_attention
};

// L alternating rounds of clause-wise then variable-wise aggregation on top
// of the init MLPs, then the classifier head.
ForwardResult forward_model(Tape& tape, const BoundModel& bound, const BipartiteGraph& bg,
                            bool use_target_head = false, bool record_attention = false);

// Mean BCE of sigmoid(logits) against labels over the masked variables.
Tape::Id bce_loss(Tape& tape, Tape::Id logits, const std::vector<std::uint8_t>& labels,
                  const std::vector<int>& mask);

// Domain-adversarial loss -E_S[log Dis] - E_T[log(1-Dis)]. Features reach
// the discriminator through a gradient-reversal node scaled by lambda, so
// backward() gives the discriminator the true gradient and the feature
// extractor -lambda times it.
Tape::Id domain_loss(Tape& tape, const BoundModel& bound, Tape::Id features_source,
                     Tape::Id features_target, double lambda);

enum class GradCheckLoss { Bce, FineTune };

struct GradCheckInput {
    const BipartiteGraph* source = nullptr;
    const std::vector<std::uint8_t>* source_labels = nullptr;
    const BipartiteGraph* target = nullptr;  // FineTune only
    const std::vector<std::uint8_t>* target_labels = nullptr;
};

// Compares the tape gradient of the selected loss against central finite
// differences (step 1e-5) for every parameter element; returns the max
// relative error. The finite-difference side accounts for the
// gradient-reversal contract (the backbone's pseudo-objective subtracts
// lambda times the domain loss; the discriminator's adds it).
double grad_check(ModelParams& params, GradCheckLoss kind, const GradCheckInput& input);

// Parameter names frozen during fine-tuning: the init MLPs plus the first
// cfg.frozen_layers attention layers.
bool is_frozen_param(const TrainConfig& cfg, const std::string& name);

}  // namespace satbridge
