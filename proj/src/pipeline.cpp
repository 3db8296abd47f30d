#include "satbridge/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "satbridge/error.hpp"
#include "satbridge/rng.hpp"

namespace satbridge {

void MetricsLog::record(const std::string& line) {
    lines.push_back(line);
    if (sink) (*sink) << line << '\n';
}

namespace {

std::string format_metrics(const char* stage, const EpochMetrics& m) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "stage=%s epoch=%d loss=%.17g total=%.17g acc=%.17g steps=%ld",
                  stage, m.epoch, m.mean_loss, m.mean_total_loss, m.accuracy, m.optimizer_steps);
    return buf;
}

std::vector<int> all_vars_mask(int n) {
    std::vector<int> mask(n);
    for (int i = 0; i < n; ++i) mask[i] = i;
    return mask;
}

void check_labels(const std::vector<LabeledInstance>& dataset) {
    for (const auto& inst : dataset) {
        if (static_cast<int>(inst.labels.size()) != inst.formula.n_vars)
            throw ArgumentError("labels length does not match n_vars");
        if (evaluate(inst.formula, inst.labels).hard_violations != 0)
            throw ArgumentError("instance labels violate hard clauses");
    }
}

std::vector<Matrix> zero_grads(ModelParams& params) {
    std::vector<Matrix> grads;
    for (const auto& [name, mat] : param_entries(params)) grads.emplace_back(mat->rows, mat->cols);
    return grads;
}

void accumulate_grads(std::vector<Matrix>& grads, const Tape& tape, const BoundModel& bound,
                      double scale) {
    for (size_t t = 0; t < grads.size(); ++t) {
        const Matrix& g = tape.grad(bound.leaves[t]);
        for (size_t i = 0; i < grads[t].size(); ++i) grads[t].a[i] += scale * g.a[i];
    }
}

struct InstanceStats {
    double loss = 0;
    int correct = 0;
    int total = 0;
};

InstanceStats count_accuracy(const Tape& tape, Tape::Id logits,
                             const std::vector<std::uint8_t>& labels) {
    InstanceStats s;
    const Matrix& z = tape.value(logits);
    for (int i = 0; i < z.rows; ++i) {
        bool pred = z.a[i] > 0.0;
        if (pred == (labels[i] != 0)) ++s.correct;
        ++s.total;
    }
    return s;
}

void shuffle(std::vector<int>& order, Rng& rng) {
    for (int i = static_cast<int>(order.size()) - 1; i > 0; --i)
        std::swap(order[i], order[rng.next_int(i + 1)]);
}

}  // namespace

TrainResult pretrain(const std::vector<LabeledInstance>& dataset, const TrainConfig& cfg,
                     MetricsLog* log) {
    cfg.validate();
    if (dataset.empty()) throw ArgumentError("pretrain: empty dataset");
    check_labels(dataset);

    TrainResult result;
    result.checkpoint.params = ModelParams::init(cfg);
    result.checkpoint.opt = init_adam(result.checkpoint.params);
    result.checkpoint.has_opt = true;
    ModelParams& params = result.checkpoint.params;
    AdamState& opt = result.checkpoint.opt;

    Rng shuffle_rng(split_seed(cfg.seed, 0x5u));
    std::vector<int> order(dataset.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);

    long steps = 0;
    for (int epoch = 0; epoch < cfg.epochs_pretrain; ++epoch) {
        shuffle(order, shuffle_rng);
        double loss_sum = 0;
        long correct = 0, total = 0;
        for (size_t pos = 0; pos < order.size();) {
            size_t group = std::min<size_t>(cfg.batch_size, order.size() - pos);
            std::vector<Matrix> grads = zero_grads(params);
            for (size_t g = 0; g < group; ++g, ++pos) {
                const LabeledInstance& inst = dataset[order[pos]];
                Tape tape;
                BoundModel bound = bind_model(tape, params);
                ForwardResult fwd = forward_model(tape, bound, inst.bipartite);
                Tape::Id loss = bce_loss(tape, fwd.logits, inst.labels,
                                         all_vars_mask(inst.bipartite.n_vars));
                double loss_value = tape.value(loss).a[0];
                if (!std::isfinite(loss_value))
                    throw NumericError("pretrain: non-finite loss at epoch " +
                                       std::to_string(epoch));
                tape.backward(loss);
                accumulate_grads(grads, tape, bound, 1.0 / static_cast<double>(group));
                loss_sum += loss_value;
                InstanceStats s = count_accuracy(tape, fwd.logits, inst.labels);
                correct += s.correct;
                total += s.total;
            }
            adam_step(params, grads, opt, cfg, epoch);
            ++steps;
        }
        EpochMetrics m;
        m.epoch = epoch;
        m.mean_loss = loss_sum / static_cast<double>(dataset.size());
        m.mean_total_loss = m.mean_loss;
        m.accuracy = total ? static_cast<double>(correct) / total : 0.0;
        m.optimizer_steps = steps;
        result.epochs.push_back(m);
        if (log) log->record(format_metrics("pretrain", m));
    }
    result.checkpoint.rng_state = shuffle_rng.state();
    return result;
}

TrainResult finetune(const DomainBatch& batch, const Checkpoint& pretrained,
                     const TrainConfig& cfg, MetricsLog* log) {
    cfg.validate();
    if (batch.source.empty() || batch.target.empty())
        throw ArgumentError("finetune: source and target must be non-empty");
    check_labels(batch.source);
    if (!cfg.unsupervised_target) check_labels(batch.target);
    const TrainConfig& pcfg = pretrained.params.cfg;
    if (pcfg.d != cfg.d || pcfg.layers != cfg.layers || pcfg.heads != cfg.heads ||
        pcfg.d_head != cfg.d_head || pcfg.degree_channel != cfg.degree_channel)
        throw ConfigError("finetune: checkpoint incompatible with config");

    TrainResult result;
    result.checkpoint.params = pretrained.params;
    result.checkpoint.params.cfg = cfg;
    ModelParams& params = result.checkpoint.params;
    if (!params.has_target_head) {
        params.has_target_head = true;
        params.target_head = params.classifier;  // copy of the pre-trained head
    }
    result.checkpoint.opt = init_adam(params);
    result.checkpoint.has_opt = true;
    AdamState& opt = result.checkpoint.opt;

    Rng shuffle_rng(split_seed(cfg.seed, 0x6u));
    std::vector<int> src_order(batch.source.size()), tgt_order(batch.target.size());
    for (size_t i = 0; i < src_order.size(); ++i) src_order[i] = static_cast<int>(i);
    for (size_t i = 0; i < tgt_order.size(); ++i) tgt_order[i] = static_cast<int>(i);
    const size_t pairs = std::max(batch.source.size(), batch.target.size());

    long steps = 0;
    for (int epoch = 0; epoch < cfg.epochs_finetune; ++epoch) {
        shuffle(src_order, shuffle_rng);
        shuffle(tgt_order, shuffle_rng);
        double cls_sum = 0, total_sum = 0;
        long correct = 0, total = 0;
        for (size_t pos = 0; pos < pairs;) {
            size_t group = std::min<size_t>(cfg.batch_size, pairs - pos);
            std::vector<Matrix> grads = zero_grads(params);
            for (size_t g = 0; g < group; ++g, ++pos) {
                const LabeledInstance& src = batch.source[src_order[pos % src_order.size()]];
                const LabeledInstance& tgt = batch.target[tgt_order[pos % tgt_order.size()]];
                Tape tape;
                BoundModel bound = bind_model(tape, params);
                ForwardResult sf = forward_model(tape, bound, src.bipartite);
                ForwardResult tf = forward_model(tape, bound, tgt.bipartite, /*target head*/ true);
                Tape::Id root = bce_loss(tape, sf.logits, src.labels,
                                         all_vars_mask(src.bipartite.n_vars));
                double cls = tape.value(root).a[0];
                if (!cfg.unsupervised_target) {
                    Tape::Id lc_t = bce_loss(tape, tf.logits, tgt.labels,
                                             all_vars_mask(tgt.bipartite.n_vars));
                    cls += tape.value(lc_t).a[0];
                    root = tape.add(root, lc_t);
                }
                Tape::Id ld = domain_loss(tape, bound, sf.features, tf.features, cfg.lambda);
                double ld_value = tape.value(ld).a[0];
                root = tape.add(root, ld);
                tape.backward(root);
                double total_loss = cls + cfg.lambda * ld_value;
                if (!std::isfinite(total_loss))
                    throw NumericError("finetune: non-finite loss at epoch " +
                                       std::to_string(epoch));
                accumulate_grads(grads, tape, bound, 1.0 / static_cast<double>(group));
                cls_sum += cls;
                total_sum += total_loss;
                if (!cfg.unsupervised_target) {
                    InstanceStats s = count_accuracy(tape, tf.logits, tgt.labels);
                    correct += s.correct;
                    total += s.total;
                }
            }
            adam_step(params, grads, opt, cfg, epoch, /*apply_freezing=*/true);
            ++steps;
        }
        EpochMetrics m;
        m.epoch = epoch;
        m.mean_loss = cls_sum / static_cast<double>(pairs);
        m.mean_total_loss = total_sum / static_cast<double>(pairs);
        m.accuracy = total ? static_cast<double>(correct) / total : 0.0;
        m.optimizer_steps = steps;
        result.epochs.push_back(m);
        if (log) log->record(format_metrics("finetune", m));
    }
    result.checkpoint.rng_state = shuffle_rng.state();
    return result;
}

std::vector<double> predict(const Checkpoint& ckpt, const CoInstance& instance,
                            const ReduceOptions& opts) {
    Formula f = reduce_to_maxsat(instance, opts);
    BipartiteGraph bg = build_bipartite(f, ckpt.params.cfg.polarity_edges);
    Tape tape;
    BoundModel bound = bind_model(tape, ckpt.params);
    ForwardResult fwd = forward_model(tape, bound, bg, ckpt.params.has_target_head);
    const Matrix& z = tape.value(fwd.logits);
    std::vector<double> probs(z.rows);
    for (int i = 0; i < z.rows; ++i) probs[i] = 1.0 / (1.0 + std::exp(-z.a[i]));
    return probs;
}

double label_accuracy(const Checkpoint& ckpt, const std::vector<LabeledInstance>& dataset,
                      bool use_target_head) {
    long correct = 0, total = 0;
    for (const auto& inst : dataset) {
        Tape tape;
        BoundModel bound = bind_model(tape, ckpt.params);
        ForwardResult fwd = forward_model(tape, bound, inst.bipartite,
                                          use_target_head && ckpt.params.has_target_head);
        InstanceStats s = count_accuracy(tape, fwd.logits, inst.labels);
        correct += s.correct;
        total += s.total;
    }
    return total ? static_cast<double>(correct) / total : 0.0;
}

}  // namespace satbridge
