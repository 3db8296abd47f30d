#include "satbridge/model.hpp"

#include <algorithm>
#include <cmath>

#include "satbridge/error.hpp"

namespace satbridge {

void TrainConfig::validate() const {
    if (d < 1 || layers < 1 || heads < 1 || d_head < 1) throw ConfigError("dims must be positive");
    if (lr <= 0 || weight_decay < 0) throw ConfigError("lr must be positive, weight_decay >= 0");
    if (epochs_pretrain < 1 || epochs_finetune < 1 || warmup_epochs < 1)
        throw ConfigError("epoch counts must be positive");
    if (lambda < 0) throw ConfigError("lambda must be non-negative");
    if (frozen_layers < 0 || frozen_layers >= layers)
        throw ConfigError("frozen_layers must be in [0, layers)");
    if (batch_size < 1) throw ConfigError("batch_size must be positive");
    if (precision != "f64") throw ConfigError("only f64 precision is supported");
}

namespace {

MlpParams init_mlp(int in_width, int hidden, int out_width, Rng& rng) {
    MlpParams m;
    m.W1 = Matrix::glorot_uniform(hidden, in_width, rng);
    m.b1 = Matrix(1, hidden);
    m.W2 = Matrix::glorot_uniform(out_width, hidden, rng);
    m.b2 = Matrix(1, out_width);
    return m;
}

}  // namespace

ModelParams ModelParams::init(const TrainConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed);
    ModelParams p;
    p.cfg = cfg;
    const int d = cfg.d;
    p.var_init = init_mlp(cfg.attr_width(), d, d, rng);
    p.clause_init = init_mlp(cfg.attr_width(), d, d, rng);
    p.layers.resize(cfg.layers);
    for (auto& layer : p.layers) {
        for (AttentionSideParams* side : {&layer.clause_side, &layer.var_side}) {
            side->Wq.resize(cfg.heads);
            side->Wk.resize(cfg.heads);
            side->Wv.resize(cfg.heads);
            for (int h = 0; h < cfg.heads; ++h) {
                side->Wq[h] = Matrix::glorot_uniform(cfg.d_head, d, rng);
                side->Wk[h] = Matrix::glorot_uniform(cfg.d_head, d, rng);
                side->Wv[h] = Matrix::glorot_uniform(cfg.d_head, d, rng);
            }
            side->combine = init_mlp(d + cfg.heads * cfg.d_head, d, d, rng);
        }
        layer.polarity = Matrix::glorot_uniform(2, d, rng);
    }
    p.classifier = init_mlp(d, d, 1, rng);
    p.discriminator = init_mlp(d, d, 1, rng);
    return p;
}

namespace {

template <typename P, typename M>
void enumerate(P& p, std::vector<std::pair<std::string, M*>>& out) {
    auto mlp = [&out](const std::string& prefix, auto& m) {
        out.push_back({prefix + ".W1", &m.W1});
        out.push_back({prefix + ".b1", &m.b1});
        out.push_back({prefix + ".W2", &m.W2});
        out.push_back({prefix + ".b2", &m.b2});
    };
    mlp("var_init", p.var_init);
    mlp("clause_init", p.clause_init);
    for (size_t l = 0; l < p.layers.size(); ++l) {
        auto& layer = p.layers[l];
        std::string lp = "layer" + std::to_string(l);
        auto side = [&](const std::string& sp, auto& s) {
            for (size_t h = 0; h < s.Wq.size(); ++h) {
                std::string hp = lp + "." + sp + ".h" + std::to_string(h);
                out.push_back({hp + ".Wq", &s.Wq[h]});
                out.push_back({hp + ".Wk", &s.Wk[h]});
                out.push_back({hp + ".Wv", &s.Wv[h]});
            }
            mlp(lp + "." + sp + ".combine", s.combine);
        };
        side("clause", layer.clause_side);
        side("var", layer.var_side);
        out.push_back({lp + ".polarity", &layer.polarity});
    }
    mlp("classifier", p.classifier);
    if (p.has_target_head) mlp("target_head", p.target_head);
    mlp("dis", p.discriminator);
}

}  // namespace

std::vector<std::pair<std::string, Matrix*>> param_entries(ModelParams& p) {
    std::vector<std::pair<std::string, Matrix*>> out;
    enumerate(p, out);
    return out;
}

std::vector<std::pair<std::string, const Matrix*>> param_entries(const ModelParams& p) {
    std::vector<std::pair<std::string, const Matrix*>> out;
    enumerate(p, out);
    return out;
}

Tape::Id BoundModel::id_of(const std::string& name) const {
    for (size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return leaves[i];
    throw ArgumentError("unknown parameter: " + name);
}

BoundModel bind_model(Tape& tape, const ModelParams& params) {
    BoundModel b;
    b.params = &params;
    for (const auto& [name, mat] : param_entries(params)) {
        b.names.push_back(name);
        b.leaves.push_back(tape.leaf(*mat));
    }
    return b;
}

namespace {

struct MlpIds {
    Tape::Id W1, b1, W2, b2;
};

MlpIds mlp_ids(const BoundModel& b, const std::string& prefix) {
    return {b.id_of(prefix + ".W1"), b.id_of(prefix + ".b1"), b.id_of(prefix + ".W2"),
            b.id_of(prefix + ".b2")};
}

Tape::Id apply_mlp(Tape& t, const MlpIds& m, Tape::Id in) {
    Tape::Id h = t.tanh_op(t.add_rowvec(t.matmul_nt(in, m.W1), m.b1));
    return t.add_rowvec(t.matmul_nt(h, m.W2), m.b2);
}

Matrix raw_attributes(int n, const std::vector<int>& degrees, bool degree_channel) {
    Matrix raw(n, degree_channel ? 2 : 1, 1.0);
    if (degree_channel) {
        int max_deg = 1;
        for (int d : degrees) max_deg = std::max(max_deg, d);
        for (int i = 0; i < n; ++i) raw.at(i, 1) = static_cast<double>(degrees[i]) / max_deg;
    }
    return raw;
}

// One attention aggregation direction: updates `tgt` features from `src`
// features along the given edge index arrays.
Tape::Id aggregate(Tape& t, const BoundModel& b, const std::string& side_prefix, Tape::Id polarity,
                   Tape::Id tgt, Tape::Id src, const std::vector<int>& tgt_idx,
                   const std::vector<int>& src_idx, const std::vector<int>& pol_idx, int n_tgt,
                   int layer, bool clause_side, ForwardResult* record) {
    const TrainConfig& cfg = b.params->cfg;
    Tape::Id v_in = t.add(t.gather_rows(src, src_idx), t.gather_rows(polarity, pol_idx));
    Tape::Id messages = -1;
    for (int h = 0; h < cfg.heads; ++h) {
        std::string hp = side_prefix + ".h" + std::to_string(h);
        Tape::Id q = t.matmul_nt(tgt, b.id_of(hp + ".Wq"));
        Tape::Id k = t.matmul_nt(src, b.id_of(hp + ".Wk"));
        Tape::Id logits = t.edge_dot(q, k, tgt_idx, src_idx);
        Tape::Id alpha = t.segment_softmax(logits, tgt_idx, n_tgt);
        if (record)
            record->alphas.push_back({alpha, tgt_idx, n_tgt, layer, clause_side, h});
        Tape::Id v = t.matmul_nt(v_in, b.id_of(hp + ".Wv"));
        Tape::Id msg = t.weighted_segment_sum(alpha, v, tgt_idx, n_tgt);
        messages = (messages < 0) ? msg : t.concat_cols(messages, msg);
    }
    return apply_mlp(t, mlp_ids(b, side_prefix + ".combine"), t.concat_cols(tgt, messages));
}

}  // namespace

ForwardResult forward_model(Tape& tape, const BoundModel& bound, const BipartiteGraph& bg,
                            bool use_target_head, bool record_attention) {
    const ModelParams& p = *bound.params;
    const TrainConfig& cfg = p.cfg;
    if (use_target_head && !p.has_target_head) throw ArgumentError("model has no target head");

    std::vector<int> var_deg(bg.n_vars), clause_deg(bg.n_clauses);
    for (int v = 0; v < bg.n_vars; ++v) var_deg[v] = bg.var_degree(v);
    for (int c = 0; c < bg.n_clauses; ++c) clause_deg[c] = bg.clause_degree(c);

    std::vector<int> e_var, e_clause, e_pol;
    e_var.reserve(bg.edges.size());
    for (const auto& e : bg.edges) {
        e_var.push_back(e.var);
        e_clause.push_back(e.clause);
        e_pol.push_back(e.negated ? 1 : 0);
    }

    Tape::Id x_raw = tape.leaf(raw_attributes(bg.n_vars, var_deg, cfg.degree_channel));
    Tape::Id c_raw = tape.leaf(raw_attributes(bg.n_clauses, clause_deg, cfg.degree_channel));
    Tape::Id X = apply_mlp(tape, mlp_ids(bound, "var_init"), x_raw);
    Tape::Id C = apply_mlp(tape, mlp_ids(bound, "clause_init"), c_raw);

    ForwardResult result;
    ForwardResult* rec = record_attention ? &result : nullptr;
    for (int l = 0; l < cfg.layers; ++l) {
        std::string lp = "layer" + std::to_string(l);
        Tape::Id polarity = bound.id_of(lp + ".polarity");
        C = aggregate(tape, bound, lp + ".clause", polarity, C, X, e_clause, e_var, e_pol,
                      bg.n_clauses, l, true, rec);
        X = aggregate(tape, bound, lp + ".var", polarity, X, C, e_var, e_clause, e_pol, bg.n_vars,
                      l, false, rec);
        if (!tape.value(X).all_finite() || !tape.value(C).all_finite())
            throw NumericError("non-finite activation in layer " + std::to_string(l));
    }
    result.features = X;
    result.logits =
        apply_mlp(tape, mlp_ids(bound, use_target_head ? "target_head" : "classifier"), X);
    return result;
}

Tape::Id bce_loss(Tape& tape, Tape::Id logits, const std::vector<std::uint8_t>& labels,
                  const std::vector<int>& mask) {
    return tape.bce_with_logits_mean(logits, labels, mask);
}

Tape::Id domain_loss(Tape& tape, const BoundModel& bound, Tape::Id features_source,
                     Tape::Id features_target, double lambda) {
    MlpIds dis = mlp_ids(bound, "dis");
    Tape::Id zs = apply_mlp(tape, dis, tape.grad_scale(features_source, -lambda));
    Tape::Id zt = apply_mlp(tape, dis, tape.grad_scale(features_target, -lambda));
    // -E_S[log sigmoid(z)] - E_T[log(1 - sigmoid(z))]
    return tape.add(tape.softplus_mean(zs, -1.0), tape.softplus_mean(zt, 1.0));
}

bool is_frozen_param(const TrainConfig& cfg, const std::string& name) {
    if (name.rfind("var_init", 0) == 0 || name.rfind("clause_init", 0) == 0) return true;
    for (int l = 0; l < cfg.frozen_layers; ++l) {
        std::string lp = "layer" + std::to_string(l) + ".";
        if (name.rfind(lp, 0) == 0) return true;
    }
    return false;
}

namespace {

std::vector<int> all_vars_mask(int n) {
    std::vector<int> mask(n);
    for (int i = 0; i < n; ++i) mask[i] = i;
    return mask;
}

// Forward-only loss values for the finite-difference side.
struct LossParts {
    double classification = 0;  // L_c(source) [+ L_c(target) for FineTune]
    double domain = 0;
};

LossParts eval_losses(const ModelParams& params, GradCheckLoss kind, const GradCheckInput& in) {
    Tape tape;
    BoundModel bound = bind_model(tape, params);
    LossParts parts;
    ForwardResult src = forward_model(tape, bound, *in.source);
    parts.classification =
        tape.value(bce_loss(tape, src.logits, *in.source_labels, all_vars_mask(in.source->n_vars)))
            .a[0];
    if (kind == GradCheckLoss::FineTune) {
        ForwardResult tgt = forward_model(tape, bound, *in.target, params.has_target_head);
        parts.classification +=
            tape.value(
                    bce_loss(tape, tgt.logits, *in.target_labels, all_vars_mask(in.target->n_vars)))
                .a[0];
        parts.domain =
            tape.value(domain_loss(tape, bound, src.features, tgt.features, params.cfg.lambda))
                .a[0];
    }
    return parts;
}

}  // namespace

double grad_check(ModelParams& params, GradCheckLoss kind, const GradCheckInput& input) {
    if (!input.source || !input.source_labels) throw ArgumentError("grad_check: missing source");
    if (kind == GradCheckLoss::FineTune && (!input.target || !input.target_labels))
        throw ArgumentError("grad_check: missing target");

    // Analytic gradients via the tape.
    Tape tape;
    BoundModel bound = bind_model(tape, params);
    ForwardResult src = forward_model(tape, bound, *input.source);
    Tape::Id root = bce_loss(tape, src.logits, *input.source_labels,
                             all_vars_mask(input.source->n_vars));
    if (kind == GradCheckLoss::FineTune) {
        ForwardResult tgt =
            forward_model(tape, bound, *input.target, params.has_target_head);
        Tape::Id lct = bce_loss(tape, tgt.logits, *input.target_labels,
                                all_vars_mask(input.target->n_vars));
        Tape::Id ld = domain_loss(tape, bound, src.features, tgt.features, params.cfg.lambda);
        root = tape.add(tape.add(root, lct), ld);
    }
    tape.backward(root);

    const double step = 1e-5;
    const double lambda = params.cfg.lambda;
    double max_rel = 0.0;
    auto entries = param_entries(params);
    for (size_t t = 0; t < entries.size(); ++t) {
        Matrix* mat = entries[t].second;
        const bool is_dis = entries[t].first.rfind("dis", 0) == 0;
        const Matrix& analytic = tape.grad(bound.leaves[t]);
        for (size_t i = 0; i < mat->size(); ++i) {
            double saved = mat->a[i];
            mat->a[i] = saved + step;
            LossParts hi = eval_losses(params, kind, input);
            mat->a[i] = saved - step;
            LossParts lo = eval_losses(params, kind, input);
            mat->a[i] = saved;
            // the reversal contract: the backbone sees L_c - lambda*L_d,
            // the discriminator sees L_c + L_d
            double factor = is_dis ? 1.0 : -lambda;
            double fd = ((hi.classification + factor * hi.domain) -
                         (lo.classification + factor * lo.domain)) /
                        (2.0 * step);
            double a = analytic.a[i];
            double rel = std::fabs(a - fd) / std::max({std::fabs(a) + std::fabs(fd), 1e-3});
            max_rel = std::max(max_rel, rel);
        }
    }
    return max_rel;
}

}  // namespace satbridge
