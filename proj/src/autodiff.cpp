#include "satbridge/autodiff.hpp"

#include <algorithm>
#include <cmath>

namespace satbridge {

Tape::Id Tape::push(Matrix value, std::function<void(Tape&)> backward) {
    Node n;
    n.grad = Matrix(value.rows, value.cols);
    n.value = std::move(value);
    n.backward = std::move(backward);
    nodes_.push_back(std::move(n));
    return static_cast<Id>(nodes_.size() - 1);
}

Tape::Id Tape::leaf(Matrix value) { return push(std::move(value), nullptr); }

void Tape::backward(Id scalar_id) {
    if (nodes_[scalar_id].value.size() != 1) throw ArgumentError("backward root must be scalar");
    if (backward_done_)
        throw ArgumentError("backward already ran on this tape; sum roots into one scalar");
    backward_done_ = true;
    nodes_[scalar_id].grad.a[0] += 1.0;
    for (Id i = scalar_id; i >= 0; --i)
        if (nodes_[i].backward) nodes_[i].backward(*this);
}

Tape::Id Tape::matmul_nt(Id a, Id b) {
    const Matrix& A = value(a);
    const Matrix& B = value(b);
    if (A.cols != B.cols) throw ArgumentError("matmul_nt: inner dimensions differ");
    Matrix out(A.rows, B.rows);
    for (int i = 0; i < A.rows; ++i)
        for (int j = 0; j < B.rows; ++j) {
            double s = 0.0;
            const double* ar = &A.a[static_cast<size_t>(i) * A.cols];
            const double* br = &B.a[static_cast<size_t>(j) * B.cols];
            for (int k = 0; k < A.cols; ++k) s += ar[k] * br[k];
            out.at(i, j) = s;
        }
    Id id = push(std::move(out), nullptr);
    nodes_[id].backward = [a, b, id](Tape& t) {
        const Matrix& G = t.grad(id);
        const Matrix& A = t.value(a);
        const Matrix& B = t.value(b);
        Matrix& dA = t.mutable_grad(a);
        Matrix& dB = t.mutable_grad(b);
        // dA = G * B ; dB = G^T * A
        for (int i = 0; i < A.rows; ++i)
            for (int j = 0; j < B.rows; ++j) {
                double g = G.at(i, j);
                if (g == 0.0) continue;
                for (int k = 0; k < A.cols; ++k) {
                    dA.at(i, k) += g * B.at(j, k);
                    dB.at(j, k) += g * A.at(i, k);
                }
            }
    };
    return id;
}

Tape::Id Tape::add(Id a, Id b) {
    const Matrix& A = value(a);
    const Matrix& B = value(b);
    if (!A.same_shape(B)) throw ArgumentError("add: shape mismatch");
    Matrix out = A;
    for (size_t i = 0; i < out.size(); ++i) out.a[i] += B.a[i];
    Id id = push(std::move(out), nullptr);
    nodes_[id].backward = [a, b, id](Tape& t) {
        const Matrix& G = t.grad(id);
        Matrix& dA = t.mutable_grad(a);
        Matrix& dB = t.mutable_grad(b);
        for (size_t i = 0; i < G.size(); ++i) {
            dA.a[i] += G.a[i];
            dB.a[i] += G.a[i];
        }
    };
    return id;
}

Tape::Id Tape::add_rowvec(Id a, Id bias) {
    const Matrix& A = value(a);
    const Matrix& B = value(bias);
    if (B.rows != 1 || B.cols != A.cols) throw ArgumentError("add_rowvec: bias shape mismatch");
    Matrix out = A;
    for (int i = 0; i < A.rows; ++i)
        for (int j = 0; j < A.cols; ++j) out.at(i, j) += B.at(0, j);
    Id id = push(std::move(out), nullptr);
    nodes_[id].backward = [a, bias, id](Tape& t) {
        const Matrix& G = t.grad(id);
        Matrix& dA = t.mutable_grad(a);
        Matrix& dB = t.mutable_grad(bias);
        for (int i = 0; i < G.rows; ++i)
            for (int j = 0; j < G.cols; ++j) {
                dA.at(i, j) += G.at(i, j);
                dB.at(0, j) += G.at(i, j);
            }
    };
    return id;
}

Tape::Id Tape::tanh_op(Id a) {
    Matrix out = value(a);
    for (auto& v : out.a) v = std::tanh(v);
    Id id = push(std::move(out), nullptr);
    nodes_[id].backward = [a, id](Tape& t) {
        const Matrix& G = t.grad(id);
        const Matrix& Y = t.value(id);
        Matrix& dA = t.mutable_grad(a);
        for (size_t i = 0; i < G.size(); ++i) dA.a[i] += G.a[i] * (1.0 - Y.a[i] * Y.a[i]);
    };
    return id;
}

Tape::Id Tape::scale(Id a, double s) {
    Matrix out = value(a);
    for (auto& v : out.a) v *= s;
    Id id = push(std::move(out), nullptr);
    nodes_[id].backward = [a, s, id](Tape& t) {
        const Matrix& G = t.grad(id);
        Matrix& dA = t.mutable_grad(a);
        for (size_t i = 0; i < G.size(); ++i) dA.a[i] += s * G.a[i];
    };
    return id;
}

Tape::Id Tape::concat_cols(Id a, Id b) {
    const Matrix& A = value(a);
    const Matrix& B = value(b);
    if (A.rows != B.rows) throw ArgumentError("concat_cols: row mismatch");
    Matrix out(A.rows, A.cols + B.cols);
    for (int i = 0; i < A.rows; ++i) {
        for (int j = 0; j < A.cols; ++j) out.at(i, j) = A.at(i, j);
        for (int j = 0; j < B.cols; ++j) out.at(i, A.cols + j) = B.at(i, j);
    }
    Id id = push(std::move(out), nullptr);
    int acols = A.cols, bcols = B.cols;
    nodes_[id].backward = [a, b, acols, bcols, id](Tape& t) {
        const Matrix& G = t.grad(id);
        Matrix& dA = t.mutable_grad(a);
        Matrix& dB = t.mutable_grad(b);
        for (int i = 0; i < G.rows; ++i) {
            for (int j = 0; j < acols; ++j) dA.at(i, j) += G.at(i, j);
            for (int j = 0; j < bcols; ++j) dB.at(i, j) += G.at(i, acols + j);
        }
    };
    return id;
}

Tape::Id Tape::gather_rows(Id a, std::vector<int> idx) {
    const Matrix& A = value(a);
    Matrix out(static_cast<int>(idx.size()), A.cols);
    for (size_t e = 0; e < idx.size(); ++e)
        for (int j = 0; j < A.cols; ++j) out.at(static_cast<int>(e), j) = A.at(idx[e], j);
    Id id = push(std::move(out), nullptr);
    nodes_[id].backward = [a, idx = std::move(idx), id](Tape& t) {
        const Matrix& G = t.grad(id);
        Matrix& dA = t.mutable_grad(a);
        for (size_t e = 0; e < idx.size(); ++e)
            for (int j = 0; j < G.cols; ++j) dA.at(idx[e], j) += G.at(static_cast<int>(e), j);
    };
    return id;
}

Tape::Id Tape::edge_dot(Id a, Id b, std::vector<int> ai, std::vector<int> bi) {
    const Matrix& A = value(a);
    const Matrix& B = value(b);
    if (A.cols != B.cols || ai.size() != bi.size()) throw ArgumentError("edge_dot: shape mismatch");
    Matrix out(static_cast<int>(ai.size()), 1);
    for (size_t e = 0; e < ai.size(); ++e) {
        double s = 0.0;
        for (int k = 0; k < A.cols; ++k) s += A.at(ai[e], k) * B.at(bi[e], k);
        out.a[e] = s;
    }
    Id id = push(std::move(out), nullptr);
    nodes_[id].backward = [a, b, ai = std::move(ai), bi = std::move(bi), id](Tape& t) {
        const Matrix& G = t.grad(id);
        const Matrix& A = t.value(a);
        const Matrix& B = t.value(b);
        Matrix& dA = t.mutable_grad(a);
        Matrix& dB = t.mutable_grad(b);
        for (size_t e = 0; e < ai.size(); ++e) {
            double g = G.a[e];
            if (g == 0.0) continue;
            for (int k = 0; k < A.cols; ++k) {
                dA.at(ai[e], k) += g * B.at(bi[e], k);
                dB.at(bi[e], k) += g * A.at(ai[e], k);
            }
        }
    };
    return id;
}

Tape::Id Tape::segment_softmax(Id logits, std::vector<int> seg, int n_seg) {
    const Matrix& Z = value(logits);
    if (Z.cols != 1 || Z.rows != static_cast<int>(seg.size()))
        throw ArgumentError("segment_softmax: shape mismatch");
    std::vector<double> seg_max(n_seg, -1e300), seg_sum(n_seg, 0.0);
    for (size_t e = 0; e < seg.size(); ++e) seg_max[seg[e]] = std::max(seg_max[seg[e]], Z.a[e]);
    Matrix out(Z.rows, 1);
    for (size_t e = 0; e < seg.size(); ++e) {
        out.a[e] = std::exp(Z.a[e] - seg_max[seg[e]]);
        seg_sum[seg[e]] += out.a[e];
    }
    for (size_t e = 0; e < seg.size(); ++e) out.a[e] /= seg_sum[seg[e]];
    Id id = push(std::move(out), nullptr);
    nodes_[id].backward = [logits, seg = std::move(seg), n_seg, id](Tape& t) {
        const Matrix& G = t.grad(id);
        const Matrix& Y = t.value(id);
        Matrix& dZ = t.mutable_grad(logits);
        std::vector<double> seg_dot(n_seg, 0.0);
        for (size_t e = 0; e < seg.size(); ++e) seg_dot[seg[e]] += G.a[e] * Y.a[e];
        for (size_t e = 0; e < seg.size(); ++e) dZ.a[e] += Y.a[e] * (G.a[e] - seg_dot[seg[e]]);
    };
    return id;
}

Tape::Id Tape::weighted_segment_sum(Id alpha, Id v_rows, std::vector<int> seg, int n_seg) {
    const Matrix& W = value(alpha);
    const Matrix& V = value(v_rows);
    if (W.cols != 1 || W.rows != V.rows || W.rows != static_cast<int>(seg.size()))
        throw ArgumentError("weighted_segment_sum: shape mismatch");
    Matrix out(n_seg, V.cols);
    for (size_t e = 0; e < seg.size(); ++e)
        for (int j = 0; j < V.cols; ++j) out.at(seg[e], j) += W.a[e] * V.at(static_cast<int>(e), j);
    Id id = push(std::move(out), nullptr);
    nodes_[id].backward = [alpha, v_rows, seg = std::move(seg), id](Tape& t) {
        const Matrix& G = t.grad(id);
        const Matrix& W = t.value(alpha);
        const Matrix& V = t.value(v_rows);
        Matrix& dW = t.mutable_grad(alpha);
        Matrix& dV = t.mutable_grad(v_rows);
        for (size_t e = 0; e < seg.size(); ++e) {
            double dot = 0.0;
            for (int j = 0; j < V.cols; ++j) {
                double g = G.at(seg[e], j);
                dot += g * V.at(static_cast<int>(e), j);
                dV.at(static_cast<int>(e), j) += W.a[e] * g;
            }
            dW.a[e] += dot;
        }
    };
    return id;
}

Tape::Id Tape::grad_scale(Id a, double s) {
    Matrix out = value(a);
    Id id = push(std::move(out), nullptr);
    nodes_[id].backward = [a, s, id](Tape& t) {
        const Matrix& G = t.grad(id);
        Matrix& dA = t.mutable_grad(a);
        for (size_t i = 0; i < G.size(); ++i) dA.a[i] += s * G.a[i];
    };
    return id;
}

Tape::Id Tape::bce_with_logits_mean(Id logits, const std::vector<std::uint8_t>& labels,
                                    const std::vector<int>& mask) {
    const Matrix& Z = value(logits);
    if (Z.cols != 1) throw ArgumentError("bce: logits must be a column");
    if (Z.rows != static_cast<int>(labels.size())) throw ArgumentError("bce: label length mismatch");
    if (mask.empty()) throw ArgumentError("bce: empty mask");
    double loss = 0.0;
    for (int i : mask) {
        double z = Z.a[i];
        double y = labels[i] ? 1.0 : 0.0;
        // max(z,0) - z*y + log(1 + exp(-|z|))
        loss += std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::fabs(z)));
    }
    loss /= static_cast<double>(mask.size());
    Matrix out(1, 1);
    out.a[0] = loss;
    Id id = push(std::move(out), nullptr);
    nodes_[id].backward = [logits, labels, mask, id](Tape& t) {
        double g = t.grad(id).a[0] / static_cast<double>(mask.size());
        const Matrix& Z = t.value(logits);
        Matrix& dZ = t.mutable_grad(logits);
        for (int i : mask) {
            double sig = 1.0 / (1.0 + std::exp(-Z.a[i]));
            dZ.a[i] += g * (sig - (labels[i] ? 1.0 : 0.0));
        }
    };
    return id;
}

Tape::Id Tape::softplus_mean(Id logits, double sign) {
    const Matrix& Z = value(logits);
    if (Z.cols != 1 || Z.rows == 0) throw ArgumentError("softplus_mean: non-empty column required");
    double loss = 0.0;
    for (int i = 0; i < Z.rows; ++i) {
        double z = sign * Z.a[i];
        loss += std::max(z, 0.0) + std::log1p(std::exp(-std::fabs(z)));
    }
    loss /= static_cast<double>(Z.rows);
    Matrix out(1, 1);
    out.a[0] = loss;
    Id id = push(std::move(out), nullptr);
    nodes_[id].backward = [logits, sign, id](Tape& t) {
        double g = t.grad(id).a[0] / static_cast<double>(t.value(logits).rows);
        const Matrix& Z = t.value(logits);
        Matrix& dZ = t.mutable_grad(logits);
        for (int i = 0; i < Z.rows; ++i) {
            double sig = 1.0 / (1.0 + std::exp(-sign * Z.a[i]));
            dZ.a[i] += g * sign * sig;
        }
    };
    return id;
}

}  // namespace satbridge
