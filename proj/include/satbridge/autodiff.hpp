#pragma once

#include <functional>
#include <vector>

#include "satbridge/tensor.hpp"

namespace satbridge {

// Reverse-mode tape over Matrix values. Every operation stores an explicit
// adjoint closure; backward() replays them in reverse creation order.
class Tape {
public:
    using Id = int;

    Id leaf(Matrix value);

    const Matrix& value(Id id) const { return nodes_[id].value; }
    const Matrix& grad(Id id) const { return nodes_[id].grad; }
    Matrix& mutable_grad(Id id) { return nodes_[id].grad; }

    // Seeds d(scalar)/d(scalar) = 1 and accumulates into every grad. One
    // call per tape: sum multiple loss terms into a single scalar root.
    void backward(Id scalar_id);

    // ---- operations ----
    Id matmul_nt(Id a, Id b);  // A (r x k) times B^T, B is (c x k)
    Id add(Id a, Id b);        // elementwise, same shape
    Id add_rowvec(Id a, Id bias);  // bias is 1 x cols, broadcast over rows
    Id tanh_op(Id a);
    Id scale(Id a, double s);
    Id concat_cols(Id a, Id b);
    Id gather_rows(Id a, std::vector<int> idx);
    // Per-edge dot products <A[ai[e]], B[bi[e]]> -> E x 1.
    Id edge_dot(Id a, Id b, std::vector<int> ai, std::vector<int> bi);
    // Softmax of logits (E x 1) within segments given by seg (values in
    // [0, n_seg)). Every segment must be non-empty where referenced.
    Id segment_softmax(Id logits, std::vector<int> seg, int n_seg);
    // out[s] = sum over edges e with seg[e]==s of alpha[e] * v_rows[e].
    Id weighted_segment_sum(Id alpha, Id v_rows, std::vector<int> seg, int n_seg);
    // Identity forward; multiplies the incoming gradient by s (gradient
    // reversal uses s = -lambda).
    Id grad_scale(Id a, double s);
    // Mean over `mask` rows of BCE(sigmoid(logit), label), stabilized.
    Id bce_with_logits_mean(Id logits, const std::vector<std::uint8_t>& labels,
                            const std::vector<int>& mask);
    // Mean over rows of softplus(sign * z); building block of the domain loss.
    Id softplus_mean(Id logits, double sign);

    size_t n_nodes() const { return nodes_.size(); }

private:
    struct Node {
        Matrix value;
        Matrix grad;
        std::function<void(Tape&)> backward;
    };

    Id push(Matrix value, std::function<void(Tape&)> backward);

    std::vector<Node> nodes_;
    bool backward_done_ = false;
};

}  // namespace satbridge
