#include <doctest.h>

#include <cmath>
#include <functional>

#include "satbridge/autodiff.hpp"
#include "satbridge/error.hpp"
#include "satbridge/rng.hpp"

using namespace satbridge;

namespace {

Matrix random_matrix(int r, int c, Rng& rng) {
    Matrix m(r, c);
    for (auto& x : m.a) x = 2.0 * rng.next_double() - 1.0;
    return m;
}

// Max relative error between tape gradients and central finite differences
// for a scalar built from the given leaves.
double fd_check(std::vector<Matrix> leaves,
                const std::function<Tape::Id(Tape&, const std::vector<Tape::Id>&)>& build) {
    Tape tape;
    std::vector<Tape::Id> ids;
    for (const auto& m : leaves) ids.push_back(tape.leaf(m));
    Tape::Id root = build(tape, ids);
    tape.backward(root);

    const double step = 1e-5;
    double max_rel = 0;
    for (size_t t = 0; t < leaves.size(); ++t) {
        for (size_t i = 0; i < leaves[t].size(); ++i) {
            auto value_at = [&](double x) {
                std::vector<Matrix> probe = leaves;
                probe[t].a[i] = x;
                Tape tp;
                std::vector<Tape::Id> pids;
                for (const auto& m : probe) pids.push_back(tp.leaf(m));
                return tp.value(build(tp, pids)).a[0];
            };
            double saved = leaves[t].a[i];
            double fd = (value_at(saved + step) - value_at(saved - step)) / (2 * step);
            double a = tape.grad(ids[t]).a[i];
            double rel = std::fabs(a - fd) / std::max(std::fabs(a) + std::fabs(fd), 1e-3);
            max_rel = std::max(max_rel, rel);
        }
    }
    return max_rel;
}

}  // namespace

TEST_CASE("bce closed forms") {
    Tape tape;
    Matrix z(2, 1);
    z.a = {0.0, 0.0};
    Tape::Id logits = tape.leaf(z);
    Tape::Id loss = tape.bce_with_logits_mean(logits, {1, 0}, {0, 1});
    CHECK(tape.value(loss).a[0] == doctest::Approx(std::log(2.0)).epsilon(1e-12));

    Tape t2;
    Matrix big(2, 1);
    big.a = {40.0, -40.0};
    Tape::Id l2 = t2.bce_with_logits_mean(t2.leaf(big), {1, 0}, {0, 1});
    CHECK(t2.value(l2).a[0] < 1e-15);
    CHECK(std::isfinite(t2.value(l2).a[0]));

    Tape t3;
    CHECK_THROWS_AS(t3.bce_with_logits_mean(t3.leaf(z), {1, 0}, {}), ArgumentError);
}

TEST_CASE("softplus closed form") {
    Tape tape;
    Matrix z(3, 1);
    z.fill(0.0);
    Tape::Id loss = tape.softplus_mean(tape.leaf(z), -1.0);
    CHECK(tape.value(loss).a[0] == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("segment softmax normalizes within segments") {
    Tape tape;
    Matrix logits(5, 1);
    logits.a = {0.3, -1.2, 0.7, 2.0, 2.0};
    std::vector<int> seg = {0, 0, 0, 1, 1};
    Tape::Id alpha = tape.segment_softmax(tape.leaf(logits), seg, 2);
    const Matrix& A = tape.value(alpha);
    CHECK(A.a[0] + A.a[1] + A.a[2] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(A.a[3] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(A.a[4] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("single linear layer gradient is exact to 1e-8") {
    Rng rng(5);
    double err = fd_check({random_matrix(4, 3, rng), random_matrix(1, 3, rng)},
                          [](Tape& t, const std::vector<Tape::Id>& ids) {
                              Tape::Id z = t.matmul_nt(ids[0], ids[1]);  // 4 x 1
                              return t.bce_with_logits_mean(z, {1, 0, 1, 0}, {0, 1, 2, 3});
                          });
    CHECK(err < 1e-8);
}

TEST_CASE("composite op gradients match finite differences") {
    Rng rng(11);
    std::vector<int> seg = {0, 0, 1, 1, 1, 2};
    std::vector<int> ai = {0, 1, 2, 3, 0, 1};
    std::vector<int> bi = {0, 0, 1, 1, 2, 2};

    SUBCASE("attention-shaped composition") {
        double err = fd_check(
            {random_matrix(4, 3, rng), random_matrix(3, 3, rng), random_matrix(1, 3, rng)},
            [&](Tape& t, const std::vector<Tape::Id>& ids) {
                Tape::Id logits = t.edge_dot(ids[0], ids[1], ai, bi);       // 6 x 1
                Tape::Id alpha = t.segment_softmax(logits, seg, 3);         // 6 x 1
                Tape::Id rows = t.gather_rows(ids[0], ai);                  // 6 x 3
                Tape::Id msg = t.weighted_segment_sum(alpha, rows, seg, 3); // 3 x 3
                Tape::Id z = t.matmul_nt(t.tanh_op(msg), ids[2]);           // 3 x 1
                return t.softplus_mean(z, 1.0);
            });
        CHECK(err < 1e-6);
    }
    SUBCASE("add, rowvec bias, scale, concat") {
        double err = fd_check(
            {random_matrix(3, 2, rng), random_matrix(3, 2, rng), random_matrix(1, 4, rng),
             random_matrix(1, 4, rng)},
            [&](Tape& t, const std::vector<Tape::Id>& ids) {
                Tape::Id s = t.concat_cols(t.add(ids[0], ids[1]), t.scale(ids[0], -1.7));
                Tape::Id z = t.matmul_nt(t.add_rowvec(s, ids[2]), ids[3]);  // 3 x 1
                return t.bce_with_logits_mean(z, {0, 1, 1}, {0, 1, 2});
            });
        CHECK(err < 1e-6);
    }
}

TEST_CASE("grad_scale multiplies only the gradient") {
    Rng rng(3);
    Matrix x = random_matrix(3, 2, rng);
    Matrix w = random_matrix(1, 2, rng);
    auto grads_with_scale = [&](double s) {
        Tape t;
        Tape::Id xid = t.leaf(x);
        Tape::Id z = t.matmul_nt(t.grad_scale(xid, s), t.leaf(w));
        Tape::Id loss = t.softplus_mean(z, 1.0);
        double value = t.value(loss).a[0];
        t.backward(loss);
        return std::pair{value, t.grad(xid)};
    };
    auto [v1, g1] = grads_with_scale(1.0);
    auto [v2, g2] = grads_with_scale(-0.2);
    CHECK(v1 == v2);  // identity forward
    for (size_t i = 0; i < g1.size(); ++i)
        CHECK(g2.a[i] == doctest::Approx(-0.2 * g1.a[i]).epsilon(1e-12));
}

TEST_CASE("backward is single-shot per tape") {
    Tape tape;
    Matrix z(1, 1);
    z.a = {0.4};
    Tape::Id loss = tape.softplus_mean(tape.leaf(z), 1.0);
    tape.backward(loss);
    CHECK_THROWS_AS(tape.backward(loss), ArgumentError);
}

TEST_CASE("shape errors") {
    Tape tape;
    Matrix a(2, 3), b(2, 2);
    CHECK_THROWS_AS(tape.add(tape.leaf(a), tape.leaf(b)), ArgumentError);
    CHECK_THROWS_AS(tape.matmul_nt(tape.leaf(a), tape.leaf(b)), ArgumentError);
    Matrix col(3, 2);
    CHECK_THROWS_AS(tape.backward(tape.leaf(col)), ArgumentError);
}
