#include <doctest.h>

#include <cmath>

#include "finin/nn.hpp"

using namespace finin;

namespace {

Tensor random_tensor(int r, int c, RandomStream& rng, double scale = 1.0) {
  Tensor t(r, c);
  for (double& x : t.values()) x = scale * rng.uniform(-1.0, 1.0);
  return t;
}

std::vector<Parameter*> linear_params(LinearParams& l) { return {&l.weight, &l.bias}; }

std::vector<Parameter*> mlp_params(MlpParams& m) {
  std::vector<Parameter*> out;
  for (LinearParams& l : m.layers) {
    out.push_back(&l.weight);
    out.push_back(&l.bias);
  }
  return out;
}

std::vector<Parameter*> attn_params(AttentionParams& a) {
  std::vector<Parameter*> out = {&a.wq, &a.wk};
  if (a.wv) out.push_back(&*a.wv);
  if (a.wo) out.push_back(&*a.wo);
  return out;
}

}  // namespace

TEST_CASE("linear layer identity and zero cases") {
  RandomStream rng(1);
  LinearParams lin = make_linear("lin", 3, 3, rng);
  lin.weight.value.zero();
  for (int i = 0; i < 3; ++i) lin.weight.value(i, i) = 1.0;
  lin.bias.value.zero();

  Tape tape;
  const Tensor x = random_tensor(4, 3, rng);
  const Tape::Var y = linear_forward(tape, lin, tape.constant(x));
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 3; ++c) CHECK(tape.value(y)(r, c) == x(r, c));
  }

  lin.bias.value = Tensor::row_vector({0.5, -1.0, 2.0});
  Tape tape2;
  const Tape::Var y2 = linear_forward(tape2, lin, tape2.constant(Tensor(2, 3)));
  for (int r = 0; r < 2; ++r) {
    CHECK(tape2.value(y2)(r, 0) == 0.5);
    CHECK(tape2.value(y2)(r, 1) == -1.0);
    CHECK(tape2.value(y2)(r, 2) == 2.0);
  }
}

TEST_CASE("linear layer gradient vs finite differences") {
  RandomStream rng(2);
  LinearParams lin = make_linear("lin", 3, 4, rng);
  const Tensor x = random_tensor(2, 3, rng);
  const std::vector<Parameter*> params = linear_params(lin);
  const auto run = [&]() {
    Tape tape;
    const Tape::Var y = linear_forward(tape, lin, tape.constant(x));
    const Tape::Var pooled =
        tape.matmul(tape.constant(Tensor::row_vector({1.0, -0.5})), y);  // 1×4
    Tensor col(4, 1);
    col(0, 0) = 0.7;
    col(1, 0) = -0.2;
    col(2, 0) = 1.3;
    col(3, 0) = 0.4;
    const Tape::Var loss = tape.logistic_loss_node(tape.matmul(pooled, tape.constant(col)), 0);
    tape.backward(loss);
    return tape.scalar(loss);
  };
  CHECK(grad_check(params, run, 1e-5) < 1e-4);
}

TEST_CASE("mlp zero weights give zero output; gradient check on 3 layers") {
  RandomStream rng(3);
  MlpParams mlp = make_mlp("mlp", 5, 16, 4, 2, rng);
  for (Parameter* p : mlp_params(mlp)) p->value.zero();
  Tape tape;
  const Tape::Var y = mlp_forward(tape, mlp, tape.constant(random_tensor(3, 5, rng)));
  for (const double v : tape.value(y).values()) CHECK(v == 0.0);

  MlpParams deep = make_mlp("deep", 4, 16, 2, 3, rng);
  const std::vector<Parameter*> params = mlp_params(deep);
  for (int trial = 0; trial < 5; ++trial) {
    const Tensor x = random_tensor(2, 4, rng);
    const auto run = [&]() {
      Tape tape2;
      const Tape::Var out = mlp_forward(tape2, deep, tape2.constant(x));
      const Tape::Var pooled =
          tape2.matmul(tape2.constant(Tensor::row_vector({0.9, -1.2})), out);
      Tensor col(2, 1);
      col(0, 0) = 1.0;
      col(1, 0) = -0.8;
      const Tape::Var loss =
          tape2.logistic_loss_node(tape2.matmul(pooled, tape2.constant(col)), 1);
      tape2.backward(loss);
      return tape2.scalar(loss);
    };
    CHECK(grad_check(params, run, 1e-5) < 1e-4);
  }
}

TEST_CASE("scaled dot attention: symmetry, singleton, gradients") {
  RandomStream rng(4);

  SUBCASE("identical keys give uniform weights per head") {
    AttentionParams attn = make_attention("a", 6, 2, 4, true, rng);
    Tensor keys(5, 6);
    const Tensor one_key = random_tensor(1, 6, rng);
    for (int r = 0; r < 5; ++r) {
      for (int c = 0; c < 6; ++c) keys(r, c) = one_key(0, c);
    }
    Tape tape;
    const Tape::Var kv = tape.constant(keys);
    const AttentionOut out = scaled_dot_attention(
        tape, attn, tape.constant(random_tensor(2, 6, rng)), kv, {1, 1, 1, 1, 1});
    for (const Tape::Var wv : out.head_weights) {
      const Tensor& w = tape.value(wv);
      for (int q = 0; q < 2; ++q) {
        for (int i = 0; i < 5; ++i) CHECK(w(q, i) == doctest::Approx(0.2).epsilon(1e-12));
      }
    }
  }

  SUBCASE("single unmasked key takes all the weight") {
    AttentionParams attn = make_attention("a", 6, 3, 4, true, rng);
    Tape tape;
    const AttentionOut out =
        scaled_dot_attention(tape, attn, tape.constant(random_tensor(1, 6, rng)),
                             tape.constant(random_tensor(4, 6, rng)), {0, 0, 1, 0});
    for (const Tape::Var wv : out.head_weights) {
      const Tensor& w = tape.value(wv);
      CHECK(w(0, 2) == 1.0);
      CHECK(w(0, 0) == 0.0);
      CHECK(w(0, 1) == 0.0);
      CHECK(w(0, 3) == 0.0);
    }
  }

  SUBCASE("2 queries, 3 keys: backward matches finite differences") {
    AttentionParams attn = make_attention("a", 5, 2, 3, true, rng);
    const Tensor queries = random_tensor(2, 5, rng);
    const Tensor keys = random_tensor(3, 5, rng);
    const std::vector<Parameter*> params = attn_params(attn);
    const auto run = [&]() {
      Tape tape;
      const AttentionOut out = scaled_dot_attention(tape, attn, tape.constant(queries),
                                                    tape.constant(keys), {1, 1, 1});
      const Tape::Var pooled =
          tape.matmul(tape.constant(Tensor::row_vector({1.0, -1.0})), out.output);
      Tensor col(5, 1);
      for (int i = 0; i < 5; ++i) col(i, 0) = 0.3 * (i + 1);
      const Tape::Var loss =
          tape.logistic_loss_node(tape.matmul(pooled, tape.constant(col)), 1);
      tape.backward(loss);
      return tape.scalar(loss);
    };
    CHECK(grad_check(params, run, 1e-5) < 1e-4);
  }

  SUBCASE("permuting keys permutes weights and leaves outputs unchanged") {
    AttentionParams attn = make_attention("a", 5, 1, 4, true, rng);
    const Tensor queries = random_tensor(2, 5, rng);
    Tensor keys = random_tensor(4, 5, rng);
    Tensor keys_perm(4, 5);
    const int perm[4] = {2, 0, 3, 1};
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 5; ++c) keys_perm(r, c) = keys(perm[r], c);
    }
    Tape t1, t2;
    const AttentionOut o1 = scaled_dot_attention(t1, attn, t1.constant(queries),
                                                 t1.constant(keys), {1, 1, 1, 1});
    const AttentionOut o2 = scaled_dot_attention(t2, attn, t2.constant(queries),
                                                 t2.constant(keys_perm), {1, 1, 1, 1});
    const Tensor& w1 = t1.value(o1.head_weights[0]);
    const Tensor& w2 = t2.value(o2.head_weights[0]);
    for (int q = 0; q < 2; ++q) {
      for (int r = 0; r < 4; ++r) CHECK(std::abs(w2(q, r) - w1(q, perm[r])) < 1e-15);
    }
    const Tensor& y1 = t1.value(o1.output);
    const Tensor& y2 = t2.value(o2.output);
    for (size_t i = 0; i < y1.size(); ++i) {
      CHECK(std::abs(y1.values()[i] - y2.values()[i]) < 1e-12);
    }
  }
}

TEST_CASE("adam") {
  RandomStream rng(5);
  Parameter p("p", random_tensor(2, 3, rng));
  const Tensor before = p.value;

  SUBCASE("zero gradients leave parameters unchanged") {
    Adam adam({&p}, 1e-3);
    adam.step();
    for (size_t i = 0; i < p.value.size(); ++i) {
      CHECK(p.value.values()[i] == before.values()[i]);
    }
  }

  SUBCASE("one step with constant gradient moves by ~lr") {
    Adam adam({&p}, 1e-3);
    p.grad.fill(0.37);
    adam.step();
    for (size_t i = 0; i < p.value.size(); ++i) {
      const double delta = before.values()[i] - p.value.values()[i];
      // t=1: update = lr * g / (|g| + eps) = lr (sign g), bias-corrected.
      CHECK(delta == doctest::Approx(1e-3).epsilon(1e-4));
      CHECK(p.grad.values()[i] == 0.0);  // gradients zeroed afterward
    }
  }

  SUBCASE("identical runs stay bitwise identical") {
    Parameter q("q", before);
    Adam a1({&p}, 1e-3), a2({&q}, 1e-3);
    RandomStream g1(42), g2(42);
    for (int step = 0; step < 25; ++step) {
      for (size_t i = 0; i < p.value.size(); ++i) {
        const double g = g1.normal();
        p.grad.values()[i] = g;
        q.grad.values()[i] = g2.normal();
      }
      a1.step();
      a2.step();
    }
    for (size_t i = 0; i < p.value.size(); ++i) {
      CHECK(p.value.values()[i] == q.value.values()[i]);
    }
  }

  SUBCASE("invalid settings are rejected") {
    CHECK_THROWS_AS(Adam({&p}, -1.0), Error);
    CHECK_THROWS_AS(Adam({&p}, 1e-3, 1.5), Error);
    CHECK_THROWS_AS(Adam({&p}, 1e-3, 0.9, 0.999, 0.0), Error);
  }
}
