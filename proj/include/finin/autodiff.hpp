#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "finin/tensor.hpp"

namespace finin {

// Softmax over the unmasked entries of a 1×n score row. Masked entries are
// exactly 0 in the output; unmasked entries are positive and sum to 1.
// Throws AllMasked when no entry survives.
Tensor masked_softmax(const Tensor& scores, const std::vector<uint8_t>& mask);

struct LossGrad {
  double loss;
  double dlogit;
};

// Numerically stable single-logit logistic loss:
//   loss = softplus(logit) - label*logit, dloss/dlogit = sigmoid(logit) - label.
LossGrad logistic_loss(double logit, int label);

double sigmoid(double x);

// Reverse-mode tape over the fixed operation set the model needs. Ops record
// a backward closure; backward() walks the tape in reverse and accumulates
// leaf gradients into their Parameters. One tape per forward computation;
// tapes are single-threaded, independent tapes may run concurrently.
class Tape {
 public:
  using Var = int;

  Var leaf(Parameter& p);
  Var constant(Tensor value);

  Var matmul(Var a, Var b);                 // [m×k]·[k×n]
  Var matmul_nt(Var a, Var b);              // [m×k]·[n×k]^T -> m×n
  Var add(Var a, Var b);                    // same shape
  Var add_rowvec(Var a, Var rowvec);        // rowvec broadcast over rows of a
  Var relu(Var a);
  Var scale(Var a, double c);
  Var concat_cols(std::span<const Var> parts);
  Var slice_cols(Var a, int from, int count);
  Var pad_rows(Var a, int total_rows);  // append zero rows
  Var masked_softmax_rows(Var scores, std::vector<uint8_t> col_mask);
  Var logistic_loss_node(Var logit_1x1, int label);

  const Tensor& value(Var v) const { return nodes_[v].value; }
  double scalar(Var v) const;

  // Seeds d(out)=1 for a 1×1 node and runs the tape in reverse. Leaf
  // gradients accumulate into their Parameters (existing grads are kept).
  void backward(Var out);

  size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    std::function<void()> back;  // empty for constants
  };

  Var push(Tensor value, std::function<void()> back);
  std::vector<Node> nodes_;
};

// Max relative finite-difference error over parameter coordinates.
// `run` must rebuild the computation from the current parameter values, run
// backward into the parameters' grads (after zeroing them), and return the
// loss. Central differences with step eps; relative error uses
// max(|analytic|, |numeric|, 1e-8) as denominator. When max_coords > 0, a
// seeded random subset of coordinates is checked instead of all of them.
double grad_check(std::span<Parameter* const> params, const std::function<double()>& run,
                  double eps, int max_coords = 0, uint64_t seed = 0);

// Kink-aware variant for deep ReLU graphs: per coordinate, takes the best
// agreement across central differences at a step ladder plus one-sided
// differences (exact on the dead side of a ReLU kink, where no single step
// size can satisfy both the cancellation-noise and kink-crossing bounds).
// A systematically wrong gradient fails every estimate, so the detector
// stays sound.
double grad_check_robust(std::span<Parameter* const> params, const std::function<double()>& run,
                         int max_coords = 0, uint64_t seed = 0);

}  // namespace finin
