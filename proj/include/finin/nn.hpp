#pragma once

#include <optional>
#include <string>
#include <vector>

#include "finin/autodiff.hpp"
#include "finin/rng.hpp"
#include "finin/tensor.hpp"

namespace finin {

// The fixed activation between MLP layers (see README, model constants).
inline constexpr const char* kMlpActivation = "relu";

struct LinearParams {
  Parameter weight;  // in×out
  Parameter bias;    // 1×out

  int in_dim() const { return weight.value.rows(); }
  int out_dim() const { return weight.value.cols(); }
};

struct MlpParams {
  std::vector<LinearParams> layers;

  int in_dim() const { return layers.front().in_dim(); }
  int out_dim() const { return layers.back().out_dim(); }
};

// Single attention layer. d_k is the per-head query/key dimension; the
// projections map dim -> n_heads*d_k. The value/output pair is absent for the
// market-query stage, which consumes weights directly.
struct AttentionParams {
  int n_heads = 1;
  int d_k = 1;
  Parameter wq;                 // dim × (H·d_k)
  Parameter wk;                 // dim × (H·d_k)
  std::optional<Parameter> wv;  // dim × (H·d_k)
  std::optional<Parameter> wo;  // (H·d_k) × dim

  int input_dim() const { return wq.value.rows(); }
  bool has_value_output() const { return wv.has_value() && wo.has_value(); }
};

// Fan-in uniform init, zero biases.
LinearParams make_linear(const std::string& name, int in, int out, RandomStream& rng);
MlpParams make_mlp(const std::string& name, int in, int hidden, int out, int n_layers,
                   RandomStream& rng);
AttentionParams make_attention(const std::string& name, int dim, int n_heads, int d_k,
                               bool with_value_output, RandomStream& rng);

Tape::Var linear_forward(Tape& tape, LinearParams& p, Tape::Var x);
Tape::Var mlp_forward(Tape& tape, MlpParams& p, Tape::Var x);

struct AttentionOut {
  Tape::Var output;                    // q×dim (through value+output projections)
  std::vector<Tape::Var> head_weights; // per head, q×n softmax rows
};

// Scores = (1/sqrt(d_k)) q(x)·k(y)^T per head; masked keys get zero weight.
// Requires the value/output projections.
AttentionOut scaled_dot_attention(Tape& tape, AttentionParams& p, Tape::Var queries,
                                  Tape::Var keys_values, const std::vector<uint8_t>& key_mask);

// Query-key attention weights only (no value path): per-head 1×n weight rows
// for a single query row against n keys.
std::vector<Tape::Var> attention_weight_rows(Tape& tape, AttentionParams& p, Tape::Var query_row,
                                             Tape::Var keys, const std::vector<uint8_t>& key_mask);

// Adam with bias correction. step() applies the update from the accumulated
// gradients and zeroes them.
class Adam {
 public:
  Adam(std::vector<Parameter*> params, double lr, double beta1 = 0.9, double beta2 = 0.999,
       double eps = 1e-8);

  void step();
  int t() const { return t_; }

 private:
  std::vector<Parameter*> params_;
  double lr_, beta1_, beta2_, eps_;
  int t_ = 0;
  std::vector<Tensor> m_, v_;
};

}  // namespace finin
