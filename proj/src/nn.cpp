#include "finin/nn.hpp"

#include "finin/kernels.hpp"

#include <array>
#include <cmath>

namespace finin {

namespace {

Tensor fan_in_uniform(int in, int out, RandomStream& rng) {
  Tensor t(in, out);
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  for (double& x : t.values()) x = rng.uniform(-bound, bound);
  return t;
}

}  // namespace

LinearParams make_linear(const std::string& name, int in, int out, RandomStream& rng) {
  if (in <= 0 || out <= 0) raise(ErrKind::InvalidParameter, "make_linear: dims must be positive");
  LinearParams p;
  p.weight = Parameter(name + ".weight", fan_in_uniform(in, out, rng));
  p.bias = Parameter(name + ".bias", Tensor(1, out));
  return p;
}

MlpParams make_mlp(const std::string& name, int in, int hidden, int out, int n_layers,
                   RandomStream& rng) {
  if (n_layers < 1) raise(ErrKind::InvalidParameter, "make_mlp: need at least one layer");
  MlpParams p;
  for (int l = 0; l < n_layers; ++l) {
    const int li = l == 0 ? in : hidden;
    const int lo = l == n_layers - 1 ? out : hidden;
    p.layers.push_back(make_linear(name + ".l" + std::to_string(l), li, lo, rng));
  }
  return p;
}

AttentionParams make_attention(const std::string& name, int dim, int n_heads, int d_k,
                               bool with_value_output, RandomStream& rng) {
  if (dim <= 0 || n_heads <= 0 || d_k <= 0) {
    raise(ErrKind::InvalidParameter, "make_attention: dims must be positive");
  }
  AttentionParams p;
  p.n_heads = n_heads;
  p.d_k = d_k;
  const int proj = n_heads * d_k;
  p.wq = Parameter(name + ".wq", fan_in_uniform(dim, proj, rng));
  p.wk = Parameter(name + ".wk", fan_in_uniform(dim, proj, rng));
  if (with_value_output) {
    p.wv = Parameter(name + ".wv", fan_in_uniform(dim, proj, rng));
    // Residual-branch output projection starts at zero so the block opens
    // as an identity and grows into the mixing it needs.
    p.wo = Parameter(name + ".wo", Tensor(proj, dim));
  }
  return p;
}

Tape::Var linear_forward(Tape& tape, LinearParams& p, Tape::Var x) {
  const Tape::Var w = tape.leaf(p.weight);
  const Tape::Var b = tape.leaf(p.bias);
  return tape.add_rowvec(tape.matmul(x, w), b);
}

Tape::Var mlp_forward(Tape& tape, MlpParams& p, Tape::Var x) {
  Tape::Var h = x;
  for (size_t l = 0; l < p.layers.size(); ++l) {
    h = linear_forward(tape, p.layers[l], h);
    if (l + 1 < p.layers.size()) h = tape.relu(h);
  }
  return h;
}

AttentionOut scaled_dot_attention(Tape& tape, AttentionParams& p, Tape::Var queries,
                                  Tape::Var keys_values, const std::vector<uint8_t>& key_mask) {
  if (!p.has_value_output()) {
    raise(ErrKind::ShapeMismatch, "scaled_dot_attention: layer lacks value/output projections");
  }
  if (tape.value(keys_values).rows() != static_cast<int>(key_mask.size())) {
    raise(ErrKind::ShapeMismatch, "scaled_dot_attention: mask length != key count");
  }
  const Tape::Var q_all = tape.matmul(queries, tape.leaf(p.wq));
  const Tape::Var k_all = tape.matmul(keys_values, tape.leaf(p.wk));
  const Tape::Var v_all = tape.matmul(keys_values, tape.leaf(*p.wv));

  const double inv_sqrt_dk = 1.0 / std::sqrt(static_cast<double>(p.d_k));
  AttentionOut out;
  std::vector<Tape::Var> head_outs;
  for (int h = 0; h < p.n_heads; ++h) {
    const int at = h * p.d_k;
    const Tape::Var qh = tape.slice_cols(q_all, at, p.d_k);
    const Tape::Var kh = tape.slice_cols(k_all, at, p.d_k);
    const Tape::Var vh = tape.slice_cols(v_all, at, p.d_k);
    const Tape::Var scores = tape.scale(tape.matmul_nt(qh, kh), inv_sqrt_dk);
    const Tape::Var weights = tape.masked_softmax_rows(scores, key_mask);
    out.head_weights.push_back(weights);
    head_outs.push_back(tape.matmul(weights, vh));
  }
  const Tape::Var merged = tape.concat_cols(head_outs);
  out.output = tape.matmul(merged, tape.leaf(*p.wo));
  return out;
}

std::vector<Tape::Var> attention_weight_rows(Tape& tape, AttentionParams& p, Tape::Var query_row,
                                             Tape::Var keys,
                                             const std::vector<uint8_t>& key_mask) {
  if (tape.value(query_row).rows() != 1) {
    raise(ErrKind::ShapeMismatch, "attention_weight_rows: query must be a single row");
  }
  if (tape.value(keys).rows() != static_cast<int>(key_mask.size())) {
    raise(ErrKind::ShapeMismatch, "attention_weight_rows: mask length != key count");
  }
  const Tape::Var q_all = tape.matmul(query_row, tape.leaf(p.wq));
  const Tape::Var k_all = tape.matmul(keys, tape.leaf(p.wk));
  const double inv_sqrt_dk = 1.0 / std::sqrt(static_cast<double>(p.d_k));
  std::vector<Tape::Var> rows;
  for (int h = 0; h < p.n_heads; ++h) {
    const int at = h * p.d_k;
    const Tape::Var qh = tape.slice_cols(q_all, at, p.d_k);
    const Tape::Var kh = tape.slice_cols(k_all, at, p.d_k);
    const Tape::Var scores = tape.scale(tape.matmul_nt(qh, kh), inv_sqrt_dk);
    rows.push_back(tape.masked_softmax_rows(scores, key_mask));
  }
  return rows;
}

Adam::Adam(std::vector<Parameter*> params, double lr, double beta1, double beta2, double eps)
    : params_(std::move(params)), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
  if (lr < 0.0) raise(ErrKind::InvalidParameter, "Adam: negative learning rate");
  if (eps <= 0.0) raise(ErrKind::InvalidParameter, "Adam: eps must be positive");
  if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0) {
    raise(ErrKind::InvalidParameter, "Adam: betas must lie in [0,1)");
  }
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (const Parameter* p : params_) {
    m_.emplace_back(p->value.rows(), p->value.cols());
    v_.emplace_back(p->value.rows(), p->value.cols());
  }
}

void Adam::step() {
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, t_);
  const double bc2 = 1.0 - std::pow(beta2_, t_);
  for (size_t i = 0; i < params_.size(); ++i) {
    Parameter& p = *params_[i];
    double* m = m_[i].data();
    double* v = v_[i].data();
    double* w = p.value.data();
    double* g = p.grad.data();
    const size_t n = p.value.size();
    for (size_t j = 0; j < n; ++j) {
      m[j] = beta1_ * m[j] + (1.0 - beta1_) * g[j];
      v[j] = beta2_ * v[j] + (1.0 - beta2_) * g[j] * g[j];
      const double mhat = m[j] / bc1;
      const double vhat = v[j] / bc2;
      w[j] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
      g[j] = 0.0;
    }
  }
}

}  // namespace finin
