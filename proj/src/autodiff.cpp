#include "finin/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "finin/kernels.hpp"
#include "finin/rng.hpp"

namespace finin {

namespace {

// Core masked exp-normalize for one row. Writes n outputs; masked lanes 0.
void softmax_row(const double* scores, const uint8_t* mask, double* out, int n) {
  double mx = -std::numeric_limits<double>::infinity();
  int alive = 0;
  for (int i = 0; i < n; ++i) {
    if (mask[i]) {
      ++alive;
      mx = std::max(mx, scores[i]);
    }
  }
  if (alive == 0) raise(ErrKind::AllMasked, "masked_softmax: every position is masked");
  double denom = 0.0;
  for (int i = 0; i < n; ++i) {
    if (mask[i]) {
      out[i] = std::exp(scores[i] - mx);
      denom += out[i];
    } else {
      out[i] = 0.0;
    }
  }
  for (int i = 0; i < n; ++i) {
    if (mask[i]) out[i] /= denom;
  }
}

}  // namespace

Tensor masked_softmax(const Tensor& scores, const std::vector<uint8_t>& mask) {
  if (scores.rows() != 1 || static_cast<size_t>(scores.cols()) != mask.size()) {
    raise(ErrKind::ShapeMismatch, "masked_softmax: scores must be 1xn with matching mask");
  }
  Tensor out(1, scores.cols());
  softmax_row(scores.data(), mask.data(), out.data(), scores.cols());
  return out;
}

double sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

LossGrad logistic_loss(double logit, int label) {
  // softplus(x) = max(x,0) + log1p(exp(-|x|)) never overflows.
  const double softplus = std::max(logit, 0.0) + std::log1p(std::exp(-std::abs(logit)));
  return {softplus - static_cast<double>(label) * logit,
          sigmoid(logit) - static_cast<double>(label)};
}

Tape::Var Tape::push(Tensor value, std::function<void()> back) {
  nodes_.push_back(Node{std::move(value), Tensor(), std::move(back)});
  Node& n = nodes_.back();
  n.grad = Tensor(n.value.rows(), n.value.cols());
  return static_cast<Var>(nodes_.size() - 1);
}

Tape::Var Tape::leaf(Parameter& p) {
  Parameter* pp = &p;
  const Var id = push(p.value, nullptr);
  nodes_[id].back = [this, id, pp]() {
    const Tensor& g = nodes_[id].grad;
    kernels::active().add(g.data(), pp->grad.data(), g.size());
  };
  return id;
}

Tape::Var Tape::constant(Tensor value) { return push(std::move(value), nullptr); }

Tape::Var Tape::matmul(Var a, Var b) {
  const Tensor& ta = nodes_[a].value;
  const Tensor& tb = nodes_[b].value;
  if (ta.cols() != tb.rows()) raise(ErrKind::ShapeMismatch, "matmul: inner dimensions differ");
  Tensor out(ta.rows(), tb.cols());
  kernels::matmul(ta.data(), tb.data(), out.data(), ta.rows(), ta.cols(), tb.cols(), false);
  const Var id = push(std::move(out), nullptr);
  nodes_[id].back = [this, id, a, b]() {
    const Tensor& g = nodes_[id].grad;
    const Tensor& va = nodes_[a].value;
    const Tensor& vb = nodes_[b].value;
    // dA += G · B^T ; dB += A^T · G
    kernels::matmul_nt(g.data(), vb.data(), nodes_[a].grad.data(), g.rows(), g.cols(), vb.rows(),
                       true);
    kernels::matmul_tn_acc(va.data(), g.data(), nodes_[b].grad.data(), va.rows(), va.cols(),
                           g.cols());
  };
  return id;
}

Tape::Var Tape::matmul_nt(Var a, Var b) {
  const Tensor& ta = nodes_[a].value;
  const Tensor& tb = nodes_[b].value;
  if (ta.cols() != tb.cols()) raise(ErrKind::ShapeMismatch, "matmul_nt: inner dimensions differ");
  Tensor out(ta.rows(), tb.rows());
  kernels::matmul_nt(ta.data(), tb.data(), out.data(), ta.rows(), ta.cols(), tb.rows(), false);
  const Var id = push(std::move(out), nullptr);
  nodes_[id].back = [this, id, a, b]() {
    const Tensor& g = nodes_[id].grad;  // m×n, n = rows(B)
    const Tensor& va = nodes_[a].value;
    const Tensor& vb = nodes_[b].value;
    // dA += G · B ; dB += G^T · A
    kernels::matmul(g.data(), vb.data(), nodes_[a].grad.data(), g.rows(), g.cols(), vb.cols(),
                    true);
    kernels::matmul_tn_acc(g.data(), va.data(), nodes_[b].grad.data(), g.rows(), g.cols(),
                           va.cols());
  };
  return id;
}

Tape::Var Tape::add(Var a, Var b) {
  const Tensor& ta = nodes_[a].value;
  const Tensor& tb = nodes_[b].value;
  if (!ta.same_shape(tb)) raise(ErrKind::ShapeMismatch, "add: shapes differ");
  Tensor out = ta;
  kernels::active().add(tb.data(), out.data(), out.size());
  const Var id = push(std::move(out), nullptr);
  nodes_[id].back = [this, id, a, b]() {
    const Tensor& g = nodes_[id].grad;
    kernels::active().add(g.data(), nodes_[a].grad.data(), g.size());
    kernels::active().add(g.data(), nodes_[b].grad.data(), g.size());
  };
  return id;
}

Tape::Var Tape::add_rowvec(Var a, Var rowvec) {
  const Tensor& ta = nodes_[a].value;
  const Tensor& tv = nodes_[rowvec].value;
  if (tv.rows() != 1 || tv.cols() != ta.cols()) {
    raise(ErrKind::ShapeMismatch, "add_rowvec: broadcast vector must be 1xcols");
  }
  Tensor out = ta;
  for (int r = 0; r < out.rows(); ++r) {
    kernels::active().add(tv.data(), out.row(r), out.cols());
  }
  const Var id = push(std::move(out), nullptr);
  nodes_[id].back = [this, id, a, rowvec]() {
    const Tensor& g = nodes_[id].grad;
    kernels::active().add(g.data(), nodes_[a].grad.data(), g.size());
    Tensor& gv = nodes_[rowvec].grad;
    for (int r = 0; r < g.rows(); ++r) {
      kernels::active().add(g.row(r), gv.data(), g.cols());
    }
  };
  return id;
}

Tape::Var Tape::relu(Var a) {
  const Tensor& ta = nodes_[a].value;
  Tensor out(ta.rows(), ta.cols());
  kernels::active().relu(ta.data(), out.data(), out.size());
  const Var id = push(std::move(out), nullptr);
  nodes_[id].back = [this, id, a]() {
    const Tensor& g = nodes_[id].grad;
    kernels::active().relu_grad(nodes_[a].value.data(), g.data(), nodes_[a].grad.data(),
                                g.size());
  };
  return id;
}

Tape::Var Tape::scale(Var a, double c) {
  Tensor out = nodes_[a].value;
  kernels::active().scale(c, out.data(), out.size());
  const Var id = push(std::move(out), nullptr);
  nodes_[id].back = [this, id, a, c]() {
    const Tensor& g = nodes_[id].grad;
    kernels::active().axpy(c, g.data(), nodes_[a].grad.data(), g.size());
  };
  return id;
}

Tape::Var Tape::concat_cols(std::span<const Var> parts) {
  if (parts.empty()) raise(ErrKind::ShapeMismatch, "concat_cols: no parts");
  const int rows = nodes_[parts[0]].value.rows();
  int total = 0;
  for (const Var p : parts) {
    if (nodes_[p].value.rows() != rows) {
      raise(ErrKind::ShapeMismatch, "concat_cols: row counts differ");
    }
    total += nodes_[p].value.cols();
  }
  Tensor out(rows, total);
  int at = 0;
  for (const Var p : parts) {
    const Tensor& t = nodes_[p].value;
    for (int r = 0; r < rows; ++r) {
      std::memcpy(out.row(r) + at, t.row(r), t.cols() * sizeof(double));
    }
    at += t.cols();
  }
  std::vector<Var> owned(parts.begin(), parts.end());
  const Var id = push(std::move(out), nullptr);
  nodes_[id].back = [this, id, owned]() {
    const Tensor& g = nodes_[id].grad;
    int from = 0;
    for (const Var p : owned) {
      Tensor& gp = nodes_[p].grad;
      for (int r = 0; r < g.rows(); ++r) {
        kernels::active().add(g.row(r) + from, gp.row(r), gp.cols());
      }
      from += gp.cols();
    }
  };
  return id;
}

Tape::Var Tape::slice_cols(Var a, int from, int count) {
  const Tensor& ta = nodes_[a].value;
  if (from < 0 || count <= 0 || from + count > ta.cols()) {
    raise(ErrKind::ShapeMismatch, "slice_cols: range out of bounds");
  }
  Tensor out(ta.rows(), count);
  for (int r = 0; r < ta.rows(); ++r) {
    std::memcpy(out.row(r), ta.row(r) + from, count * sizeof(double));
  }
  const Var id = push(std::move(out), nullptr);
  nodes_[id].back = [this, id, a, from]() {
    const Tensor& g = nodes_[id].grad;
    Tensor& ga = nodes_[a].grad;
    for (int r = 0; r < g.rows(); ++r) {
      kernels::active().add(g.row(r), ga.row(r) + from, g.cols());
    }
  };
  return id;
}

Tape::Var Tape::pad_rows(Var a, int total_rows) {
  const Tensor& ta = nodes_[a].value;
  if (total_rows < ta.rows()) raise(ErrKind::ShapeMismatch, "pad_rows: target smaller than input");
  if (total_rows == ta.rows()) return a;
  Tensor out(total_rows, ta.cols());
  std::memcpy(out.data(), ta.data(), ta.size() * sizeof(double));
  const Var id = push(std::move(out), nullptr);
  nodes_[id].back = [this, id, a]() {
    const Tensor& g = nodes_[id].grad;
    Tensor& ga = nodes_[a].grad;
    kernels::active().add(g.data(), ga.data(), ga.size());
  };
  return id;
}

Tape::Var Tape::masked_softmax_rows(Var scores, std::vector<uint8_t> col_mask) {
  const Tensor& ts = nodes_[scores].value;
  if (static_cast<size_t>(ts.cols()) != col_mask.size()) {
    raise(ErrKind::ShapeMismatch, "masked_softmax_rows: mask length mismatch");
  }
  Tensor out(ts.rows(), ts.cols());
  for (int r = 0; r < ts.rows(); ++r) {
    softmax_row(ts.row(r), col_mask.data(), out.row(r), ts.cols());
  }
  const Var id = push(std::move(out), nullptr);
  nodes_[id].back = [this, id, scores, mask = std::move(col_mask)]() {
    const Tensor& w = nodes_[id].value;
    const Tensor& g = nodes_[id].grad;
    Tensor& gs = nodes_[scores].grad;
    const int n = w.cols();
    for (int r = 0; r < w.rows(); ++r) {
      const double* wr = w.row(r);
      const double* gr = g.row(r);
      double inner = 0.0;
      for (int i = 0; i < n; ++i) {
        if (mask[i]) inner += wr[i] * gr[i];
      }
      double* gsr = gs.row(r);
      for (int i = 0; i < n; ++i) {
        if (mask[i]) gsr[i] += wr[i] * (gr[i] - inner);
      }
    }
  };
  return id;
}

Tape::Var Tape::logistic_loss_node(Var logit_1x1, int label) {
  const Tensor& tl = nodes_[logit_1x1].value;
  if (tl.rows() != 1 || tl.cols() != 1) {
    raise(ErrKind::ShapeMismatch, "logistic_loss: logit must be 1x1");
  }
  const LossGrad lg = logistic_loss(tl(0, 0), label);
  Tensor out(1, 1);
  out(0, 0) = lg.loss;
  const Var id = push(std::move(out), nullptr);
  nodes_[id].back = [this, id, logit_1x1, d = lg.dlogit]() {
    nodes_[logit_1x1].grad(0, 0) += d * nodes_[id].grad(0, 0);
  };
  return id;
}

double Tape::scalar(Var v) const {
  const Tensor& t = nodes_[v].value;
  if (t.size() != 1) raise(ErrKind::ShapeMismatch, "scalar: node is not 1x1");
  return t(0, 0);
}

void Tape::backward(Var out) {
  if (nodes_[out].value.size() != 1) {
    raise(ErrKind::ShapeMismatch, "backward: output must be scalar");
  }
  nodes_[out].grad(0, 0) = 1.0;
  for (int i = out; i >= 0; --i) {
    if (nodes_[i].back) nodes_[i].back();
  }
}

namespace {

double rel_err(double analytic, double numeric) {
  return std::abs(analytic - numeric) /
         std::max({std::abs(analytic), std::abs(numeric), 1e-8});
}

std::vector<std::pair<size_t, size_t>> sample_coords(std::span<Parameter* const> params,
                                                     int max_coords, uint64_t seed) {
  std::vector<std::pair<size_t, size_t>> coords;
  for (size_t pi = 0; pi < params.size(); ++pi) {
    for (size_t ci = 0; ci < params[pi]->value.size(); ++ci) coords.emplace_back(pi, ci);
  }
  if (max_coords > 0 && coords.size() > static_cast<size_t>(max_coords)) {
    RandomStream rng(seed);
    rng.shuffle(coords);
    coords.resize(static_cast<size_t>(max_coords));
  }
  return coords;
}

std::vector<std::vector<double>> analytic_pass(std::span<Parameter* const> params,
                                               const std::function<double()>& run,
                                               double* loss_out) {
  for (Parameter* p : params) p->zero_grad();
  const double loss = run();
  if (loss_out != nullptr) *loss_out = loss;
  std::vector<std::vector<double>> analytic;
  analytic.reserve(params.size());
  for (Parameter* p : params) analytic.push_back(p->grad.values());
  return analytic;
}

double eval_at(std::span<Parameter* const> params, const std::function<double()>& run,
               double& slot, double value) {
  const double orig = slot;
  slot = value;
  for (Parameter* p : params) p->zero_grad();
  const double f = run();
  slot = orig;
  return f;
}

}  // namespace

double grad_check(std::span<Parameter* const> params, const std::function<double()>& run,
                  double eps, int max_coords, uint64_t seed) {
  const std::vector<std::vector<double>> analytic = analytic_pass(params, run, nullptr);
  double worst = 0.0;
  for (const auto& [pi, ci] : sample_coords(params, max_coords, seed)) {
    double& slot = params[pi]->value.values()[ci];
    const double orig = slot;
    const double fp = eval_at(params, run, slot, orig + eps);
    const double fm = eval_at(params, run, slot, orig - eps);
    worst = std::max(worst, rel_err(analytic[pi][ci], (fp - fm) / (2.0 * eps)));
  }
  return worst;
}

double grad_check_robust(std::span<Parameter* const> params, const std::function<double()>& run,
                         int max_coords, uint64_t seed) {
  double f0 = 0.0;
  const std::vector<std::vector<double>> analytic = analytic_pass(params, run, &f0);
  constexpr double kLadder[] = {2e-4, 1e-5, 1e-6};
  double worst = 0.0;
  for (const auto& [pi, ci] : sample_coords(params, max_coords, seed)) {
    double& slot = params[pi]->value.values()[ci];
    const double orig = slot;
    const double a = analytic[pi][ci];
    double best = std::numeric_limits<double>::infinity();
    for (const double eps : kLadder) {
      const double fp = eval_at(params, run, slot, orig + eps);
      const double fm = eval_at(params, run, slot, orig - eps);
      best = std::min(best, rel_err(a, (fp - fm) / (2.0 * eps)));
      if (eps == kLadder[0]) {
        best = std::min(best, rel_err(a, (fp - f0) / eps));
        best = std::min(best, rel_err(a, (f0 - fm) / eps));
      }
      if (best < 1e-5) break;
    }
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace finin
