#include "finin/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace finin {

namespace {

constexpr char kMagic[8] = {'F', 'I', 'N', 'I', 'N', 'C', 'K', '1'};

void put_u64(std::ostream& out, uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 8);
}

void put_u32(std::ostream& out, uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 4);
}

void put_f64(std::ostream& out, double d) { put_u64(out, std::bit_cast<uint64_t>(d)); }

uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
  return v;
}

uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

void put_tensor(std::ostream& out, const Tensor& t) {
  put_u32(out, static_cast<uint32_t>(t.rows()));
  put_u32(out, static_cast<uint32_t>(t.cols()));
  for (const double x : t.values()) put_f64(out, x);
}

}  // namespace

void save_checkpoint(const std::string& path, const FininModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrKind::IoFailure, "cannot open checkpoint for writing: " + path);
  out.write(kMagic, 8);
  put_u64(out, model.config.digest());
  const ModelConfig& c = model.config;
  put_u32(out, static_cast<uint32_t>(c.window_len));
  put_u32(out, static_cast<uint32_t>(c.text_dim));
  put_u32(out, static_cast<uint32_t>(c.fused_dim));
  put_u32(out, static_cast<uint32_t>(c.mlp_layers));
  put_u32(out, static_cast<uint32_t>(c.mlp_hidden));
  put_u32(out, static_cast<uint32_t>(c.n_heads));
  put_u32(out, static_cast<uint32_t>(c.attn_dim));
  put_u32(out, static_cast<uint32_t>(c.ablation));
  put_u64(out, c.seed);
  for (const double m : model.standardizer.mean) put_f64(out, m);
  for (const double s : model.standardizer.stdev) put_f64(out, s);

  FininParams& params = const_cast<FininModel&>(model).params;
  const std::vector<Parameter*> all = params.all();
  put_u32(out, static_cast<uint32_t>(all.size()));
  for (const Parameter* p : all) {
    put_u32(out, static_cast<uint32_t>(p->name.size()));
    out.write(p->name.data(), static_cast<std::streamsize>(p->name.size()));
    put_tensor(out, p->value);
  }
  if (!out) raise(ErrKind::IoFailure, "checkpoint write failed: " + path);
}

FininModel load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrKind::IoFailure, "cannot open checkpoint: " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0) {
    raise(ErrKind::MalformedFile, "not a FININ checkpoint: " + path);
  }
  const uint64_t digest = get_u64(in);
  ModelConfig c;
  c.window_len = static_cast<int>(get_u32(in));
  c.text_dim = static_cast<int>(get_u32(in));
  c.fused_dim = static_cast<int>(get_u32(in));
  c.mlp_layers = static_cast<int>(get_u32(in));
  c.mlp_hidden = static_cast<int>(get_u32(in));
  c.n_heads = static_cast<int>(get_u32(in));
  c.attn_dim = static_cast<int>(get_u32(in));
  const uint32_t abl = get_u32(in);
  if (abl > 3) raise(ErrKind::MalformedFile, "checkpoint: bad ablation tag");
  c.ablation = static_cast<Ablation>(abl);
  c.seed = get_u64(in);
  if (!in) raise(ErrKind::MalformedFile, "checkpoint: truncated header");
  if (c.digest() != digest) {
    raise(ErrKind::CheckpointMismatch, "checkpoint digest does not match embedded config");
  }

  FininModel model;
  model.config = c;
  for (double& m : model.standardizer.mean) m = get_f64(in);
  for (double& s : model.standardizer.stdev) s = get_f64(in);
  model.params = init_params(c);

  const std::vector<Parameter*> all = model.params.all();
  const uint32_t n = get_u32(in);
  if (!in || n != all.size()) {
    raise(ErrKind::CheckpointMismatch, "checkpoint parameter count does not match config");
  }
  for (Parameter* p : all) {
    const uint32_t len = get_u32(in);
    std::string name(len, '\0');
    in.read(name.data(), len);
    const int rows = static_cast<int>(get_u32(in));
    const int cols = static_cast<int>(get_u32(in));
    if (!in || name != p->name || rows != p->value.rows() || cols != p->value.cols()) {
      raise(ErrKind::CheckpointMismatch, "checkpoint entry '" + name + "' does not match '" +
                                             p->name + "'");
    }
    for (double& x : p->value.values()) x = get_f64(in);
  }
  if (!in) raise(ErrKind::MalformedFile, "checkpoint: truncated payload");
  return model;
}

}  // namespace finin
