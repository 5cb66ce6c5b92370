#include "finin/embedding.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "finin/errors.hpp"
#include "finin/rng.hpp"

namespace finin {

std::vector<double> embed_text(const EmbeddingProvider& provider, const std::string& text) {
  return provider.embed(text);
}

std::vector<double> embed_news(const EmbeddingProvider& provider, const std::string& id,
                               const std::string& headline) {
  return provider.embed(provider.keyed_by_id() ? id : headline);
}

namespace {

class HashingProvider final : public EmbeddingProvider {
 public:
  HashingProvider(int dim, uint64_t seed)
      : dim_(dim), seed_(seed), name_("hashing(dim=" + std::to_string(dim) +
                                      ",seed=" + std::to_string(seed) + ")") {
    if (dim < 8) raise(ErrKind::InvalidParameter, "hashing_provider: dim must be >= 8");
  }

  int dim() const override { return dim_; }
  const std::string& name() const override { return name_; }

  std::vector<double> embed(const std::string& text) const override {
    if (text.empty()) raise(ErrKind::EmptyText, "embed: empty text");
    std::vector<double> v(static_cast<size_t>(dim_), 0.0);
    std::string token;
    auto flush = [&]() {
      if (token.empty()) return;
      const uint64_t h = splitmix64(fnv1a64(token) ^ seed_);
      const size_t idx = static_cast<size_t>(h % static_cast<uint64_t>(dim_));
      v[idx] += (h >> 63) ? -1.0 : 1.0;
      token.clear();
    };
    for (const char c : text) {
      const unsigned char u = static_cast<unsigned char>(c);
      if (std::isalnum(u)) {
        token.push_back(static_cast<char>(std::tolower(u)));
      } else {
        flush();
      }
    }
    flush();
    double norm_sq = 0.0;
    for (const double x : v) norm_sq += x * x;
    if (norm_sq == 0.0) {
      v[0] = 1.0;
      return v;
    }
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (double& x : v) x *= inv;
    return v;
  }

 private:
  int dim_;
  uint64_t seed_;
  std::string name_;
};

class PrecomputedProvider final : public EmbeddingProvider {
 public:
  explicit PrecomputedProvider(const std::string& path) : name_("precomputed(" + path + ")") {
    std::ifstream in(path);
    if (!in) raise(ErrKind::IoFailure, "precomputed_provider: cannot open " + path);
    std::string header;
    if (!std::getline(in, header)) {
      raise(ErrKind::MalformedFile, "precomputed_provider: empty file " + path);
    }
    std::istringstream hs(header);
    std::string dim_field, key_field;
    hs >> dim_field >> key_field;
    if (dim_field.rfind("dim=", 0) != 0 || key_field.rfind("keyed_by=", 0) != 0) {
      raise(ErrKind::MalformedFile, "precomputed_provider: bad header '" + header + "'");
    }
    try {
      dim_ = std::stoi(dim_field.substr(4));
    } catch (const std::exception&) {
      raise(ErrKind::MalformedFile, "precomputed_provider: bad dim in header");
    }
    if (dim_ <= 0) raise(ErrKind::MalformedFile, "precomputed_provider: dim must be positive");
    const std::string keyed = key_field.substr(9);
    if (keyed == "id") {
      by_id_ = true;
    } else if (keyed == "text") {
      by_id_ = false;
    } else {
      raise(ErrKind::MalformedFile, "precomputed_provider: keyed_by must be text or id");
    }
    std::string line;
    size_t lineno = 1;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      const size_t tab = line.find('\t');
      if (tab == std::string::npos) {
        raise(ErrKind::MalformedFile,
              "precomputed_provider: line " + std::to_string(lineno) + " has no tab");
      }
      const std::string key = line.substr(0, tab);
      std::istringstream vs(line.substr(tab + 1));
      std::vector<double> vec;
      double x;
      while (vs >> x) vec.push_back(x);
      if (static_cast<int>(vec.size()) != dim_) {
        raise(ErrKind::DimensionMismatch,
              "precomputed_provider: line " + std::to_string(lineno) + " has " +
                  std::to_string(vec.size()) + " values, expected " + std::to_string(dim_));
      }
      for (const double y : vec) {
        if (!std::isfinite(y)) {
          raise(ErrKind::MalformedFile,
                "precomputed_provider: non-finite value at line " + std::to_string(lineno));
        }
      }
      map_[key] = std::move(vec);
    }
  }

  int dim() const override { return dim_; }
  const std::string& name() const override { return name_; }
  bool keyed_by_id() const override { return by_id_; }

  std::vector<double> embed(const std::string& key) const override {
    if (key.empty()) raise(ErrKind::EmptyText, "embed: empty key");
    const auto it = map_.find(key);
    if (it == map_.end()) {
      raise(ErrKind::MissingKey, "precomputed_provider: no embedding for '" + key + "'");
    }
    return it->second;
  }

  size_t entries() const { return map_.size(); }

 private:
  int dim_ = 0;
  bool by_id_ = false;
  std::string name_;
  std::unordered_map<std::string, std::vector<double>> map_;
};

}  // namespace

std::unique_ptr<EmbeddingProvider> hashing_provider(int dim, uint64_t seed) {
  return std::make_unique<HashingProvider>(dim, seed);
}

std::unique_ptr<EmbeddingProvider> precomputed_provider(const std::string& path) {
  return std::make_unique<PrecomputedProvider>(path);
}

const std::vector<double>& EmbeddingCache::text(const std::string& text) {
  auto it = map_.find(text);
  if (it != map_.end()) return it->second;
  return map_.emplace(text, provider_->embed(text)).first->second;
}

const std::vector<double>& EmbeddingCache::news(const std::string& id,
                                                const std::string& headline) {
  const std::string& key = provider_->keyed_by_id() ? id : headline;
  auto it = map_.find(key);
  if (it != map_.end()) return it->second;
  return map_.emplace(key, provider_->embed(key)).first->second;
}

}  // namespace finin
