#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

namespace finin {

// Frozen text encoder contract. Implementations are immutable after
// construction and safe for concurrent embed() calls; embed() is a pure
// function of its input, stable across process restarts.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual int dim() const = 0;
  virtual const std::string& name() const = 0;

  // Throws EmptyText for empty input, MissingKey for unknown keys on
  // lookup-backed providers.
  virtual std::vector<double> embed(const std::string& text) const = 0;

  // Lookup-backed providers may key records by news id instead of text.
  virtual bool keyed_by_id() const { return false; }
};

// Embed a news item / text through a provider, honouring id-keying.
std::vector<double> embed_text(const EmbeddingProvider& provider, const std::string& text);
std::vector<double> embed_news(const EmbeddingProvider& provider, const std::string& id,
                               const std::string& headline);

// Seeded signed feature hashing: lowercase, split on non-alphanumerics, each
// token adds ±1 at (hash mod dim), then L2 normalize. A degenerate all-zero
// sum becomes the unit vector along index 0.
std::unique_ptr<EmbeddingProvider> hashing_provider(int dim, uint64_t seed);

// File-backed provider. Format: header "dim=<E> keyed_by=<text|id>", then one
// record per line: key, tab, E space-separated reals.
std::unique_ptr<EmbeddingProvider> precomputed_provider(const std::string& path);

// Memoizes provider outputs keyed by lookup key. One cache serves one
// provider; reuse across epochs, grid points and windows is what it is for.
class EmbeddingCache {
 public:
  explicit EmbeddingCache(const EmbeddingProvider& provider) : provider_(&provider) {}

  const std::vector<double>& text(const std::string& text);
  const std::vector<double>& news(const std::string& id, const std::string& headline);
  const EmbeddingProvider& provider() const { return *provider_; }
  size_t size() const { return map_.size(); }

 private:
  const EmbeddingProvider* provider_;
  std::unordered_map<std::string, std::vector<double>> map_;
};

}  // namespace finin
