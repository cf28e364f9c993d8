#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace strata::index {

using Embedding = std::vector<float>;

inline constexpr std::size_t kDefaultDimension = 384;

// Text embedding backend. Implementations must be deterministic: equal input
// text yields bit-equal vectors within one process configuration.
class Embedder {
 public:
  virtual ~Embedder() = default;

  virtual std::string identity() const = 0;
  virtual std::size_t dimension() const = 0;

  // Unnormalised vector of length dimension(). Remote backends throw
  // BackendError on transport failure.
  virtual std::vector<float> embed_raw(std::string_view text) = 0;
};

// Scales `v` to unit Euclidean norm. Returns false (leaving `v` untouched)
// when the norm is zero.
bool normalize(std::span<float> v);

// Inner product accumulated in double precision.
double dot(std::span<const float> a, std::span<const float> b);

// Embeds `text` and L2-normalises the result. Throws InputError when `text`
// is blank or the backend returns a zero/mis-sized vector.
Embedding embed_and_normalize(Embedder& embedder, std::string_view text);

// Deterministic stand-in for a sentence encoder: every word token (split on
// non-alphanumerics, ASCII-lowercased) is hashed with a fixed seed and
// expanded into a pseudo-random d-dimensional vector by splitmix64; token
// vectors are summed. Texts sharing most tokens land close together.
class HashEmbedder final : public Embedder {
 public:
  static constexpr std::uint64_t kDefaultSeed = 0x5eed'1234'abcd'0042ULL;

  explicit HashEmbedder(std::size_t dimension = kDefaultDimension, std::uint64_t seed = kDefaultSeed);

  std::string identity() const override;
  std::size_t dimension() const override { return dimension_; }
  std::vector<float> embed_raw(std::string_view text) override;

 private:
  std::size_t dimension_;
  std::uint64_t seed_;
};

struct HttpEndpoint {
  std::string url;  // e.g. http://localhost:8080/embed
  std::string api_key;
  std::string model;
  double timeout_seconds = 60.0;
};

// POSTs {"texts": [...], "model": ...} and expects {"vectors": [[...]]}.
class HttpEmbedder final : public Embedder {
 public:
  HttpEmbedder(HttpEndpoint endpoint, std::size_t dimension);

  std::string identity() const override;
  std::size_t dimension() const override { return dimension_; }
  std::vector<float> embed_raw(std::string_view text) override;
  std::vector<std::vector<float>> embed_batch(std::span<const std::string> texts);

 private:
  HttpEndpoint endpoint_;
  std::size_t dimension_;
};

}  // namespace strata::index
