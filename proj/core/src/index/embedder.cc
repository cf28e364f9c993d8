#include "strata/index/embedder.h"

#include <cmath>
#include <sstream>

#include "strata/common/error.h"
#include "strata/common/hash.h"
#include "strata/common/text.h"

namespace strata::index {

bool normalize(std::span<float> v) {
  double sq = 0.0;
  for (float x : v) sq += static_cast<double>(x) * x;
  if (sq <= 0.0 || !std::isfinite(sq)) return false;
  const double inv = 1.0 / std::sqrt(sq);
  for (float& x : v) x = static_cast<float>(x * inv);
  return true;
}

double dot(std::span<const float> a, std::span<const float> b) {
  double acc = 0.0;
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) acc += static_cast<double>(a[i]) * b[i];
  return acc;
}

Embedding embed_and_normalize(Embedder& embedder, std::string_view text) {
  if (text::trim(text).empty()) throw InputError("cannot embed empty text");
  Embedding v = embedder.embed_raw(text);
  if (v.size() != embedder.dimension()) {
    throw InputError("embedder '" + embedder.identity() + "' returned " + std::to_string(v.size()) +
                     " values, expected " + std::to_string(embedder.dimension()));
  }
  if (!normalize(v)) throw InputError("embedder returned a zero vector");
  return v;
}

HashEmbedder::HashEmbedder(std::size_t dimension, std::uint64_t seed) : dimension_(dimension), seed_(seed) {
  if (dimension_ == 0) throw InputError("embedding dimension must be positive");
}

std::string HashEmbedder::identity() const {
  std::ostringstream out;
  out << "hash-embedder/v1/d" << dimension_ << "/seed" << std::hex << seed_;
  return out.str();
}

std::vector<float> HashEmbedder::embed_raw(std::string_view input) {
  std::vector<std::string> tokens = text::word_tokens(input);
  if (tokens.empty()) {
    std::string whole = text::trim(input);
    if (!whole.empty()) tokens.push_back(std::move(whole));
  }
  std::vector<double> acc(dimension_, 0.0);
  for (const std::string& token : tokens) {
    std::uint64_t state = fnv1a64(token) ^ seed_;
    for (std::size_t i = 0; i < dimension_; ++i) {
      // Top 53 bits -> [0, 1) -> [-1, 1).
      const double u = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
      acc[i] += 2.0 * u - 1.0;
    }
  }
  return std::vector<float>(acc.begin(), acc.end());
}

}  // namespace strata::index
