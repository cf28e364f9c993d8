#include "common/http.h"
#include "strata/common/error.h"
#include "strata/index/embedder.h"

namespace strata::index {

HttpEmbedder::HttpEmbedder(HttpEndpoint endpoint, std::size_t dimension)
    : endpoint_(std::move(endpoint)), dimension_(dimension) {
  if (endpoint_.url.empty()) throw InputError("embedding endpoint URL is empty");
}

std::string HttpEmbedder::identity() const {
  return "http:" + endpoint_.url + (endpoint_.model.empty() ? "" : "#" + endpoint_.model) + "/d" +
         std::to_string(dimension_);
}

std::vector<std::vector<float>> HttpEmbedder::embed_batch(std::span<const std::string> texts) {
  nlohmann::json body{{"texts", texts}};
  if (!endpoint_.model.empty()) body["model"] = endpoint_.model;
  const nlohmann::json reply = detail::post_json(endpoint_.url, body, endpoint_.api_key, endpoint_.timeout_seconds);
  if (!reply.contains("vectors") || !reply["vectors"].is_array() || reply["vectors"].size() != texts.size()) {
    throw BackendError("embedding reply lacks a 'vectors' array of the requested length");
  }
  std::vector<std::vector<float>> out;
  out.reserve(texts.size());
  try {
    for (const auto& v : reply["vectors"]) out.push_back(v.get<std::vector<float>>());
  } catch (const nlohmann::json::exception& e) {
    throw BackendError(std::string("malformed embedding vector: ") + e.what());
  }
  return out;
}

std::vector<float> HttpEmbedder::embed_raw(std::string_view text) {
  const std::string owned(text);
  return embed_batch(std::span<const std::string>(&owned, 1)).front();
}

}  // namespace strata::index
