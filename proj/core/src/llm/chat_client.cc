#include "strata/llm/chat_client.h"

#include <fstream>

#include <nlohmann/json.hpp>

#include "strata/common/error.h"
#include "strata/common/hash.h"

namespace strata::llm {

std::string ChatClient::complete(std::string_view system, std::string_view user) {
  ++calls_;
  return do_complete(system, user);
}

std::string prompt_key(std::string_view system, std::string_view user) {
  if (system.empty()) return sha256_hex(user);
  std::string joined(system);
  joined.append("\n\n");
  joined.append(user);
  return sha256_hex(joined);
}

std::unique_ptr<ScriptedChatClient> ScriptedChatClient::from_transcript(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open transcript " + path.string());
  nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
  if (!doc.is_object()) throw InputError("transcript " + path.string() + " is not a JSON object");
  std::map<std::string, std::string> replies;
  for (const auto& [key, value] : doc.items()) {
    if (!value.is_string()) throw InputError("transcript entry " + key + " is not a string");
    replies.emplace(key, value.get<std::string>());
  }
  return std::make_unique<ScriptedChatClient>(std::move(replies));
}

void ScriptedChatClient::add(std::string_view system, std::string_view user, std::string reply) {
  replies_[prompt_key(system, user)] = std::move(reply);
}

std::string ScriptedChatClient::do_complete(std::string_view system, std::string_view user) {
  auto it = replies_.find(prompt_key(system, user));
  if (it != replies_.end()) return it->second;
  if (fallback_) return fallback_->complete(system, user);
  if (default_reply_) return *default_reply_;
  throw BackendError("scripted client has no reply for prompt " + prompt_key(system, user).substr(0, 12));
}

std::string RecordingChatClient::do_complete(std::string_view system, std::string_view user) {
  std::string reply = inner_.complete(system, user);
  std::lock_guard lock(mutex_);
  transcript_[prompt_key(system, user)] = reply;
  return reply;
}

std::map<std::string, std::string> RecordingChatClient::transcript() const {
  std::lock_guard lock(mutex_);
  return transcript_;
}

void RecordingChatClient::save(const std::filesystem::path& path) const {
  nlohmann::json doc(transcript());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw InputError("cannot write transcript " + path.string());
  out << doc.dump(1) << "\n";
}

std::string FailingChatClient::do_complete(std::string_view, std::string_view) {
  throw BackendError("chat backend unavailable");
}

}  // namespace strata::llm
