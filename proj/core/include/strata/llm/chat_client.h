#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

namespace strata::llm {

// Every completion in this system is requested at temperature 0.
inline constexpr double kTemperature = 0.0;

// Chat-completion backend. complete() counts calls (atomically) and forwards
// to the implementation; failures surface as BackendError.
class ChatClient {
 public:
  virtual ~ChatClient() = default;

  std::string complete(std::string_view system, std::string_view user);

  virtual std::string identity() const = 0;
  std::uint64_t calls() const { return calls_.load(); }
  void reset_calls() { calls_ = 0; }

 protected:
  virtual std::string do_complete(std::string_view system, std::string_view user) = 0;

 private:
  std::atomic<std::uint64_t> calls_{0};
};

// Key used by scripted replies and transcripts: SHA-256 of the user prompt,
// preceded by the system prompt and a blank line when one is given.
std::string prompt_key(std::string_view system, std::string_view user);

struct ChatEndpoint {
  std::string url;  // full chat-completions URL
  std::string api_key;
  std::string model;
  double timeout_seconds = 120.0;
};

// OpenAI-compatible /chat/completions client.
class HttpChatClient final : public ChatClient {
 public:
  explicit HttpChatClient(ChatEndpoint endpoint);
  std::string identity() const override;

 protected:
  std::string do_complete(std::string_view system, std::string_view user) override;

 private:
  ChatEndpoint endpoint_;
};

// Replays canned replies keyed by prompt_key(). Misses go to `fallback` when
// set, otherwise the default reply when set, otherwise BackendError.
class ScriptedChatClient final : public ChatClient {
 public:
  ScriptedChatClient() = default;
  explicit ScriptedChatClient(std::map<std::string, std::string> replies) : replies_(std::move(replies)) {}

  // Loads a transcript file: JSON object {prompt_key: reply}.
  static std::unique_ptr<ScriptedChatClient> from_transcript(const std::filesystem::path& path);

  void add(std::string_view system, std::string_view user, std::string reply);
  void set_default(std::string reply) { default_reply_ = std::move(reply); }
  void set_fallback(ChatClient* fallback) { fallback_ = fallback; }

  std::string identity() const override { return "scripted"; }

 protected:
  std::string do_complete(std::string_view system, std::string_view user) override;

 private:
  std::map<std::string, std::string> replies_;
  std::optional<std::string> default_reply_;
  ChatClient* fallback_ = nullptr;
};

// Wraps another client and keeps every exchange for later replay.
class RecordingChatClient final : public ChatClient {
 public:
  explicit RecordingChatClient(ChatClient& inner) : inner_(inner) {}

  std::string identity() const override { return inner_.identity(); }
  void save(const std::filesystem::path& path) const;
  std::map<std::string, std::string> transcript() const;

 protected:
  std::string do_complete(std::string_view system, std::string_view user) override;

 private:
  ChatClient& inner_;
  mutable std::mutex mutex_;
  std::map<std::string, std::string> transcript_;
};

// Offline stand-in that recognises each shipped prompt and answers it with
// simple lexical rules: overlap-based rerank scores, keyword intent scores,
// sentence-level extraction, best-overlap answers and token-containment
// judging. Deterministic by construction.
class RuleBasedChatClient final : public ChatClient {
 public:
  std::string identity() const override { return "rule-based/v1"; }

 protected:
  std::string do_complete(std::string_view system, std::string_view user) override;
};

// Always throws BackendError; used to exercise failure paths.
class FailingChatClient final : public ChatClient {
 public:
  std::string identity() const override { return "failing"; }

 protected:
  std::string do_complete(std::string_view system, std::string_view user) override;
};

}  // namespace strata::llm
