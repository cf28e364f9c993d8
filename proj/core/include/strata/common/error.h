#pragma once

#include <stdexcept>
#include <string>

namespace strata {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Graph invariant violations: duplicate ids, dangling endpoints, layer order.
class GraphError : public Error {
 public:
  using Error::Error;
};

// Unreadable, corrupt or incompatible checkpoint artefacts.
class CheckpointError : public Error {
 public:
  using Error::Error;
};

// Malformed user input (config, conversation files, QA files).
class InputError : public Error {
 public:
  using Error::Error;
};

// Remote embedding/chat backend failures. Callers treat these as transient.
class BackendError : public Error {
 public:
  using Error::Error;
};

}  // namespace strata
