#pragma once

#include <stdexcept>
#include <string>

namespace promptee {

/// Input that violates a documented contract (bad file, bad flag, broken
/// invariant). The CLI maps it to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A prompt instance that cannot be built for this input (overlapping
/// spans, sentinel budget, missing markers). Callers usually skip the
/// instance and log the message.
class PromptRejected : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Failure while running a stage (decode, train, I/O). Exit code 2.
class RuntimeFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace promptee

#include <vector>

namespace promptee {

/// Non-fatal messages collected while building or running a stage.
struct Diagnostics {
  std::vector<std::string> messages;

  void add(std::string message) { messages.push_back(std::move(message)); }
  void append(const Diagnostics& other) {
    messages.insert(messages.end(), other.messages.begin(), other.messages.end());
  }
};

}  // namespace promptee
