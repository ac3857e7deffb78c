#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gamesum {

// Malformed input, schema violation or bad configuration. Maps to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Failure while running a stage (I/O, backend errors). Maps to exit code 2.
class RuntimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Sink for non-fatal diagnostics. Functions that can emit warnings accept a
// Diagnostics pointer; passing nullptr routes the message to stderr instead.
class Diagnostics {
 public:
  void warn(std::string message) { warnings_.push_back(std::move(message)); }
  const std::vector<std::string>& warnings() const { return warnings_; }
  bool empty() const { return warnings_.empty(); }
  void clear() { warnings_.clear(); }

 private:
  std::vector<std::string> warnings_;
};

void warn_to(Diagnostics* diag, std::string message);

}  // namespace gamesum
