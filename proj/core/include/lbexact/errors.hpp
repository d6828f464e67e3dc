#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lbexact {

// Invalid network parameters, policy descriptions, topologies or run configs.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class CapacityExceeded : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

class InvalidRank : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class InconsistentView : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class InfeasibleTransition : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class NonExchangeablePolicy : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A sampler-internal invariant failed (ordering, coalescence guarantee, ...).
// Seeing one of these means a bug, never a legitimate outcome.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Base for the recoverable "ran out of budget" failures of a single draw.
class SamplerFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DepthExceeded : public SamplerFailure {
 public:
  explicit DepthExceeded(std::uint64_t max_depth)
      : SamplerFailure("backward simulation exceeded max_depth=" + std::to_string(max_depth)),
        max_depth_(max_depth) {}
  std::uint64_t max_depth() const noexcept { return max_depth_; }

 private:
  std::uint64_t max_depth_;
};

class TrialsExceeded : public SamplerFailure {
 public:
  explicit TrialsExceeded(std::uint64_t max_trials)
      : SamplerFailure("acceptance-rejection exceeded max_trials=" + std::to_string(max_trials)),
        max_trials_(max_trials) {}
  std::uint64_t max_trials() const noexcept { return max_trials_; }

 private:
  std::uint64_t max_trials_;
};

struct DrawError {
  std::uint64_t draw_index;
  std::string message;
};

// Raised by sample_many when at least one draw failed; carries every failure.
class BatchError : public SamplerFailure {
 public:
  explicit BatchError(std::vector<DrawError> errors)
      : SamplerFailure(summarize(errors)), errors_(std::move(errors)) {}
  const std::vector<DrawError>& errors() const noexcept { return errors_; }

 private:
  static std::string summarize(const std::vector<DrawError>& errors) {
    std::string msg = std::to_string(errors.size()) + " draw(s) failed";
    if (!errors.empty()) {
      msg += "; first: draw " + std::to_string(errors.front().draw_index) + ": " +
             errors.front().message;
    }
    return msg;
  }
  std::vector<DrawError> errors_;
};

}  // namespace lbexact
