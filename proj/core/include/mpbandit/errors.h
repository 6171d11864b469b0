#ifndef MPBANDIT_ERRORS_H_
#define MPBANDIT_ERRORS_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mpbandit {

// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A player emitted an action outside {0} U [K], or the dummy action where it
// is not permitted.
class InvalidActionError : public Error {
 public:
  InvalidActionError(int player, std::int64_t round, int action);

  int player() const { return player_; }
  std::int64_t round() const { return round_; }
  int action() const { return action_; }

 private:
  int player_;
  std::int64_t round_;
  int action_;
};

// A state machine was driven in a way its protocol forbids.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

class InvalidTargetError : public Error {
 public:
  using Error::Error;
};

// Collects every violation found while validating a configuration.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> violations);

  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

class InvalidModeError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

// Number-of-players recovery failures.
class EstimationFailedError : public Error {
 public:
  using Error::Error;
};

class NoCandidateError : public Error {
 public:
  using Error::Error;
};

class AmbiguityError : public Error {
 public:
  AmbiguityError(const std::string& what, std::vector<int> candidates)
      : Error(what), candidates_(std::move(candidates)) {}

  const std::vector<int>& candidates() const { return candidates_; }

 private:
  std::vector<int> candidates_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace mpbandit

#endif  // MPBANDIT_ERRORS_H_
