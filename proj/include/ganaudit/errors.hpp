#pragma once

#include <stdexcept>
#include <string>

namespace ganaudit {

// Bad model / experiment configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Corpus or artifact files that cannot be read or do not follow the layout
// (CLI exit code 4).
class LoadError : public std::runtime_error {
 public:
  explicit LoadError(const std::string& msg) : std::runtime_error(msg) {}
};

class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

class SplitError : public std::runtime_error {
 public:
  explicit SplitError(const std::string& msg) : std::runtime_error(msg) {}
};

class CheckpointError : public std::runtime_error {
 public:
  explicit CheckpointError(const std::string& msg) : std::runtime_error(msg) {}
};

class ClassifierContractError : public std::runtime_error {
 public:
  explicit ClassifierContractError(const std::string& msg)
      : std::runtime_error(msg) {}
};

// Query dataset could not be assembled (e.g. not enough negatives).
class ConstructionError : public std::runtime_error {
 public:
  explicit ConstructionError(const std::string& msg)
      : std::runtime_error(msg) {}
};

// Non-finite loss during adversarial training (CLI exit code 3).
class TrainingDivergedError : public std::runtime_error {
 public:
  TrainingDivergedError(const std::string& msg, int epoch)
      : std::runtime_error(msg), epoch_(epoch) {}
  int epoch() const { return epoch_; }

 private:
  int epoch_;
};

}  // namespace ganaudit
