#pragma once

#include <stdexcept>
#include <string>

namespace hm {

/// Malformed or inconsistent input data: bad shapes, too-short signals,
/// empty regions, unreadable files.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by the trainer when the loss stops being finite.
class TrainingDiverged : public std::runtime_error {
 public:
  TrainingDiverged(int epoch, double loss)
      : std::runtime_error("training diverged at epoch " + std::to_string(epoch) +
                           " (loss " + std::to_string(loss) + ")"),
        epoch_(epoch) {}

  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Zero speed everywhere: SPARC is undefined for a motionless signal.
class NoMovement : public DataError {
 public:
  NoMovement() : DataError("no movement") {}
};

}  // namespace hm
