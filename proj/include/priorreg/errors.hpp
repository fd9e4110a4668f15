#pragma once

#include <stdexcept>
#include <string>

namespace priorreg {

// Raised when a loss or gradient turns non-finite; carries the step index
// (negative when not inside a training loop) and the offending term.
class DivergedError : public std::runtime_error {
 public:
  DivergedError(std::string term, double value, long step = -1)
      : std::runtime_error("diverged at term '" + term + "' (step " +
                           std::to_string(step) + ")"),
        term_(std::move(term)),
        value_(value),
        step_(step) {}

  const std::string& term() const { return term_; }
  double value() const { return value_; }
  long step() const { return step_; }

 private:
  std::string term_;
  double value_;
  long step_;
};

}  // namespace priorreg
