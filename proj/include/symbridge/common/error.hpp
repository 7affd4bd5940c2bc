#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace symbridge {

// Iterative solver stopped at its cap. Carries the last iterate so callers can
// inspect how far it got.
class ConvergenceError : public std::runtime_error {
  public:
    ConvergenceError(const std::string& what, std::vector<double> last_iterate, double residual)
        : std::runtime_error(what), last_iterate_(std::move(last_iterate)), residual_(residual) {}

    const std::vector<double>& last_iterate() const noexcept { return last_iterate_; }
    double residual() const noexcept { return residual_; }

  private:
    std::vector<double> last_iterate_;
    double residual_;
};

// Monte Carlo estimate is undefined, e.g. every importance weight vanished.
class EstimationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Required mass sits where the kernel has no support.
class SupportError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace symbridge
