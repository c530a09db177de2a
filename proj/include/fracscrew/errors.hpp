#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fracscrew {

// Thrown when an iterative procedure fails to reach its tolerance.
// Carries whatever state the caller may want for diagnostics.
class NonConvergenceError : public std::runtime_error {
public:
    NonConvergenceError(const std::string& what, double residual,
                        std::vector<double> last_iterate = {})
        : std::runtime_error(what), residual(residual),
          last_iterate(std::move(last_iterate)) {}

    double residual;
    std::vector<double> last_iterate;
};

} // namespace fracscrew
