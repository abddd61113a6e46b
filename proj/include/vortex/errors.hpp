#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "vortex/model.hpp"

namespace vortex {

/// Iteration budget exhausted. Keeps the last iterate and the sup-norm
/// residual after every iteration.
class NonConvergence : public std::runtime_error {
public:
    NonConvergence(const std::string& what, Profile last, std::vector<double> history)
        : std::runtime_error(what), last_iterate(std::move(last)), residual_history(std::move(history)) {}

    Profile last_iterate;
    std::vector<double> residual_history;
};

class InsufficientPoints : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The fitted field is below 1e-14 everywhere in the tail window.
class DegenerateTail : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SingularSystem : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Energy increased during an explicit gradient-flow step.
class StabilityViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace vortex
