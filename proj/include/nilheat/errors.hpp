#ifndef NILHEAT_ERRORS_HPP
#define NILHEAT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace nilheat {

// Bad user input: malformed expressions, dimension mismatches, x0 not a
// stationary point of the drift, transcendental arguments with nonzero
// constant term. CLI exit code 2.
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Mathematically undefined request (division by zero polynomial, singular
// linear part in a series inversion, ...).
struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

// A truncated series was too short for the requested operation; retry with a
// larger truncation degree.
struct TruncationError : std::runtime_error {
  explicit TruncationError(const std::string& msg) : std::runtime_error(msg) {}
};

// The bracket filtration did not reach full rank at the weight cap, so the
// rank condition is undecided at this cap. CLI exit code 3.
struct HormanderUndecided : std::runtime_error {
  explicit HormanderUndecided(const std::string& msg) : std::runtime_error(msg) {}
};

// A Monte-Carlo quality gate failed (too many discarded paths, not enough
// box hits for a usable density estimate, ...). CLI exit code 4.
struct SimulationQuality : std::runtime_error {
  explicit SimulationQuality(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace nilheat

#endif
