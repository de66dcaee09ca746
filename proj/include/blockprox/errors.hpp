#ifndef BLOCKPROX_ERRORS_HPP_
#define BLOCKPROX_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace blockprox {

// Caller misuse: bad arguments, malformed config, point outside dom g.
class UsageError : public std::invalid_argument {
 public:
  explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

// Unreadable or unwritable files.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Solver-side failures (inconsistent oracles, exhausted safeguards).
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace blockprox

#endif  // BLOCKPROX_ERRORS_HPP_
