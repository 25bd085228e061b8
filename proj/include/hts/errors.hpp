#pragma once

#include <stdexcept>
#include <string>

namespace hts {

// Base class for all engine errors.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string &msg) : std::runtime_error(msg) {}
};

// Malformed inputs: bad hierarchy files, schema violations, calendar gaps.
class DataError : public Error {
public:
  explicit DataError(const std::string &msg) : Error(msg) {}
};

// Numerical failures: singular systems, degenerate scales, non-convergence.
class NumericError : public Error {
public:
  explicit NumericError(const std::string &msg) : Error(msg) {}
};

}  // namespace hts
