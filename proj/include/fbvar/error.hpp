#pragma once

#include <stdexcept>
#include <string>

namespace fbvar {

// Bad input: schema, config, restriction grid, argument ranges.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A conditional produced non-finite moments or a factorisation failed.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A run directory or draws file that fails its header/checksum checks.
class IntegrityError : public IoError {
 public:
  using IoError::IoError;
};

}  // namespace fbvar
