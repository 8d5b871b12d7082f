#pragma once

#include <stdexcept>
#include <string>

namespace fv {

// Error taxonomy shared by all modules. Each failure class gets its own type
// so callers (and the C API) can tell configuration mistakes from data
// problems without parsing messages.

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& m) : std::runtime_error(m) {}
};

struct DimensionError : std::runtime_error {
  explicit DimensionError(const std::string& m) : std::runtime_error(m) {}
};

struct DegenerateInputError : std::runtime_error {
  explicit DegenerateInputError(const std::string& m) : std::runtime_error(m) {}
};

// Zero noise power: the SNR of a noiseless frame is unbounded.
struct InfiniteSnrError : std::runtime_error {
  explicit InfiniteSnrError(const std::string& m) : std::runtime_error(m) {}
};

struct LengthError : std::runtime_error {
  explicit LengthError(const std::string& m) : std::runtime_error(m) {}
};

struct LabelError : std::runtime_error {
  explicit LabelError(const std::string& m) : std::runtime_error(m) {}
};

struct EmptyInputError : std::runtime_error {
  explicit EmptyInputError(const std::string& m) : std::runtime_error(m) {}
};

struct DivergenceUndefinedError : std::runtime_error {
  explicit DivergenceUndefinedError(const std::string& m) : std::runtime_error(m) {}
};

struct StratificationError : std::runtime_error {
  explicit StratificationError(const std::string& m) : std::runtime_error(m) {}
};

// On-disk format violations; message names the byte offset.
struct FormatError : std::runtime_error {
  explicit FormatError(const std::string& m) : std::runtime_error(m) {}
};

struct AggregationError : std::runtime_error {
  explicit AggregationError(const std::string& m) : std::runtime_error(m) {}
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& m) : std::runtime_error(m) {}
};

}  // namespace fv
