#ifndef NESTEDMA_ERRORS_HPP
#define NESTEDMA_ERRORS_HPP

#include <stdexcept>

namespace nestedma {

struct RankDeficientError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatchError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InvalidParamsError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct EmptyInputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct PhiZeroError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ZeroSignalError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace nestedma

#endif
