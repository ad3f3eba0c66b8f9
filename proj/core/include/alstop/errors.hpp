#pragma once

#include <stdexcept>

namespace alstop {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// No term survived stopword removal and the frequency cutoff.
struct EmptyVocabulary : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

// A dataset directory does not follow the expected layout.
struct LayoutError : Error {
  using Error::Error;
};

struct InvalidParams : Error {
  using Error::Error;
};

// A one-vs-rest subproblem has no positive or no negative examples.
struct DegenerateClass : Error {
  using Error::Error;
};

struct LengthMismatch : Error {
  using Error::Error;
};

struct EmptyInput : Error {
  using Error::Error;
};

// A batch request exceeds the current pool size.
struct BatchTooLarge : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace alstop
