#pragma once

#include <stdexcept>
#include <string>

namespace banff {

// Base for every error caused by bad input. The CLI maps these to exit code 2;
// anything else escaping a command is treated as an internal failure.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DegenerateGeometry : public InputError {
public:
    using InputError::InputError;
};

class MalformedDocument : public InputError {
public:
    using InputError::InputError;
};

class SchemaViolation : public InputError {
public:
    using InputError::InputError;
};

class GradeOutOfRange : public InputError {
public:
    using InputError::InputError;
};

class IndexMismatch : public InputError {
public:
    using InputError::InputError;
};

class PlacementFailure : public InputError {
public:
    using InputError::InputError;
};

class EmptyMatrix : public InputError {
public:
    using InputError::InputError;
};

}  // namespace banff
