#pragma once

#include <stdexcept>
#include <string>

namespace psocp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidOrderError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class ConfigurationError : public Error {
public:
    using Error::Error;
};

class InconsistentStateError : public Error {
public:
    using Error::Error;
};

class MappingError : public Error {
public:
    using Error::Error;
};

/// Non-finite value produced while evaluating problem functions.
/// `node()` is -1 when the failure is not tied to a collocation node.
class EvaluationError : public Error {
public:
    explicit EvaluationError(const std::string& what, int node = -1)
        : Error(node >= 0 ? what + " (node " + std::to_string(node) + ")" : what),
          node_(node) {}

    [[nodiscard]] int node() const noexcept { return node_; }

private:
    int node_;
};

class SingularKktError : public Error {
public:
    using Error::Error;
};

class IntegrationError : public Error {
public:
    enum class Kind { MaxSteps, StepUnderflow };

    IntegrationError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

    [[nodiscard]] Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

}  // namespace psocp
