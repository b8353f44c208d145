#pragma once

#include <stdexcept>
#include <string>

namespace ergosense {

// Bad configuration or construction parameters. `field` is a dotted path
// into the scenario document when the error comes from a config file.
class ValidationError : public std::runtime_error {
public:
    ValidationError(std::string field, const std::string& message)
        : std::runtime_error(field.empty() ? message : field + ": " + message),
          field_(std::move(field)),
          message_(message) {}
    explicit ValidationError(const std::string& message) : ValidationError("", message) {}

    const std::string& field() const noexcept { return field_; }
    const std::string& message() const noexcept { return message_; }

private:
    std::string field_;
    std::string message_;
};

// A simulation invariant was broken (e.g. the sensor started inside a shape).
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// The dataset cannot be fitted yet (single class). Callers keep their previous target.
class NotFittable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class CalibrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class EstimatorError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ergosense
