#pragma once

#include <stdexcept>
#include <string>

namespace apm {

enum class ErrorKind { Validation, Numerical, Domain };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// Thrown when an orbit leaves the chart; step is the first iterate found outside.
class ChartExit : public Error {
public:
    ChartExit(int step, const std::string& what) : Error(ErrorKind::Domain, what), step_(step) {}
    int step() const noexcept { return step_; }

private:
    int step_;
};

inline Error validation_error(const std::string& msg) { return Error(ErrorKind::Validation, msg); }
inline Error numerical_error(const std::string& msg) { return Error(ErrorKind::Numerical, msg); }
inline Error domain_error(const std::string& msg) { return Error(ErrorKind::Domain, msg); }

}  // namespace apm
