#pragma once

#include <stdexcept>
#include <string>

namespace bpgof {

// Parameter outside the admissible set of a distribution or weight function.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Sample cannot support the requested estimator (e.g. a zero marginal mean).
class DegenerateSampleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A moment statistic whose denominator vanishes or changes sign.
class UnstableStatisticError : public std::runtime_error {
public:
    UnstableStatisticError(const std::string& what, double offending)
        : std::runtime_error(what), offending_(offending) {}
    double offending() const noexcept { return offending_; }

private:
    double offending_;
};

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed user input (CSV, config file, family spec). Line is 1-based, 0 if unknown.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace bpgof
