#pragma once

#include <stdexcept>
#include <string>

namespace invvol {

// Price outside the invertible range, or parameters outside the monotone region.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Iterative solver exhausted its iteration budget.
class NoConvergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ATM vega below the usable floor; the skew estimator would divide by ~0.
class DegenerateVega : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Covariance factorization failed even after the jitter retry.
class FactorizationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed quote file; carries the 1-based row number where parsing stopped.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t row)
        : std::runtime_error(what + " (row " + std::to_string(row) + ")"), row_(row) {}
    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

// Structurally valid file with inadmissible values (non-positive IVs, duplicate maturities).
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Skew series mixes signs or contains zeros; the log-log fit is undefined.
class SignError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A denominator that must be nonzero is zero (e.g. the 50-delta call IV).
class DivisionByZero : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Fewer points than the regression needs.
class InsufficientData : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace invvol
