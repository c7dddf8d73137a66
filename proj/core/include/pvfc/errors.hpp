#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pvfc {

/// Base of every error raised by the library. `what()` is always a complete
/// human-readable message.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid argument or configuration detected before any work is done.
class ValidationError : public Error {
public:
    using Error::Error;
};

class OutOfDomain : public Error {
public:
    using Error::Error;
};

class OutOfRange : public Error {
public:
    using Error::Error;
};

class ShapeMismatch : public Error {
public:
    using Error::Error;
};

class ZeroVariance : public Error {
public:
    using Error::Error;
};

class DegenerateCell : public Error {
public:
    using Error::Error;
};

class DegenerateFeature : public Error {
public:
    using Error::Error;
};

class LengthMismatch : public Error {
public:
    using Error::Error;
};

class ExcludedAll : public Error {
public:
    using Error::Error;
};

class DateMismatch : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class RankDeficient : public Error {
public:
    using Error::Error;
};

class TooFewSamples : public Error {
public:
    using Error::Error;
};

class LeadOutOfRange : public Error {
public:
    using Error::Error;
};

class MissingLead : public Error {
public:
    using Error::Error;
};

/// A required input file or directory does not exist.
class MissingInput : public Error {
public:
    explicit MissingInput(std::string path);
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

/// Malformed text input; carries the 1-based line number of the offending row.
class ParseError : public Error {
public:
    ParseError(std::string source, std::size_t line, const std::string& message);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Header present but required columns are missing.
class SchemaError : public Error {
public:
    using Error::Error;
};

/// The SVR dual solver hit its iteration budget before reaching the KKT tolerance.
class NotConverged : public Error {
public:
    NotConverged(std::size_t iterations, double kkt_gap, double tolerance);
    std::size_t iterations() const noexcept { return iterations_; }
    double kkt_gap() const noexcept { return kkt_gap_; }

private:
    std::size_t iterations_;
    double kkt_gap_;
};

} // namespace pvfc
