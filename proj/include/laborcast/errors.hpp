#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace laborcast {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed input text (unparseable date or number); message carries row context.
class FormatError : public Error {
public:
    using Error::Error;
};

/// Two rows share the same month.
class DuplicateDateError : public Error {
public:
    using Error::Error;
};

/// Dates out of order, or a month gap in what must be a contiguous monthly index.
class DateOrderError : public Error {
public:
    using Error::Error;
};

/// Unknown column, model cell, or other failed name lookup.
class LookupError : public Error {
public:
    using Error::Error;
};

/// A column could not be imputed (all values missing).
class ImputationError : public Error {
public:
    using Error::Error;
};

/// Series or dataset too short for the requested operation.
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

/// Invalid argument value (bad order, ratio out of range, ...).
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Singular or rank-deficient linear system.
class SingularMatrixError : public Error {
public:
    using Error::Error;
};

/// Shape mismatch between data and model.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Metric undefined for the given inputs (e.g. zero actual in a percentage error).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Optimizer hit its iteration cap; carries the best parameters seen so far.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& msg, std::vector<double> best)
        : Error(msg), best_parameters(std::move(best)) {}
    std::vector<double> best_parameters;
};

/// Training diverged; carries the epoch where the loss stopped being finite.
class TrainingError : public Error {
public:
    TrainingError(const std::string& msg, int at_epoch) : Error(msg), epoch(at_epoch) {}
    int epoch;
};

} // namespace laborcast
