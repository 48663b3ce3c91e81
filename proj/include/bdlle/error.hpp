#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace bdlle {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class EmptyInputError : public Error {
public:
    using Error::Error;
};

class ParameterError : public Error {
public:
    using Error::Error;
};

/// A point has no neighbors where at least one is required.
class EmptyNeighborhoodError : public Error {
public:
    EmptyNeighborhoodError(const std::string& what, std::vector<long> indices)
        : Error(what), indices_(std::move(indices)) {}

    const std::vector<long>& indices() const noexcept { return indices_; }

private:
    std::vector<long> indices_;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, long line) : Error(what), line_(line) {}
    long line() const noexcept { return line_; }

private:
    long line_;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

} // namespace bdlle
