#pragma once

#include <stdexcept>
#include <string>

namespace qsat2 {

// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Caller violated a precondition.
class UsageError : public Error {
public:
    using Error::Error;
};

// Division by zero and similar in exact arithmetic.
class ArithmeticError : public Error {
public:
    using Error::Error;
};

// Malformed instance file, config file or textual value.
class ParseError : public Error {
public:
    using Error::Error;
};

// A component exceeds the configured qubit cap of the counting engine.
class ComponentCapError : public Error {
public:
    ComponentCapError(std::size_t component_id, std::size_t size, std::size_t cap)
        : Error("component " + std::to_string(component_id) + " has " + std::to_string(size) +
                " qubits, above the cap of " + std::to_string(cap)),
          component_id_(component_id), size_(size), cap_(cap) {}

    std::size_t component_id() const noexcept { return component_id_; }
    std::size_t size() const noexcept { return size_; }
    std::size_t cap() const noexcept { return cap_; }

private:
    std::size_t component_id_;
    std::size_t size_;
    std::size_t cap_;
};

// The frustration-free sampler ran out of resamples on one edge.
class ResampleBudgetError : public Error {
public:
    using Error::Error;
};

}  // namespace qsat2
