#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bnh {

// Input text could not be tokenized or does not follow the expected format.
// Carries the ordinal of the offending token when one exists.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, std::size_t token_offset)
        : std::runtime_error(message + " (token " + std::to_string(token_offset) + ")"),
          token_offset_(token_offset) {}

    explicit ParseError(const std::string& message)
        : std::runtime_error(message), token_offset_(0) {}

    std::size_t token_offset() const { return token_offset_; }

private:
    std::size_t token_offset_;
};

// A structurally well-formed input violates a model invariant.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A request exceeds a configured resource cap.
class CapError : public std::runtime_error {
public:
    CapError(const std::string& message, unsigned long long size)
        : std::runtime_error(message), size_(size) {}

    unsigned long long size() const { return size_; }

private:
    unsigned long long size_;
};

}  // namespace bnh
