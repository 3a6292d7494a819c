#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace chunkcount {

// Root of every error the library throws. The CLI maps all of them to exit 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An input violates a documented invariant. `field()` names the offending
// field (e.g. "region", "tracker.max_age") when one applies.
class ValidationError : public Error {
public:
    ValidationError(std::string field, const std::string& message)
        : Error(field.empty() ? message : field + ": " + message), field_(std::move(field)), message_(message) {}

    const std::string& field() const noexcept { return field_; }
    const std::string& message() const noexcept { return message_; }

private:
    std::string field_;
    std::string message_;
};

// Frames fed to a tracker out of order.
class SequencingError : public Error {
public:
    using Error::Error;
};

// Missing, unreadable, or unwritable files.
class IoError : public Error {
public:
    IoError(std::string path, const std::string& message)
        : Error(path + ": " + message), path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

// A document that is not well-formed (bad JSON, wrong shape). `line` is
// 1-based for line-oriented formats, 0 otherwise.
class ParseError : public Error {
public:
    ParseError(std::string source, std::size_t line, const std::string& message)
        : Error(source + (line ? ":" + std::to_string(line) : std::string()) + ": " + message),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace chunkcount
