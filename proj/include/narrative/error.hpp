#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace narrative {

// Base for every error raised by the library. Stage names and line numbers
// are folded into the message so callers can print what() directly.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A malformed record in a line-delimited input file.
class ParseError : public Error {
public:
    ParseError(const std::string& file, std::size_t line, const std::string& what)
        : Error(file + ":" + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace narrative
