#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace incred {

// Malformed input text: DSL syntax, JSON syntax, or system-file schema.
// `offset` is the byte offset inside the offending string when known.
class ParseError : public std::runtime_error {
public:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    explicit ParseError(const std::string& what, std::size_t offset = npos)
        : std::runtime_error(what), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

// Raised while evaluating a well-formed expression (division by ~0,
// inverted interval literal).
class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input is well formed but inconsistent with the model (wrong dimensions,
// missing catch-all piece, nonregular reduction function, empty gradient).
class SemanticError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace incred
