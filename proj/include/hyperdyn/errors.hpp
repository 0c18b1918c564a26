#pragma once

#include <stdexcept>
#include <string>

namespace hyperdyn {

// Failure categories; the CLI maps them to exit codes 2, 3 and 4.
enum class ErrorKind {
    InvalidInput,
    NonConvergence,
    Internal,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string tag, const std::string& what)
        : std::runtime_error(what), kind_(kind), tag_(std::move(tag)) {}

    ErrorKind kind() const noexcept { return kind_; }
    // Short machine-readable name such as "degenerate-commutator".
    const std::string& tag() const noexcept { return tag_; }

private:
    ErrorKind kind_;
    std::string tag_;
};

inline Error invalid_input(const std::string& what) {
    return Error(ErrorKind::InvalidInput, "invalid-input", what);
}

inline Error resource_limit(const std::string& what) {
    return Error(ErrorKind::NonConvergence, "resource-limit", what);
}

inline Error internal_error(const std::string& what) {
    return Error(ErrorKind::Internal, "internal", what);
}

}  // namespace hyperdyn
