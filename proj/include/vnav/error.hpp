#pragma once

#include <stdexcept>
#include <string>

namespace vnav {

// Error categories, mapped to distinct CLI exit codes in tools/main.cpp.
enum class ErrorKind {
    argument,        // bad argument / precondition violation
    invalid_depth,   // non-finite or non-positive depth
    behind_camera,   // point or corner with z <= 0 in the camera frame
    degenerate,      // degenerate geometry (collinear corners, ...)
    non_convergence, // iterative solver failed to converge
    ill_conditioned, // singular or near-singular linear system
    empty_input,     // no usable samples / episodes
    config_mismatch, // incompatible configurations (e.g. scan merge)
    format,          // malformed file contents
    io,              // missing / unreadable / unwritable file
    internal,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

} // namespace vnav
