#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tsce {

/// Failure categories surfaced by the library. The CLI maps each one to a
/// fixed process exit code, see `exit_code()`.
enum class ErrorCode {
    invalid_argument,
    variable_not_found,
    invalid_graph,
    no_context,
    invalid_question,
    parse_error,
    io_error,
    fit_error,
    invalid_tree,
};

std::string_view error_name(ErrorCode code);
int exit_code(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace tsce
