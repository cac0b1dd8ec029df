#include "tsce/error.hpp"

namespace tsce {

std::string_view error_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::invalid_argument: return "INVALID_ARGUMENT";
        case ErrorCode::variable_not_found: return "VARIABLE_NOT_FOUND";
        case ErrorCode::invalid_graph: return "INVALID_GRAPH";
        case ErrorCode::no_context: return "NO_CONTEXT";
        case ErrorCode::invalid_question: return "INVALID_QUESTION";
        case ErrorCode::parse_error: return "PARSE_ERROR";
        case ErrorCode::io_error: return "IO_ERROR";
        case ErrorCode::fit_error: return "FIT_ERROR";
        case ErrorCode::invalid_tree: return "INVALID_TREE";
    }
    return "UNKNOWN";
}

int exit_code(ErrorCode code) {
    switch (code) {
        case ErrorCode::invalid_argument: return 2;
        case ErrorCode::io_error: return 3;
        case ErrorCode::parse_error: return 4;
        case ErrorCode::invalid_question: return 5;
        case ErrorCode::no_context: return 6;
        case ErrorCode::invalid_graph: return 7;
        case ErrorCode::variable_not_found: return 8;
        case ErrorCode::fit_error: return 9;
        case ErrorCode::invalid_tree: return 10;
    }
    return 1;
}

}  // namespace tsce
