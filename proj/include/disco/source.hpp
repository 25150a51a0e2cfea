#pragma once

#include <string>

namespace disco {

// 1-based source position range; end is exclusive in columns
struct Span {
    std::string file;
    int line = 0;
    int col = 0;
    int end_line = 0;
    int end_col = 0;
};

struct Diagnostic {
    std::string code;
    std::string message;
    Span span;
};

inline std::string format_diagnostic(const Diagnostic& d) {
    return d.span.file + ":" + std::to_string(d.span.line) + ":" + std::to_string(d.span.col) +
           ": " + d.code + ": " + d.message;
}

} // namespace disco
