#pragma once

#include <stdexcept>
#include <string>

namespace dimpc {

// Error taxonomy mirrored by the C API status codes.
struct io_error : std::runtime_error {
    explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct parse_error : std::runtime_error {
    explicit parse_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Command issued out of order, e.g. backtest before train.
struct state_error : std::runtime_error {
    explicit state_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace dimpc
