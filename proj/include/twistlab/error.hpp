#pragma once

#include <stdexcept>
#include <string>

namespace twistlab {

enum class ErrorCode {
    invalid_argument = 1,
    domain = 2,
    resource = 3,
    contract = 4,
    precision = 5,
    inconsistent = 6,
    unknown_form = 7,
    io = 8,
    internal = 9,
};

// Every failure raised by the library carries one of the codes above; the C
// API maps them one-to-one onto twl_status values.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, ErrorCode code, const std::string& what) {
    if (!ok) fail(code, what);
}

}  // namespace twistlab
