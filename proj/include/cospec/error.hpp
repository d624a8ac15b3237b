#pragma once

#include <stdexcept>
#include <string>

namespace cospec {

// Every failure the library reports carries a short machine-readable code
// ("domain", "dimension", "rank", "parse", "io", "usage") next to the
// human-readable message. The CLI prints both as `ERR:<code>: <message>`.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

[[noreturn]] inline void fail(const char* code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace cospec
