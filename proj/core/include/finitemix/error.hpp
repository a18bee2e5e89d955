#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace finitemix {

// Library error carrying a stable machine-readable code such as "RoughFactor"
// or "NonPowerOfTwo". The CLI prints the code verbatim and maps it to exit
// status 2; tests match on codes, not message text.
class Error : public std::runtime_error {
public:
    Error(std::string code, std::string message)
        : std::runtime_error(code + ": " + message),
          code_(std::move(code)),
          message_(std::move(message)) {}

    const std::string& code() const noexcept { return code_; }
    const std::string& message() const noexcept { return message_; }

private:
    std::string code_;
    std::string message_;
};

[[noreturn]] inline void raise(std::string code, const std::string& message) {
    throw Error(std::move(code), message);
}

}  // namespace finitemix
