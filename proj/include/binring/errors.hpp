#pragma once

#include <stdexcept>
#include <string>

namespace binring {

/* Every rejected precondition carries a stable machine-readable code
 * ("rank-mismatch", "not-finite", ...) so callers and the CLI can map
 * failures without parsing prose.  what() == code, optionally followed
 * by ": detail". */
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& detail = "")
        : std::runtime_error(detail.empty() ? code : code + ": " + detail),
          code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

[[noreturn]] inline void fail(const std::string& code, const std::string& detail = "") {
    throw Error(code, detail);
}

}  // namespace binring
