#include "rdsse/config.hpp"

#include <string>

#include "rdsse/error.hpp"

namespace rdsse {

std::string_view scheme_name(Scheme s) { return s == Scheme::kA ? "a" : "b"; }

Scheme parse_scheme(std::string_view text) {
    if (text == "a" || text == "A") return Scheme::kA;
    if (text == "b" || text == "B") return Scheme::kB;
    throw Error(ErrorCode::kInvalidArgument, "unknown scheme '" + std::string(text) + "'");
}

}  // namespace rdsse
