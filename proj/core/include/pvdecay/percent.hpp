#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace pvdecay {

/// Decodes %XX escapes. Returns nullopt on a truncated or non-hex escape.
std::optional<std::string> percent_decode(std::string_view text);

/// Canonical encoding used for dump lines and cache files: ASCII letters,
/// digits and `-_.~!*(),:;@` stay literal, every other byte becomes %XX
/// with upper-case hex. Encoded titles never contain spaces or slashes.
std::string percent_encode(std::string_view text);

}  // namespace pvdecay
