#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace skinrig {

/// CRC-32 (zlib polynomial) of a byte string.
std::uint32_t crc32_of(std::string_view bytes);

/// Eight lowercase hex digits.
std::string hex32(std::uint32_t value);

}  // namespace skinrig
