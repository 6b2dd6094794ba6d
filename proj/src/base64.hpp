#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cubecolor::detail {

std::string base64_encode(const std::vector<std::uint8_t>& bytes);
/// Throws ModelFormatError on characters outside the alphabet or bad padding.
std::vector<std::uint8_t> base64_decode(const std::string& text);

}  // namespace cubecolor::detail
