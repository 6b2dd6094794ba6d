#include "cubecolor/cube.hpp"

#include <algorithm>
#include <cctype>

namespace cubecolor {

namespace {

constexpr std::array<std::string_view, kFaces> kColorNames{"white",  "yellow", "red",
                                                           "orange", "green",  "blue"};
constexpr std::string_view kColorLetters = "WYROGB";

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return out;
}

}  // namespace

std::string_view color_name(CubeColor c) { return kColorNames[static_cast<std::size_t>(c)]; }

char color_letter(CubeColor c) { return kColorLetters[static_cast<std::size_t>(c)]; }

std::optional<CubeColor> parse_color(std::string_view text) {
  if (text.size() == 1) {
    const auto pos = kColorLetters.find(static_cast<char>(std::toupper(text[0])));
    if (pos != std::string_view::npos) return static_cast<CubeColor>(pos);
    return std::nullopt;
  }
  const std::string l = lower(text);
  for (std::size_t i = 0; i < kColorNames.size(); ++i) {
    if (l == kColorNames[i]) return static_cast<CubeColor>(i);
  }
  return std::nullopt;
}

std::optional<int> parse_face(std::string_view text) {
  if (text.size() != 1) return std::nullopt;
  const auto pos = kFaceNames.find(static_cast<char>(std::toupper(text[0])));
  if (pos == std::string_view::npos) return std::nullopt;
  return static_cast<int>(pos);
}

}  // namespace cubecolor
