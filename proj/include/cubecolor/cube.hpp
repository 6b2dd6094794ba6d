#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace cubecolor {

inline constexpr int kFaces = 6;
inline constexpr int kStickersPerFace = 9;
inline constexpr int kStickers = kFaces * kStickersPerFace;

/// Index of the center sticker of a face in face-major, row-major order.
constexpr int center_index(int face) { return kStickersPerFace * face + 4; }

/// Sticker colors; the underlying value doubles as the classifier label.
enum class CubeColor : int { White = 0, Yellow, Red, Orange, Green, Blue };

inline constexpr std::array<CubeColor, kFaces> kAllColors{
    CubeColor::White, CubeColor::Yellow, CubeColor::Red,
    CubeColor::Orange, CubeColor::Green, CubeColor::Blue};

/// Face slots in solver (URFDLB) order; face i of an observation is kFaceNames[i].
inline constexpr std::string_view kFaceNames = "URFDLB";

constexpr int color_index(CubeColor c) { return static_cast<int>(c); }

std::string_view color_name(CubeColor c);
/// Single-letter code: W Y R O G B.
char color_letter(CubeColor c);
/// Accepts full names (case-insensitive) or the single-letter code.
std::optional<CubeColor> parse_color(std::string_view text);
std::optional<int> parse_face(std::string_view text);

}  // namespace cubecolor
