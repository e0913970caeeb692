#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "kde_edge/image.hpp"

namespace kde_edge {

/// Reads a P2 (ASCII) or P5 (binary) PGM with maxval <= 255.
/// Header comments (#) are accepted. Failure modes are reported with
/// distinct messages: missing file, malformed header, maxval over 255,
/// truncated pixel data.
GrayImage load_pgm(const std::filesystem::path& path);

/// Writes maxval-255 PGM, P5 when `binary`, else P2. No header comments.
void save_pgm(const GrayImage& image, const std::filesystem::path& path,
              bool binary = true);

/// Edge maps persist as 255 = edge, 0 = non-edge.
void save_pgm(const EdgeMap& map, const std::filesystem::path& path,
              bool binary = true);

/// 16-bit single-channel raster (P5, maxval 65535, big-endian samples).
struct Gray16 {
    int width = 0;
    int height = 0;
    std::vector<std::uint16_t> samples;
};

Gray16 load_pgm16(const std::filesystem::path& path);
void save_pgm16(const Gray16& image, const std::filesystem::path& path);

}  // namespace kde_edge
