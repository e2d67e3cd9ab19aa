#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace gpfuse {

// One frame's foreground/background decision grid. Cells are strictly 0 or 1.
struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;  // row-major

    BinaryMask() = default;
    BinaryMask(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

    std::uint8_t at(int r, int c) const { return data[static_cast<std::size_t>(r) * width + c]; }
    std::uint8_t& at(int r, int c) { return data[static_cast<std::size_t>(r) * width + c]; }
    std::size_t pixel_count() const { return data.size(); }
    bool same_shape(const BinaryMask& o) const { return width == o.width && height == o.height; }

    friend bool operator==(const BinaryMask&, const BinaryMask&) = default;
};

// CDNET-style ground-truth label classes and their file byte values.
enum class GtLabel : std::uint8_t {
    Negative = 0,
    Shadow = 50,
    OutOfRoi = 85,
    Unknown = 170,
    Positive = 255,
};

struct GroundTruthFrame {
    int width = 0;
    int height = 0;
    std::vector<GtLabel> labels;  // row-major

    GroundTruthFrame() = default;
    GroundTruthFrame(int w, int h, GtLabel fill = GtLabel::Negative)
        : width(w), height(h), labels(static_cast<std::size_t>(w) * h, fill) {}

    GtLabel at(int r, int c) const { return labels[static_cast<std::size_t>(r) * width + c]; }
    GtLabel& at(int r, int c) { return labels[static_cast<std::size_t>(r) * width + c]; }
    bool same_shape(const BinaryMask& m) const { return width == m.width && height == m.height; }

    friend bool operator==(const GroundTruthFrame&, const GroundTruthFrame&) = default;
};

// 8-bit single-channel raster, the common currency of all file I/O here.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // row-major
};

// Reads a binary PGM (P5) or 8-bit grayscale PNG. Throws std::runtime_error
// with the path and cause on missing files, malformed headers or bodies, and
// unsupported bit depths.
GrayImage read_gray(const std::filesystem::path& path);

// Writes a binary PGM (P5, maxval 255).
void write_gray(const GrayImage& img, const std::filesystem::path& path);

// Pixel value >= 128 decodes to foreground.
BinaryMask read_mask(const std::filesystem::path& path);

// Foreground encodes as 255, background as 0. Lossless against read_mask.
void write_mask(const BinaryMask& mask, const std::filesystem::path& path);

// Bytes outside {0, 50, 85, 170, 255} are rejected with the offending value
// and pixel index.
GroundTruthFrame read_groundtruth(const std::filesystem::path& path);

void write_groundtruth(const GroundTruthFrame& gt, const std::filesystem::path& path);

}  // namespace gpfuse
