#include "gpfuse/mask.hpp"

#include <png.h>

#include <cctype>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

namespace gpfuse {

namespace {

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& cause) {
    throw std::runtime_error(path.string() + ": " + cause);
}

// --- PGM ---------------------------------------------------------------

int pgm_next_int(std::istream& in) {
    // Skips whitespace and '#' comment lines between header tokens.
    for (;;) {
        int c = in.peek();
        if (c == EOF) return -1;
        if (c == '#') {
            std::string line;
            std::getline(in, line);
            continue;
        }
        if (std::isspace(c)) {
            in.get();
            continue;
        }
        break;
    }
    int value = -1;
    in >> value;
    return in ? value : -1;
}

GrayImage read_pgm(const std::filesystem::path& path, std::ifstream& in) {
    char magic[2] = {};
    in.read(magic, 2);
    if (!in || magic[0] != 'P' || magic[1] != '5') fail(path, "malformed raster: not a P5 PGM");
    int w = pgm_next_int(in);
    int h = pgm_next_int(in);
    int maxval = pgm_next_int(in);
    if (w < 1 || h < 1 || maxval < 1) fail(path, "malformed raster: bad PGM header");
    if (maxval > 255) fail(path, "unsupported bit depth: maxval " + std::to_string(maxval));
    in.get();  // single whitespace after maxval
    GrayImage img;
    img.width = w;
    img.height = h;
    img.pixels.resize(static_cast<std::size_t>(w) * h);
    in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
    if (static_cast<std::size_t>(in.gcount()) != img.pixels.size()) fail(path, "malformed raster: truncated pixel data");
    return img;
}

// --- PNG ---------------------------------------------------------------

GrayImage read_png(const std::filesystem::path& path) {
    std::FILE* fp = std::fopen(path.string().c_str(), "rb");
    if (!fp) fail(path, "cannot open file");

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        if (png) png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        fail(path, "libpng initialization failed");
    }

    GrayImage img;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        fail(path, "malformed raster: PNG decode error");
    }

    png_init_io(png, fp);
    png_read_info(png, info);

    png_uint_32 w = png_get_image_width(png, info);
    png_uint_32 h = png_get_image_height(png, info);
    int depth = png_get_bit_depth(png, info);
    int color = png_get_color_type(png, info);

    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (depth == 16) png_set_strip_16(png);
    if (color & PNG_COLOR_MASK_COLOR) png_set_rgb_to_gray_fixed(png, 1, -1, -1);
    if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_strip_alpha(png);
    png_read_update_info(png, info);

    if (png_get_bit_depth(png, info) != 8 || png_get_channels(png, info) != 1) {
        png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        fail(path, "unsupported bit depth or channel layout in PNG");
    }

    img.width = static_cast<int>(w);
    img.height = static_cast<int>(h);
    img.pixels.resize(static_cast<std::size_t>(w) * h);
    rows.resize(h);
    for (png_uint_32 r = 0; r < h; ++r) rows[r] = img.pixels.data() + static_cast<std::size_t>(r) * w;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    return img;
}

}  // namespace

GrayImage read_gray(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "cannot open file");
    char sig[2] = {};
    in.read(sig, 2);
    if (!in) fail(path, "malformed raster: empty file");
    in.seekg(0);
    if (sig[0] == 'P' && sig[1] == '5') return read_pgm(path, in);
    if (static_cast<unsigned char>(sig[0]) == 0x89 && sig[1] == 'P') {
        in.close();
        return read_png(path);
    }
    fail(path, "unsupported format: expected PGM (P5) or PNG");
}

void write_gray(const GrayImage& img, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(path, "cannot open destination for writing");
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
    if (!out) fail(path, "write failed");
}

BinaryMask read_mask(const std::filesystem::path& path) {
    GrayImage img = read_gray(path);
    BinaryMask mask(img.width, img.height);
    for (std::size_t i = 0; i < img.pixels.size(); ++i) mask.data[i] = img.pixels[i] >= 128 ? 1 : 0;
    return mask;
}

void write_mask(const BinaryMask& mask, const std::filesystem::path& path) {
    GrayImage img;
    img.width = mask.width;
    img.height = mask.height;
    img.pixels.resize(mask.data.size());
    for (std::size_t i = 0; i < mask.data.size(); ++i) img.pixels[i] = mask.data[i] ? 255 : 0;
    write_gray(img, path);
}

GroundTruthFrame read_groundtruth(const std::filesystem::path& path) {
    GrayImage img = read_gray(path);
    GroundTruthFrame gt(img.width, img.height);
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
        switch (img.pixels[i]) {
            case 0: gt.labels[i] = GtLabel::Negative; break;
            case 50: gt.labels[i] = GtLabel::Shadow; break;
            case 85: gt.labels[i] = GtLabel::OutOfRoi; break;
            case 170: gt.labels[i] = GtLabel::Unknown; break;
            case 255: gt.labels[i] = GtLabel::Positive; break;
            default:
                fail(path, "unknown ground-truth label " + std::to_string(img.pixels[i]) +
                               " at pixel " + std::to_string(i));
        }
    }
    return gt;
}

void write_groundtruth(const GroundTruthFrame& gt, const std::filesystem::path& path) {
    GrayImage img;
    img.width = gt.width;
    img.height = gt.height;
    img.pixels.resize(gt.labels.size());
    for (std::size_t i = 0; i < gt.labels.size(); ++i) img.pixels[i] = static_cast<std::uint8_t>(gt.labels[i]);
    write_gray(img, path);
}

}  // namespace gpfuse
