#include "gpfuse/morph.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace gpfuse {

namespace {

std::string shape_of(const BinaryMask& m) {
    return std::to_string(m.width) + "x" + std::to_string(m.height);
}

void require_same_shape(const BinaryMask& a, const BinaryMask& b, const char* op) {
    if (!a.same_shape(b))
        throw std::invalid_argument(std::string(op) + ": dimension mismatch " + shape_of(a) + " vs " + shape_of(b));
}

// Count of foreground pixels in the window [r-k, r+k] x [c-k, c+k], zero padded.
int window_count(const BinaryMask& m, int r, int c, int k) {
    int count = 0;
    int r0 = std::max(r - k, 0), r1 = std::min(r + k, m.height - 1);
    int c0 = std::max(c - k, 0), c1 = std::min(c + k, m.width - 1);
    for (int y = r0; y <= r1; ++y)
        for (int x = c0; x <= c1; ++x) count += m.at(y, x);
    return count;
}

}  // namespace

BinaryMask erode(const BinaryMask& m) {
    BinaryMask out(m.width, m.height);
    for (int r = 0; r < m.height; ++r)
        for (int c = 0; c < m.width; ++c) out.at(r, c) = window_count(m, r, c, 1) == 9 ? 1 : 0;
    return out;
}

BinaryMask dilate(const BinaryMask& m) {
    BinaryMask out(m.width, m.height);
    for (int r = 0; r < m.height; ++r)
        for (int c = 0; c < m.width; ++c) out.at(r, c) = window_count(m, r, c, 1) > 0 ? 1 : 0;
    return out;
}

BinaryMask median5(const BinaryMask& m) {
    BinaryMask out(m.width, m.height);
    for (int r = 0; r < m.height; ++r)
        for (int c = 0; c < m.width; ++c) out.at(r, c) = window_count(m, r, c, 2) >= 13 ? 1 : 0;
    return out;
}

BinaryMask mask_or(const BinaryMask& a, const BinaryMask& b) {
    require_same_shape(a, b, "OR");
    BinaryMask out(a.width, a.height);
    for (std::size_t i = 0; i < a.data.size(); ++i) out.data[i] = a.data[i] | b.data[i];
    return out;
}

BinaryMask mask_and(const BinaryMask& a, const BinaryMask& b) {
    require_same_shape(a, b, "AND");
    BinaryMask out(a.width, a.height);
    for (std::size_t i = 0; i < a.data.size(); ++i) out.data[i] = a.data[i] & b.data[i];
    return out;
}

BinaryMask majority(std::span<const BinaryMask> masks) {
    if (masks.size() < 3 || masks.size() % 2 == 0)
        throw std::invalid_argument("MV: arity must be odd and >= 3, got " + std::to_string(masks.size()));
    for (std::size_t i = 1; i < masks.size(); ++i) require_same_shape(masks[0], masks[i], "MV");
    const int half = static_cast<int>(masks.size()) / 2;
    BinaryMask out(masks[0].width, masks[0].height);
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        int votes = 0;
        for (const BinaryMask& m : masks) votes += m.data[i];
        out.data[i] = votes > half ? 1 : 0;
    }
    return out;
}

}  // namespace gpfuse
