#pragma once

#include <span>

#include "gpfuse/mask.hpp"

namespace gpfuse {

// The six fusion operators. All treat out-of-bounds pixels as background (0)
// and preserve dimensions. All are pure functions.

// 3x3 square erosion.
BinaryMask erode(const BinaryMask& m);

// 3x3 square dilation.
BinaryMask dilate(const BinaryMask& m);

// 5x5 binary median: output is 1 iff at least 13 of the 25 window positions are 1.
BinaryMask median5(const BinaryMask& m);

// Pixelwise disjunction / conjunction. Throw on dimension mismatch.
BinaryMask mask_or(const BinaryMask& a, const BinaryMask& b);
BinaryMask mask_and(const BinaryMask& a, const BinaryMask& b);

// Pixelwise majority vote over an odd number (>= 3) of masks.
BinaryMask majority(std::span<const BinaryMask> masks);

}  // namespace gpfuse
