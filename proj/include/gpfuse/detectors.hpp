#pragma once

#include <cstdint>
#include <vector>

#include "gpfuse/mask.hpp"

namespace gpfuse {

// An 8-bit grayscale video held in memory. Frame index origin is 1 in file
// naming; frames[0] is frame 1.
struct FrameSequence {
    int width = 0;
    int height = 0;
    std::vector<std::vector<std::uint8_t>> frames;

    void check() const;  // throws unless >= 2 frames of constant dimensions
};

// mask_t(p) = 1 iff |frame_t(p) - frame_{t-1}(p)| > threshold. The first frame
// emits all-background.
std::vector<BinaryMask> frame_difference(const FrameSequence& seq, int threshold);

// Background per pixel is the median of the last min(window, t) frames;
// foreground where the current frame deviates by more than threshold.
std::vector<BinaryMask> median_background(const FrameSequence& seq, int window, int threshold);

// Single-Gaussian background model with exponential mean/variance updates;
// foreground where |x - mean| > k * sqrt(var + eps).
std::vector<BinaryMask> running_gaussian(const FrameSequence& seq, double alpha, double k,
                                         double initial_var = 100.0);

// Framewise majority vote over an odd number (>= 3) of aligned mask sequences.
std::vector<BinaryMask> fuse_mv(const std::vector<std::vector<BinaryMask>>& sequences);

}  // namespace gpfuse
