#include "gpfuse/detectors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "gpfuse/morph.hpp"

namespace gpfuse {

namespace {
constexpr double kVarianceFloor = 1e-6;
}

void FrameSequence::check() const {
    if (frames.size() < 2) throw std::invalid_argument("frame sequence needs at least 2 frames");
    const std::size_t n = static_cast<std::size_t>(width) * height;
    for (const auto& f : frames)
        if (f.size() != n) throw std::invalid_argument("frame sequence has inconsistent dimensions");
}

std::vector<BinaryMask> frame_difference(const FrameSequence& seq, int threshold) {
    seq.check();
    if (threshold < 0 || threshold > 255) throw std::invalid_argument("frame_difference: threshold out of range");
    std::vector<BinaryMask> out;
    out.reserve(seq.frames.size());
    out.emplace_back(seq.width, seq.height);  // no history for frame 1
    for (std::size_t t = 1; t < seq.frames.size(); ++t) {
        BinaryMask m(seq.width, seq.height);
        for (std::size_t i = 0; i < m.data.size(); ++i)
            m.data[i] = std::abs(int(seq.frames[t][i]) - int(seq.frames[t - 1][i])) > threshold ? 1 : 0;
        out.push_back(std::move(m));
    }
    return out;
}

std::vector<BinaryMask> median_background(const FrameSequence& seq, int window, int threshold) {
    seq.check();
    if (window < 3 || window % 2 == 0) throw std::invalid_argument("median_background: window must be odd and >= 3");
    if (threshold < 0 || threshold > 255) throw std::invalid_argument("median_background: threshold out of range");
    const std::size_t pixels = static_cast<std::size_t>(seq.width) * seq.height;
    std::vector<BinaryMask> out;
    out.reserve(seq.frames.size());
    std::vector<std::uint8_t> buf;
    for (std::size_t t = 0; t < seq.frames.size(); ++t) {
        const std::size_t first = t + 1 >= static_cast<std::size_t>(window) ? t + 1 - window : 0;
        const std::size_t len = t - first + 1;
        BinaryMask m(seq.width, seq.height);
        buf.resize(len);
        for (std::size_t i = 0; i < pixels; ++i) {
            for (std::size_t s = 0; s < len; ++s) buf[s] = seq.frames[first + s][i];
            std::nth_element(buf.begin(), buf.begin() + len / 2, buf.end());
            int background = buf[len / 2];
            if (len % 2 == 0) {
                // median of an even count: mean of the two central values
                int hi = buf[len / 2];
                std::nth_element(buf.begin(), buf.begin() + len / 2 - 1, buf.end());
                background = (hi + buf[len / 2 - 1]) / 2;
            }
            m.data[i] = std::abs(int(seq.frames[t][i]) - background) > threshold ? 1 : 0;
        }
        out.push_back(std::move(m));
    }
    return out;
}

std::vector<BinaryMask> running_gaussian(const FrameSequence& seq, double alpha, double k, double initial_var) {
    seq.check();
    if (alpha <= 0 || alpha >= 1) throw std::invalid_argument("running_gaussian: alpha must be in (0, 1)");
    if (k <= 0) throw std::invalid_argument("running_gaussian: k must be positive");
    const std::size_t pixels = static_cast<std::size_t>(seq.width) * seq.height;
    std::vector<double> mean(seq.frames[0].begin(), seq.frames[0].end());
    std::vector<double> var(pixels, initial_var);
    std::vector<BinaryMask> out;
    out.reserve(seq.frames.size());
    out.emplace_back(seq.width, seq.height);  // frame 1 initializes the model
    for (std::size_t t = 1; t < seq.frames.size(); ++t) {
        BinaryMask m(seq.width, seq.height);
        for (std::size_t i = 0; i < pixels; ++i) {
            const double x = seq.frames[t][i];
            const double d = x - mean[i];
            m.data[i] = std::abs(d) > k * std::sqrt(var[i] + kVarianceFloor) ? 1 : 0;
            mean[i] += alpha * d;
            var[i] = (1.0 - alpha) * var[i] + alpha * d * d;
        }
        out.push_back(std::move(m));
    }
    return out;
}

std::vector<BinaryMask> fuse_mv(const std::vector<std::vector<BinaryMask>>& sequences) {
    if (sequences.size() < 3 || sequences.size() % 2 == 0)
        throw std::invalid_argument("fuse_mv: need an odd number >= 3 of sequences");
    const std::size_t frames = sequences[0].size();
    for (const auto& s : sequences)
        if (s.size() != frames) throw std::invalid_argument("fuse_mv: sequence lengths differ");
    std::vector<BinaryMask> out;
    out.reserve(frames);
    std::vector<BinaryMask> stack(sequences.size());
    for (std::size_t t = 0; t < frames; ++t) {
        for (std::size_t s = 0; s < sequences.size(); ++s) stack[s] = sequences[s][t];
        out.push_back(majority(stack));
    }
    return out;
}

}  // namespace gpfuse
