#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "gpfuse/detectors.hpp"
#include "gpfuse/mask.hpp"

namespace gpfuse {

// CDNET-2014 directory layout:
//   root/<category>/<video>/input/in%06d.{pgm,png}
//   root/<category>/<video>/groundtruth/gt%06d.{pgm,png}
//   root/<category>/<video>/temporalROI.txt   ("first last")
//   root/<category>/<video>/ROI.{pgm,png}     (optional spatial ROI)
//   root/results/<algorithm>/<category>/<video>/bin%06d.{pgm,png}

struct VideoInfo {
    std::string category;
    std::string name;
    std::filesystem::path dir;
    int frame_count = 0;
    int roi_first = 1;
    int roi_last = 1;
    std::optional<std::filesystem::path> spatial_roi;

    std::string id() const { return category + "/" + name; }
    int roi_frames() const { return roi_last - roi_first + 1; }
};

struct DatasetIndex {
    std::filesystem::path root;
    std::vector<std::string> categories;
    std::vector<VideoInfo> videos;
    std::vector<std::string> algorithms;  // discovered under results/

    const VideoInfo& find(const std::string& id) const;  // "category/video"
    std::filesystem::path result_dir(const std::string& algorithm, const VideoInfo& v) const;
};

// One evaluated frame: the pool masks in pool order plus the ground truth,
// with the spatial ROI already applied as OUT_OF_ROI relabeling.
struct FrameBundle {
    int frame_index = 0;
    std::vector<BinaryMask> pool_masks;
    GroundTruthFrame gt;
};

DatasetIndex scan_dataset(const std::filesystem::path& root);

// Bundles for exactly the temporal-ROI frames of one video, in order.
// stride > 1 keeps every stride-th ROI frame (the first ROI frame always).
std::vector<FrameBundle> frame_bundles(const DatasetIndex& index, const VideoInfo& video,
                                       std::span<const std::string> pool, int stride = 1);

// Per category, the video with the fewest ROI frames; entries of `overrides`
// ("category/video") replace the automatic pick for their category.
std::vector<const VideoInfo*> training_split(const DatasetIndex& index,
                                             std::span<const std::string> overrides = {});

// Grayscale input frames of a video over its temporal ROI (for the toy detectors).
FrameSequence load_frames(const VideoInfo& video, int first, int last);

// Frame file lookup/naming. find_frame tries <prefix>%06d.pgm then .png.
std::filesystem::path find_frame(const std::filesystem::path& dir, const std::string& prefix, int index);
std::string frame_name(const std::string& prefix, int index, const std::string& ext = ".pgm");

// --- synthetic scenes ------------------------------------------------------

struct ObjectSpec {
    double x = 0, y = 0;  // top-left at frame 1
    int w = 0, h = 0;
    double vx = 0, vy = 0;  // pixels per frame
    int intensity = 255;
};

struct SceneSpec {
    int width = 0, height = 0, frames = 0;
    int background = 120;
    double noise_sigma = 5.0;
    std::vector<ObjectSpec> objects;

    // Keys: width, height, frames, background, noise_sigma, and repeated
    // "object = x,y,w,h,vx,vy,intensity" lines.
    static SceneSpec load(const std::filesystem::path& path);
    void check() const;
};

// Writes input/, groundtruth/ and temporalROI.txt under video_dir.
// Deterministic per seed. The temporal ROI starts at frame 2.
void synth_generate(const SceneSpec& spec, std::uint64_t seed, const std::filesystem::path& video_dir);

// Renders the exact ground truth of one frame (1-based index) without noise.
GroundTruthFrame synth_groundtruth(const SceneSpec& spec, int frame_index);

// --- detector corruption ----------------------------------------------------

// Derives a detector-like mask stream from ground truth: temporal lag, then
// dilation/erosion bias, then hole punching, then independent pixel flips.
struct CorruptionProfile {
    double flip_rate_fg = 0;  // probability a foreground pixel flips to 0
    double flip_rate_bg = 0;  // probability a background pixel flips to 1
    int dilate_iters = 0;
    int erode_iters = 0;
    double hole_rate = 0;  // per-frame probability of punching a hole into the foreground
    int lag = 0;           // frames of delay; early frames reuse the first one
};

// Presets: "noisy", "oversegment", "undersegment", "noise" (coin flipping).
CorruptionProfile corruption_preset(const std::string& name);

std::vector<BinaryMask> gt_to_masks(std::span<const GroundTruthFrame> gt);

std::vector<BinaryMask> corrupt_detector(std::span<const BinaryMask> gt_masks, const CorruptionProfile& profile,
                                         std::mt19937_64& rng);

}  // namespace gpfuse
