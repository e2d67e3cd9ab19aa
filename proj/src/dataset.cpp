#include "gpfuse/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "gpfuse/kvfile.hpp"
#include "gpfuse/morph.hpp"

namespace fs = std::filesystem;

namespace gpfuse {

std::string frame_name(const std::string& prefix, int index, const std::string& ext) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%06d", index);
    return prefix + buf + ext;
}

fs::path find_frame(const fs::path& dir, const std::string& prefix, int index) {
    for (const char* ext : {".pgm", ".png"}) {
        fs::path p = dir / frame_name(prefix, index, ext);
        if (fs::exists(p)) return p;
    }
    throw std::runtime_error((dir / frame_name(prefix, index, "")).string() +
                             ".{pgm,png}: frame file not found");
}

const VideoInfo& DatasetIndex::find(const std::string& id) const {
    for (const VideoInfo& v : videos)
        if (v.id() == id) return v;
    throw std::runtime_error("video '" + id + "' not found in dataset " + root.string());
}

fs::path DatasetIndex::result_dir(const std::string& algorithm, const VideoInfo& v) const {
    return root / "results" / algorithm / v.category / v.name;
}

namespace {

int count_input_frames(const fs::path& input_dir) {
    int count = 0;
    for (const auto& e : fs::directory_iterator(input_dir)) {
        const std::string name = e.path().filename().string();
        if (name.starts_with("in") && (name.ends_with(".pgm") || name.ends_with(".png"))) ++count;
    }
    return count;
}

std::pair<int, int> read_temporal_roi(const fs::path& path) {
    std::ifstream in(path);
    int first = 0, last = 0;
    if (!in || !(in >> first >> last))
        throw std::runtime_error(path.string() + ": malformed temporalROI.txt (expected two integers)");
    return {first, last};
}

}  // namespace

DatasetIndex scan_dataset(const fs::path& root) {
    if (!fs::is_directory(root)) throw std::runtime_error(root.string() + ": dataset root is not a directory");
    DatasetIndex index;
    index.root = root;

    std::vector<fs::path> category_dirs;
    for (const auto& e : fs::directory_iterator(root)) {
        if (!e.is_directory()) continue;
        if (e.path().filename() == "results") continue;
        category_dirs.push_back(e.path());
    }
    std::sort(category_dirs.begin(), category_dirs.end());

    for (const fs::path& cat_dir : category_dirs) {
        bool has_video = false;
        std::vector<fs::path> video_dirs;
        for (const auto& e : fs::directory_iterator(cat_dir))
            if (e.is_directory() && fs::is_directory(e.path() / "input")) video_dirs.push_back(e.path());
        std::sort(video_dirs.begin(), video_dirs.end());
        for (const fs::path& vid_dir : video_dirs) {
            VideoInfo v;
            v.category = cat_dir.filename().string();
            v.name = vid_dir.filename().string();
            v.dir = vid_dir;
            v.frame_count = count_input_frames(vid_dir / "input");
            std::tie(v.roi_first, v.roi_last) = read_temporal_roi(vid_dir / "temporalROI.txt");
            if (v.roi_first < 1 || v.roi_first > v.roi_last || v.roi_last > v.frame_count)
                throw std::runtime_error(v.id() + ": temporal ROI [" + std::to_string(v.roi_first) + ", " +
                                         std::to_string(v.roi_last) + "] inconsistent with " +
                                         std::to_string(v.frame_count) + " frames");
            for (const char* ext : {".pgm", ".png", ".bmp"}) {
                fs::path roi = vid_dir / (std::string("ROI") + ext);
                if (fs::exists(roi) && std::string(ext) != ".bmp") v.spatial_roi = roi;
            }
            // every evaluated frame needs ground truth
            for (int t = v.roi_first; t <= v.roi_last; ++t) {
                try {
                    find_frame(vid_dir / "groundtruth", "gt", t);
                } catch (const std::exception&) {
                    throw std::runtime_error(v.id() + ": missing ground truth for evaluated frame " +
                                             std::to_string(t));
                }
            }
            index.videos.push_back(std::move(v));
            has_video = true;
        }
        if (has_video) index.categories.push_back(cat_dir.filename().string());
    }

    if (fs::is_directory(root / "results")) {
        std::vector<std::string> algos;
        for (const auto& e : fs::directory_iterator(root / "results"))
            if (e.is_directory()) algos.push_back(e.path().filename().string());
        std::sort(algos.begin(), algos.end());
        index.algorithms = std::move(algos);
    }
    return index;
}

std::vector<FrameBundle> frame_bundles(const DatasetIndex& index, const VideoInfo& video,
                                       std::span<const std::string> pool, int stride) {
    if (stride < 1) throw std::invalid_argument("frame_bundles: stride must be >= 1");
    std::optional<BinaryMask> roi;
    if (video.spatial_roi) roi = read_mask(*video.spatial_roi);

    std::vector<FrameBundle> bundles;
    for (int t = video.roi_first; t <= video.roi_last; t += stride) {
        FrameBundle b;
        b.frame_index = t;
        b.gt = read_groundtruth(find_frame(video.dir / "groundtruth", "gt", t));
        if (roi) {
            if (!roi->same_shape(BinaryMask(b.gt.width, b.gt.height)))
                throw std::runtime_error(video.id() + ": spatial ROI dimensions differ from ground truth");
            for (std::size_t i = 0; i < b.gt.labels.size(); ++i)
                if (!roi->data[i]) b.gt.labels[i] = GtLabel::OutOfRoi;
        }
        for (const std::string& algo : pool) {
            fs::path dir = index.result_dir(algo, video);
            BinaryMask m = read_mask(find_frame(dir, "bin", t));
            if (m.width != b.gt.width || m.height != b.gt.height)
                throw std::runtime_error(video.id() + ": mask dimensions of '" + algo + "' differ at frame " +
                                         std::to_string(t));
            b.pool_masks.push_back(std::move(m));
        }
        bundles.push_back(std::move(b));
    }
    return bundles;
}

std::vector<const VideoInfo*> training_split(const DatasetIndex& index, std::span<const std::string> overrides) {
    std::map<std::string, const VideoInfo*> pick;
    for (const VideoInfo& v : index.videos) {
        auto it = pick.find(v.category);
        if (it == pick.end() || v.roi_frames() < it->second->roi_frames()) pick[v.category] = &v;
    }
    for (const std::string& id : overrides) {
        const VideoInfo& v = index.find(id);
        pick[v.category] = &v;
    }
    std::vector<const VideoInfo*> out;
    for (const std::string& cat : index.categories) out.push_back(pick.at(cat));
    return out;
}

FrameSequence load_frames(const VideoInfo& video, int first, int last) {
    FrameSequence seq;
    for (int t = first; t <= last; ++t) {
        GrayImage img = read_gray(find_frame(video.dir / "input", "in", t));
        if (seq.frames.empty()) {
            seq.width = img.width;
            seq.height = img.height;
        }
        seq.frames.push_back(std::move(img.pixels));
    }
    seq.check();
    return seq;
}

// --- synthetic scenes ------------------------------------------------------

SceneSpec SceneSpec::load(const fs::path& path) {
    KvFile kv = KvFile::load(path);
    SceneSpec s;
    s.width = static_cast<int>(kv.get_int("width", 0));
    s.height = static_cast<int>(kv.get_int("height", 0));
    s.frames = static_cast<int>(kv.get_int("frames", 0));
    s.background = static_cast<int>(kv.get_int("background", 120));
    s.noise_sigma = kv.get_double("noise_sigma", 5.0);
    for (const std::string& line : kv.all("object")) {
        std::stringstream ss(line);
        ObjectSpec o;
        char comma;
        if (!(ss >> o.x >> comma >> o.y >> comma >> o.w >> comma >> o.h >> comma >> o.vx >> comma >> o.vy >>
              comma >> o.intensity))
            throw std::runtime_error(path.string() + ": malformed object spec: " + line);
        s.objects.push_back(o);
    }
    s.check();
    return s;
}

void SceneSpec::check() const {
    if (width < 1 || height < 1 || frames < 2)
        throw std::invalid_argument("scene spec needs width/height >= 1 and frames >= 2");
    if (background < 0 || background > 255) throw std::invalid_argument("scene background out of range");
    if (noise_sigma < 0) throw std::invalid_argument("scene noise sigma must be >= 0");
    for (const ObjectSpec& o : objects)
        if (o.w < 1 || o.h < 1 || o.intensity < 0 || o.intensity > 255)
            throw std::invalid_argument("invalid object geometry in scene spec");
}

GroundTruthFrame synth_groundtruth(const SceneSpec& spec, int frame_index) {
    GroundTruthFrame gt(spec.width, spec.height, GtLabel::Negative);
    for (const ObjectSpec& o : spec.objects) {
        const int x0 = static_cast<int>(std::lround(o.x + o.vx * (frame_index - 1)));
        const int y0 = static_cast<int>(std::lround(o.y + o.vy * (frame_index - 1)));
        for (int r = std::max(y0, 0); r < std::min(y0 + o.h, spec.height); ++r)
            for (int c = std::max(x0, 0); c < std::min(x0 + o.w, spec.width); ++c)
                gt.at(r, c) = GtLabel::Positive;
    }
    return gt;
}

void synth_generate(const SceneSpec& spec, std::uint64_t seed, const fs::path& video_dir) {
    spec.check();
    fs::create_directories(video_dir / "input");
    fs::create_directories(video_dir / "groundtruth");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, spec.noise_sigma);
    for (int t = 1; t <= spec.frames; ++t) {
        GroundTruthFrame gt = synth_groundtruth(spec, t);
        GrayImage img;
        img.width = spec.width;
        img.height = spec.height;
        img.pixels.resize(gt.labels.size());
        for (int r = 0; r < spec.height; ++r) {
            for (int c = 0; c < spec.width; ++c) {
                int value = spec.background;
                if (gt.at(r, c) == GtLabel::Positive) {
                    // nearest object rectangle wins; rectangles are rendered in spec order
                    for (const ObjectSpec& o : spec.objects) {
                        const int x0 = static_cast<int>(std::lround(o.x + o.vx * (t - 1)));
                        const int y0 = static_cast<int>(std::lround(o.y + o.vy * (t - 1)));
                        if (r >= y0 && r < y0 + o.h && c >= x0 && c < x0 + o.w) value = o.intensity;
                    }
                }
                const double noisy = value + (spec.noise_sigma > 0 ? noise(rng) : 0.0);
                img.pixels[static_cast<std::size_t>(r) * spec.width + c] =
                    static_cast<std::uint8_t>(std::clamp(static_cast<int>(std::lround(noisy)), 0, 255));
            }
        }
        write_gray(img, video_dir / "input" / frame_name("in", t));
        write_groundtruth(gt, video_dir / "groundtruth" / frame_name("gt", t));
    }
    std::ofstream roi(video_dir / "temporalROI.txt");
    roi << 2 << " " << spec.frames << "\n";
}

// --- detector corruption ----------------------------------------------------

CorruptionProfile corruption_preset(const std::string& name) {
    if (name == "noisy") return {.flip_rate_fg = 0.03, .flip_rate_bg = 0.02};
    if (name == "oversegment") return {.flip_rate_bg = 0.01, .dilate_iters = 2};
    if (name == "undersegment")
        return {.flip_rate_fg = 0.02, .erode_iters = 1, .hole_rate = 0.5, .lag = 1};
    if (name == "noise") return {.flip_rate_fg = 0.5, .flip_rate_bg = 0.5};
    throw std::invalid_argument("unknown corruption preset '" + name + "'");
}

std::vector<BinaryMask> gt_to_masks(std::span<const GroundTruthFrame> gt) {
    std::vector<BinaryMask> out;
    out.reserve(gt.size());
    for (const GroundTruthFrame& g : gt) {
        BinaryMask m(g.width, g.height);
        for (std::size_t i = 0; i < g.labels.size(); ++i) m.data[i] = g.labels[i] == GtLabel::Positive ? 1 : 0;
        out.push_back(std::move(m));
    }
    return out;
}

std::vector<BinaryMask> corrupt_detector(std::span<const BinaryMask> gt_masks, const CorruptionProfile& profile,
                                         std::mt19937_64& rng) {
    if (profile.flip_rate_fg < 0 || profile.flip_rate_fg > 1 || profile.flip_rate_bg < 0 ||
        profile.flip_rate_bg > 1 || profile.hole_rate < 0 || profile.hole_rate > 1)
        throw std::invalid_argument("corrupt_detector: probabilities must be in [0, 1]");
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<BinaryMask> out;
    out.reserve(gt_masks.size());
    for (std::size_t t = 0; t < gt_masks.size(); ++t) {
        const std::size_t src = t >= static_cast<std::size_t>(profile.lag) ? t - profile.lag : 0;
        BinaryMask m = gt_masks[src];
        for (int i = 0; i < profile.dilate_iters; ++i) m = dilate(m);
        for (int i = 0; i < profile.erode_iters; ++i) m = erode(m);
        if (profile.hole_rate > 0 && unit(rng) < profile.hole_rate) {
            // punch a rectangular hole centered on a random foreground pixel
            std::vector<std::size_t> fg;
            for (std::size_t i = 0; i < m.data.size(); ++i)
                if (m.data[i]) fg.push_back(i);
            if (!fg.empty()) {
                const std::size_t center = fg[std::uniform_int_distribution<std::size_t>(0, fg.size() - 1)(rng)];
                const int cr = static_cast<int>(center / m.width), cc = static_cast<int>(center % m.width);
                const int half = 2;
                for (int r = std::max(cr - half, 0); r <= std::min(cr + half, m.height - 1); ++r)
                    for (int c = std::max(cc - half, 0); c <= std::min(cc + half, m.width - 1); ++c)
                        m.at(r, c) = 0;
            }
        }
        if (profile.flip_rate_fg > 0 || profile.flip_rate_bg > 0) {
            for (std::size_t i = 0; i < m.data.size(); ++i) {
                const double rate = m.data[i] ? profile.flip_rate_fg : profile.flip_rate_bg;
                if (rate > 0 && unit(rng) < rate) m.data[i] ^= 1;
            }
        }
        out.push_back(std::move(m));
    }
    return out;
}

}  // namespace gpfuse
