// gpfuse: evolves and evaluates fusion programs that combine the binary
// foreground masks of several change-detection algorithms.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "gpfuse/dataset.hpp"
#include "gpfuse/detectors.hpp"
#include "gpfuse/engine.hpp"
#include "gpfuse/fitness.hpp"
#include "gpfuse/metrics.hpp"
#include "gpfuse/scorer.hpp"
#include "gpfuse/tree.hpp"

namespace fs = std::filesystem;
using namespace gpfuse;

namespace {

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

TrainingSet load_training_set(const DatasetIndex& index, const std::vector<const VideoInfo*>& videos,
                              const std::vector<std::string>& pool, int stride) {
    TrainingSet train;
    train.pool_size = static_cast<int>(pool.size());
    for (const VideoInfo* v : videos) {
        train.video_ids.push_back(v->id());
        train.videos.push_back(frame_bundles(index, *v, pool, stride));
    }
    train.check();
    return train;
}

// Per-video measures of a prediction tree laid out like results/<method>.
std::vector<std::pair<std::string, std::vector<MetricVector>>> score_prediction_root(
    const DatasetIndex& index, const fs::path& pred_root, std::vector<std::string>* video_ids = nullptr) {
    std::vector<std::pair<std::string, std::vector<MetricVector>>> per_category;
    for (const std::string& cat : index.categories) {
        std::vector<MetricVector> videos;
        for (const VideoInfo& v : index.videos) {
            if (v.category != cat) continue;
            const fs::path dir = pred_root / v.category / v.name;
            if (!fs::is_directory(dir))
                throw std::runtime_error(pred_root.string() + ": missing predictions for video " + v.id());
            std::optional<BinaryMask> roi;
            if (v.spatial_roi) roi = read_mask(*v.spatial_roi);
            ConfusionCounts counts;
            for (int t = v.roi_first; t <= v.roi_last; ++t) {
                GroundTruthFrame gt = read_groundtruth(find_frame(v.dir / "groundtruth", "gt", t));
                if (roi)
                    for (std::size_t i = 0; i < gt.labels.size(); ++i)
                        if (!roi->data[i]) gt.labels[i] = GtLabel::OutOfRoi;
                counts += confusion(read_mask(find_frame(dir, "bin", t)), gt);
            }
            videos.push_back(measures(counts));
            if (video_ids) video_ids->push_back(v.id());
        }
        if (!videos.empty()) per_category.emplace_back(cat, std::move(videos));
    }
    return per_category;
}

void write_report_csv(const fs::path& path, const std::string& method,
                      const std::vector<std::pair<std::string, std::vector<MetricVector>>>& per_category,
                      const std::vector<std::string>& video_ids, std::ofstream& out) {
    (void)path;
    std::size_t vid = 0;
    CategoryReport report = category_report(per_category);
    for (const auto& [cat, videos] : per_category) {
        for (const MetricVector& m : videos) {
            out << method << ',' << cat << ',' << video_ids[vid++].substr(cat.size() + 1);
            for (double x : m.values()) out << ',' << x;
            out << '\n';
        }
    }
    for (const auto& row : report.rows) {
        out << method << ',' << row.category << ',';
        for (double x : row.mean.values()) out << ',' << x;
        out << '\n';
    }
    out << method << ",Overall,";
    for (double x : report.overall.values()) out << ',' << x;
    out << '\n';
}

void apply_tree_to_dataset(const SolutionTree& tree, const DatasetIndex& index,
                           const std::vector<std::string>& pool, const fs::path& out_root) {
    validate(tree, static_cast<int>(pool.size()));
    for (const VideoInfo& v : index.videos) {
        const fs::path out_dir = out_root / v.category / v.name;
        fs::create_directories(out_dir);
        for (int t = v.roi_first; t <= v.roi_last; ++t) {
            std::vector<BinaryMask> masks;
            masks.reserve(pool.size());
            for (const std::string& algo : pool)
                masks.push_back(read_mask(find_frame(index.result_dir(algo, v), "bin", t)));
            write_mask(evaluate(tree, masks), out_dir / frame_name("bin", t));
        }
    }
}

struct PredArg {
    std::string name;
    fs::path root;
};

PredArg parse_pred(const std::string& arg) {
    if (auto eq = arg.find('='); eq != std::string::npos)
        return {arg.substr(0, eq), fs::path(arg.substr(eq + 1))};
    fs::path p(arg);
    return {p.filename().string(), p};
}

int run(int argc, char** argv) {
    CLI::App app{"GP-evolved fusion of change-detection masks"};
    app.require_subcommand(1);

    // ---- evolve ----
    auto* evolve_cmd = app.add_subcommand("evolve", "evolve a fusion tree on a training split");
    std::string ev_dataset, ev_pool, ev_config, ev_train = "auto", ev_out = "best_tree.txt", ev_history,
                ev_pool_cache, ev_granularity = "per-video";
    std::uint64_t ev_seed = 0;
    int ev_workers = 0, ev_generations = -1;
    bool ev_seed_set = false, ev_workers_set = false;
    evolve_cmd->add_option("--dataset", ev_dataset, "dataset root (CDNET layout)")->required();
    evolve_cmd->add_option("--pool", ev_pool, "comma-separated pool algorithm names under results/")->required();
    evolve_cmd->add_option("--config", ev_config, "key=value GP configuration file");
    evolve_cmd->add_option("--train-split", ev_train,
                           "'auto' (shortest video per category) or comma-separated category/video ids");
    evolve_cmd->add_option("--out", ev_out, "output tree file");
    evolve_cmd->add_option("--history", ev_history, "directory for run history CSV and per-generation trees");
    evolve_cmd->add_option("--seed", ev_seed, "RNG seed (overrides config)")->each([&](const std::string&) {
        ev_seed_set = true;
    });
    evolve_cmd->add_option("--workers", ev_workers, "parallel fitness evaluations (overrides config)")
        ->each([&](const std::string&) { ev_workers_set = true; });
    evolve_cmd->add_option("--generations", ev_generations, "generation budget (overrides config)");
    evolve_cmd->add_option("--granularity", ev_granularity, "'per-video' or 'aggregate'");
    evolve_cmd->add_option("--pool-cache", ev_pool_cache, "CSV cache of pool measures");

    // ---- apply ----
    auto* apply_cmd = app.add_subcommand("apply", "apply a fusion tree to a dataset");
    std::string ap_tree, ap_dataset, ap_pool, ap_out;
    apply_cmd->add_option("--tree", ap_tree, "tree file")->required();
    apply_cmd->add_option("--dataset", ap_dataset, "dataset root")->required();
    apply_cmd->add_option("--pool", ap_pool, "comma-separated pool algorithm names")->required();
    apply_cmd->add_option("--out", ap_out, "output root (results layout)")->required();

    // ---- score ----
    auto* score_cmd = app.add_subcommand("score", "seven-measure evaluation of prediction trees");
    std::string sc_dataset, sc_report = "report.csv";
    std::vector<std::string> sc_preds;
    score_cmd->add_option("--dataset", sc_dataset, "dataset root")->required();
    score_cmd->add_option("--pred", sc_preds, "prediction root, optionally name=dir (repeatable)")
        ->required()
        ->take_all();
    score_cmd->add_option("--report", sc_report, "output CSV path");

    // ---- rank ----
    auto* rank_cmd = app.add_subcommand("rank", "CDNET-style average-rank table over several methods");
    std::string rk_dataset, rk_report = "rank.csv";
    std::vector<std::string> rk_preds;
    rank_cmd->add_option("--dataset", rk_dataset, "dataset root")->required();
    rank_cmd->add_option("--pred", rk_preds, "prediction roots, name=dir (at least two)")->required()->take_all();
    rank_cmd->add_option("--report", rk_report, "output CSV path");

    // ---- detect ----
    auto* detect_cmd = app.add_subcommand("detect", "run a built-in toy detector over a dataset");
    std::string dt_dataset, dt_algo, dt_name;
    int dt_threshold = 30, dt_window = 5;
    double dt_alpha = 0.05, dt_k = 2.5;
    detect_cmd->add_option("--dataset", dt_dataset, "dataset root")->required();
    detect_cmd->add_option("--algo", dt_algo, "framediff | medianbg | gaussian")->required();
    detect_cmd->add_option("--name", dt_name, "output name under results/")->required();
    detect_cmd->add_option("--threshold", dt_threshold, "intensity threshold (framediff, medianbg)");
    detect_cmd->add_option("--window", dt_window, "median window in frames (medianbg)");
    detect_cmd->add_option("--alpha", dt_alpha, "learning rate (gaussian)");
    detect_cmd->add_option("--k", dt_k, "sigma multiplier (gaussian)");

    // ---- baseline ----
    auto* baseline_cmd = app.add_subcommand("baseline", "majority-vote fusion baseline");
    std::string bl_dataset, bl_pool, bl_name;
    baseline_cmd->add_option("--dataset", bl_dataset, "dataset root")->required();
    baseline_cmd->add_option("--pool", bl_pool, "comma-separated pool algorithm names (odd count >= 3)")
        ->required();
    baseline_cmd->add_option("--name", bl_name, "output name under results/")->required();

    // ---- synth ----
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic video with exact ground truth");
    std::string sy_spec, sy_dataset, sy_category = "synthetic", sy_video = "scene";
    std::uint64_t sy_seed = 0;
    std::vector<std::string> sy_detectors;
    synth_cmd->add_option("--spec", sy_spec, "scene spec file (key=value)")->required();
    synth_cmd->add_option("--dataset", sy_dataset, "dataset root to write into")->required();
    synth_cmd->add_option("--category", sy_category, "category name");
    synth_cmd->add_option("--video", sy_video, "video name");
    synth_cmd->add_option("--seed", sy_seed, "RNG seed");
    synth_cmd->add_option("--detector", sy_detectors,
                          "name=preset corrupted detector to derive from ground truth (repeatable)")
        ->take_all();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e);
        return 0;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;  // usage error
    }

    if (app.got_subcommand(evolve_cmd)) {
        GpConfig cfg = ev_config.empty() ? GpConfig{} : GpConfig::load(ev_config);
        if (ev_seed_set) cfg.rng_seed = ev_seed;
        if (ev_workers_set) cfg.workers = ev_workers;
        if (ev_generations >= 0) cfg.max_generations = ev_generations;
        cfg.check();
        const Granularity gran = ev_granularity == "aggregate" ? Granularity::Aggregate : Granularity::PerVideo;

        std::cout << "# configuration\n" << cfg.to_text();
        DatasetIndex index = scan_dataset(ev_dataset);
        std::vector<std::string> pool = split_csv(ev_pool);
        std::vector<const VideoInfo*> train_videos;
        if (ev_train == "auto") {
            train_videos = training_split(index);
        } else {
            for (const std::string& id : split_csv(ev_train)) train_videos.push_back(&index.find(id));
        }
        std::cout << "# training videos:";
        for (const VideoInfo* v : train_videos) std::cout << ' ' << v->id();
        std::cout << "\n";

        TrainingSet train = load_training_set(index, train_videos, pool, cfg.frame_stride);
        EvaluationContext ctx;
        bool have_ctx = false;
        if (!ev_pool_cache.empty() && fs::exists(ev_pool_cache)) {
            PoolMeasures pm = load_pool_measures(ev_pool_cache);
            if (pm.algorithms == pool) {
                ctx.pool_values = pm.values;
                ctx.w1 = cfg.w1;
                ctx.w2 = cfg.w2;
                ctx.granularity = gran;
                have_ctx = true;
                std::cout << "# pool measures loaded from " << ev_pool_cache << "\n";
            }
        }
        if (!have_ctx) {
            ctx = build_context(train, cfg.w1, cfg.w2, gran);
            if (!ev_pool_cache.empty()) {
                std::vector<std::string> names =
                    gran == Granularity::Aggregate ? std::vector<std::string>{"aggregate"} : train.video_ids;
                save_pool_measures(ev_pool_cache, pool, names, ctx.pool_values);
            }
        }

        FusionScorer scorer(std::move(train), std::move(ctx));
        EvolveResult result = evolve(cfg, static_cast<int>(pool.size()), scorer);

        save_tree(result.best, ev_out, pool);
        if (!ev_history.empty()) {
            fs::create_directories(ev_history);
            save_history(result.history, fs::path(ev_history) / "history.csv");
            std::ofstream cfg_out(fs::path(ev_history) / "config.txt");
            cfg_out << cfg.to_text();
            fs::path trees_dir = fs::path(ev_history) / "best_trees";
            fs::create_directories(trees_dir);
            for (const GenerationRecord& r : result.history.generations) {
                std::ofstream t(trees_dir / ("gen" + std::to_string(r.generation) + ".txt"));
                t << r.best_tree << "\n";
            }
        }
        std::cout << "best tree: " << serialize(result.best) << "\n"
                  << "fitness f = " << result.best_report.f << " (mean rank " << result.best_report.mean_rank
                  << ", P1 " << result.best_report.p1_mean << ", P2 " << result.best_report.p2 << ")\n";
        return 0;
    }

    if (app.got_subcommand(apply_cmd)) {
        SolutionTree tree = load_tree(ap_tree);
        DatasetIndex index = scan_dataset(ap_dataset);
        apply_tree_to_dataset(tree, index, split_csv(ap_pool), ap_out);
        return 0;
    }

    if (app.got_subcommand(score_cmd) || app.got_subcommand(rank_cmd)) {
        const bool ranking = app.got_subcommand(rank_cmd);
        DatasetIndex index = scan_dataset(ranking ? rk_dataset : sc_dataset);
        const std::vector<std::string>& pred_args = ranking ? rk_preds : sc_preds;
        const std::string report_path = ranking ? rk_report : sc_report;
        if (ranking && pred_args.size() < 2) throw CLI::ValidationError("rank needs at least two --pred");

        std::vector<PredArg> preds;
        for (const std::string& a : pred_args) preds.push_back(parse_pred(a));

        std::vector<std::vector<std::pair<std::string, std::vector<MetricVector>>>> tables;
        std::vector<std::string> video_ids;
        for (const PredArg& p : preds) {
            std::vector<std::string>* ids = tables.empty() ? &video_ids : nullptr;
            tables.push_back(score_prediction_root(index, p.root, ids));
        }

        if (!ranking) {
            std::ofstream out(report_path);
            if (!out) throw std::runtime_error(report_path + ": cannot open destination for writing");
            out.precision(17);
            out << "method,category,video";
            for (const char* m : kMeasureNames) out << ',' << m;
            out << '\n';
            for (std::size_t p = 0; p < preds.size(); ++p)
                write_report_csv(report_path, preds[p].name, tables[p], video_ids, out);
            std::cout << "wrote " << report_path << "\n";
        }

        if (preds.size() >= 2) {
            std::vector<std::vector<MetricVector>> per_method_category;
            for (const auto& table : tables) {
                std::vector<MetricVector> cats;
                for (const auto& row : category_report(table).rows) cats.push_back(row.mean);
                per_method_category.push_back(std::move(cats));
            }
            CdnetRanking ranks = cdnet_rank(per_method_category);
            const std::string rank_path =
                ranking ? report_path : (fs::path(report_path).replace_extension("").string() + "_rank.csv");
            std::ofstream out(rank_path);
            if (!out) throw std::runtime_error(rank_path + ": cannot open destination for writing");
            out.precision(17);
            out << "method,average_rank";
            for (const std::string& c : index.categories) out << ',' << c;
            out << '\n';
            for (std::size_t m = 0; m < preds.size(); ++m) {
                out << preds[m].name << ',' << ranks.average_rank[m];
                for (double r : ranks.category_ranks[m]) out << ',' << r;
                out << '\n';
            }
            std::cout << "wrote " << rank_path << "\n";
        }
        return 0;
    }

    if (app.got_subcommand(detect_cmd)) {
        DatasetIndex index = scan_dataset(dt_dataset);
        for (const VideoInfo& v : index.videos) {
            FrameSequence seq = load_frames(v, 1, v.frame_count);
            std::vector<BinaryMask> masks;
            if (dt_algo == "framediff")
                masks = frame_difference(seq, dt_threshold);
            else if (dt_algo == "medianbg")
                masks = median_background(seq, dt_window, dt_threshold);
            else if (dt_algo == "gaussian")
                masks = running_gaussian(seq, dt_alpha, dt_k);
            else
                throw CLI::ValidationError("unknown detector '" + dt_algo + "'");
            const fs::path out_dir = index.result_dir(dt_name, v);
            fs::create_directories(out_dir);
            for (int t = 1; t <= v.frame_count; ++t) write_mask(masks[t - 1], out_dir / frame_name("bin", t));
        }
        return 0;
    }

    if (app.got_subcommand(baseline_cmd)) {
        DatasetIndex index = scan_dataset(bl_dataset);
        std::vector<std::string> pool = split_csv(bl_pool);
        TreeNode mv;
        mv.op = OpKind::Majority;
        for (std::size_t k = 0; k < pool.size(); ++k) {
            TreeNode t;
            t.terminal = static_cast<int>(k);
            mv.children.push_back(t);
        }
        SolutionTree tree{mv};
        validate(tree, static_cast<int>(pool.size()));
        apply_tree_to_dataset(tree, index, pool, fs::path(bl_dataset) / "results" / bl_name);
        return 0;
    }

    if (app.got_subcommand(synth_cmd)) {
        SceneSpec spec = SceneSpec::load(sy_spec);
        const fs::path video_dir = fs::path(sy_dataset) / sy_category / sy_video;
        synth_generate(spec, sy_seed, video_dir);
        if (!sy_detectors.empty()) {
            std::vector<GroundTruthFrame> gt;
            for (int t = 1; t <= spec.frames; ++t) gt.push_back(synth_groundtruth(spec, t));
            std::vector<BinaryMask> clean = gt_to_masks(gt);
            for (const std::string& d : sy_detectors) {
                auto eq = d.find('=');
                if (eq == std::string::npos)
                    throw CLI::ValidationError("--detector expects name=preset, got '" + d + "'");
                const std::string name = d.substr(0, eq);
                CorruptionProfile profile = corruption_preset(d.substr(eq + 1));
                // detector-specific seed, stable across runs with the same --seed
                std::mt19937_64 rng(sy_seed ^ std::hash<std::string>{}(name + "/" + sy_category + "/" + sy_video));
                std::vector<BinaryMask> masks = corrupt_detector(clean, profile, rng);
                const fs::path out_dir = fs::path(sy_dataset) / "results" / name / sy_category / sy_video;
                fs::create_directories(out_dir);
                for (int t = 1; t <= spec.frames; ++t) write_mask(masks[t - 1], out_dir / frame_name("bin", t));
            }
        }
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
