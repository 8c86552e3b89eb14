#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "harmonidiff/benchmark.hpp"
#include "harmonidiff/config.hpp"
#include "harmonidiff/contact_sheet.hpp"
#include "harmonidiff/errors.hpp"
#include "harmonidiff/image_io.hpp"
#include "harmonidiff/manifest.hpp"
#include "harmonidiff/synthetic.hpp"

namespace hd = harmonidiff;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitConfig = 3;
constexpr int kExitFailure = 4;

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// Loads the configured scorer, or trains the built-in synthetic one.
hd::HarmonyScorer acquire_scorer(const hd::PipelineConfig& cfg) {
    if (!cfg.scorer_path.empty()) return hd::load_scorer(cfg.scorer_path);
    const auto samples = hd::synthetic_scorer_samples(cfg.seed, 150);
    hd::HarmonyScorer scorer = hd::train_scorer(samples);
    std::cerr << "no scorer_path configured; trained built-in scorer (training accuracy "
              << fmt6(scorer.training_accuracy) << ")\n";
    return scorer;
}

hd::ScoreFn make_score_fn(const hd::HarmonyScorer& scorer) {
    return [&scorer](const hd::ImageGrid& img, const hd::RegionMask& omega) {
        return hd::harmony_score(scorer, img, omega);
    };
}

struct ComposeArgs {
    std::string source, target, mask, out_dir = ".";
    std::string source_label, target_country;
    int paste_x = 0, paste_y = 0;
    double src_gsd = 1.0, tar_gsd = 1.0;
    bool sheet = false;
};

int run_compose(const ComposeArgs& args, const hd::PipelineConfig& cfg,
                const hd::HarmonyScorer& scorer) {
    hd::CompositionTask task;
    task.source = hd::load_image(args.source);
    task.target = hd::load_image(args.target);
    if (!args.mask.empty()) task.source_mask = hd::load_mask(args.mask);
    task.paste_x = args.paste_x;
    task.paste_y = args.paste_y;
    task.source_gsd = args.src_gsd;
    task.target_gsd = args.tar_gsd;
    task.source_label = args.source_label;
    task.target_country = args.target_country;

    hd::HarmonizeEngine engine = hd::build_engine(cfg);
    engine.score_fn = make_score_fn(scorer);

    const hd::CandidateSet cands = hd::compose(task, engine);
    const int best = hd::select_best(cands);

    fs::create_directories(args.out_dir);
    const fs::path out(args.out_dir);
    for (const hd::Candidate& c : cands.entries) {
        char name[64];
        std::snprintf(name, sizeof(name), "candidate_depth_%02d.png", c.depth);
        hd::save_image((out / name).string(), c.image);
    }
    hd::save_image((out / "composite.png").string(), cands.entries[best].image);
    hd::save_mask((out / "footprint.pgm").string(), cands.omega_pixel);
    if (args.sheet) {
        hd::write_contact_sheet((out / "sheet.png").string(), cands, best);
    }
    const double bgd = hd::bgd_abs(cands.entries[best].image, cands.omega_pixel, cfg.bgd_width);
    std::cout << "selected depth " << cands.entries[best].depth << " score "
              << fmt6(cands.entries[best].score) << " bgd " << fmt6(bgd) << "\n";
    std::cout << "composite: " << (out / "composite.png").string() << "\n";
    return kExitOk;
}

struct BenchArgs {
    std::string manifest, out_dir;
    std::string methods = "copy_paste,poisson,harmonidiff";
};

int run_bench(const BenchArgs& args, const hd::PipelineConfig& cfg,
              const hd::HarmonyScorer& scorer) {
    std::vector<hd::Method> methods;
    std::stringstream ss(args.methods);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        const auto m = hd::method_from_name(tok);
        if (!m) {
            std::cerr << "unknown method '" << tok
                      << "' (expected copy_paste, poisson or harmonidiff)\n";
            return kExitUsage;
        }
        methods.push_back(*m);
    }
    if (methods.empty()) {
        std::cerr << "no methods requested\n";
        return kExitUsage;
    }

    const hd::Manifest manifest = hd::load_manifest(args.manifest);
    hd::BenchContext ctx;
    ctx.engine = hd::build_engine(cfg);
    ctx.scorer = scorer;
    ctx.engine.score_fn = make_score_fn(ctx.scorer);
    ctx.poisson = cfg.poisson;
    ctx.bgd_width = cfg.bgd_width;
    ctx.out_dir = args.out_dir;

    const hd::BenchReport report = hd::run_benchmark(manifest, methods, ctx);
    fs::create_directories(args.out_dir);
    const fs::path out(args.out_dir);
    hd::write_report_csv((out / "report.csv").string(), report);
    hd::write_report_json((out / "report.json").string(), report);

    int ok_rows = 0;
    for (const hd::BenchRow& row : report.rows) {
        if (row.ok) ++ok_rows;
        else std::cerr << "task " << row.task_id << " " << hd::method_name(row.method)
                       << " failed: " << row.reason << "\n";
    }
    for (const hd::BenchAggregate& agg : report.aggregates) {
        std::cout << hd::method_name(agg.method) << ": " << agg.succeeded << "/"
                  << (agg.succeeded + agg.failed) << " ok";
        if (agg.succeeded > 0) {
            std::cout << ", mean bgd " << fmt6(agg.mean_bgd) << ", mean harmony "
                      << fmt6(agg.mean_harmony);
        }
        if (agg.has_frechet) std::cout << ", frechet " << fmt6(agg.frechet);
        std::cout << "\n";
    }
    std::cout << "report: " << (out / "report.csv").string() << "\n";
    if (ok_rows == 0) {
        std::cerr << "no task succeeded\n";
        return kExitFailure;
    }
    return kExitOk;
}

int run_metrics(const std::string& image_path, const std::string& mask_path, int width) {
    const hd::ImageGrid img = hd::load_image(image_path);
    const hd::RegionMask omega = hd::load_mask(mask_path);
    std::cout << fmt6(hd::bgd_abs(img, omega, width)) << "\n";
    return kExitOk;
}

// Feature extraction for one labeled directory. A file <stem>_mask.<ext> next
// to an image supplies its footprint; otherwise a centered rectangle covering
// a quarter of the area is used.
void collect_samples(const std::string& dir, int label, std::vector<hd::LabeledSample>& out) {
    std::vector<fs::path> files;
    for (const auto& de : fs::directory_iterator(dir)) {
        if (!de.is_regular_file()) continue;
        const std::string ext = de.path().extension().string();
        if (ext != ".png" && ext != ".pgm" && ext != ".ppm") continue;
        const std::string stem = de.path().stem().string();
        if (stem.size() > 5 && stem.substr(stem.size() - 5) == "_mask") continue;
        files.push_back(de.path());
    }
    std::sort(files.begin(), files.end());
    for (const fs::path& file : files) {
        const hd::ImageGrid img = hd::load_image(file.string());
        hd::RegionMask omega;
        for (const char* ext : {".pgm", ".png"}) {
            fs::path mask_path = file.parent_path() / (file.stem().string() + "_mask" + ext);
            if (fs::exists(mask_path)) {
                omega = hd::load_mask(mask_path.string());
                break;
            }
        }
        if (omega.empty()) {
            omega = hd::RegionMask(img.width(), img.height());
            for (int y = img.height() / 4; y < 3 * img.height() / 4; ++y)
                for (int x = img.width() / 4; x < 3 * img.width() / 4; ++x)
                    omega.set(y, x, true);
        }
        out.push_back({hd::boundary_features(img, omega), label});
    }
}

int run_train_scorer(const std::string& positives, const std::string& negatives,
                     const std::string& out_path, int epochs, double lr) {
    std::vector<hd::LabeledSample> samples;
    collect_samples(positives, 1, samples);
    const std::size_t pos_count = samples.size();
    collect_samples(negatives, 0, samples);
    if (pos_count == 0 || samples.size() == pos_count) {
        std::cerr << "need at least one usable image in each directory\n";
        return kExitFailure;
    }
    hd::ScorerTrainConfig tc;
    tc.epochs = epochs;
    tc.learning_rate = lr;
    const hd::HarmonyScorer scorer = hd::train_scorer(samples, tc);
    hd::save_scorer(out_path, scorer);
    std::cout << "trained on " << pos_count << " positive / " << (samples.size() - pos_count)
              << " negative samples, training accuracy " << fmt6(scorer.training_accuracy)
              << "\n";
    std::cout << "scorer: " << out_path << "\n";
    return kExitOk;
}

int run_gen_negatives(const std::string& manifest_path, const std::string& out_dir,
                      const hd::PoissonConfig& poisson) {
    const hd::Manifest manifest = hd::load_manifest(manifest_path);
    fs::create_directories(out_dir);
    const fs::path out(out_dir);
    int ok = 0;
    for (const hd::ManifestEntry& entry : manifest.entries) {
        try {
            const hd::CompositionTask task = hd::load_task(entry, manifest.base_dir);
            const hd::BaselineResult cp = hd::copy_paste(task);
            hd::save_image((out / (entry.id + "_copy_paste.png")).string(), cp.image);
            hd::save_mask((out / (entry.id + "_copy_paste_mask.pgm")).string(), cp.omega);
            const hd::BaselineResult pb = hd::poisson_blend(task, poisson);
            hd::save_image((out / (entry.id + "_poisson.png")).string(), pb.image);
            hd::save_mask((out / (entry.id + "_poisson_mask.pgm")).string(), pb.omega);
            ++ok;
        } catch (const hd::Error& e) {
            std::cerr << "task " << entry.id << " failed: " << e.what() << "\n";
        }
    }
    std::cout << "wrote composites for " << ok << "/" << manifest.entries.size() << " tasks to "
              << out_dir << "\n";
    return ok > 0 ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Training-free satellite image composition pipeline"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "Pipeline configuration JSON")
        ->envname("HARMONIDIFF_CONFIG");

    ComposeArgs compose_args;
    CLI::App* compose = app.add_subcommand("compose", "Harmonize one paste task");
    compose->add_option("--source", compose_args.source, "Source image")->required();
    compose->add_option("--target", compose_args.target, "Target image")->required();
    compose->add_option("--mask", compose_args.mask, "Source mask image");
    compose->add_option("--paste-x", compose_args.paste_x, "Paste origin x")->required();
    compose->add_option("--paste-y", compose_args.paste_y, "Paste origin y")->required();
    compose->add_option("--src-gsd", compose_args.src_gsd, "Source metres per pixel");
    compose->add_option("--tar-gsd", compose_args.tar_gsd, "Target metres per pixel");
    compose->add_option("--source-label", compose_args.source_label, "Object label");
    compose->add_option("--target-country", compose_args.target_country, "Target country");
    compose->add_option("--out", compose_args.out_dir, "Output directory");
    compose->add_flag("--sheet", compose_args.sheet, "Also write a candidate contact sheet");

    BenchArgs bench_args;
    CLI::App* bench = app.add_subcommand("bench", "Run methods over a task manifest");
    bench->add_option("--manifest", bench_args.manifest, "Task manifest JSON")->required();
    bench->add_option("--out", bench_args.out_dir, "Output directory")->required();
    bench->add_option("--methods", bench_args.methods, "Comma-separated method list");

    std::string metrics_image, metrics_mask;
    int metrics_width = 3;
    CLI::App* metrics = app.add_subcommand("metrics", "Print the seam gradient difference");
    metrics->add_option("--image", metrics_image, "Image")->required();
    metrics->add_option("--mask", metrics_mask, "Footprint mask")->required();
    metrics->add_option("--width", metrics_width, "Ring half-width");

    std::string ts_pos, ts_neg, ts_out = "scorer.json";
    int ts_epochs = 400;
    double ts_lr = 0.5;
    CLI::App* train = app.add_subcommand("train-scorer", "Fit the harmony scorer");
    train->add_option("--positives", ts_pos, "Directory of untouched images")->required();
    train->add_option("--negatives", ts_neg, "Directory of composited images")->required();
    train->add_option("--out", ts_out, "Output scorer JSON");
    train->add_option("--epochs", ts_epochs, "Training epochs");
    train->add_option("--lr", ts_lr, "Learning rate");

    std::string gn_manifest, gn_out;
    CLI::App* gen = app.add_subcommand("gen-negatives", "Write baseline composites for training");
    gen->add_option("--manifest", gn_manifest, "Task manifest JSON")->required();
    gen->add_option("--out", gn_out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    hd::PipelineConfig cfg;
    hd::HarmonyScorer scorer;
    const bool needs_scorer = compose->parsed() || bench->parsed();
    try {
        if (!config_path.empty()) cfg = hd::load_config(config_path);
        if (needs_scorer) scorer = acquire_scorer(cfg);
    } catch (const hd::Error& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        if (compose->parsed()) return run_compose(compose_args, cfg, scorer);
        if (bench->parsed()) return run_bench(bench_args, cfg, scorer);
        if (metrics->parsed()) return run_metrics(metrics_image, metrics_mask, metrics_width);
        if (train->parsed()) return run_train_scorer(ts_pos, ts_neg, ts_out, ts_epochs, ts_lr);
        if (gen->parsed()) return run_gen_negatives(gn_manifest, gn_out, cfg.poisson);
    } catch (const hd::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitUsage;
}
