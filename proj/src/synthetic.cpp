#include "harmonidiff/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "harmonidiff/baselines.hpp"
#include "harmonidiff/errors.hpp"

namespace harmonidiff {

namespace {

constexpr double kTau = 6.283185307179586;

struct Wave {
    double fx, fy, phase, amp;
};

}  // namespace

ImageGrid synthetic_texture(std::mt19937_64& rng, int width, int height,
                            const std::array<double, 3>& base, double wave_amplitude,
                            double noise_amplitude) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::array<Wave, 3> waves;
    for (Wave& w : waves) {
        w.fx = (0.5 + 3.0 * unit(rng)) / width;
        w.fy = (0.5 + 3.0 * unit(rng)) / height;
        w.phase = kTau * unit(rng);
        w.amp = wave_amplitude * (0.5 + 0.5 * unit(rng));
    }
    // Per-channel tint keeps the waves correlated across channels, as terrain
    // shading is.
    std::array<double, 3> tint;
    for (double& t : tint) t = 0.7 + 0.3 * unit(rng);
    ImageGrid img(width, height, 3);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            double relief = 0.0;
            for (const Wave& w : waves) {
                relief += w.amp * std::sin(kTau * (w.fx * x + w.fy * y) + w.phase);
            }
            const double noise = noise_amplitude * (2.0 * unit(rng) - 1.0);
            for (int c = 0; c < 3; ++c) {
                img.at(c, y, x) = std::clamp(base[c] + tint[c] * relief + noise, 0.0, 1.0);
            }
        }
    }
    return img;
}

std::vector<CompositionTask> synthetic_suite(const SyntheticSuiteParams& p) {
    if (p.count < 1) throw ContractError("synthetic_suite: count must be >= 1");
    if (p.source_min < 4 || p.source_max < p.source_min) {
        throw ContractError("synthetic_suite: bad source size range");
    }
    if (p.target_size < p.source_max + 2 * p.margin) {
        throw ContractError("synthetic_suite: target too small for sources plus margin");
    }
    std::mt19937_64 rng(p.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> src_dim(p.source_min, p.source_max);
    std::vector<CompositionTask> tasks;
    tasks.reserve(p.count);
    for (int i = 0; i < p.count; ++i) {
        // Bright terrain, dark insert (or flipped every fourth task) keeps a
        // strong radiometric gap for the harmonization to close.
        const bool flip = (i % 4) == 3;
        std::array<double, 3> tar_base{0.55 + 0.2 * unit(rng), 0.55 + 0.2 * unit(rng),
                                       0.5 + 0.2 * unit(rng)};
        std::array<double, 3> src_base{0.12 + 0.15 * unit(rng), 0.14 + 0.15 * unit(rng),
                                       0.12 + 0.15 * unit(rng)};
        if (flip) std::swap(tar_base, src_base);
        CompositionTask task;
        task.target = synthetic_texture(rng, p.target_size, p.target_size, tar_base, 0.08, 0.02);
        const int sw = src_dim(rng);
        const int sh = src_dim(rng);
        task.source = synthetic_texture(rng, sw, sh, src_base, 0.05, 0.02);
        std::uniform_int_distribution<int> ox(p.margin, p.target_size - sw - p.margin);
        std::uniform_int_distribution<int> oy(p.margin, p.target_size - sh - p.margin);
        task.paste_x = ox(rng);
        task.paste_y = oy(rng);
        task.source_gsd = 1.0;
        task.target_gsd = 1.0;
        tasks.push_back(std::move(task));
    }
    return tasks;
}

std::vector<LabeledSample> synthetic_scorer_samples(std::uint64_t seed, int per_class) {
    if (per_class < 1) throw ContractError("synthetic_scorer_samples: per_class must be >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> rect_dim(16, 28);
    const int size = 64;
    const int margin = 8;
    std::vector<LabeledSample> samples;
    samples.reserve(2 * per_class);

    auto random_rect = [&](int w, int h) {
        RegionMask m(size, size);
        std::uniform_int_distribution<int> ox(margin, size - w - margin);
        std::uniform_int_distribution<int> oy(margin, size - h - margin);
        const int x0 = ox(rng);
        const int y0 = oy(rng);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) m.set(y0 + y, x0 + x, true);
        return m;
    };

    for (int i = 0; i < per_class; ++i) {
        // Positive: untouched scene, footprint drawn over it arbitrarily.
        std::array<double, 3> base{0.2 + 0.6 * unit(rng), 0.2 + 0.6 * unit(rng),
                                   0.2 + 0.6 * unit(rng)};
        const ImageGrid clean = synthetic_texture(rng, size, size, base, 0.08, 0.02);
        const RegionMask pos_mask = random_rect(rect_dim(rng), rect_dim(rng));
        samples.push_back({boundary_features(clean, pos_mask), 1});

        // Negative: contrasting paste, alternating the two baselines.
        std::array<double, 3> tar_base{0.5 + 0.3 * unit(rng), 0.5 + 0.3 * unit(rng),
                                       0.45 + 0.3 * unit(rng)};
        std::array<double, 3> src_base{0.1 + 0.2 * unit(rng), 0.1 + 0.2 * unit(rng),
                                       0.1 + 0.2 * unit(rng)};
        if (unit(rng) < 0.5) std::swap(tar_base, src_base);
        CompositionTask task;
        task.target = synthetic_texture(rng, size, size, tar_base, 0.08, 0.02);
        const int sw = rect_dim(rng);
        const int sh = rect_dim(rng);
        task.source = synthetic_texture(rng, sw, sh, src_base, 0.05, 0.02);
        std::uniform_int_distribution<int> ox(margin, size - sw - margin);
        std::uniform_int_distribution<int> oy(margin, size - sh - margin);
        task.paste_x = ox(rng);
        task.paste_y = oy(rng);
        const bool use_poisson = (i % 2) == 1;
        const BaselineResult composite = use_poisson ? poisson_blend(task) : copy_paste(task);
        samples.push_back({boundary_features(composite.image, composite.omega), 0});
    }
    return samples;
}

}  // namespace harmonidiff
