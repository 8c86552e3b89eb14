#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "harmonidiff/harmonize.hpp"
#include "harmonidiff/metrics.hpp"

namespace harmonidiff {

// Procedural scene: base color plus a few smooth waves plus fine pixel noise,
// clamped to [0,1]. Deterministic for a given generator state.
ImageGrid synthetic_texture(std::mt19937_64& rng, int width, int height,
                            const std::array<double, 3>& base, double wave_amplitude,
                            double noise_amplitude);

struct SyntheticSuiteParams {
    int count = 20;
    int target_size = 96;
    int source_min = 24;
    int source_max = 40;
    int margin = 8;  // keeps footprints clear of the border
    std::uint64_t seed = 424242;
};

// Paste tasks with deliberately contrasting source and target palettes, all
// with unit ground resolution and placements that keep boundary rings valid.
std::vector<CompositionTask> synthetic_suite(const SyntheticSuiteParams& params);

// Labeled boundary features for scorer training: positives are untouched
// scenes with an arbitrary rectangular footprint, negatives are copy-paste
// and gradient-blend composites (alternating, one-to-one overall).
std::vector<LabeledSample> synthetic_scorer_samples(std::uint64_t seed, int per_class);

}  // namespace harmonidiff
