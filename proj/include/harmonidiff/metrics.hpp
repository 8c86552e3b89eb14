#pragma once

#include <string>
#include <vector>

#include "harmonidiff/image.hpp"

namespace harmonidiff {

// Bands hugging the footprint boundary: inner lies inside omega, outer
// outside, each of half-width `width` cells.
struct BoundaryRings {
    RegionMask inner;  // omega minus erode(omega, width)
    RegionMask outer;  // dilate(omega, width) minus omega
};

BoundaryRings boundary_rings(const RegionMask& omega, int width);

// Absolute difference of mean Sobel gradient magnitude between the inner and
// outer rings, on the grayscale plane. Either ring empty is a metric error.
double bgd_abs(const ImageGrid& img, const RegionMask& omega, int width);

// Sample mean and unbiased covariance of a feature set (>= 2 samples).
struct FeatureStats {
    int dim = 0;
    long long count = 0;
    std::vector<double> mean;  // dim
    std::vector<double> cov;   // dim x dim, row-major
};

FeatureStats feature_stats(const std::vector<std::vector<double>>& samples);

// Gaussian-approximation distance between two feature populations:
// |mu_a - mu_b|^2 + tr(Ca + Cb - 2 (Ca^1/2 Cb Ca^1/2)^1/2).
double frechet_distance(const FeatureStats& a, const FeatureStats& b);

// 16 numbers describing the seam around omega: for half-widths 1, 3, 5 the
// gradient difference, per-channel ring color differences and the ring
// variance ratio, then the global inside/outside mean-color distance.
// Grayscale images replicate their channel. Layout:
//   [bgd_w, |dR|, |dG|, |dB|, var_ratio] for w in {1,3,5}, then color_gap.
std::vector<double> boundary_features(const ImageGrid& img, const RegionMask& omega);

// 8 whole-image numbers used for population distances: per-channel means,
// per-channel standard deviations, Sobel magnitude mean and deviation.
std::vector<double> image_features(const ImageGrid& img);

// Logistic model over standardized boundary features; score 1 means the seam
// statistics look like untouched imagery.
struct HarmonyScorer {
    std::vector<double> feat_mean;
    std::vector<double> feat_std;
    std::vector<double> weights;
    double bias = 0.0;
    double training_accuracy = 0.0;

    bool ready() const { return !weights.empty(); }
    double score_features(const std::vector<double>& features) const;
};

struct LabeledSample {
    std::vector<double> features;
    int label = 0;  // 1: untouched, 0: composited
};

struct ScorerTrainConfig {
    int epochs = 400;
    double learning_rate = 0.5;
};

// Full-batch gradient descent from zero weights on mean cross-entropy,
// features standardized first (zero-spread components pass through).
HarmonyScorer train_scorer(const std::vector<LabeledSample>& data,
                           const ScorerTrainConfig& cfg = {});

// Mean scorer output over three footprint variations: omega itself, omega
// dilated by 2 and omega eroded by 2 (the eroded one falls back to omega when
// it comes out empty).
double harmony_score(const HarmonyScorer& scorer, const ImageGrid& img, const RegionMask& omega);

void save_scorer(const std::string& path, const HarmonyScorer& scorer);
HarmonyScorer load_scorer(const std::string& path);

}  // namespace harmonidiff
