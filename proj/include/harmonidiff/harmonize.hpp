#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "harmonidiff/image.hpp"
#include "harmonidiff/latent.hpp"
#include "harmonidiff/scheduler.hpp"

namespace harmonidiff {

// One composition job: paste `source` (optionally masked) into `target` at
// paste origin, with both images carrying a ground sample distance in metres
// per pixel. Labels are optional and drive the conditioning text.
struct CompositionTask {
    ImageGrid source;
    ImageGrid target;
    RegionMask source_mask;  // empty: whole source rectangle
    int paste_x = 0;
    int paste_y = 0;
    double source_gsd = 1.0;
    double target_gsd = 1.0;
    std::string source_label;
    std::string target_country;
};

// "A satellite image of a <label> in <country>" when both labels are present,
// UTF-8 bytes, otherwise an empty blob (unconditional run).
ConditioningBlob task_conditioning(const CompositionTask& task);

// Source resampled to the target's ground resolution and placed at the paste
// origin inside a target-shaped zero canvas; omega is the pixel footprint.
struct PlacedSource {
    ImageGrid canvas;
    RegionMask omega;
    int width = 0;   // resampled source dims
    int height = 0;
};

PlacedSource place_source(const CompositionTask& task);

// Per-channel means, over the whole tensor or over a cell region (region dims
// must match the tensor plane; the region must be non-empty).
std::vector<double> channel_means(const LatentTensor& z);
std::vector<double> channel_means(const LatentTensor& z, const RegionMask& region);

// Radiometric alignment: inside omega, src shifts per channel by
// (whole-tensor mean of tar) - (omega mean of src); outside omega the output
// is tar. Empty omega returns tar unchanged.
LatentTensor latent_mean_shift(const LatentTensor& src, const LatentTensor& tar,
                               const RegionMask& omega);

// Ring half-width in grid cells: max(1, round(fraction * min(src_w, src_h))).
// tar_w is accepted for signature compatibility and does not enter the value.
int edge_width(int src_w, int src_h, int tar_w, double fraction = 0.1);

// dilate(omega, w) minus erode(omega, w): the band straddling the boundary.
RegionMask edge_mask(const RegionMask& omega, int width);

// Cellwise select: z_edge where m_edge is set, z_paste elsewhere.
LatentTensor fuse_step(const LatentTensor& z_edge, const LatentTensor& z_paste,
                       const RegionMask& m_edge);

using ScoreFn = std::function<double(const ImageGrid&, const RegionMask&)>;

struct HarmonizeParams {
    std::vector<int> harmonious_depths{7, 8, 9, 10, 11, 12, 13, 14, 15};
    int preservation_depth = 5;
    double edge_width_fraction = 0.1;
    double cfg_scale = 3.5;
    bool condition_inversion = true;
    int worker_threads = 0;  // 0: hardware concurrency
};

// Everything compose() needs besides the task itself.
struct HarmonizeEngine {
    NoiseSchedule schedule;
    std::shared_ptr<const LatentCodec> codec;
    std::shared_ptr<const NoisePredictor> predictor;
    HarmonizeParams params;
    ScoreFn score_fn;  // empty: every candidate scores 0.5
};

void validate_engine(const HarmonizeEngine& engine);

struct Candidate {
    int depth = 0;       // harmonization depth this candidate started from
    ImageGrid image;
    double score = 0.0;
};

struct CandidateSet {
    std::vector<Candidate> entries;  // one per configured harmonization depth
    RegionMask omega_pixel;          // paste footprint at image resolution
};

// Runs the full pipeline: place, encode, invert both scenes once, then one
// candidate per harmonization depth (parallel across depths, deterministic).
CandidateSet compose(const CompositionTask& task, const HarmonizeEngine& engine);

// Index of the highest-scoring candidate; ties resolve to the earliest entry.
int select_best(const CandidateSet& candidates);

}  // namespace harmonidiff
