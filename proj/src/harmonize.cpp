#include "harmonidiff/harmonize.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "harmonidiff/errors.hpp"
#include "harmonidiff/parallel.hpp"

namespace harmonidiff {

ConditioningBlob task_conditioning(const CompositionTask& task) {
    if (task.source_label.empty() || task.target_country.empty()) return {};
    return ConditioningBlob::from_string("A satellite image of a " + task.source_label + " in " +
                                         task.target_country);
}

PlacedSource place_source(const CompositionTask& task) {
    if (task.source.empty() || task.target.empty()) {
        throw ContractError("place_source: source and target must be non-empty");
    }
    if (task.source.channels() != task.target.channels()) {
        throw ContractError("place_source: source and target channel counts differ");
    }
    const ImageGrid src = rescale_by_gsd(task.source, task.source_gsd, task.target_gsd);
    RegionMask smask;
    if (task.source_mask.empty()) {
        smask = RegionMask(src.width(), src.height(), true);
    } else {
        if (task.source_mask.width() != task.source.width() ||
            task.source_mask.height() != task.source.height()) {
            throw ContractError("place_source: source mask dims must match the source image");
        }
        smask = rescale_mask_by_gsd(task.source_mask, task.source_gsd, task.target_gsd);
        if (smask.width() != src.width() || smask.height() != src.height()) {
            // Rounding is shared, so this cannot diverge; keep the guard anyway.
            throw ContractError("place_source: resampled mask dims diverged from the source");
        }
    }
    const int tw = task.target.width();
    const int th = task.target.height();
    if (task.paste_x < 0 || task.paste_y < 0 || task.paste_x + src.width() > tw ||
        task.paste_y + src.height() > th) {
        throw PlacementError("source footprint " + std::to_string(src.width()) + "x" +
                             std::to_string(src.height()) + " at (" +
                             std::to_string(task.paste_x) + ", " + std::to_string(task.paste_y) +
                             ") exceeds target " + std::to_string(tw) + "x" + std::to_string(th));
    }
    PlacedSource placed;
    placed.canvas = ImageGrid(tw, th, task.target.channels(), 0.0);
    placed.omega = RegionMask(tw, th);
    placed.width = src.width();
    placed.height = src.height();
    for (int y = 0; y < src.height(); ++y) {
        for (int x = 0; x < src.width(); ++x) {
            if (!smask.at(y, x)) continue;
            placed.omega.set(task.paste_y + y, task.paste_x + x, true);
            for (int c = 0; c < src.channels(); ++c) {
                placed.canvas.at(c, task.paste_y + y, task.paste_x + x) = src.at(c, y, x);
            }
        }
    }
    return placed;
}

std::vector<double> channel_means(const LatentTensor& z) {
    if (z.empty()) throw ContractError("channel_means: empty tensor");
    std::vector<double> means(z.channels(), 0.0);
    const double n = static_cast<double>(z.height()) * z.width();
    for (int c = 0; c < z.channels(); ++c) {
        double sum = 0.0;
        for (int y = 0; y < z.height(); ++y)
            for (int x = 0; x < z.width(); ++x) sum += z.at(c, y, x);
        means[c] = sum / n;
    }
    return means;
}

std::vector<double> channel_means(const LatentTensor& z, const RegionMask& region) {
    if (z.empty()) throw ContractError("channel_means: empty tensor");
    if (region.width() != z.width() || region.height() != z.height()) {
        throw ContractError("channel_means: region dims must match the tensor plane");
    }
    const long long n = region.count();
    if (n == 0) throw ContractError("channel_means: region is empty");
    std::vector<double> means(z.channels(), 0.0);
    for (int c = 0; c < z.channels(); ++c) {
        double sum = 0.0;
        for (int y = 0; y < z.height(); ++y)
            for (int x = 0; x < z.width(); ++x)
                if (region.at(y, x)) sum += z.at(c, y, x);
        means[c] = sum / static_cast<double>(n);
    }
    return means;
}

LatentTensor latent_mean_shift(const LatentTensor& src, const LatentTensor& tar,
                               const RegionMask& omega) {
    if (!src.same_shape(tar)) throw ContractError("latent_mean_shift: shape mismatch");
    if (omega.width() != tar.width() || omega.height() != tar.height()) {
        throw ContractError("latent_mean_shift: omega dims must match the latent plane");
    }
    LatentTensor out = tar;
    if (omega.count() == 0) return out;
    const std::vector<double> tar_mean = channel_means(tar);
    const std::vector<double> src_mean = channel_means(src, omega);
    for (int c = 0; c < src.channels(); ++c) {
        const double shift = tar_mean[c] - src_mean[c];
        for (int y = 0; y < src.height(); ++y) {
            for (int x = 0; x < src.width(); ++x) {
                if (omega.at(y, x)) out.at(c, y, x) = src.at(c, y, x) + shift;
            }
        }
    }
    return out;
}

int edge_width(int src_w, int src_h, int tar_w, double fraction) {
    (void)tar_w;
    if (src_w < 1 || src_h < 1) throw ContractError("edge_width: source dims must be >= 1");
    if (!(fraction > 0.0) || !(fraction < 1.0)) {
        throw ContractError("edge_width: fraction must lie in (0, 1)");
    }
    return std::max(1, static_cast<int>(std::lround(fraction * std::min(src_w, src_h))));
}

RegionMask edge_mask(const RegionMask& omega, int width) {
    if (width < 1) throw ContractError("edge_mask: width must be >= 1");
    return mask_difference(dilate(omega, width), erode(omega, width));
}

LatentTensor fuse_step(const LatentTensor& z_edge, const LatentTensor& z_paste,
                       const RegionMask& m_edge) {
    if (!z_edge.same_shape(z_paste)) throw ContractError("fuse_step: shape mismatch");
    if (m_edge.width() != z_edge.width() || m_edge.height() != z_edge.height()) {
        throw ContractError("fuse_step: mask dims must match the latent plane");
    }
    LatentTensor out = z_paste;
    for (int c = 0; c < z_edge.channels(); ++c)
        for (int y = 0; y < z_edge.height(); ++y)
            for (int x = 0; x < z_edge.width(); ++x)
                if (m_edge.at(y, x)) out.at(c, y, x) = z_edge.at(c, y, x);
    return out;
}

void validate_engine(const HarmonizeEngine& engine) {
    if (!engine.codec) throw ContractError("harmonize engine: codec is null");
    if (!engine.predictor) throw ContractError("harmonize engine: predictor is null");
    const int n = engine.schedule.inference_steps();
    if (n < 1) throw ContractError("harmonize engine: schedule is empty");
    const auto& p = engine.params;
    if (p.harmonious_depths.empty()) {
        throw ContractError("harmonize engine: no harmonization depths configured");
    }
    for (int d : p.harmonious_depths) {
        if (d < 1 || d > n) {
            throw ContractError("harmonize engine: harmonization depth " + std::to_string(d) +
                                " outside [1, " + std::to_string(n) + "]");
        }
    }
    const int dmin = *std::min_element(p.harmonious_depths.begin(), p.harmonious_depths.end());
    if (p.preservation_depth < 1 || p.preservation_depth >= dmin) {
        throw ContractError("harmonize engine: preservation depth must lie in [1, " +
                            std::to_string(dmin) + ")");
    }
    if (!(p.edge_width_fraction > 0.0) || !(p.edge_width_fraction < 1.0)) {
        throw ContractError("harmonize engine: edge width fraction must lie in (0, 1)");
    }
    if (p.worker_threads < 0) throw ContractError("harmonize engine: worker threads must be >= 0");
}

CandidateSet compose(const CompositionTask& task, const HarmonizeEngine& engine) {
    validate_engine(engine);
    const PlacedSource placed = place_source(task);
    const LatentCodec& codec = *engine.codec;
    const NoisePredictor& pred = *engine.predictor;
    const NoiseSchedule& sched = engine.schedule;
    const HarmonizeParams& p = engine.params;

    const LatentTensor z_tar0 = codec.encode(task.target);
    const LatentTensor z_src0 = codec.encode(placed.canvas);
    const RegionMask omega_lat = downscale_mask(placed.omega, codec.factor());

    const auto [lsw, lsh] = codec.latent_dims(placed.width, placed.height);
    const int w_lat = edge_width(lsw, lsh, omega_lat.width(), p.edge_width_fraction);
    const RegionMask m_edge = edge_mask(omega_lat, w_lat);

    const ConditioningBlob cond = task_conditioning(task);
    const bool has_cond = !cond.bytes.empty();
    const ConditioningBlob* inv_cond = (has_cond && p.condition_inversion) ? &cond : nullptr;

    const int max_ht =
        *std::max_element(p.harmonious_depths.begin(), p.harmonious_depths.end());
    const LatentTrajectory tar_traj = invert_trajectory(z_tar0, pred, sched, max_ht, inv_cond);
    const LatentTrajectory src_traj = invert_trajectory(z_src0, pred, sched, max_ht, inv_cond);

    GuidanceConfig guidance{p.cfg_scale, cond};
    const GuidanceConfig* gptr = has_cond ? &guidance : nullptr;

    CandidateSet out;
    out.omega_pixel = placed.omega;
    out.entries.resize(p.harmonious_depths.size());

    parallel_for(
        static_cast<int>(p.harmonious_depths.size()),
        [&](int i) {
            const int ht = p.harmonious_depths[i];
            LatentTensor z = latent_mean_shift(src_traj.at(ht), tar_traj.at(ht), omega_lat);
            for (int d = ht; d > p.preservation_depth; --d) {
                z = ddim_step(z, d, pred, sched, nullptr, gptr);
            }
            for (int d = p.preservation_depth; d >= 1; --d) {
                LatentTensor z_edge = ddim_step(z, d, pred, sched, nullptr, gptr);
                LatentTensor z_paste =
                    latent_mean_shift(src_traj.at(d - 1), tar_traj.at(d - 1), omega_lat);
                z = fuse_step(z_edge, z_paste, m_edge);
            }
            Candidate& cand = out.entries[i];
            cand.depth = ht;
            cand.image = codec.decode(z, task.target.width(), task.target.height());
            cand.score = engine.score_fn ? engine.score_fn(cand.image, placed.omega) : 0.5;
        },
        p.worker_threads);

    return out;
}

int select_best(const CandidateSet& candidates) {
    if (candidates.entries.empty()) throw ContractError("select_best: no candidates");
    int best = 0;
    for (int i = 1; i < static_cast<int>(candidates.entries.size()); ++i) {
        if (candidates.entries[i].score > candidates.entries[best].score) best = i;
    }
    return best;
}

}  // namespace harmonidiff
