#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "harmonidiff/latent.hpp"

namespace harmonidiff {

// Opaque conditioning payload. The pipeline never interprets the bytes; they
// exist so conditioning-aware predictors can key off them.
struct ConditioningBlob {
    std::vector<std::uint8_t> bytes;

    static ConditioningBlob from_string(const std::string& s) {
        return ConditioningBlob{std::vector<std::uint8_t>(s.begin(), s.end())};
    }
};

// Noise level ladder. "Depth" indexes how far toward noise a latent sits:
// depth 0 is clean (alpha_bar exactly 1), depth N is the deepest inference
// level. Each depth 1..N maps to a training timestep floor(k*T/N) - 1.
class NoiseSchedule {
public:
    NoiseSchedule() = default;

    int train_steps() const { return train_steps_; }
    int inference_steps() const { return static_cast<int>(alpha_bar_.size()); }

    // depth in [0, inference_steps]; alpha_bar(0) == 1.0 exactly.
    double alpha_bar(int depth) const;
    // depth in [1, inference_steps].
    int training_timestep(int depth) const;

    friend NoiseSchedule build_schedule(int train_steps, int inference_steps, double beta_start,
                                        double beta_end);

private:
    int train_steps_ = 0;
    std::vector<double> alpha_bar_;      // depth d -> alpha_bar_[d-1]
    std::vector<int> timestep_index_;    // depth d -> timestep_index_[d-1]
};

// Scaled-linear variances: beta_i = (sqrt(b0) + i/(T-1) * (sqrt(b1)-sqrt(b0)))^2,
// cumulative products subsampled onto the inference grid.
NoiseSchedule build_schedule(int train_steps, int inference_steps, double beta_start,
                             double beta_end);

// Predicts the noise component of a latent at a given depth.
class NoisePredictor {
public:
    virtual ~NoisePredictor() = default;
    // cond may be null (unconditional query). Output shape equals z's shape.
    virtual LatentTensor eps(const LatentTensor& z, int depth,
                             const ConditioningBlob* cond) const = 0;
};

class ZeroPredictor : public NoisePredictor {
public:
    LatentTensor eps(const LatentTensor& z, int depth, const ConditioningBlob* cond) const override;
};

class ConstantPredictor : public NoisePredictor {
public:
    explicit ConstantPredictor(double value) : value_(value) {}
    LatentTensor eps(const LatentTensor& z, int depth, const ConditioningBlob* cond) const override;

private:
    double value_;
};

// Wraps an arbitrary callable; mostly for tests and experiments.
class FunctionPredictor : public NoisePredictor {
public:
    using Fn = std::function<LatentTensor(const LatentTensor&, int, const ConditioningBlob*)>;
    explicit FunctionPredictor(Fn fn) : fn_(std::move(fn)) {}
    LatentTensor eps(const LatentTensor& z, int depth, const ConditioningBlob* cond) const override {
        return fn_(z, depth, cond);
    }

private:
    Fn fn_;
};

// Exact posterior noise for data distributed N(mean, variance*I):
//   eps(z, d) = sqrt(1-abar_d) * (z - sqrt(abar_d)*mean) / (abar_d*variance + 1-abar_d).
// mean is either a scalar (1x1x1 tensor, broadcast) or a full latent shape.
class AnalyticGaussianPredictor : public NoisePredictor {
public:
    AnalyticGaussianPredictor(NoiseSchedule schedule, double mean, double variance);
    AnalyticGaussianPredictor(NoiseSchedule schedule, LatentTensor mean, double variance);

    LatentTensor eps(const LatentTensor& z, int depth, const ConditioningBlob* cond) const override;
    LatentTensor predict_x0_exact(const LatentTensor& z, int depth) const;

private:
    NoiseSchedule schedule_;
    LatentTensor mean_;
    double variance_;
};

struct GuidanceConfig {
    double scale = 3.5;
    ConditioningBlob cond;
};

// eps_u + scale * (eps_c - eps_u), elementwise.
LatentTensor cfg_eps(const LatentTensor& eps_uncond, const LatentTensor& eps_cond, double scale);

// (z - sqrt(1-abar_d) * eps) / sqrt(abar_d); depth in [0, N].
LatentTensor predict_x0(const LatentTensor& z, const LatentTensor& eps, int depth,
                        const NoiseSchedule& sched);

// One deterministic denoising step, depth d -> d-1, depth in [1, N]. With
// guidance, eps is the classifier-free combination of the unconditional and
// conditional queries at depth d.
LatentTensor ddim_step(const LatentTensor& z, int depth, const NoisePredictor& predictor,
                       const NoiseSchedule& sched, const ConditioningBlob* cond = nullptr,
                       const GuidanceConfig* guidance = nullptr);

// One noising step, depth d -> d+1, depth in [0, N-1]. Solves
// ddim_step(y, d+1) == z for y by fixed-point iteration so the pair inverts
// exactly (up to float) even when the predictor varies with depth; for
// predictors constant in the latent argument the first iterate is already the
// fixed point. Never guided.
LatentTensor ddim_invert_step(const LatentTensor& z, int depth, const NoisePredictor& predictor,
                              const NoiseSchedule& sched, const ConditioningBlob* cond = nullptr);

// Latents of one inversion run, indexed by depth 0..max_depth. Built once,
// then read-only.
class LatentTrajectory {
public:
    LatentTrajectory() = default;
    explicit LatentTrajectory(std::vector<LatentTensor> by_depth);

    int max_depth() const { return static_cast<int>(by_depth_.size()) - 1; }
    const LatentTensor& at(int depth) const;

private:
    std::vector<LatentTensor> by_depth_;
};

// Inverts z0 from depth 0 up to max_depth, caching every level.
LatentTrajectory invert_trajectory(const LatentTensor& z0, const NoisePredictor& predictor,
                                   const NoiseSchedule& sched, int max_depth,
                                   const ConditioningBlob* cond = nullptr);

}  // namespace harmonidiff
