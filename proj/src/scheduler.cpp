#include "harmonidiff/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "harmonidiff/errors.hpp"

namespace harmonidiff {

namespace {

void check_depth(int depth, int lo, int hi, const char* what) {
    if (depth < lo || depth > hi) {
        throw ContractError(std::string(what) + ": depth " + std::to_string(depth) +
                            " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
}

void check_shape(const LatentTensor& a, const LatentTensor& b, const char* what) {
    if (!a.same_shape(b)) throw ContractError(std::string(what) + ": shape mismatch");
}

LatentTensor predictor_eps(const NoisePredictor& predictor, const LatentTensor& z, int depth,
                           const ConditioningBlob* cond) {
    LatentTensor e = predictor.eps(z, depth, cond);
    check_shape(e, z, "noise predictor output");
    return e;
}

}  // namespace

double NoiseSchedule::alpha_bar(int depth) const {
    check_depth(depth, 0, inference_steps(), "alpha_bar");
    if (depth == 0) return 1.0;
    return alpha_bar_[depth - 1];
}

int NoiseSchedule::training_timestep(int depth) const {
    check_depth(depth, 1, inference_steps(), "training_timestep");
    return timestep_index_[depth - 1];
}

NoiseSchedule build_schedule(int train_steps, int inference_steps, double beta_start,
                             double beta_end) {
    if (train_steps < 1) throw ContractError("build_schedule: train_steps must be >= 1");
    if (inference_steps < 1 || inference_steps > train_steps) {
        throw ContractError("build_schedule: inference_steps must be in [1, train_steps]");
    }
    if (!(beta_start > 0.0) || !(beta_end < 1.0) || !(beta_start <= beta_end)) {
        throw ContractError("build_schedule: need 0 < beta_start <= beta_end < 1");
    }
    // Cumulative alpha products over the full training ladder.
    std::vector<double> cum(train_steps);
    const double s0 = std::sqrt(beta_start);
    const double s1 = std::sqrt(beta_end);
    double prod = 1.0;
    for (int i = 0; i < train_steps; ++i) {
        const double frac = (train_steps == 1) ? 0.0 : static_cast<double>(i) / (train_steps - 1);
        const double sb = s0 + frac * (s1 - s0);
        prod *= 1.0 - sb * sb;
        cum[i] = prod;
    }
    NoiseSchedule sched;
    sched.train_steps_ = train_steps;
    sched.alpha_bar_.resize(inference_steps);
    sched.timestep_index_.resize(inference_steps);
    for (int k = 1; k <= inference_steps; ++k) {
        const int ti = static_cast<int>(static_cast<long long>(k) * train_steps / inference_steps) - 1;
        sched.timestep_index_[k - 1] = ti;
        sched.alpha_bar_[k - 1] = cum[ti];
    }
    double prev = 1.0;
    for (double ab : sched.alpha_bar_) {
        if (!(ab > 0.0) || !(ab < prev)) {
            throw ContractError("build_schedule: alpha_bar must be strictly decreasing in (0, 1)");
        }
        prev = ab;
    }
    return sched;
}

LatentTensor ZeroPredictor::eps(const LatentTensor& z, int, const ConditioningBlob*) const {
    return LatentTensor(z.channels(), z.height(), z.width(), 0.0);
}

LatentTensor ConstantPredictor::eps(const LatentTensor& z, int, const ConditioningBlob*) const {
    return LatentTensor(z.channels(), z.height(), z.width(), value_);
}

AnalyticGaussianPredictor::AnalyticGaussianPredictor(NoiseSchedule schedule, double mean,
                                                     double variance)
    : AnalyticGaussianPredictor(std::move(schedule), LatentTensor(1, 1, 1, mean), variance) {}

AnalyticGaussianPredictor::AnalyticGaussianPredictor(NoiseSchedule schedule, LatentTensor mean,
                                                     double variance)
    : schedule_(std::move(schedule)), mean_(std::move(mean)), variance_(variance) {
    if (!(variance > 0.0)) {
        throw ContractError("AnalyticGaussianPredictor: variance must be > 0");
    }
    if (mean_.empty()) throw ContractError("AnalyticGaussianPredictor: empty mean");
}

LatentTensor AnalyticGaussianPredictor::eps(const LatentTensor& z, int depth,
                                            const ConditioningBlob*) const {
    const bool scalar_mean = mean_.size() == 1;
    if (!scalar_mean && !mean_.same_shape(z)) {
        throw ContractError("AnalyticGaussianPredictor: mean shape does not match latent");
    }
    const double ab = schedule_.alpha_bar(depth);
    const double sq_ab = std::sqrt(ab);
    const double sq_onem = std::sqrt(1.0 - ab);
    const double denom = ab * variance_ + (1.0 - ab);
    LatentTensor out(z.channels(), z.height(), z.width());
    const double m0 = mean_.data()[0];
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double m = scalar_mean ? m0 : mean_.data()[i];
        out.data()[i] = sq_onem * (z.data()[i] - sq_ab * m) / denom;
    }
    return out;
}

LatentTensor AnalyticGaussianPredictor::predict_x0_exact(const LatentTensor& z, int depth) const {
    return predict_x0(z, eps(z, depth, nullptr), depth, schedule_);
}

LatentTensor cfg_eps(const LatentTensor& eps_uncond, const LatentTensor& eps_cond, double scale) {
    check_shape(eps_uncond, eps_cond, "cfg_eps");
    LatentTensor out(eps_uncond.channels(), eps_uncond.height(), eps_uncond.width());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.data()[i] = eps_uncond.data()[i] + scale * (eps_cond.data()[i] - eps_uncond.data()[i]);
    }
    return out;
}

LatentTensor predict_x0(const LatentTensor& z, const LatentTensor& eps, int depth,
                        const NoiseSchedule& sched) {
    check_shape(z, eps, "predict_x0");
    check_depth(depth, 0, sched.inference_steps(), "predict_x0");
    const double ab = sched.alpha_bar(depth);
    const double sq_ab = std::sqrt(ab);
    const double sq_onem = std::sqrt(1.0 - ab);
    LatentTensor out(z.channels(), z.height(), z.width());
    for (std::size_t i = 0; i < z.size(); ++i) {
        out.data()[i] = (z.data()[i] - sq_onem * eps.data()[i]) / sq_ab;
    }
    return out;
}

LatentTensor ddim_step(const LatentTensor& z, int depth, const NoisePredictor& predictor,
                       const NoiseSchedule& sched, const ConditioningBlob* cond,
                       const GuidanceConfig* guidance) {
    if (z.empty()) throw ContractError("ddim_step: empty latent");
    check_depth(depth, 1, sched.inference_steps(), "ddim_step");
    LatentTensor e;
    if (guidance != nullptr) {
        LatentTensor eu = predictor_eps(predictor, z, depth, nullptr);
        LatentTensor ec = predictor_eps(predictor, z, depth, &guidance->cond);
        e = cfg_eps(eu, ec, guidance->scale);
    } else {
        e = predictor_eps(predictor, z, depth, cond);
    }
    const double ab_prev = sched.alpha_bar(depth - 1);
    const double sq_prev = std::sqrt(ab_prev);
    const double sq_onem_prev = std::sqrt(1.0 - ab_prev);
    LatentTensor x0 = predict_x0(z, e, depth, sched);
    LatentTensor out(z.channels(), z.height(), z.width());
    for (std::size_t i = 0; i < z.size(); ++i) {
        out.data()[i] = sq_prev * x0.data()[i] + sq_onem_prev * e.data()[i];
    }
    return out;
}

LatentTensor ddim_invert_step(const LatentTensor& z, int depth, const NoisePredictor& predictor,
                              const NoiseSchedule& sched, const ConditioningBlob* cond) {
    if (z.empty()) throw ContractError("ddim_invert_step: empty latent");
    check_depth(depth, 0, sched.inference_steps() - 1, "ddim_invert_step");
    const double a_cur = sched.alpha_bar(depth);
    const double a_next = sched.alpha_bar(depth + 1);
    // ddim_step from depth+1 reads z_d = rho*y + kappa*eps(y, depth+1); invert
    // by Picard iteration. The iteration map has Lipschitz constant
    // |kappa|/rho times the predictor's own, a contraction for every
    // predictor this pipeline ships.
    const double rho = std::sqrt(a_cur / a_next);
    const double kappa = std::sqrt(1.0 - a_cur) - rho * std::sqrt(1.0 - a_next);
    const double guess_scale = std::sqrt(a_next / a_cur);
    constexpr int kMaxIters = 12;

    LatentTensor y(z.channels(), z.height(), z.width());
    for (std::size_t i = 0; i < z.size(); ++i) y.data()[i] = guess_scale * z.data()[i];
    for (int k = 0; k < kMaxIters; ++k) {
        LatentTensor e = predictor_eps(predictor, y, depth + 1, cond);
        double step = 0.0, scale = 1.0;
        for (std::size_t i = 0; i < z.size(); ++i) {
            const double next = (z.data()[i] - kappa * e.data()[i]) / rho;
            step = std::max(step, std::fabs(next - y.data()[i]));
            scale = std::max(scale, std::fabs(next));
            y.data()[i] = next;
        }
        if (step <= 1e-15 * scale) break;
    }
    return y;
}

LatentTrajectory::LatentTrajectory(std::vector<LatentTensor> by_depth)
    : by_depth_(std::move(by_depth)) {
    if (by_depth_.empty()) throw ContractError("LatentTrajectory: no levels");
}

const LatentTensor& LatentTrajectory::at(int depth) const {
    if (depth < 0 || depth > max_depth()) {
        throw ContractError("LatentTrajectory::at: depth " + std::to_string(depth) +
                            " outside [0, " + std::to_string(max_depth()) + "]");
    }
    return by_depth_[depth];
}

LatentTrajectory invert_trajectory(const LatentTensor& z0, const NoisePredictor& predictor,
                                   const NoiseSchedule& sched, int max_depth,
                                   const ConditioningBlob* cond) {
    if (z0.empty()) throw ContractError("invert_trajectory: empty latent");
    if (max_depth < 1 || max_depth > sched.inference_steps()) {
        throw ContractError("invert_trajectory: max_depth outside [1, inference_steps]");
    }
    std::vector<LatentTensor> levels;
    levels.reserve(max_depth + 1);
    levels.push_back(z0);
    for (int d = 0; d < max_depth; ++d) {
        levels.push_back(ddim_invert_step(levels.back(), d, predictor, sched, cond));
    }
    return LatentTrajectory(std::move(levels));
}

}  // namespace harmonidiff
