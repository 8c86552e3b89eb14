#pragma once

#include <cstdint>
#include <string>

#include "harmonidiff/baselines.hpp"
#include "harmonidiff/harmonize.hpp"
#include "harmonidiff/metrics.hpp"

namespace harmonidiff {

// Full pipeline configuration with working defaults; every JSON field is
// optional and unknown keys are rejected.
struct PipelineConfig {
    int train_steps = 1000;
    int inference_steps = 20;
    double beta_start = 8.5e-4;
    double beta_end = 1.2e-2;

    std::string codec_type = "patch_average";  // or "identity"
    int codec_factor = 8;

    std::string predictor_type = "analytic_gaussian";  // or "zero"
    double predictor_mean = 0.5;
    double predictor_variance = 1.0;

    HarmonizeParams harmonize;
    PoissonConfig poisson;

    int bgd_width = 3;
    std::string scorer_path;  // empty: train a built-in synthetic scorer

    std::uint64_t seed = 424242;
};

PipelineConfig default_config();

// Parses and validates; throws ParseError (with a line number) on malformed
// JSON and ConfigError on invalid or unknown fields.
PipelineConfig load_config(const std::string& path);
PipelineConfig parse_config(const std::string& text, const std::string& origin);

// Instantiates the schedule, codec and predictor. score_fn stays empty; the
// caller wires a scorer in if it has one.
HarmonizeEngine build_engine(const PipelineConfig& cfg);

}  // namespace harmonidiff
