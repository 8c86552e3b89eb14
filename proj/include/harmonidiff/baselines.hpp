#pragma once

#include "harmonidiff/harmonize.hpp"
#include "harmonidiff/image.hpp"

namespace harmonidiff {

enum class PoissonSolver { ConjugateGradient, Jacobi, GaussSeidel };

struct PoissonConfig {
    PoissonSolver solver = PoissonSolver::ConjugateGradient;
    double tolerance = 1e-6;  // L-inf residual of the discrete system
    int max_iterations = 10000;
};

struct BaselineResult {
    ImageGrid image;
    RegionMask omega;  // paste footprint at image resolution
};

// Direct pixel replacement inside the footprint.
BaselineResult copy_paste(const CompositionTask& task);

// Gradient-domain cloning: solves the discrete Poisson equation over the
// footprint with target Dirichlet boundary values and source gradients as
// guidance. The footprint must not touch the target border. Failing to reach
// tolerance raises a convergence error carrying the final residual.
BaselineResult poisson_blend(const CompositionTask& task, const PoissonConfig& cfg = {});

}  // namespace harmonidiff
