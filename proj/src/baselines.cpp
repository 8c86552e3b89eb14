#include "harmonidiff/baselines.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "harmonidiff/errors.hpp"

namespace harmonidiff {

BaselineResult copy_paste(const CompositionTask& task) {
    const PlacedSource placed = place_source(task);
    BaselineResult out;
    out.image = task.target;
    out.omega = placed.omega;
    for (int y = 0; y < out.omega.height(); ++y) {
        for (int x = 0; x < out.omega.width(); ++x) {
            if (!out.omega.at(y, x)) continue;
            for (int c = 0; c < out.image.channels(); ++c) {
                out.image.at(c, y, x) = placed.canvas.at(c, y, x);
            }
        }
    }
    return out;
}

namespace {

// Masked 5-point Laplacian system: for p in omega,
//   4 f_p - sum_{q in N4(p), q in omega} f_q
//     = sum_{q in N4(p), q not in omega} tar_q + sum_{q in N4(p)} (g_p - g_q)
// with g sampled from the resampled source patch, coordinates clamped to the
// patch rectangle.
struct PoissonSystem {
    int w = 0, h = 0;
    std::vector<int> index;        // pixel -> unknown id, -1 outside omega
    std::vector<int> px, py;       // unknown id -> pixel coords
    // For each unknown, ids of in-omega neighbours (-1 padding).
    std::vector<std::array<int, 4>> nbr;

    explicit PoissonSystem(const RegionMask& omega)
        : w(omega.width()), h(omega.height()), index(static_cast<std::size_t>(w) * h, -1) {
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                if (!omega.at(y, x)) continue;
                if (x == 0 || y == 0 || x == w - 1 || y == h - 1) {
                    throw PlacementError(
                        "gradient blend: footprint touches the target border at (" +
                        std::to_string(x) + ", " + std::to_string(y) + ")");
                }
                index[static_cast<std::size_t>(y) * w + x] = static_cast<int>(px.size());
                px.push_back(x);
                py.push_back(y);
            }
        }
        const int dx[4] = {1, -1, 0, 0};
        const int dy[4] = {0, 0, 1, -1};
        nbr.resize(px.size());
        for (std::size_t i = 0; i < px.size(); ++i) {
            for (int k = 0; k < 4; ++k) {
                nbr[i][k] = index[static_cast<std::size_t>(py[i] + dy[k]) * w + (px[i] + dx[k])];
            }
        }
    }

    std::size_t size() const { return px.size(); }

    void apply(const std::vector<double>& x, std::vector<double>& out) const {
        for (std::size_t i = 0; i < size(); ++i) {
            double v = 4.0 * x[i];
            for (int k = 0; k < 4; ++k) {
                if (nbr[i][k] >= 0) v -= x[nbr[i][k]];
            }
            out[i] = v;
        }
    }

    double linf_residual(const std::vector<double>& x, const std::vector<double>& b,
                         std::vector<double>& scratch) const {
        apply(x, scratch);
        double m = 0.0;
        for (std::size_t i = 0; i < size(); ++i) m = std::max(m, std::fabs(b[i] - scratch[i]));
        return m;
    }
};

void solve_cg(const PoissonSystem& sys, const std::vector<double>& b, std::vector<double>& x,
              double tol, int max_iters) {
    const std::size_t n = sys.size();
    std::vector<double> r(n), p(n), ap(n), scratch(n);
    sys.apply(x, ap);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ap[i];
    p = r;
    double rs = 0.0;
    for (std::size_t i = 0; i < n; ++i) rs += r[i] * r[i];
    for (int it = 0; it < max_iters; ++it) {
        double rmax = 0.0;
        for (std::size_t i = 0; i < n; ++i) rmax = std::max(rmax, std::fabs(r[i]));
        if (rmax <= tol && sys.linf_residual(x, b, scratch) <= tol) return;
        if (rs == 0.0) break;
        sys.apply(p, ap);
        double pap = 0.0;
        for (std::size_t i = 0; i < n; ++i) pap += p[i] * ap[i];
        if (pap <= 0.0) break;  // matrix is SPD; only roundoff lands here
        const double alpha = rs / pap;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        double rs_next = 0.0;
        for (std::size_t i = 0; i < n; ++i) rs_next += r[i] * r[i];
        const double beta = rs_next / rs;
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
        rs = rs_next;
    }
    const double res = sys.linf_residual(x, b, scratch);
    if (res > tol) {
        throw ConvergenceError("gradient blend: conjugate gradient residual " +
                                   std::to_string(res) + " above tolerance after " +
                                   std::to_string(max_iters) + " iterations",
                               res);
    }
}

void solve_jacobi(const PoissonSystem& sys, const std::vector<double>& b, std::vector<double>& x,
                  double tol, int max_iters) {
    const std::size_t n = sys.size();
    std::vector<double> next(n), scratch(n);
    double res = sys.linf_residual(x, b, scratch);
    for (int it = 0; it < max_iters && res > tol; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            double acc = b[i];
            for (int k = 0; k < 4; ++k) {
                if (sys.nbr[i][k] >= 0) acc += x[sys.nbr[i][k]];
            }
            next[i] = acc / 4.0;
        }
        x.swap(next);
        res = sys.linf_residual(x, b, scratch);
    }
    if (res > tol) {
        throw ConvergenceError("gradient blend: Jacobi residual " + std::to_string(res) +
                                   " above tolerance after " + std::to_string(max_iters) +
                                   " iterations",
                               res);
    }
}

void solve_gauss_seidel(const PoissonSystem& sys, const std::vector<double>& b,
                        std::vector<double>& x, double tol, int max_iters) {
    const std::size_t n = sys.size();
    std::vector<double> scratch(n);
    double res = sys.linf_residual(x, b, scratch);
    for (int it = 0; it < max_iters && res > tol; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            double acc = b[i];
            for (int k = 0; k < 4; ++k) {
                if (sys.nbr[i][k] >= 0) acc += x[sys.nbr[i][k]];
            }
            x[i] = acc / 4.0;
        }
        res = sys.linf_residual(x, b, scratch);
    }
    if (res > tol) {
        throw ConvergenceError("gradient blend: Gauss-Seidel residual " + std::to_string(res) +
                                   " above tolerance after " + std::to_string(max_iters) +
                                   " iterations",
                               res);
    }
}

}  // namespace

BaselineResult poisson_blend(const CompositionTask& task, const PoissonConfig& cfg) {
    if (!(cfg.tolerance > 0.0)) throw ContractError("poisson_blend: tolerance must be > 0");
    if (cfg.max_iterations < 1) throw ContractError("poisson_blend: max_iterations must be >= 1");
    const PlacedSource placed = place_source(task);
    BaselineResult out;
    out.image = task.target;
    out.omega = placed.omega;
    if (placed.omega.count() == 0) return out;

    const PoissonSystem sys(placed.omega);
    const ImageGrid src = rescale_by_gsd(task.source, task.source_gsd, task.target_gsd);
    const auto guide = [&](int c, int y, int x) {
        const int sy = std::clamp(y - task.paste_y, 0, src.height() - 1);
        const int sx = std::clamp(x - task.paste_x, 0, src.width() - 1);
        return src.at(c, sy, sx);
    };
    const int dx[4] = {1, -1, 0, 0};
    const int dy[4] = {0, 0, 1, -1};

    const std::size_t n = sys.size();
    std::vector<double> b(n), x(n);
    for (int c = 0; c < out.image.channels(); ++c) {
        for (std::size_t i = 0; i < n; ++i) {
            const int xi = sys.px[i];
            const int yi = sys.py[i];
            const double gp = guide(c, yi, xi);
            double rhs = 0.0;
            for (int k = 0; k < 4; ++k) {
                const int qx = xi + dx[k];
                const int qy = yi + dy[k];
                rhs += gp - guide(c, qy, qx);
                if (sys.nbr[i][k] < 0) rhs += task.target.at(c, qy, qx);
            }
            b[i] = rhs;
            x[i] = gp;  // source values as the starting iterate
        }
        switch (cfg.solver) {
            case PoissonSolver::ConjugateGradient:
                solve_cg(sys, b, x, cfg.tolerance, cfg.max_iterations);
                break;
            case PoissonSolver::Jacobi:
                solve_jacobi(sys, b, x, cfg.tolerance, cfg.max_iterations);
                break;
            case PoissonSolver::GaussSeidel:
                solve_gauss_seidel(sys, b, x, cfg.tolerance, cfg.max_iterations);
                break;
        }
        for (std::size_t i = 0; i < n; ++i) {
            out.image.at(c, sys.py[i], sys.px[i]) = std::clamp(x[i], 0.0, 1.0);
        }
    }
    return out;
}

}  // namespace harmonidiff
