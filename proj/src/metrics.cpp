#include "harmonidiff/metrics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <string>

#include "harmonidiff/errors.hpp"

namespace harmonidiff {

namespace {

using json = nlohmann::json;

double ring_mean(const ScalarGrid& plane, const RegionMask& ring) {
    double sum = 0.0;
    long long n = 0;
    for (int y = 0; y < ring.height(); ++y) {
        for (int x = 0; x < ring.width(); ++x) {
            if (!ring.at(y, x)) continue;
            sum += plane.at(y, x);
            ++n;
        }
    }
    return sum / static_cast<double>(n);
}

double ring_variance(const ScalarGrid& plane, const RegionMask& ring) {
    const double mu = ring_mean(plane, ring);
    double sum = 0.0;
    long long n = 0;
    for (int y = 0; y < ring.height(); ++y) {
        for (int x = 0; x < ring.width(); ++x) {
            if (!ring.at(y, x)) continue;
            const double d = plane.at(y, x) - mu;
            sum += d * d;
            ++n;
        }
    }
    return sum / static_cast<double>(n);
}

// Per-channel mean over a region, gray replicated to three entries.
std::array<double, 3> region_color_mean(const ImageGrid& img, const RegionMask& region) {
    std::array<double, 3> mean{0.0, 0.0, 0.0};
    long long n = 0;
    for (int y = 0; y < region.height(); ++y) {
        for (int x = 0; x < region.width(); ++x) {
            if (!region.at(y, x)) continue;
            ++n;
            for (int c = 0; c < img.channels(); ++c) mean[c] += img.at(c, y, x);
        }
    }
    for (int c = 0; c < img.channels(); ++c) mean[c] /= static_cast<double>(n);
    if (img.channels() == 1) mean[1] = mean[2] = mean[0];
    return mean;
}

double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

}  // namespace

BoundaryRings boundary_rings(const RegionMask& omega, int width) {
    if (omega.empty()) throw ContractError("boundary_rings: empty mask");
    if (width < 1) throw ContractError("boundary_rings: width must be >= 1");
    BoundaryRings rings;
    rings.inner = mask_difference(omega, erode(omega, width));
    rings.outer = mask_difference(dilate(omega, width), omega);
    return rings;
}

double bgd_abs(const ImageGrid& img, const RegionMask& omega, int width) {
    if (img.empty()) throw ContractError("bgd_abs: empty image");
    if (img.width() != omega.width() || img.height() != omega.height()) {
        throw ContractError("bgd_abs: mask dims must match the image");
    }
    const BoundaryRings rings = boundary_rings(omega, width);
    if (rings.inner.count() == 0) {
        throw MetricError("bgd_abs: inner ring is empty (footprint has no cells)");
    }
    if (rings.outer.count() == 0) {
        throw MetricError("bgd_abs: outer ring is empty (footprint fills the grid)");
    }
    const ScalarGrid grad = sobel_magnitude(to_grayscale(img));
    return std::fabs(ring_mean(grad, rings.inner) - ring_mean(grad, rings.outer));
}

FeatureStats feature_stats(const std::vector<std::vector<double>>& samples) {
    if (samples.size() < 2) {
        throw MetricError("feature_stats: need at least 2 samples, got " +
                          std::to_string(samples.size()));
    }
    const int dim = static_cast<int>(samples.front().size());
    if (dim < 1) throw ContractError("feature_stats: zero-dimensional samples");
    for (const auto& s : samples) {
        if (static_cast<int>(s.size()) != dim) {
            throw ContractError("feature_stats: inconsistent sample dimensions");
        }
    }
    FeatureStats st;
    st.dim = dim;
    st.count = static_cast<long long>(samples.size());
    st.mean.assign(dim, 0.0);
    st.cov.assign(static_cast<std::size_t>(dim) * dim, 0.0);
    for (const auto& s : samples) {
        for (int i = 0; i < dim; ++i) st.mean[i] += s[i];
    }
    for (int i = 0; i < dim; ++i) st.mean[i] /= static_cast<double>(st.count);
    for (const auto& s : samples) {
        for (int i = 0; i < dim; ++i) {
            const double di = s[i] - st.mean[i];
            for (int j = 0; j < dim; ++j) {
                st.cov[static_cast<std::size_t>(i) * dim + j] += di * (s[j] - st.mean[j]);
            }
        }
    }
    const double denom = static_cast<double>(st.count - 1);
    for (double& v : st.cov) v /= denom;
    return st;
}

namespace {

constexpr double kPsdTolerance = 1e-9;
// Slightly tighter clamp inside the square root of the mixed product; values
// below it indicate genuinely indefinite input rather than roundoff.
constexpr double kSqrtClamp = 1e-10;

Eigen::MatrixXd to_matrix(const FeatureStats& st, const char* name) {
    Eigen::MatrixXd m(st.dim, st.dim);
    for (int i = 0; i < st.dim; ++i)
        for (int j = 0; j < st.dim; ++j) m(i, j) = st.cov[static_cast<std::size_t>(i) * st.dim + j];
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (asym > kPsdTolerance) {
        throw NumericError(std::string(name) + " covariance is not symmetric (max asymmetry " +
                           std::to_string(asym) + ")");
    }
    m = ((m + m.transpose()) / 2.0).eval();
    return m;
}

// Symmetric PSD square root; eigenvalues in [-tol, 0) clamp to zero, anything
// lower is reported.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m, double tol, const char* what) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    if (es.info() != Eigen::Success) {
        throw NumericError(std::string(what) + ": eigendecomposition failed");
    }
    Eigen::VectorXd vals = es.eigenvalues();
    for (int i = 0; i < vals.size(); ++i) {
        if (vals(i) < -tol) {
            throw NumericError(std::string(what) + ": eigenvalue " + std::to_string(vals(i)) +
                               " below -" + std::to_string(tol));
        }
        vals(i) = std::sqrt(std::max(0.0, vals(i)));
    }
    return es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

double frechet_distance(const FeatureStats& a, const FeatureStats& b) {
    if (a.dim != b.dim) throw ContractError("frechet_distance: dimension mismatch");
    if (a.dim < 1) throw ContractError("frechet_distance: empty stats");
    const Eigen::MatrixXd ca = to_matrix(a, "first");
    const Eigen::MatrixXd cb = to_matrix(b, "second");
    const Eigen::MatrixXd sa = psd_sqrt(ca, kPsdTolerance, "first covariance");
    psd_sqrt(cb, kPsdTolerance, "second covariance");  // PSD validation only
    const Eigen::MatrixXd mixed = sa * cb * sa;
    const Eigen::MatrixXd mixed_sym = ((mixed + mixed.transpose()) / 2.0).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mixed_sym);
    if (es.info() != Eigen::Success) {
        throw NumericError("matrix square root: eigendecomposition failed");
    }
    double tr_sqrt = 0.0;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        const double v = es.eigenvalues()(i);
        if (v < -kSqrtClamp) {
            throw NumericError("matrix square root: eigenvalue " + std::to_string(v) +
                               " below -" + std::to_string(kSqrtClamp));
        }
        tr_sqrt += std::sqrt(std::max(0.0, v));
    }
    double mean_term = 0.0;
    for (int i = 0; i < a.dim; ++i) {
        const double d = a.mean[i] - b.mean[i];
        mean_term += d * d;
    }
    const double fd = mean_term + ca.trace() + cb.trace() - 2.0 * tr_sqrt;
    if (fd < -1e-8) {
        throw NumericError("frechet_distance: negative value " + std::to_string(fd));
    }
    return std::max(0.0, fd);
}

std::vector<double> boundary_features(const ImageGrid& img, const RegionMask& omega) {
    if (img.empty()) throw ContractError("boundary_features: empty image");
    if (img.width() != omega.width() || img.height() != omega.height()) {
        throw ContractError("boundary_features: mask dims must match the image");
    }
    if (omega.count() == 0) throw MetricError("boundary_features: empty footprint");
    const ScalarGrid gray = to_grayscale(img);
    const ScalarGrid grad = sobel_magnitude(gray);
    std::vector<double> feats;
    feats.reserve(16);
    for (int w : {1, 3, 5}) {
        const BoundaryRings rings = boundary_rings(omega, w);
        if (rings.inner.count() == 0 || rings.outer.count() == 0) {
            throw MetricError("boundary_features: ring of half-width " + std::to_string(w) +
                              " is empty");
        }
        feats.push_back(std::fabs(ring_mean(grad, rings.inner) - ring_mean(grad, rings.outer)));
        const auto cin = region_color_mean(img, rings.inner);
        const auto cout = region_color_mean(img, rings.outer);
        for (int c = 0; c < 3; ++c) feats.push_back(std::fabs(cin[c] - cout[c]));
        const double var_in = ring_variance(gray, rings.inner);
        const double var_out = ring_variance(gray, rings.outer);
        feats.push_back((var_in + 1e-8) / (var_out + 1e-8));
    }
    const RegionMask outside = mask_complement(omega);
    if (outside.count() == 0) throw MetricError("boundary_features: footprint fills the image");
    const auto mean_in = region_color_mean(img, omega);
    const auto mean_out = region_color_mean(img, outside);
    double gap = 0.0;
    for (int c = 0; c < 3; ++c) {
        const double d = mean_in[c] - mean_out[c];
        gap += d * d;
    }
    feats.push_back(std::sqrt(gap));
    return feats;
}

std::vector<double> image_features(const ImageGrid& img) {
    if (img.empty()) throw ContractError("image_features: empty image");
    const double n = static_cast<double>(img.width()) * img.height();
    std::array<double, 3> mean{0, 0, 0};
    std::array<double, 3> sq{0, 0, 0};
    for (int c = 0; c < img.channels(); ++c) {
        for (int y = 0; y < img.height(); ++y) {
            for (int x = 0; x < img.width(); ++x) {
                const double v = img.at(c, y, x);
                mean[c] += v;
                sq[c] += v * v;
            }
        }
    }
    for (int c = 0; c < img.channels(); ++c) {
        mean[c] /= n;
        sq[c] = std::sqrt(std::max(0.0, sq[c] / n - mean[c] * mean[c]));
    }
    if (img.channels() == 1) {
        mean[1] = mean[2] = mean[0];
        sq[1] = sq[2] = sq[0];
    }
    const ScalarGrid grad = sobel_magnitude(to_grayscale(img));
    double gm = 0.0, gsq = 0.0;
    for (double v : grad.data()) {
        gm += v;
        gsq += v * v;
    }
    gm /= n;
    gsq = std::sqrt(std::max(0.0, gsq / n - gm * gm));
    return {mean[0], mean[1], mean[2], sq[0], sq[1], sq[2], gm, gsq};
}

double HarmonyScorer::score_features(const std::vector<double>& features) const {
    if (!ready()) throw ContractError("HarmonyScorer: not trained");
    if (features.size() != weights.size()) {
        throw ContractError("HarmonyScorer: feature dimension mismatch");
    }
    double t = bias;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        t += weights[i] * (features[i] - feat_mean[i]) / feat_std[i];
    }
    return sigmoid(t);
}

HarmonyScorer train_scorer(const std::vector<LabeledSample>& data, const ScorerTrainConfig& cfg) {
    if (cfg.epochs < 0) throw ContractError("train_scorer: epochs must be >= 0");
    if (!(cfg.learning_rate > 0.0)) throw ContractError("train_scorer: learning rate must be > 0");
    long long pos = 0, neg = 0;
    for (const auto& s : data) (s.label == 1 ? pos : neg) += 1;
    if (pos == 0 || neg == 0) {
        throw ContractError("train_scorer: need samples from both classes (got " +
                            std::to_string(pos) + " positive, " + std::to_string(neg) +
                            " negative)");
    }
    const int dim = static_cast<int>(data.front().features.size());
    if (dim < 1) throw ContractError("train_scorer: zero-dimensional features");
    for (const auto& s : data) {
        if (static_cast<int>(s.features.size()) != dim) {
            throw ContractError("train_scorer: inconsistent feature dimensions");
        }
    }
    const double n = static_cast<double>(data.size());
    HarmonyScorer sc;
    sc.feat_mean.assign(dim, 0.0);
    sc.feat_std.assign(dim, 0.0);
    for (const auto& s : data)
        for (int i = 0; i < dim; ++i) sc.feat_mean[i] += s.features[i];
    for (int i = 0; i < dim; ++i) sc.feat_mean[i] /= n;
    for (const auto& s : data)
        for (int i = 0; i < dim; ++i) {
            const double d = s.features[i] - sc.feat_mean[i];
            sc.feat_std[i] += d * d;
        }
    for (int i = 0; i < dim; ++i) {
        sc.feat_std[i] = std::sqrt(sc.feat_std[i] / n);
        if (sc.feat_std[i] == 0.0) sc.feat_std[i] = 1.0;  // constant component
    }
    std::vector<std::vector<double>> z(data.size(), std::vector<double>(dim));
    for (std::size_t s = 0; s < data.size(); ++s)
        for (int i = 0; i < dim; ++i) {
            z[s][i] = (data[s].features[i] - sc.feat_mean[i]) / sc.feat_std[i];
        }
    sc.weights.assign(dim, 0.0);
    sc.bias = 0.0;
    std::vector<double> grad(dim);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double gbias = 0.0;
        for (std::size_t s = 0; s < data.size(); ++s) {
            double t = sc.bias;
            for (int i = 0; i < dim; ++i) t += sc.weights[i] * z[s][i];
            const double err = sigmoid(t) - (data[s].label == 1 ? 1.0 : 0.0);
            for (int i = 0; i < dim; ++i) grad[i] += err * z[s][i];
            gbias += err;
        }
        for (int i = 0; i < dim; ++i) sc.weights[i] -= cfg.learning_rate * grad[i] / n;
        sc.bias -= cfg.learning_rate * gbias / n;
    }
    long long correct = 0;
    for (std::size_t s = 0; s < data.size(); ++s) {
        double t = sc.bias;
        for (int i = 0; i < dim; ++i) t += sc.weights[i] * z[s][i];
        const int predicted = sigmoid(t) >= 0.5 ? 1 : 0;
        if (predicted == data[s].label) ++correct;
    }
    sc.training_accuracy = static_cast<double>(correct) / n;
    return sc;
}

double harmony_score(const HarmonyScorer& scorer, const ImageGrid& img, const RegionMask& omega) {
    if (!scorer.ready()) throw ContractError("harmony_score: scorer not trained");
    if (omega.count() == 0) throw MetricError("harmony_score: empty footprint");
    RegionMask eroded = erode(omega, 2);
    if (eroded.count() == 0) eroded = omega;
    const RegionMask variants[3] = {omega, dilate(omega, 2), eroded};
    double sum = 0.0;
    for (const RegionMask& m : variants) {
        sum += scorer.score_features(boundary_features(img, m));
    }
    return sum / 3.0;
}

namespace {
constexpr const char* kFeatureSpec = "boundary-rings-16";
}

void save_scorer(const std::string& path, const HarmonyScorer& scorer) {
    if (!scorer.ready()) throw ContractError("save_scorer: scorer not trained");
    json j;
    j["version"] = 1;
    j["feature_spec"] = kFeatureSpec;
    j["standardization"] = {{"mean", scorer.feat_mean}, {"std", scorer.feat_std}};
    j["weights"] = scorer.weights;
    j["bias"] = scorer.bias;
    j["training_accuracy"] = scorer.training_accuracy;
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << j.dump(2) << "\n";
    if (!out) throw IoError("write failed for " + path);
}

HarmonyScorer load_scorer(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError("malformed scorer file " + path + ": " + e.what());
    }
    try {
        if (j.at("version").get<int>() != 1) {
            throw ValidationError("unsupported scorer version in " + path);
        }
        if (j.at("feature_spec").get<std::string>() != kFeatureSpec) {
            throw ValidationError("unexpected feature spec in " + path);
        }
        HarmonyScorer sc;
        sc.feat_mean = j.at("standardization").at("mean").get<std::vector<double>>();
        sc.feat_std = j.at("standardization").at("std").get<std::vector<double>>();
        sc.weights = j.at("weights").get<std::vector<double>>();
        sc.bias = j.at("bias").get<double>();
        sc.training_accuracy = j.value("training_accuracy", 0.0);
        if (sc.weights.empty() || sc.weights.size() != sc.feat_mean.size() ||
            sc.weights.size() != sc.feat_std.size()) {
            throw ValidationError("inconsistent scorer arrays in " + path);
        }
        for (double s : sc.feat_std) {
            if (!(s > 0.0)) throw ValidationError("non-positive feature spread in " + path);
        }
        return sc;
    } catch (const json::exception& e) {
        throw ValidationError("invalid scorer file " + path + ": " + e.what());
    }
}

}  // namespace harmonidiff
