#include "harmonidiff/latent.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "harmonidiff/errors.hpp"

namespace harmonidiff {

LatentTensor::LatentTensor(int channels, int height, int width, double fill)
    : channels_(channels), height_(height), width_(width) {
    if (channels < 1 || height < 1 || width < 1) {
        throw ContractError("LatentTensor: dims must be >= 1");
    }
    data_.assign(static_cast<std::size_t>(channels) * height * width, fill);
}

double max_abs(const LatentTensor& t) {
    double m = 0.0;
    for (double v : t.data()) m = std::max(m, std::fabs(v));
    return m;
}

double max_abs_diff(const LatentTensor& a, const LatentTensor& b) {
    if (!a.same_shape(b)) throw ContractError("max_abs_diff: shape mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) {
        m = std::max(m, std::fabs(a.data()[i] - b.data()[i]));
    }
    return m;
}

LatentTensor IdentityCodec::encode(const ImageGrid& img) const {
    if (img.empty()) throw ContractError("IdentityCodec::encode: empty image");
    LatentTensor z(img.channels(), img.height(), img.width());
    z.data() = img.data();
    return z;
}

ImageGrid IdentityCodec::decode(const LatentTensor& z, int out_width, int out_height) const {
    if (z.empty()) throw ContractError("IdentityCodec::decode: empty latent");
    if (z.width() != out_width || z.height() != out_height) {
        throw ContractError("IdentityCodec::decode: output dims must equal latent dims");
    }
    ImageGrid img(out_width, out_height, z.channels());
    img.data() = z.data();
    return img;
}

std::pair<int, int> IdentityCodec::latent_dims(int width, int height) const {
    return {width, height};
}

PatchAverageCodec::PatchAverageCodec(int factor) : factor_(factor) {
    if (factor < 1) throw ContractError("PatchAverageCodec: factor must be >= 1");
}

std::pair<int, int> PatchAverageCodec::latent_dims(int width, int height) const {
    return {(width + factor_ - 1) / factor_, (height + factor_ - 1) / factor_};
}

LatentTensor PatchAverageCodec::encode(const ImageGrid& img) const {
    if (img.empty()) throw ContractError("PatchAverageCodec::encode: empty image");
    const auto [lw, lh] = latent_dims(img.width(), img.height());
    LatentTensor z(img.channels(), lh, lw);
    const int f = factor_;
    // Replicate padding: taps past the edge clamp to the last row/column.
    for (int c = 0; c < img.channels(); ++c) {
        for (int ly = 0; ly < lh; ++ly) {
            for (int lx = 0; lx < lw; ++lx) {
                double sum = 0.0;
                for (int dy = 0; dy < f; ++dy) {
                    const int y = std::min(ly * f + dy, img.height() - 1);
                    for (int dx = 0; dx < f; ++dx) {
                        const int x = std::min(lx * f + dx, img.width() - 1);
                        sum += img.at(c, y, x);
                    }
                }
                z.at(c, ly, lx) = sum / (f * f);
            }
        }
    }
    return z;
}

ImageGrid PatchAverageCodec::decode(const LatentTensor& z, int out_width, int out_height) const {
    if (z.empty()) throw ContractError("PatchAverageCodec::decode: empty latent");
    const auto [lw, lh] = latent_dims(out_width, out_height);
    if (z.width() != lw || z.height() != lh) {
        throw ContractError("PatchAverageCodec::decode: latent dims do not match output dims");
    }
    if (z.channels() != 1 && z.channels() != 3) {
        throw ContractError("PatchAverageCodec::decode: latent must have 1 or 3 channels");
    }
    ImageGrid img(out_width, out_height, z.channels());
    const double f = factor_;
    for (int y = 0; y < out_height; ++y) {
        const double v = std::clamp((y + 0.5) / f - 0.5, 0.0, static_cast<double>(lh - 1));
        const int y0 = static_cast<int>(std::floor(v));
        const int y1 = std::min(y0 + 1, lh - 1);
        const double fy = v - y0;
        for (int x = 0; x < out_width; ++x) {
            const double u = std::clamp((x + 0.5) / f - 0.5, 0.0, static_cast<double>(lw - 1));
            const int x0 = static_cast<int>(std::floor(u));
            const int x1 = std::min(x0 + 1, lw - 1);
            const double fx = u - x0;
            for (int c = 0; c < z.channels(); ++c) {
                const double top = z.at(c, y0, x0) * (1.0 - fx) + z.at(c, y0, x1) * fx;
                const double bot = z.at(c, y1, x0) * (1.0 - fx) + z.at(c, y1, x1) * fx;
                img.at(c, y, x) = std::clamp(top * (1.0 - fy) + bot * fy, 0.0, 1.0);
            }
        }
    }
    return img;
}

RegionMask downscale_mask(const RegionMask& mask, int factor) {
    if (mask.empty()) throw ContractError("downscale_mask: empty mask");
    if (factor < 1) throw ContractError("downscale_mask: factor must be >= 1");
    const int lw = (mask.width() + factor - 1) / factor;
    const int lh = (mask.height() + factor - 1) / factor;
    RegionMask out(lw, lh);
    for (int ly = 0; ly < lh; ++ly) {
        for (int lx = 0; lx < lw; ++lx) {
            int inside = 0, total = 0;
            for (int dy = 0; dy < factor; ++dy) {
                const int y = ly * factor + dy;
                if (y >= mask.height()) break;
                for (int dx = 0; dx < factor; ++dx) {
                    const int x = lx * factor + dx;
                    if (x >= mask.width()) break;
                    ++total;
                    inside += mask.at(y, x) ? 1 : 0;
                }
            }
            out.set(ly, lx, 2 * inside >= total);
        }
    }
    return out;
}

}  // namespace harmonidiff
