#include "harmonidiff/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "harmonidiff/errors.hpp"

namespace harmonidiff {

namespace {

void check_dims(int width, int height, const char* what) {
    if (width < 1 || height < 1) {
        throw ContractError(std::string(what) + ": dimensions must be >= 1, got " +
                            std::to_string(width) + "x" + std::to_string(height));
    }
}

int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

int scaled_dim(int dim, double src_gsd, double tar_gsd) {
    int out = static_cast<int>(std::lround(dim * src_gsd / tar_gsd));
    return std::max(1, out);
}

void check_gsd(double src_gsd, double tar_gsd) {
    if (!(src_gsd > 0.0) || !(tar_gsd > 0.0)) {
        throw ContractError("rescale: ground sample distances must be > 0");
    }
}

}  // namespace

ImageGrid::ImageGrid(int width, int height, int channels, double fill)
    : width_(width), height_(height), channels_(channels) {
    check_dims(width, height, "ImageGrid");
    if (channels != 1 && channels != 3) {
        throw ContractError("ImageGrid: channel count must be 1 or 3, got " +
                            std::to_string(channels));
    }
    data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

ScalarGrid::ScalarGrid(int width, int height, double fill)
    : width_(width), height_(height) {
    check_dims(width, height, "ScalarGrid");
    data_.assign(static_cast<std::size_t>(width) * height, fill);
}

RegionMask::RegionMask(int width, int height, bool fill)
    : width_(width), height_(height) {
    check_dims(width, height, "RegionMask");
    data_.assign(static_cast<std::size_t>(width) * height, fill ? 1 : 0);
}

long long RegionMask::count() const {
    long long n = 0;
    for (std::uint8_t v : data_) n += v;
    return n;
}

ScalarGrid to_grayscale(const ImageGrid& img) {
    if (img.empty()) throw ContractError("to_grayscale: empty image");
    ScalarGrid out(img.width(), img.height());
    if (img.channels() == 1) {
        for (int y = 0; y < img.height(); ++y)
            for (int x = 0; x < img.width(); ++x) out.at(y, x) = img.at(0, y, x);
        return out;
    }
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            out.at(y, x) =
                0.299 * img.at(0, y, x) + 0.587 * img.at(1, y, x) + 0.114 * img.at(2, y, x);
        }
    }
    return out;
}

ScalarGrid sobel_magnitude(const ScalarGrid& plane) {
    if (plane.empty()) throw ContractError("sobel_magnitude: empty plane");
    const int w = plane.width();
    const int h = plane.height();
    ScalarGrid out(w, h);
    auto sample = [&](int y, int x) { return plane.at(clampi(y, 0, h - 1), clampi(x, 0, w - 1)); };
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double gx = -sample(y - 1, x - 1) + sample(y - 1, x + 1)
                              - 2.0 * sample(y, x - 1) + 2.0 * sample(y, x + 1)
                              - sample(y + 1, x - 1) + sample(y + 1, x + 1);
            const double gy = -sample(y - 1, x - 1) - 2.0 * sample(y - 1, x)
                              - sample(y - 1, x + 1) + sample(y + 1, x - 1)
                              + 2.0 * sample(y + 1, x) + sample(y + 1, x + 1);
            out.at(y, x) = std::sqrt(gx * gx + gy * gy);
        }
    }
    return out;
}

RegionMask dilate(const RegionMask& mask, int radius) {
    if (mask.empty()) throw ContractError("dilate: empty mask");
    if (radius < 0) throw ContractError("dilate: radius must be >= 0");
    const int w = mask.width();
    const int h = mask.height();
    // Separable: horizontal any-pass then vertical any-pass.
    RegionMask horiz(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            bool v = false;
            for (int dx = -radius; dx <= radius && !v; ++dx) {
                const int xx = x + dx;
                if (xx >= 0 && xx < w && mask.at(y, xx)) v = true;
            }
            horiz.set(y, x, v);
        }
    }
    RegionMask out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            bool v = false;
            for (int dy = -radius; dy <= radius && !v; ++dy) {
                const int yy = y + dy;
                if (yy >= 0 && yy < h && horiz.at(yy, x)) v = true;
            }
            out.set(y, x, v);
        }
    }
    return out;
}

RegionMask erode(const RegionMask& mask, int radius) {
    if (mask.empty()) throw ContractError("erode: empty mask");
    if (radius < 0) throw ContractError("erode: radius must be >= 0");
    const int w = mask.width();
    const int h = mask.height();
    // Out-of-bounds counts as 0, so windows that leave the grid always fail.
    RegionMask horiz(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            bool v = true;
            for (int dx = -radius; dx <= radius && v; ++dx) {
                const int xx = x + dx;
                if (xx < 0 || xx >= w || !mask.at(y, xx)) v = false;
            }
            horiz.set(y, x, v);
        }
    }
    RegionMask out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            bool v = true;
            for (int dy = -radius; dy <= radius && v; ++dy) {
                const int yy = y + dy;
                if (yy < 0 || yy >= h || !horiz.at(yy, x)) v = false;
            }
            out.set(y, x, v);
        }
    }
    return out;
}

namespace {

void check_same_size(const RegionMask& a, const RegionMask& b, const char* what) {
    if (!a.same_size(b)) throw ContractError(std::string(what) + ": mask sizes differ");
}

}  // namespace

RegionMask mask_intersection(const RegionMask& a, const RegionMask& b) {
    check_same_size(a, b, "mask_intersection");
    RegionMask out(a.width(), a.height());
    for (int y = 0; y < a.height(); ++y)
        for (int x = 0; x < a.width(); ++x) out.set(y, x, a.at(y, x) && b.at(y, x));
    return out;
}

RegionMask mask_union(const RegionMask& a, const RegionMask& b) {
    check_same_size(a, b, "mask_union");
    RegionMask out(a.width(), a.height());
    for (int y = 0; y < a.height(); ++y)
        for (int x = 0; x < a.width(); ++x) out.set(y, x, a.at(y, x) || b.at(y, x));
    return out;
}

RegionMask mask_difference(const RegionMask& a, const RegionMask& b) {
    check_same_size(a, b, "mask_difference");
    RegionMask out(a.width(), a.height());
    for (int y = 0; y < a.height(); ++y)
        for (int x = 0; x < a.width(); ++x) out.set(y, x, a.at(y, x) && !b.at(y, x));
    return out;
}

RegionMask mask_complement(const RegionMask& m) {
    if (m.empty()) throw ContractError("mask_complement: empty mask");
    RegionMask out(m.width(), m.height());
    for (int y = 0; y < m.height(); ++y)
        for (int x = 0; x < m.width(); ++x) out.set(y, x, !m.at(y, x));
    return out;
}

bool mask_subset(const RegionMask& inner, const RegionMask& outer) {
    check_same_size(inner, outer, "mask_subset");
    for (int y = 0; y < inner.height(); ++y)
        for (int x = 0; x < inner.width(); ++x)
            if (inner.at(y, x) && !outer.at(y, x)) return false;
    return true;
}

ImageGrid rescale_by_gsd(const ImageGrid& img, double src_gsd, double tar_gsd) {
    if (img.empty()) throw ContractError("rescale_by_gsd: empty image");
    check_gsd(src_gsd, tar_gsd);
    const int ow = scaled_dim(img.width(), src_gsd, tar_gsd);
    const int oh = scaled_dim(img.height(), src_gsd, tar_gsd);
    ImageGrid out(ow, oh, img.channels());
    const double sx = static_cast<double>(img.width()) / ow;
    const double sy = static_cast<double>(img.height()) / oh;
    for (int y = 0; y < oh; ++y) {
        const double v = (y + 0.5) * sy - 0.5;
        const double vc = std::clamp(v, 0.0, static_cast<double>(img.height() - 1));
        const int y0 = static_cast<int>(std::floor(vc));
        const int y1 = std::min(y0 + 1, img.height() - 1);
        const double fy = vc - y0;
        for (int x = 0; x < ow; ++x) {
            const double u = (x + 0.5) * sx - 0.5;
            const double uc = std::clamp(u, 0.0, static_cast<double>(img.width() - 1));
            const int x0 = static_cast<int>(std::floor(uc));
            const int x1 = std::min(x0 + 1, img.width() - 1);
            const double fx = uc - x0;
            for (int c = 0; c < img.channels(); ++c) {
                const double top = img.at(c, y0, x0) * (1.0 - fx) + img.at(c, y0, x1) * fx;
                const double bot = img.at(c, y1, x0) * (1.0 - fx) + img.at(c, y1, x1) * fx;
                out.at(c, y, x) = top * (1.0 - fy) + bot * fy;
            }
        }
    }
    return out;
}

RegionMask rescale_mask_by_gsd(const RegionMask& mask, double src_gsd, double tar_gsd) {
    if (mask.empty()) throw ContractError("rescale_mask_by_gsd: empty mask");
    check_gsd(src_gsd, tar_gsd);
    const int ow = scaled_dim(mask.width(), src_gsd, tar_gsd);
    const int oh = scaled_dim(mask.height(), src_gsd, tar_gsd);
    RegionMask out(ow, oh);
    const double sx = static_cast<double>(mask.width()) / ow;
    const double sy = static_cast<double>(mask.height()) / oh;
    for (int y = 0; y < oh; ++y) {
        const int yy = clampi(static_cast<int>(std::floor((y + 0.5) * sy)), 0, mask.height() - 1);
        for (int x = 0; x < ow; ++x) {
            const int xx = clampi(static_cast<int>(std::floor((x + 0.5) * sx)), 0, mask.width() - 1);
            out.set(y, x, mask.at(yy, xx));
        }
    }
    return out;
}

}  // namespace harmonidiff
