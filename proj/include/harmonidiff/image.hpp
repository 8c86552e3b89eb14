#pragma once

#include <cstdint>
#include <vector>

namespace harmonidiff {

// Planar float64 raster, 1 (gray) or 3 (RGB) channels. Values are nominally
// in [0,1] for anything loaded from disk; intermediate math may leave range.
class ImageGrid {
public:
    ImageGrid() = default;
    ImageGrid(int width, int height, int channels, double fill = 0.0);

    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }
    bool empty() const { return data_.empty(); }

    double at(int c, int y, int x) const {
        return data_[(static_cast<std::size_t>(c) * height_ + y) * width_ + x];
    }
    double& at(int c, int y, int x) {
        return data_[(static_cast<std::size_t>(c) * height_ + y) * width_ + x];
    }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

private:
    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<double> data_;
};

// Single-channel float64 plane (gradient magnitudes, per-channel views).
class ScalarGrid {
public:
    ScalarGrid() = default;
    ScalarGrid(int width, int height, double fill = 0.0);

    int width() const { return width_; }
    int height() const { return height_; }
    bool empty() const { return data_.empty(); }

    double at(int y, int x) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }
    double& at(int y, int x) { return data_[static_cast<std::size_t>(y) * width_ + x]; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> data_;
};

// Binary region mask on a pixel or latent grid.
class RegionMask {
public:
    RegionMask() = default;
    RegionMask(int width, int height, bool fill = false);

    int width() const { return width_; }
    int height() const { return height_; }
    bool empty() const { return data_.empty(); }

    bool at(int y, int x) const { return data_[static_cast<std::size_t>(y) * width_ + x] != 0; }
    void set(int y, int x, bool v) { data_[static_cast<std::size_t>(y) * width_ + x] = v ? 1 : 0; }

    // Number of set cells.
    long long count() const;

    bool same_size(const RegionMask& other) const {
        return width_ == other.width_ && height_ == other.height_;
    }

    const std::vector<std::uint8_t>& data() const { return data_; }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> data_;
};

// 0.299 R + 0.587 G + 0.114 B; single-channel input passes through.
ScalarGrid to_grayscale(const ImageGrid& img);

// Sobel gradient magnitude with replicated borders. A unit vertical step edge
// reads 4.0 along the step.
ScalarGrid sobel_magnitude(const ScalarGrid& plane);

// Square-window morphology, window (2r+1)^2. Out-of-bounds cells read as 0,
// so erosion never survives within r of the border and dilation cannot grow
// from outside the grid. r = 0 is the identity.
RegionMask dilate(const RegionMask& mask, int radius);
RegionMask erode(const RegionMask& mask, int radius);

RegionMask mask_intersection(const RegionMask& a, const RegionMask& b);
RegionMask mask_union(const RegionMask& a, const RegionMask& b);
// Cells in a and not in b.
RegionMask mask_difference(const RegionMask& a, const RegionMask& b);
RegionMask mask_complement(const RegionMask& m);
bool mask_subset(const RegionMask& inner, const RegionMask& outer);

// Resample to dims round(dim * src_gsd / tar_gsd), min 1, bilinear with
// half-pixel centers and clamped taps. GSDs are metres per pixel, > 0.
ImageGrid rescale_by_gsd(const ImageGrid& img, double src_gsd, double tar_gsd);
// Same output dims as rescale_by_gsd, nearest-neighbour, for masks.
RegionMask rescale_mask_by_gsd(const RegionMask& mask, double src_gsd, double tar_gsd);

}  // namespace harmonidiff
