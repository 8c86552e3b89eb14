#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "harmonidiff/image.hpp"

namespace harmonidiff {

// Planar float64 tensor, channels x height x width. Unlike ImageGrid the
// channel count is unconstrained and values are unbounded.
class LatentTensor {
public:
    LatentTensor() = default;
    LatentTensor(int channels, int height, int width, double fill = 0.0);

    int channels() const { return channels_; }
    int height() const { return height_; }
    int width() const { return width_; }
    bool empty() const { return data_.empty(); }
    std::size_t size() const { return data_.size(); }

    double at(int c, int y, int x) const {
        return data_[(static_cast<std::size_t>(c) * height_ + y) * width_ + x];
    }
    double& at(int c, int y, int x) {
        return data_[(static_cast<std::size_t>(c) * height_ + y) * width_ + x];
    }

    bool same_shape(const LatentTensor& o) const {
        return channels_ == o.channels_ && height_ == o.height_ && width_ == o.width_;
    }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

private:
    int channels_ = 0;
    int height_ = 0;
    int width_ = 0;
    std::vector<double> data_;
};

double max_abs(const LatentTensor& t);
double max_abs_diff(const LatentTensor& a, const LatentTensor& b);

// Maps images to the latent grid the diffusion loop runs on and back.
class LatentCodec {
public:
    virtual ~LatentCodec() = default;
    virtual LatentTensor encode(const ImageGrid& img) const = 0;
    // Decodes to the requested pixel dims (the pre-encode image size).
    virtual ImageGrid decode(const LatentTensor& z, int out_width, int out_height) const = 0;
    // Latent grid dims for a given pixel-space size.
    virtual std::pair<int, int> latent_dims(int width, int height) const = 0;
    virtual int factor() const = 0;
};

// Latent equals the image, bit for bit, with no range clamp either way.
class IdentityCodec : public LatentCodec {
public:
    LatentTensor encode(const ImageGrid& img) const override;
    ImageGrid decode(const LatentTensor& z, int out_width, int out_height) const override;
    std::pair<int, int> latent_dims(int width, int height) const override;
    int factor() const override { return 1; }
};

// Each latent cell is the mean of an f x f patch (image replicate-padded to a
// multiple of f first); decode is bilinear upsampling clamped to [0,1].
class PatchAverageCodec : public LatentCodec {
public:
    explicit PatchAverageCodec(int factor);
    LatentTensor encode(const ImageGrid& img) const override;
    ImageGrid decode(const LatentTensor& z, int out_width, int out_height) const override;
    std::pair<int, int> latent_dims(int width, int height) const override;
    int factor() const override { return factor_; }

private:
    int factor_;
};

// Majority vote per f x f block (edge blocks vote over their in-grid cells);
// exact ties count as inside. Output dims match latent_dims for factor f.
RegionMask downscale_mask(const RegionMask& mask, int factor);

}  // namespace harmonidiff
