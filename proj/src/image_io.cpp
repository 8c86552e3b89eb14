#include "harmonidiff/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <vector>

#include "harmonidiff/errors.hpp"

namespace harmonidiff {

namespace {

const unsigned char kPngSig[8] = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};

std::uint8_t quantize(double v) {
    const double c = std::clamp(v, 0.0, 1.0);
    return static_cast<std::uint8_t>(std::lround(c * 255.0));
}

// --- PNM (P5/P6) ---

// Skips whitespace and '#' comment lines, then parses one decimal token.
int pnm_int(std::istream& in, const std::string& path) {
    int ch = in.get();
    while (ch != EOF) {
        if (ch == '#') {
            while (ch != EOF && ch != '\n') ch = in.get();
        } else if (!std::isspace(ch)) {
            break;
        }
        ch = in.get();
    }
    if (ch == EOF || !std::isdigit(ch)) {
        throw FormatError("corrupt PNM header in " + path);
    }
    long v = 0;
    while (ch != EOF && std::isdigit(ch)) {
        v = v * 10 + (ch - '0');
        if (v > 1000000000L) throw FormatError("PNM header value out of range in " + path);
        ch = in.get();
    }
    if (ch != EOF) in.unget();
    return static_cast<int>(v);
}

ImageGrid load_pnm(std::ifstream& in, const std::string& path) {
    char magic[2];
    in.read(magic, 2);
    const int channels = (magic[1] == '6') ? 3 : 1;
    const int w = pnm_int(in, path);
    const int h = pnm_int(in, path);
    const int maxval = pnm_int(in, path);
    if (w < 1 || h < 1) throw FormatError("bad PNM dimensions in " + path);
    if (maxval != 255) {
        throw FormatError("unsupported PNM maxval " + std::to_string(maxval) + " in " + path);
    }
    in.get();  // single whitespace byte before payload
    std::vector<std::uint8_t> raw(static_cast<std::size_t>(w) * h * channels);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
        throw IoError("truncated PNM payload in " + path);
    }
    ImageGrid img(w, h, channels);
    std::size_t i = 0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < channels; ++c) img.at(c, y, x) = raw[i++] / 255.0;
    return img;
}

void save_pnm(const std::string& path, const ImageGrid& img, int channels) {
    if (img.channels() != channels) {
        throw FormatError("cannot write " + std::to_string(img.channels()) +
                          "-channel image as " + (channels == 1 ? std::string("PGM") : "PPM"));
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << (channels == 1 ? "P5" : "P6") << "\n"
        << img.width() << " " << img.height() << "\n255\n";
    std::vector<std::uint8_t> raw(static_cast<std::size_t>(img.width()) * img.height() * channels);
    std::size_t i = 0;
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            for (int c = 0; c < channels; ++c) raw[i++] = quantize(img.at(c, y, x));
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out) throw IoError("write failed for " + path);
}

// --- PNG ---

// IHDR is always the first chunk: signature(8) len(4) "IHDR"(4) w(4) h(4)
// bit_depth(1) color_type(1). Validated up front so unsupported encodings
// fail as format errors before the decoder runs. Returns the color type.
int check_png_header(std::ifstream& in, const std::string& path) {
    unsigned char head[26];
    in.read(reinterpret_cast<char*>(head), sizeof(head));
    if (static_cast<std::size_t>(in.gcount()) != sizeof(head)) {
        throw IoError("truncated PNG header in " + path);
    }
    if (std::memcmp(head + 12, "IHDR", 4) != 0) {
        throw FormatError("missing IHDR chunk in " + path);
    }
    const int bit_depth = head[24];
    const int color_type = head[25];
    if (bit_depth != 8) {
        throw FormatError("unsupported PNG bit depth " + std::to_string(bit_depth) + " in " +
                          path + " (8 required)");
    }
    if (color_type != 0 && color_type != 2) {
        throw FormatError("unsupported PNG color type " + std::to_string(color_type) + " in " +
                          path + " (gray or RGB required)");
    }
    return color_type;
}

ImageGrid load_png(const std::string& path, int color_type) {
    const int channels = (color_type == 2) ? 3 : 1;
    png_image pimg;
    std::memset(&pimg, 0, sizeof(pimg));
    pimg.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&pimg, path.c_str())) {
        throw IoError("failed to read PNG " + path + ": " + pimg.message);
    }
    pimg.format = (channels == 3) ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    std::vector<std::uint8_t> raw(PNG_IMAGE_SIZE(pimg));
    if (!png_image_finish_read(&pimg, nullptr, raw.data(), 0, nullptr)) {
        std::string msg = pimg.message;
        png_image_free(&pimg);
        throw IoError("failed to decode PNG " + path + ": " + msg);
    }
    const int w = static_cast<int>(pimg.width);
    const int h = static_cast<int>(pimg.height);
    ImageGrid img(w, h, channels);
    std::size_t i = 0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < channels; ++c) img.at(c, y, x) = raw[i++] / 255.0;
    return img;
}

void save_png(const std::string& path, const ImageGrid& img) {
    png_image pimg;
    std::memset(&pimg, 0, sizeof(pimg));
    pimg.version = PNG_IMAGE_VERSION;
    pimg.width = static_cast<png_uint_32>(img.width());
    pimg.height = static_cast<png_uint_32>(img.height());
    pimg.format = (img.channels() == 3) ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    std::vector<std::uint8_t> raw(static_cast<std::size_t>(img.width()) * img.height() *
                                  img.channels());
    std::size_t i = 0;
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            for (int c = 0; c < img.channels(); ++c) raw[i++] = quantize(img.at(c, y, x));
    if (!png_image_write_to_file(&pimg, path.c_str(), 0, raw.data(), 0, nullptr)) {
        throw IoError("failed to write PNG " + path + ": " + pimg.message);
    }
}

std::string lower_ext(const std::string& path) {
    const std::size_t dot = path.find_last_of('.');
    if (dot == std::string::npos) return "";
    std::string ext = path.substr(dot);
    for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return ext;
}

}  // namespace

ImageGrid load_image(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    unsigned char magic[8] = {0};
    in.read(reinterpret_cast<char*>(magic), sizeof(magic));
    if (in.gcount() < 2) throw IoError("truncated file " + path);
    if (magic[0] == 'P' && (magic[1] == '5' || magic[1] == '6')) {
        in.clear();
        in.seekg(0);
        return load_pnm(in, path);
    }
    if (in.gcount() == 8 && std::memcmp(magic, kPngSig, 8) == 0) {
        in.clear();
        in.seekg(0);
        const int color_type = check_png_header(in, path);
        in.close();
        return load_png(path, color_type);
    }
    throw FormatError("unrecognized image format in " + path);
}

void save_image(const std::string& path, const ImageGrid& img) {
    if (img.empty()) throw ContractError("save_image: empty image");
    const std::string ext = lower_ext(path);
    if (ext == ".png") {
        save_png(path, img);
    } else if (ext == ".pgm") {
        save_pnm(path, img, 1);
    } else if (ext == ".ppm") {
        save_pnm(path, img, 3);
    } else {
        throw FormatError("unsupported output extension '" + ext + "' for " + path);
    }
}

RegionMask mask_from_image(const ImageGrid& img) {
    const ScalarGrid gray = to_grayscale(img);
    RegionMask mask(gray.width(), gray.height());
    for (int y = 0; y < gray.height(); ++y)
        for (int x = 0; x < gray.width(); ++x) mask.set(y, x, gray.at(y, x) >= 0.5);
    return mask;
}

ImageGrid mask_to_image(const RegionMask& mask) {
    if (mask.empty()) throw ContractError("mask_to_image: empty mask");
    ImageGrid img(mask.width(), mask.height(), 1);
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x) img.at(0, y, x) = mask.at(y, x) ? 1.0 : 0.0;
    return img;
}

RegionMask load_mask(const std::string& path) { return mask_from_image(load_image(path)); }

void save_mask(const std::string& path, const RegionMask& mask) {
    save_image(path, mask_to_image(mask));
}

}  // namespace harmonidiff
