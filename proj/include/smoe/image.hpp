#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace smoe {

/// Grayscale intensity field, row-major, top-left origin.
/// Generated and imported images live in [0, 1]; intermediate results
/// (noisy images, residuals) may leave that range and are only clamped
/// when quantized for PGM export.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<float> data; // size == width * height

    Image() = default;
    Image(int w, int h, float fill = 0.0f);

    float& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    float at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
    std::size_t size() const { return data.size(); }
};

enum class ImageFormat {
    Imgf32, // "SMIF" + u32le w + u32le h + f32le pixels; lossless
    Pgm8,   // P5 maxval 255
    Pgm16,  // P5 maxval 65535, big-endian samples
};

/// Reads IMGF32 or binary PGM (P5); PGM samples are mapped to value/maxval.
/// Throws format_error on bad magic, truncation, dimension overflow, or a
/// non-finite IMGF32 value (the message names the byte offset).
Image load_image(const std::filesystem::path& path);

/// IMGF32 is written verbatim; PGM quantizes clamp(v,0,1)*maxval with
/// round-half-up.
void save_image(const Image& img, const std::filesystem::path& path, ImageFormat format);

/// Picks the format from the file extension: .pgm -> Pgm8, everything
/// else -> Imgf32.
ImageFormat format_for_path(const std::filesystem::path& path);

struct Ellipse {
    double cx = 0.5;        // center, fraction of width
    double cy = 0.5;        // center, fraction of height
    double rx = 0.25;       // semi-axis, fraction of width
    double ry = 0.25;       // semi-axis, fraction of height
    double rotation = 0.0;  // radians
    double intensity = 0.5; // additive
};

struct PhantomSpec {
    int width = 0;
    int height = 0;
    double background = 0.0;
    std::vector<Ellipse> ellipses;
};

/// Renders the spec deterministically: each pixel center is tested for
/// ellipse containment (no anti-aliasing) and the additive intensities of
/// containing ellipses are summed onto the background, then clamped to [0,1].
Image gen_phantom(const PhantomSpec& spec);

/// Draws a random ellipse arrangement from the seed. Same seed, same spec.
PhantomSpec sample_phantom_spec(int width, int height, std::uint64_t seed, int max_ellipses = 8);

} // namespace smoe
