#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "smoe/image.hpp"

namespace smoe {

/// A located sub-image. An empty support means every pixel belongs to the
/// region; otherwise pixels with support 0 carry data value exactly 0.
/// cluster is -1 until a gating model assigns one.
struct Region {
    int x0 = 0;
    int y0 = 0;
    int width = 0;
    int height = 0;
    std::vector<float> data;
    std::vector<std::uint8_t> support; // empty or width*height of {0,1}
    int cluster = -1;

    float& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    float at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
    bool supported(std::size_t i) const { return support.empty() || support[i] != 0; }
    std::size_t size() const { return static_cast<std::size_t>(width) * height; }
};

enum class DecompMode { Patch, Segment };
enum class MaskSource { Threshold, MaskFiles };

struct DecompConfig {
    int patch = 48;
    int stride = 20;
    DecompMode mode = DecompMode::Patch;
    MaskSource mask_source = MaskSource::Threshold;
    std::string mask_dir; // holds mask_{patchindex}_0.pgm when MaskFiles
};

/// Window offsets {0, stride, 2*stride, ...} clipped to extent-patch, with
/// extent-patch appended so the last pixels stay covered. Sorted, unique.
std::vector<int> patch_positions(int extent, int patch, int stride);

/// Overlapping patch windows in row-major (y, x) order; full support.
std::vector<Region> decompose_patches(const Image& img, const DecompConfig& cfg);

/// Otsu threshold over a 256-bin histogram spanning the data's min..max
/// range; returns 1 where the pixel's bin is at or above the threshold.
/// Constant input yields an all-ones mask.
std::vector<std::uint8_t> threshold_mask(const std::vector<float>& data);

/// Zero-fills each side against the mask; both halves keep the origin.
std::pair<Region, Region> split_by_mask(const Region& region, const std::vector<std::uint8_t>& mask);

/// Patch mode: decompose_patches. Segment mode: each patch is split into a
/// mask region and its inverse; masks come from the built-in thresholder or
/// from mask_dir/mask_{patchindex}_0.pgm (nonzero = inside).
std::vector<Region> decompose(const Image& img, const DecompConfig& cfg);

/// Support-weighted overlap average; pixels no region voted for copy the
/// fallback. Accumulation is per-pixel in a fixed order, so the result is
/// independent of region list chunking.
Image merge(const std::vector<Region>& regions, int width, int height, const Image& fallback);

} // namespace smoe
