#pragma once

#include <cstdint>

#include "smoe/image.hpp"

namespace smoe {

enum class NoiseModel { Rician, Gaussian };

/// sigma is a fraction of the [0,1] intensity range, so "5% noise" is
/// sigma = 0.05.
struct NoiseSpec {
    NoiseModel model = NoiseModel::Rician;
    double sigma = 0.0;
    std::uint64_t seed = 0;
};

/// Rician: out = sqrt((x + s*g1)^2 + (s*g2)^2); Gaussian: out = x + s*g.
/// The per-pixel normals are a pure function of (seed, pixel index), drawn
/// row-major, so results are bit-stable under any parallel schedule.
/// Output is intentionally not clamped.
Image add_noise(const Image& img, const NoiseSpec& spec);

/// Pixel-wise noisy - clean; the residual-learning training target.
Image residual(const Image& noisy, const Image& clean);

} // namespace smoe
