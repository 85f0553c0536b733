#include "smoe/noise.hpp"

#include <cmath>

#include "smoe/errors.hpp"
#include "smoe/rng.hpp"

namespace smoe {

Image add_noise(const Image& img, const NoiseSpec& spec) {
    if (spec.sigma < 0.0) throw format_error("add_noise: sigma must be >= 0");
    if (spec.sigma == 0.0) return img;
    Image out = img;
    const double s = spec.sigma;
    const std::uint64_t key = rng::key(spec.seed, spec.model == NoiseModel::Rician ? 1 : 2);
    const std::size_t n = img.size();
    if (spec.model == NoiseModel::Gaussian) {
        for (std::size_t i = 0; i < n; ++i) {
            const auto g = rng::normal_pair(key, i);
            out.data[i] = static_cast<float>(img.data[i] + s * g.a);
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const auto g = rng::normal_pair(key, i);
            const double re = img.data[i] + s * g.a;
            const double im = s * g.b;
            out.data[i] = static_cast<float>(std::sqrt(re * re + im * im));
        }
    }
    return out;
}

Image residual(const Image& noisy, const Image& clean) {
    if (noisy.width != clean.width || noisy.height != clean.height)
        throw format_error("residual: dimension mismatch");
    Image out(noisy.width, noisy.height);
    for (std::size_t i = 0; i < out.size(); ++i) out.data[i] = noisy.data[i] - clean.data[i];
    return out;
}

} // namespace smoe
