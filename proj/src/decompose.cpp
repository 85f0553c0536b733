#include "smoe/decompose.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "smoe/errors.hpp"

namespace smoe {

namespace {

void check_config(const DecompConfig& cfg, const Image& img) {
    if (cfg.patch < 1 || cfg.stride < 1 || cfg.stride > cfg.patch)
        throw format_error("decompose: need 1 <= stride <= patch");
    if (cfg.patch > img.width || cfg.patch > img.height)
        throw format_error("decompose: image " + std::to_string(img.width) + "x" +
                           std::to_string(img.height) + " smaller than patch " +
                           std::to_string(cfg.patch));
}

Region mask_region(const Region& base, const std::vector<std::uint8_t>& keep) {
    Region r;
    r.x0 = base.x0;
    r.y0 = base.y0;
    r.width = base.width;
    r.height = base.height;
    r.data.resize(base.size());
    r.support = keep;
    for (std::size_t i = 0; i < base.size(); ++i) r.data[i] = keep[i] ? base.data[i] : 0.0f;
    return r;
}

} // namespace

std::vector<int> patch_positions(int extent, int patch, int stride) {
    if (patch < 1 || stride < 1) throw format_error("patch_positions: need patch, stride >= 1");
    if (patch > extent) throw format_error("patch_positions: patch exceeds extent");
    std::vector<int> pos;
    const int last = extent - patch;
    for (int p = 0; p <= last; p += stride) pos.push_back(p);
    if (pos.back() != last) pos.push_back(last);
    return pos;
}

std::vector<Region> decompose_patches(const Image& img, const DecompConfig& cfg) {
    check_config(cfg, img);
    const std::vector<int> xs = patch_positions(img.width, cfg.patch, cfg.stride);
    const std::vector<int> ys = patch_positions(img.height, cfg.patch, cfg.stride);
    std::vector<Region> regions;
    regions.reserve(xs.size() * ys.size());
    for (const int y0 : ys) {
        for (const int x0 : xs) {
            Region r;
            r.x0 = x0;
            r.y0 = y0;
            r.width = cfg.patch;
            r.height = cfg.patch;
            r.data.resize(r.size());
            for (int y = 0; y < cfg.patch; ++y)
                std::copy_n(&img.data[static_cast<std::size_t>(y0 + y) * img.width + x0],
                            cfg.patch, &r.data[static_cast<std::size_t>(y) * cfg.patch]);
            regions.push_back(std::move(r));
        }
    }
    return regions;
}

std::vector<std::uint8_t> threshold_mask(const std::vector<float>& data) {
    if (data.empty()) throw format_error("threshold_mask: empty data");
    const auto [mn_it, mx_it] = std::minmax_element(data.begin(), data.end());
    const float mn = *mn_it, mx = *mx_it;
    if (!(mx > mn)) return std::vector<std::uint8_t>(data.size(), 1);

    constexpr int kBins = 256;
    std::array<int, kBins> hist{};
    const float scale = kBins / (mx - mn);
    auto bin_of = [&](float v) {
        return std::clamp(static_cast<int>((v - mn) * scale), 0, kBins - 1);
    };
    for (const float v : data) ++hist[bin_of(v)];

    // Otsu: pick the split maximizing between-class variance; first best wins.
    double total_sum = 0.0;
    for (int b = 0; b < kBins; ++b) total_sum += static_cast<double>(b) * hist[b];
    const double total = static_cast<double>(data.size());
    int best_t = 1;
    double best_var = -1.0;
    double w0 = 0.0, sum0 = 0.0;
    for (int t = 1; t < kBins; ++t) {
        w0 += hist[t - 1];
        sum0 += static_cast<double>(t - 1) * hist[t - 1];
        const double w1 = total - w0;
        if (w0 == 0.0 || w1 == 0.0) continue;
        const double mu0 = sum0 / w0;
        const double mu1 = (total_sum - sum0) / w1;
        const double var = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
        if (var > best_var) {
            best_var = var;
            best_t = t;
        }
    }

    std::vector<std::uint8_t> mask(data.size());
    for (std::size_t i = 0; i < data.size(); ++i)
        mask[i] = bin_of(data[i]) >= best_t ? 1 : 0;
    return mask;
}

std::pair<Region, Region> split_by_mask(const Region& region, const std::vector<std::uint8_t>& mask) {
    if (mask.size() != region.size())
        throw format_error("split_by_mask: mask shape mismatch");
    std::vector<std::uint8_t> inv(mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i) inv[i] = mask[i] ? 0 : 1;
    return {mask_region(region, mask), mask_region(region, inv)};
}

std::vector<Region> decompose(const Image& img, const DecompConfig& cfg) {
    std::vector<Region> patches = decompose_patches(img, cfg);
    if (cfg.mode == DecompMode::Patch) return patches;

    std::vector<Region> regions;
    regions.reserve(2 * patches.size());
    for (std::size_t p = 0; p < patches.size(); ++p) {
        std::vector<std::uint8_t> mask;
        if (cfg.mask_source == MaskSource::Threshold) {
            mask = threshold_mask(patches[p].data);
        } else {
            const auto path = std::filesystem::path(cfg.mask_dir) /
                              ("mask_" + std::to_string(p) + "_0.pgm");
            const Image m = load_image(path);
            if (m.width != patches[p].width || m.height != patches[p].height)
                throw format_error(path.string() + ": mask shape mismatch");
            mask.resize(m.size());
            for (std::size_t i = 0; i < m.size(); ++i) mask[i] = m.data[i] > 0.0f ? 1 : 0;
        }
        auto [inside, outside] = split_by_mask(patches[p], mask);
        regions.push_back(std::move(inside));
        regions.push_back(std::move(outside));
    }
    return regions;
}

Image merge(const std::vector<Region>& regions, int width, int height, const Image& fallback) {
    if (fallback.width != width || fallback.height != height)
        throw format_error("merge: fallback dimensions mismatch");
    std::vector<double> sum(static_cast<std::size_t>(width) * height, 0.0);
    std::vector<double> weight(sum.size(), 0.0);
    for (const Region& r : regions) {
        if (r.x0 < 0 || r.y0 < 0 || r.x0 + r.width > width || r.y0 + r.height > height)
            throw format_error("merge: region out of bounds");
        for (int y = 0; y < r.height; ++y) {
            const std::size_t row = static_cast<std::size_t>(r.y0 + y) * width + r.x0;
            const std::size_t rrow = static_cast<std::size_t>(y) * r.width;
            for (int x = 0; x < r.width; ++x) {
                if (!r.supported(rrow + x)) continue;
                sum[row + x] += r.data[rrow + x];
                weight[row + x] += 1.0;
            }
        }
    }
    Image out(width, height);
    for (std::size_t i = 0; i < out.size(); ++i)
        out.data[i] = weight[i] > 0.0 ? static_cast<float>(sum[i] / weight[i]) : fallback.data[i];
    return out;
}

} // namespace smoe
