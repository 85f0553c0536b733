#include "smoe/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>

#include "binio.hpp"
#include "smoe/errors.hpp"
#include "smoe/rng.hpp"

namespace smoe {

namespace {

constexpr std::size_t kMaxPixels = std::size_t{1} << 30;

void check_dims(std::uint64_t w, std::uint64_t h, const std::string& what) {
    if (w == 0 || h == 0) throw format_error(what + ": zero image dimension");
    if (w * h > kMaxPixels)
        throw format_error(what + ": dimensions " + std::to_string(w) + "x" + std::to_string(h) +
                           " overflow the pixel budget");
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw format_error("cannot open " + path.string());
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (!in.good() && !in.eof()) throw format_error("read failure on " + path.string());
    return buf;
}

// PGM token scanner: skips whitespace and '#' comment lines.
int pgm_token(const std::string& buf, std::size_t& pos, const std::string& what) {
    while (pos < buf.size()) {
        const char c = buf[pos];
        if (c == '#') {
            while (pos < buf.size() && buf[pos] != '\n') ++pos;
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            ++pos;
        } else {
            break;
        }
    }
    if (pos >= buf.size()) throw format_error(what + ": truncated PGM header");
    long v = 0;
    bool any = false;
    while (pos < buf.size() && std::isdigit(static_cast<unsigned char>(buf[pos]))) {
        v = v * 10 + (buf[pos] - '0');
        if (v > 1 << 30) throw format_error(what + ": PGM header value overflow");
        ++pos;
        any = true;
    }
    if (!any) throw format_error(what + ": malformed PGM header");
    return static_cast<int>(v);
}

Image load_pgm(const std::string& buf, const std::string& what) {
    std::size_t pos = 2; // past "P5"
    const int w = pgm_token(buf, pos, what);
    const int h = pgm_token(buf, pos, what);
    const int maxval = pgm_token(buf, pos, what);
    if (maxval < 1 || maxval > 65535) throw format_error(what + ": PGM maxval out of range");
    check_dims(static_cast<std::uint64_t>(w), static_cast<std::uint64_t>(h), what);
    if (pos >= buf.size() || !std::isspace(static_cast<unsigned char>(buf[pos])))
        throw format_error(what + ": malformed PGM header");
    ++pos; // single whitespace before raster

    Image img(w, h);
    const std::size_t n = img.size();
    const int bytes_per = maxval > 255 ? 2 : 1;
    if (buf.size() - pos < n * bytes_per) throw format_error(what + ": truncated PGM raster");
    const auto* raster = reinterpret_cast<const std::uint8_t*>(buf.data() + pos);
    const float scale = 1.0f / static_cast<float>(maxval);
    for (std::size_t i = 0; i < n; ++i) {
        int v;
        if (bytes_per == 2) // big-endian per the PGM spec
            v = (raster[2 * i] << 8) | raster[2 * i + 1];
        else
            v = raster[i];
        img.data[i] = static_cast<float>(v) * scale;
    }
    return img;
}

Image load_imgf32(const std::string& buf, const std::string& what) {
    binio::Reader r{reinterpret_cast<const std::uint8_t*>(buf.data()), buf.size(), 0, what};
    r.pos = 4; // past "SMIF"
    const std::uint32_t w = r.u32();
    const std::uint32_t h = r.u32();
    check_dims(w, h, what);
    Image img(static_cast<int>(w), static_cast<int>(h));
    r.f32_span(img.data.data(), img.size());
    for (std::size_t i = 0; i < img.size(); ++i) {
        if (!std::isfinite(img.data[i]))
            throw format_error(what + ": non-finite value at byte offset " +
                               std::to_string(12 + 4 * i));
    }
    return img;
}

} // namespace

Image::Image(int w, int h, float fill) : width(w), height(h) {
    check_dims(static_cast<std::uint64_t>(std::max(w, 0)), static_cast<std::uint64_t>(std::max(h, 0)),
               "Image");
    data.assign(static_cast<std::size_t>(w) * h, fill);
}

Image load_image(const std::filesystem::path& path) {
    const std::string buf = read_file(path);
    const std::string what = path.string();
    if (buf.size() >= 4 && buf.compare(0, 4, "SMIF") == 0) return load_imgf32(buf, what);
    if (buf.size() >= 2 && buf.compare(0, 2, "P5") == 0) return load_pgm(buf, what);
    throw format_error(what + ": unrecognized magic bytes (expected SMIF or P5)");
}

void save_image(const Image& img, const std::filesystem::path& path, ImageFormat format) {
    if (img.width < 1 || img.height < 1 || img.data.size() != img.size())
        throw format_error("refusing to save malformed image");
    std::string out;
    if (format == ImageFormat::Imgf32) {
        out.reserve(12 + 4 * img.size());
        out += "SMIF";
        binio::put_u32(out, static_cast<std::uint32_t>(img.width));
        binio::put_u32(out, static_cast<std::uint32_t>(img.height));
        binio::put_f32_span(out, img.data.data(), img.size());
    } else {
        const int maxval = format == ImageFormat::Pgm8 ? 255 : 65535;
        out = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n" +
              std::to_string(maxval) + "\n";
        for (const float v : img.data) {
            const float c = std::clamp(v, 0.0f, 1.0f);
            const int q = static_cast<int>(std::floor(static_cast<double>(c) * maxval + 0.5));
            if (maxval > 255) {
                out.push_back(static_cast<char>((q >> 8) & 0xFF));
                out.push_back(static_cast<char>(q & 0xFF));
            } else {
                out.push_back(static_cast<char>(q & 0xFF));
            }
        }
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw format_error("cannot open " + path.string() + " for writing");
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f.good()) throw format_error("write failure on " + path.string());
}

ImageFormat format_for_path(const std::filesystem::path& path) {
    return path.extension() == ".pgm" ? ImageFormat::Pgm8 : ImageFormat::Imgf32;
}

Image gen_phantom(const PhantomSpec& spec) {
    if (spec.width < 1 || spec.height < 1) throw format_error("gen_phantom: zero-size image");
    Image img(spec.width, spec.height);
    for (int y = 0; y < spec.height; ++y) {
        const double v = (y + 0.5) / spec.height;
        for (int x = 0; x < spec.width; ++x) {
            const double u = (x + 0.5) / spec.width;
            double acc = spec.background;
            for (const Ellipse& e : spec.ellipses) {
                const double du = u - e.cx;
                const double dv = v - e.cy;
                const double c = std::cos(e.rotation);
                const double s = std::sin(e.rotation);
                const double a = (du * c + dv * s) / e.rx;
                const double b = (-du * s + dv * c) / e.ry;
                if (a * a + b * b <= 1.0) acc += e.intensity;
            }
            img.at(x, y) = static_cast<float>(std::clamp(acc, 0.0, 1.0));
        }
    }
    return img;
}

PhantomSpec sample_phantom_spec(int width, int height, std::uint64_t seed, int max_ellipses) {
    if (width < 1 || height < 1) throw format_error("sample_phantom_spec: zero-size image");
    rng::Stream rs(seed, 0x70AAu);
    PhantomSpec spec;
    spec.width = width;
    spec.height = height;
    spec.background = 0.05 + 0.20 * rs.next_unit();
    const int n = 3 + static_cast<int>(rs.next_below(static_cast<std::uint64_t>(std::max(1, max_ellipses - 2))));
    for (int i = 0; i < n; ++i) {
        Ellipse e;
        e.cx = 0.2 + 0.6 * rs.next_unit();
        e.cy = 0.2 + 0.6 * rs.next_unit();
        e.rx = 0.06 + 0.28 * rs.next_unit();
        e.ry = 0.06 + 0.28 * rs.next_unit();
        e.rotation = 3.14159265358979323846 * rs.next_unit();
        e.intensity = (rs.next_unit() < 0.75 ? 1.0 : -1.0) * (0.10 + 0.40 * rs.next_unit());
        spec.ellipses.push_back(e);
    }
    return spec;
}

} // namespace smoe
