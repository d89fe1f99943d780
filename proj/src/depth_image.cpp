#include "vnav/depth_image.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

namespace vnav {

DepthImage DepthImage::constant(int width, int height, double value, DepthKind kind) {
    DepthImage img;
    img.width = width;
    img.height = height;
    img.kind = kind;
    img.data.assign(static_cast<size_t>(width) * height, value);
    return img;
}

size_t DepthImage::valid_count() const {
    size_t n = 0;
    for (double v : data)
        if (std::isfinite(v)) ++n;
    return n;
}

void DepthImage::validate() const {
    if (width <= 0 || height <= 0)
        raise(ErrorKind::argument, "depth image: dimensions must be positive");
    if (data.size() != pixel_count())
        raise(ErrorKind::argument, "depth image: data length != width * height");
    if (kind == DepthKind::metric) {
        for (double v : data)
            if (std::isfinite(v) && v <= 0.0)
                raise(ErrorKind::invalid_depth, "depth image: metric values must be positive");
    }
}

void DisparityDistortion::validate() const {
    if (!(s1_true > 0.0))
        raise(ErrorKind::argument, "disparity distortion: s1_true must be positive");
    if (noise_sigma < 0.0)
        raise(ErrorKind::argument, "disparity distortion: noise_sigma must be >= 0");
}

DepthImage distort_to_relative(const DepthImage& metric, const DisparityDistortion& d) {
    d.validate();
    if (metric.kind != DepthKind::metric)
        raise(ErrorKind::argument, "distort_to_relative: input must be metric");

    DepthImage out = metric;
    out.kind = DepthKind::relative_inverse;
    std::mt19937_64 rng(d.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (double& v : out.data) {
        if (!std::isfinite(v)) continue;
        double rel = (1.0 / v - d.s2_true) / d.s1_true;
        if (d.noise_sigma > 0.0) rel *= 1.0 + d.noise_sigma * gauss(rng);
        v = rel;
    }
    return out;
}

namespace {

[[noreturn]] void pfm_error(const std::string& path, std::streamoff offset, const std::string& what) {
    std::ostringstream msg;
    msg << "pfm " << path << " @ byte " << offset << ": " << what;
    raise(ErrorKind::format, msg.str());
}

bool host_is_little_endian() {
    const uint16_t one = 1;
    uint8_t first;
    std::memcpy(&first, &one, 1);
    return first == 1;
}

} // namespace

DepthImage load_pfm(const std::string& path, DepthKind kind) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorKind::io, "pfm: cannot open " + path);

    std::string magic;
    in >> magic;
    if (magic == "PF") pfm_error(path, 0, "3-channel PF is unsupported, expected grayscale Pf");
    if (magic != "Pf") pfm_error(path, 0, "bad magic '" + magic + "', expected Pf");

    int width = 0, height = 0;
    double scale = 0.0;
    in >> width >> height >> scale;
    if (!in || width <= 0 || height <= 0)
        pfm_error(path, in.tellg(), "bad dimensions line");
    if (scale == 0.0) pfm_error(path, in.tellg(), "scale must be nonzero");
    in.get(); // single whitespace byte separating header and payload

    DepthImage img;
    img.width = width;
    img.height = height;
    img.kind = kind;
    img.data.resize(img.pixel_count());

    const std::streamoff payload_start = in.tellg();
    std::vector<float> row(static_cast<size_t>(width));
    const bool swap = (scale < 0.0) != host_is_little_endian();
    for (int v = height - 1; v >= 0; --v) { // bottom-to-top row order
        in.read(reinterpret_cast<char*>(row.data()), width * static_cast<std::streamsize>(sizeof(float)));
        if (!in)
            pfm_error(path, payload_start, "truncated payload, expected " +
                      std::to_string(img.pixel_count() * sizeof(float)) + " bytes");
        if (swap) {
            for (float& f : row) {
                uint32_t bits;
                std::memcpy(&bits, &f, 4);
                bits = __builtin_bswap32(bits);
                std::memcpy(&f, &bits, 4);
            }
        }
        for (int u = 0; u < width; ++u)
            img.data[static_cast<size_t>(v) * width + u] = row[static_cast<size_t>(u)];
    }
    return img;
}

void save_pfm(const std::string& path, const DepthImage& img) {
    if (img.width <= 0 || img.height <= 0 || img.data.size() != img.pixel_count())
        raise(ErrorKind::argument, "save_pfm: malformed image");
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorKind::io, "pfm: cannot write " + path);

    out << "Pf\n" << img.width << " " << img.height << "\n";
    out << (host_is_little_endian() ? "-1.0" : "1.0") << "\n";
    std::vector<float> row(static_cast<size_t>(img.width));
    for (int v = img.height - 1; v >= 0; --v) {
        for (int u = 0; u < img.width; ++u)
            row[static_cast<size_t>(u)] = static_cast<float>(img.at(u, v));
        out.write(reinterpret_cast<const char*>(row.data()),
                  img.width * static_cast<std::streamsize>(sizeof(float)));
    }
    if (!out) raise(ErrorKind::io, "pfm: write failed for " + path);
}

DepthErrors eval_depth(const DepthImage& pred, const DepthImage& gt) {
    if (pred.width != gt.width || pred.height != gt.height)
        raise(ErrorKind::argument, "eval_depth: image dimensions differ");
    if (pred.kind != DepthKind::metric || gt.kind != DepthKind::metric)
        raise(ErrorKind::argument, "eval_depth: both images must be metric");

    double abs_sum = 0.0, sq_sum = 0.0;
    size_t n = 0;
    for (size_t i = 0; i < pred.data.size(); ++i) {
        const double p = pred.data[i], g = gt.data[i];
        if (!std::isfinite(p) || !std::isfinite(g)) continue;
        const double e = p - g;
        abs_sum += std::abs(e);
        sq_sum += e * e;
        ++n;
    }
    if (n == 0) raise(ErrorKind::empty_input, "eval_depth: no jointly valid pixels");
    return {abs_sum / n, std::sqrt(sq_sum / n), n};
}

} // namespace vnav
