#include "rr/frame_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <png.h>

#include "rr/csv.hpp"
#include "rr/error.hpp"

namespace fs = std::filesystem;

namespace rr {

namespace {

Image from_bytes(const std::vector<uint8_t>& bytes, int rows, int cols) {
    Image img(rows, cols);
    for (size_t i = 0; i < img.v.size(); ++i) img.v[i] = bytes[i] / 255.0;
    return img;
}

// Skips PGM whitespace and '#' comment lines between header tokens.
int next_pnm_token(std::istream& in) {
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (!std::isspace(c)) {
            in.unget();
            std::string tok;
            in >> tok;
            try {
                return std::stoi(tok);
            } catch (const std::exception&) {
                throw Error(Errc::unreadable_frame, "bad PGM header token '" + tok + "'");
            }
        }
        c = in.get();
    }
    throw Error(Errc::unreadable_frame, "truncated PGM header");
}

struct PngReadCloser {
    png_structp png = nullptr;
    png_infop info = nullptr;
    FILE* fp = nullptr;
    ~PngReadCloser() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        if (fp) std::fclose(fp);
    }
};

} // namespace

Image load_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::unreadable_frame, "cannot open " + path);
    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (magic[0] != 'P' || magic[1] != '5')
        throw Error(Errc::unreadable_frame, path + ": not a binary P5 PGM");
    const int cols = next_pnm_token(in);
    const int rows = next_pnm_token(in);
    const int maxval = next_pnm_token(in);
    if (cols <= 0 || rows <= 0) throw Error(Errc::unreadable_frame, path + ": bad dimensions");
    if (maxval != 255) throw Error(Errc::unreadable_frame, path + ": maxval must be 255");
    in.get(); // single whitespace after header
    std::vector<uint8_t> bytes(static_cast<size_t>(rows) * cols);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (static_cast<size_t>(in.gcount()) != bytes.size())
        throw Error(Errc::unreadable_frame, path + ": truncated pixel data");
    return from_bytes(bytes, rows, cols);
}

void save_pgm(const Image& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::io_error, "cannot write " + path);
    out << "P5\n" << img.cols << " " << img.rows << "\n255\n";
    std::vector<uint8_t> bytes(img.size());
    for (size_t i = 0; i < img.v.size(); ++i) {
        const double q = std::round(std::clamp(img.v[i], 0.0, 1.0) * 255.0);
        bytes[i] = static_cast<uint8_t>(q);
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

Image load_png_gray(const std::string& path) {
    PngReadCloser h;
    h.fp = std::fopen(path.c_str(), "rb");
    if (!h.fp) throw Error(Errc::unreadable_frame, "cannot open " + path);
    png_byte header[8];
    if (std::fread(header, 1, 8, h.fp) != 8 || png_sig_cmp(header, 0, 8))
        throw Error(Errc::unreadable_frame, path + ": not a PNG file");
    h.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    h.info = png_create_info_struct(h.png);
    if (!h.png || !h.info) throw Error(Errc::unreadable_frame, path + ": libpng init failed");
    if (setjmp(png_jmpbuf(h.png))) throw Error(Errc::unreadable_frame, path + ": PNG decode failed");
    png_init_io(h.png, h.fp);
    png_set_sig_bytes(h.png, 8);
    png_read_info(h.png, h.info);

    png_set_strip_16(h.png);
    png_set_strip_alpha(h.png);
    png_set_palette_to_rgb(h.png);
    png_set_expand_gray_1_2_4_to_8(h.png);
    png_read_update_info(h.png, h.info);

    const int rows = static_cast<int>(png_get_image_height(h.png, h.info));
    const int cols = static_cast<int>(png_get_image_width(h.png, h.info));
    const int channels = png_get_channels(h.png, h.info);
    if (channels != 1 && channels != 3)
        throw Error(Errc::unreadable_frame, path + ": unsupported channel count");

    std::vector<uint8_t> data(static_cast<size_t>(rows) * cols * channels);
    std::vector<png_bytep> row_ptrs(rows);
    for (int r = 0; r < rows; ++r)
        row_ptrs[r] = data.data() + static_cast<size_t>(r) * cols * channels;
    png_read_image(h.png, row_ptrs.data());

    if (channels == 1) return from_bytes(data, rows, cols);

    Image red(rows, cols), green(rows, cols), blue(rows, cols);
    for (size_t i = 0; i < red.v.size(); ++i) {
        red.v[i] = data[i * 3 + 0] / 255.0;
        green.v[i] = data[i * 3 + 1] / 255.0;
        blue.v[i] = data[i * 3 + 2] / 255.0;
    }
    return to_grayscale(red, green, blue);
}

Image to_grayscale(const Image& r, const Image& g, const Image& b) {
    if (!r.same_shape(g) || !r.same_shape(b))
        throw Error(Errc::channel_mismatch, "color planes differ in size");
    Image out(r.rows, r.cols);
    for (size_t i = 0; i < out.v.size(); ++i)
        out.v[i] = 0.299 * r.v[i] + 0.587 * g.v[i] + 0.114 * b.v[i];
    return out;
}

namespace {

FrameSequence load_y8(const std::string& path, double fs_hz) {
    const std::string meta_path = path + ".meta";
    int width = 0, height = 0;
    double fps = 0.0;
    for (const auto& line : csv::read_lines(meta_path)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = line.substr(0, eq);
        const std::string val = line.substr(eq + 1);
        if (key == "width") width = csv::to_int(val);
        else if (key == "height") height = csv::to_int(val);
        else if (key == "fps") fps = csv::to_double(val);
    }
    if (width <= 0 || height <= 0)
        throw Error(Errc::unreadable_frame, meta_path + ": missing width/height");
    if (fs_hz <= 0.0) fs_hz = fps;
    if (fs_hz <= 0.0) throw Error(Errc::unreadable_frame, meta_path + ": missing fps");

    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::unreadable_frame, "cannot open " + path);
    in.seekg(0, std::ios::end);
    const auto bytes = static_cast<size_t>(in.tellg());
    in.seekg(0);
    const size_t frame_bytes = static_cast<size_t>(width) * height;
    if (bytes == 0) throw Error(Errc::empty_sequence, path + " is empty");
    if (bytes % frame_bytes != 0)
        throw Error(Errc::unreadable_frame, path + ": size is not a multiple of width*height");

    FrameSequence seq;
    seq.fs_hz = fs_hz;
    const size_t n_frames = bytes / frame_bytes;
    std::vector<uint8_t> buf(frame_bytes);
    seq.frames.reserve(n_frames);
    for (size_t n = 0; n < n_frames; ++n) {
        in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(frame_bytes));
        if (static_cast<size_t>(in.gcount()) != frame_bytes)
            throw Error(Errc::unreadable_frame, path + ": truncated frame");
        seq.frames.push_back(from_bytes(buf, height, width));
    }
    return seq;
}

FrameSequence load_dir(const std::string& path, double fs_hz) {
    if (fs_hz <= 0.0)
        throw Error(Errc::config_error, "directory input requires an explicit frame rate");
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(path)) {
        if (!entry.is_regular_file()) continue;
        const std::string ext = entry.path().extension().string();
        if (ext == ".pgm" || ext == ".png") files.push_back(entry.path().string());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw Error(Errc::empty_sequence, "no .pgm/.png frames in " + path);

    FrameSequence seq;
    seq.fs_hz = fs_hz;
    seq.frames.reserve(files.size());
    for (const auto& file : files) {
        Image img = fs::path(file).extension() == ".pgm" ? load_pgm(file) : load_png_gray(file);
        if (!seq.frames.empty() && !img.same_shape(seq.frames.front())) {
            std::ostringstream msg;
            msg << file << ": " << img.rows << "x" << img.cols << " differs from "
                << seq.frames.front().rows << "x" << seq.frames.front().cols;
            throw Error(Errc::mixed_dimensions, msg.str());
        }
        seq.frames.push_back(std::move(img));
    }
    return seq;
}

} // namespace

FrameSequence load_sequence(const std::string& path, double fs_hz) {
    if (fs::is_directory(path)) return load_dir(path, fs_hz);
    if (path.size() > 3 && path.ends_with(".y8")) return load_y8(path, fs_hz);
    throw Error(Errc::unreadable_frame, path + ": expected a directory or a .y8 file");
}

void save_y8(const FrameSequence& seq, const std::string& path) {
    if (seq.frames.empty()) throw Error(Errc::empty_sequence, "nothing to save");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::io_error, "cannot write " + path);
    std::vector<uint8_t> buf(static_cast<size_t>(seq.rows()) * seq.cols());
    for (const auto& frame : seq.frames) {
        for (size_t i = 0; i < frame.v.size(); ++i) {
            const double q = std::round(std::clamp(frame.v[i], 0.0, 1.0) * 255.0);
            buf[i] = static_cast<uint8_t>(q);
        }
        out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    }
    std::ostringstream meta;
    meta << "width=" << seq.cols() << "\nheight=" << seq.rows() << "\nfps=" << seq.fs_hz << "\n";
    csv::write_text(path + ".meta", meta.str());
}

} // namespace rr
