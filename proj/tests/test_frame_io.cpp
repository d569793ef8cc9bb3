#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include <doctest.h>
#include <png.h>

#include "rr/error.hpp"
#include "rr/frame_io.hpp"

namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("rrmm_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

rr::Image constant_frame(int rows, int cols, double value) {
    rr::Image img(rows, cols);
    for (double& v : img.v) v = value;
    return img;
}

std::vector<uint8_t> read_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace

TEST_SUITE("frame_io") {

TEST_CASE("directory of identical pgm frames") {
    const fs::path dir = temp_dir("pgm_dir");
    const rr::Image frame = constant_frame(64, 64, 128.0 / 255.0);
    for (int n = 0; n < 500; ++n) {
        char name[32];
        std::snprintf(name, sizeof(name), "frame_%03d.pgm", n);
        rr::save_pgm(frame, (dir / name).string());
    }
    const rr::FrameSequence seq = rr::load_sequence(dir.string(), 25.0);
    CHECK(seq.size() == 500);
    CHECK(seq.fs_hz == 25.0);
    CHECK(seq.rows() == 64);
    for (const auto& f : seq.frames) CHECK(f == seq.frames.front());
}

TEST_CASE("raw y8 with newborn geometry") {
    const fs::path dir = temp_dir("y8");
    const fs::path y8 = dir / "video.y8";
    {
        std::ofstream out(y8, std::ios::binary);
        std::vector<char> frame(360 * 288, 42);
        for (int n = 0; n < 100; ++n) out.write(frame.data(), frame.size());
        std::ofstream meta(dir / "video.y8.meta");
        meta << "width=360\nheight=288\nfps=25\n";
    }
    const rr::FrameSequence seq = rr::load_sequence(y8.string());
    CHECK(seq.size() == 100);
    CHECK(seq.cols() == 360);
    CHECK(seq.rows() == 288);
    CHECK(seq.fs_hz == 25.0);
    CHECK(seq.frames[0].at(0, 0) == doctest::Approx(42.0 / 255.0));
}

TEST_CASE("mixed dimensions rejected") {
    const fs::path dir = temp_dir("mixed");
    rr::save_pgm(constant_frame(64, 64, 0.5), (dir / "a.pgm").string());
    rr::save_pgm(constant_frame(32, 32, 0.5), (dir / "b.pgm").string());
    rr::save_pgm(constant_frame(64, 64, 0.5), (dir / "c.pgm").string());
    CHECK_THROWS_WITH_AS(rr::load_sequence(dir.string(), 25.0),
                         doctest::Contains("MixedDimensions"), rr::Error);
}

TEST_CASE("empty directory rejected") {
    const fs::path dir = temp_dir("empty");
    CHECK_THROWS_AS(rr::load_sequence(dir.string(), 25.0), rr::Error);
}

TEST_CASE("grayscale conversion") {
    const rr::Image half = constant_frame(4, 4, 0.5);
    const rr::Image gray = rr::to_grayscale(half, half, half);
    for (const double v : gray.v) CHECK(v == doctest::Approx(0.5));

    const rr::Image one = constant_frame(4, 4, 1.0);
    const rr::Image zero = constant_frame(4, 4, 0.0);
    const rr::Image red = rr::to_grayscale(one, zero, zero);
    for (const double v : red.v) CHECK(v == doctest::Approx(0.299));

    const rr::Image black = rr::to_grayscale(zero, zero, zero);
    for (const double v : black.v) CHECK(v == 0.0);

    CHECK_THROWS_AS(rr::to_grayscale(one, zero, constant_frame(4, 5, 0.0)), rr::Error);
}

TEST_CASE("y8 round trip is bit exact") {
    const fs::path dir = temp_dir("roundtrip");
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> byte(0, 255);
    rr::FrameSequence seq;
    seq.fs_hz = 30.0;
    for (int n = 0; n < 5; ++n) {
        rr::Image img(16, 24);
        for (double& v : img.v) v = byte(rng) / 255.0;
        seq.frames.push_back(std::move(img));
    }
    const fs::path first = dir / "a.y8";
    const fs::path second = dir / "b.y8";
    rr::save_y8(seq, first.string());
    const rr::FrameSequence loaded = rr::load_sequence(first.string());
    rr::save_y8(loaded, second.string());
    CHECK(read_bytes(first) == read_bytes(second));
    const rr::FrameSequence again = rr::load_sequence(second.string());
    for (int n = 0; n < 5; ++n) CHECK(again.frames[n] == loaded.frames[n]);
}

TEST_CASE("normalization keeps intensity order") {
    std::mt19937 rng(5);
    std::uniform_int_distribution<int> byte(0, 255);
    for (int trial = 0; trial < 200; ++trial) {
        const int a = byte(rng), b = byte(rng);
        const double na = a / 255.0, nb = b / 255.0;
        if (a < b) CHECK(na < nb);
        if (a == b) CHECK(na == nb);
        if (a > b) CHECK(na > nb);
    }
}

TEST_CASE("png frames load in gray and color") {
    const fs::path dir = temp_dir("png");

    auto write_png = [](const fs::path& p, int rows, int cols, int channels,
                        const std::vector<uint8_t>& data) {
        FILE* fp = std::fopen(p.string().c_str(), "wb");
        REQUIRE(fp != nullptr);
        png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
        png_infop info = png_create_info_struct(png);
        REQUIRE(setjmp(png_jmpbuf(png)) == 0);
        png_init_io(png, fp);
        png_set_IHDR(png, info, cols, rows, 8,
                     channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                     PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
        png_write_info(png, info);
        std::vector<png_bytep> row_ptrs(rows);
        for (int r = 0; r < rows; ++r)
            row_ptrs[r] = const_cast<png_bytep>(data.data() + static_cast<size_t>(r) * cols * channels);
        png_write_image(png, row_ptrs.data());
        png_write_end(png, nullptr);
        png_destroy_write_struct(&png, &info);
        std::fclose(fp);
    };

    std::vector<uint8_t> gray(8 * 8, 100);
    write_png(dir / "a_gray.png", 8, 8, 1, gray);
    const rr::Image g = rr::load_png_gray((dir / "a_gray.png").string());
    CHECK(g.rows == 8);
    CHECK(g.at(3, 3) == doctest::Approx(100.0 / 255.0));

    std::vector<uint8_t> red(8 * 8 * 3, 0);
    for (size_t i = 0; i < red.size(); i += 3) red[i] = 255;
    write_png(dir / "b_red.png", 8, 8, 3, red);
    const rr::Image r = rr::load_png_gray((dir / "b_red.png").string());
    CHECK(r.at(0, 0) == doctest::Approx(0.299).epsilon(0.01)); // Rec.601 luma

    // mixed pgm/png directory loads in name order
    rr::save_pgm(constant_frame(8, 8, 0.5), (dir / "c.pgm").string());
    const rr::FrameSequence seq = rr::load_sequence(dir.string(), 30.0);
    CHECK(seq.size() == 3);
}

TEST_CASE("pgm rejects wrong maxval") {
    const fs::path dir = temp_dir("maxval");
    const fs::path p = dir / "bad.pgm";
    std::ofstream out(p, std::ios::binary);
    out << "P5\n4 4\n65535\n";
    std::vector<char> data(32, 0);
    out.write(data.data(), data.size());
    out.close();
    CHECK_THROWS_AS(rr::load_pgm(p.string()), rr::Error);
}

}
