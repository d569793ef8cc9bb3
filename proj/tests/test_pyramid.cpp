#include <cmath>
#include <complex>
#include <random>

#include <doctest.h>

#include "rr/error.hpp"
#include "rr/pyramid.hpp"
#include "rr/ref.hpp"

using rr::Image;
using rr::PyramidKernel;

namespace {

Image random_frame(std::mt19937& rng, int rows, int cols) {
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    Image img(rows, cols);
    for (double& v : img.v) v = dist(rng);
    return img;
}

double max_abs_diff(const Image& a, const Image& b) {
    REQUIRE(a.same_shape(b));
    double m = 0.0;
    for (size_t i = 0; i < a.v.size(); ++i) m = std::max(m, std::abs(a.v[i] - b.v[i]));
    return m;
}

} // namespace

TEST_SUITE("pyramid") {

TEST_CASE("kernel is the Burt-Adelson design") {
    const PyramidKernel k = PyramidKernel::burt_adelson();
    REQUIRE(k.taps.size() == 5);
    CHECK(k.radius == 2);
    double sum = 0.0;
    for (const double t : k.taps) sum += t;
    CHECK(sum == 1.0);
    CHECK(k.taps[0] == k.taps[4]);
    CHECK(k.taps[1] == k.taps[3]);
    CHECK(k.taps[2] == 0.375);
    const Image w = k.weights();
    CHECK(w.at(2, 2) == 0.375 * 0.375);
    CHECK(w.at(0, 0) == 0.0625 * 0.0625);
}

TEST_CASE("reduce keeps constants and the size rule") {
    const PyramidKernel k = PyramidKernel::burt_adelson();
    Image c(10, 14, 0.5);
    const Image r = rr::reduce(c, k);
    CHECK(r.rows == 5);
    CHECK(r.cols == 7);
    for (const double v : r.v) CHECK(v == 0.5); // dyadic constant stays exact

    Image big(64, 64, 0.25);
    const Image twice = rr::reduce(rr::reduce(big, k), k);
    CHECK(twice.rows == 16);
    CHECK(twice.cols == 16);

    CHECK_THROWS_AS(rr::reduce(Image(1, 5, 0.0), k), rr::Error);
}

TEST_CASE("reduce of a corner impulse matches the hand-computed value") {
    const PyramidKernel k = PyramidKernel::burt_adelson();
    Image impulse(4, 4);
    impulse.at(0, 0) = 1.0;
    const Image r = rr::reduce(impulse, k);
    REQUIRE(r.rows == 2);
    REQUIRE(r.cols == 2);
    // Taps reaching the replicated corner sample: k in {0,1,2} ->
    // 0.375 + 0.25 + 0.0625 = 0.6875 per axis.
    CHECK(r.at(0, 0) == doctest::Approx(0.6875 * 0.6875).epsilon(1e-14));
    const Image direct = rr::ref::reduce(impulse, k);
    CHECK(max_abs_diff(r, direct) < 1e-14);
}

TEST_CASE("reduce agrees with the direct convolution reference") {
    const PyramidKernel k = PyramidKernel::burt_adelson();
    std::mt19937 rng(23);
    for (const auto& [rows, cols] : {std::pair{16, 16}, {15, 21}, {9, 32}}) {
        const Image img = random_frame(rng, rows, cols);
        CHECK(max_abs_diff(rr::reduce(img, k), rr::ref::reduce(img, k)) < 1e-12);
    }
}

TEST_CASE("expand keeps constants and validates target dims") {
    const PyramidKernel k = PyramidKernel::burt_adelson();
    Image c(5, 7, 0.5);
    const Image even = rr::expand(c, 10, 14, k);
    for (const double v : even.v) CHECK(v == 0.5);
    const Image odd = rr::expand(c, 9, 13, k);
    for (const double v : odd.v) CHECK(v == 0.5);
    CHECK_THROWS_AS(rr::expand(c, 12, 14, k), rr::Error);
}

TEST_CASE("expand(reduce(ramp)) stays close to the ramp") {
    const PyramidKernel k = PyramidKernel::burt_adelson();
    Image ramp(64, 64);
    for (int r = 0; r < 64; ++r)
        for (int c = 0; c < 64; ++c) ramp.at(r, c) = (r + c) / 126.0;
    const Image down = rr::reduce(ramp, k);
    const Image back = rr::expand(down, 64, 64, k);
    CHECK(max_abs_diff(ramp, back) < 0.02);
}

TEST_CASE("laplacian level dims follow the ceiling rule") {
    const PyramidKernel k = PyramidKernel::burt_adelson();
    const Image frame(288, 360, 0.3);
    const rr::LaplacianStack stack = rr::build_laplacian(frame, 3, k);
    REQUIRE(stack.level_count() == 3);
    CHECK(stack.levels[0].rows == 288);
    CHECK(stack.levels[0].cols == 360);
    CHECK(stack.levels[1].rows == 144);
    CHECK(stack.levels[1].cols == 180);
    CHECK(stack.levels[2].rows == 72);
    CHECK(stack.levels[2].cols == 90);
}

TEST_CASE("constant frame leaves zero detail levels") {
    const PyramidKernel k = PyramidKernel::burt_adelson();
    const rr::LaplacianStack stack = rr::build_laplacian(Image(32, 32, 0.5), 3, k);
    for (int m = 0; m < 2; ++m)
        for (const double v : stack.levels[m].v) CHECK(v == 0.0);
    for (const double v : stack.levels[2].v) CHECK(v == 0.5);
}

TEST_CASE("too many levels rejected") {
    const PyramidKernel k = PyramidKernel::burt_adelson();
    CHECK_THROWS_AS(rr::build_laplacian(Image(8, 8, 0.1), 4, k), rr::Error);
    CHECK_NOTHROW(rr::build_laplacian(Image(8, 8, 0.1), 3, k));
    CHECK_THROWS_AS(rr::build_laplacian(Image(8, 8, 0.1), 1, k), rr::Error);
}

TEST_CASE("collapse reconstructs random frames") {
    const PyramidKernel k = PyramidKernel::burt_adelson();
    std::mt19937 rng(29);
    for (const auto& [rows, cols] : {std::pair{64, 64}, {37, 53}, {30, 41}}) {
        const Image frame = random_frame(rng, rows, cols);
        const Image back = rr::collapse(rr::build_laplacian(frame, 3, k), k);
        CHECK(max_abs_diff(frame, back) < 1e-6);
    }
}

TEST_CASE("riesz transform of constants is zero") {
    const auto [r1, r2] = rr::riesz_transform(Image(16, 24, 0.7));
    for (const double v : r1.v) CHECK(std::abs(v) < 1e-12);
    for (const double v : r2.v) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("riesz transform is the quadrature pair of oriented sinusoids") {
    const int n = 64;
    const double w0 = 2.0 * std::acos(-1.0) * 6.0 / n;

    Image rows_wave(n, n), cols_wave(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            rows_wave.at(r, c) = std::cos(w0 * r);
            cols_wave.at(r, c) = std::cos(w0 * c);
        }

    const auto [r1a, r2a] = rr::riesz_transform(rows_wave);
    const auto [r1b, r2b] = rr::riesz_transform(cols_wave);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            CHECK(std::abs(r1a.at(r, c) - std::sin(w0 * r)) < 1e-6);
            CHECK(std::abs(r2a.at(r, c)) < 1e-6);
            CHECK(std::abs(r1b.at(r, c)) < 1e-6);
            CHECK(std::abs(r2b.at(r, c) - std::sin(w0 * c)) < 1e-6);
        }
}

TEST_CASE("riesz quadrature energy is flat for oriented waves") {
    const int n = 64;
    const double pi2 = 2.0 * std::acos(-1.0);
    Image wave(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) wave.at(r, c) = std::cos(pi2 * (3.0 * r + 5.0 * c) / n);
    const auto [r1, r2] = rr::riesz_transform(wave);
    double mean = 0.0, mean_sq = 0.0;
    for (int r = 8; r < n - 8; ++r)
        for (int c = 8; c < n - 8; ++c) {
            const double e = wave.at(r, c) * wave.at(r, c) + r1.at(r, c) * r1.at(r, c) +
                             r2.at(r, c) * r2.at(r, c);
            mean += e;
            mean_sq += e * e;
        }
    const double count = (n - 16.0) * (n - 16.0);
    mean /= count;
    mean_sq /= count;
    const double cov = std::sqrt(std::max(0.0, mean_sq - mean * mean)) / mean;
    CHECK(cov < 0.05);
}

TEST_CASE("build_riesz keeps shapes and zeroes constants") {
    const PyramidKernel k = PyramidKernel::burt_adelson();
    const rr::LaplacianStack stack = rr::build_laplacian(Image(48, 40, 0.5), 3, k);
    const rr::RieszStack rz = rr::build_riesz(stack);
    REQUIRE(rz.bands.size() == 2);
    for (int m = 0; m < 2; ++m) {
        CHECK(rz.bands[m].p.same_shape(stack.levels[m]));
        CHECK(rz.bands[m].r1.same_shape(stack.levels[m]));
        CHECK(rz.bands[m].r2.same_shape(stack.levels[m]));
        for (const double v : rz.bands[m].r1.v) CHECK(std::abs(v) < 1e-12);
        for (const double v : rz.bands[m].r2.v) CHECK(std::abs(v) < 1e-12);
    }
    CHECK(rz.residual.same_shape(stack.levels[2]));
}

TEST_CASE("riesz transform matches a naive DFT oracle") {
    // Independent O(n^4) evaluation of F^-1(-j w1/|w| F(x)) on a small grid.
    const int rows = 12, cols = 10;
    std::mt19937 rng(31);
    const Image img = random_frame(rng, rows, cols);
    const auto [r1, r2] = rr::riesz_transform(img);

    const double pi2 = 2.0 * std::acos(-1.0);
    using cd = std::complex<double>;
    std::vector<cd> spec(static_cast<size_t>(rows) * cols);
    for (int kr = 0; kr < rows; ++kr)
        for (int kc = 0; kc < cols; ++kc) {
            cd acc = 0.0;
            for (int r = 0; r < rows; ++r)
                for (int c = 0; c < cols; ++c)
                    acc += img.at(r, c) * std::exp(cd(0.0, -pi2 * (double(kr) * r / rows +
                                                                  double(kc) * c / cols)));
            spec[static_cast<size_t>(kr) * cols + kc] = acc;
        }
    Image o1(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            cd acc = 0.0;
            for (int kr = 0; kr < rows; ++kr)
                for (int kc = 0; kc < cols; ++kc) {
                    const int skr = kr <= rows / 2 ? kr : kr - rows;
                    const int skc = kc <= cols / 2 ? kc : kc - cols;
                    const double wr = pi2 * skr / rows;
                    const double wc = pi2 * skc / cols;
                    const double norm = std::hypot(wr, wc);
                    double m1 = norm == 0.0 ? 0.0 : wr / norm;
                    if (rows % 2 == 0 && kr == rows / 2) m1 = 0.0;
                    acc += cd(0.0, -m1) * spec[static_cast<size_t>(kr) * cols + kc] *
                           std::exp(cd(0.0, pi2 * (double(kr) * r / rows + double(kc) * c / cols)));
                }
            o1.at(r, c) = acc.real() / (rows * cols);
        }
    CHECK(max_abs_diff(r1, o1) < 1e-9);
}

TEST_CASE("perfect reconstruction over 200 random frames") {
    const PyramidKernel k = PyramidKernel::burt_adelson();
    std::mt19937 rng(37);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const Image frame = random_frame(rng, 64, 64);
        const Image back = rr::collapse(rr::build_laplacian(frame, 3, k), k);
        worst = std::max(worst, max_abs_diff(frame, back));
    }
    CHECK(worst < 1e-6);
}

}
