#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numeric>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "texret/transform.hpp"

using namespace texret;

namespace {

double matrix_energy(const Matrix& m) {
    double e = 0.0;
    for (double v : m.data) {
        e += v * v;
    }
    return e;
}

GrayImage grating(std::size_t size, long ky, long kx, double phase = 0.3) {
    GrayImage img(size, size);
    for (std::size_t r = 0; r < size; ++r) {
        for (std::size_t c = 0; c < size; ++c) {
            img.at(r, c) =
                std::cos(2.0 * M_PI *
                             (static_cast<double>(ky) * static_cast<double>(r) +
                              static_cast<double>(kx) * static_cast<double>(c)) /
                             static_cast<double>(size) +
                         phase);
        }
    }
    return img;
}

}  // namespace

TEST_CASE("pseudo-Gaussian kernel normalization and symmetry") {
    for (std::size_t level : {1, 2, 3}) {
        for (double sigma0 : {0.7, 1.0, 1.9}) {
            const auto k = pseudo_gaussian_kernel(level, sigma0);
            CHECK(k.size() % 2 == 1);
            const double sum = std::accumulate(k.begin(), k.end(), 0.0);
            CHECK(std::abs(sum - 1.0) < 1e-12);
            for (std::size_t i = 0; i < k.size() / 2; ++i) {
                CHECK(k[i] == k[k.size() - 1 - i]);
            }
        }
    }
}

TEST_CASE("level-1 unit-sigma kernel center weight") {
    const auto k = pseudo_gaussian_kernel(1, 1.0);
    REQUIRE(k.size() == 9);  // radius ceil(4*1) = 4
    // Center weight is exp(0)/Z with Z = sum_{i=-4..4} exp(-i^2/2).
    double z = 0.0;
    for (int i = -4; i <= 4; ++i) {
        z += std::exp(-0.5 * i * i);
    }
    CHECK(k[4] == doctest::Approx(1.0 / z).epsilon(1e-12));
    CHECK(k[4] == doctest::Approx(0.3990).epsilon(2e-4));
}

TEST_CASE("impulse row detail keeps 1 - center weight") {
    std::vector<double> impulse(33, 0.0);
    impulse[16] = 1.0;
    const auto smoothed = convolve_mirror(impulse, pseudo_gaussian_kernel(1, 1.0));
    CHECK(1.0 - smoothed[16] == doctest::Approx(0.6010).epsilon(2e-4));
}

TEST_CASE("mirror extension preserves constants at every level") {
    const Matrix c(20, 17, 100.0);
    const RlpPyramid pyr = rlp_decompose(c, 3, 1.0);
    REQUIRE(pyr.details.size() == 3);
    for (const auto& d : pyr.details) {
        for (double v : d.data) {
            CHECK(std::abs(v) < 1e-12);
        }
    }
    for (double v : pyr.approximation.data) {
        CHECK(v == doctest::Approx(100.0).epsilon(1e-13));
    }
}

TEST_CASE("pyramid telescopes back to the input") {
    for (std::uint64_t seed : {1ULL, 2ULL}) {
        const GrayImage img = oracle::random_matrix(64, 48, seed);
        const RlpPyramid pyr = rlp_decompose(img, 3, 1.0);
        double max_err = 0.0;
        for (std::size_t i = 0; i < img.size(); ++i) {
            double sum = pyr.approximation.data[i];
            for (const auto& d : pyr.details) {
                sum += d.data[i];
            }
            max_err = std::max(max_err, std::abs(sum - img.data[i]));
        }
        CHECK(max_err < 1e-10);
    }
}

TEST_CASE("rlp rejects zero levels") {
    CHECK_THROWS_AS(rlp_decompose(GrayImage(8, 8), 0, 1.0), Error);
}

TEST_CASE("wedge map partitions the frequency plane") {
    for (std::size_t d : {2, 4, 8, 16}) {
        const std::size_t H = 16, W = 16;
        const auto map = dfb_wedge_map(H, W, d);
        std::vector<std::size_t> counts(d, 0);
        for (int w : map) {
            REQUIRE(w >= 0);
            REQUIRE(w < static_cast<int>(d));
            ++counts[static_cast<std::size_t>(w)];
        }
        CHECK(std::accumulate(counts.begin(), counts.end(), 0UL) == H * W);
        // Antipodal symmetry keeps filtered outputs real.
        for (std::size_t u = 0; u < H; ++u) {
            for (std::size_t v = 0; v < W; ++v) {
                CHECK(map[u * W + v] ==
                      map[((H - u) % H) * W + ((W - v) % W)]);
            }
        }
    }
}

TEST_CASE("wedge map boundary and axis conventions") {
    const std::size_t H = 16, W = 16;
    const auto map = dfb_wedge_map(H, W, 8);
    CHECK(map[0] == 0);                    // DC
    CHECK(map[(H / 2) * W + 3] == 0);      // Nyquist row
    CHECK(map[5 * W + W / 2] == 0);        // Nyquist column
    CHECK(map[0 * W + 1] == 0);            // horizontal axis, theta = 0
    CHECK(map[1 * W + 0] == 3);            // vertical axis boundary -> D/2 - 1
    CHECK(map[1 * W + 1] == 1);            // diagonal boundary -> D/4 - 1
    CHECK(map[1 * W + (W - 1)] == 5);      // anti-diagonal -> 3D/4 - 1
    // Interior angle: atan2(3, 1) = 1.249 -> wedge floor(1.249*8/pi) = 3.
    CHECK(map[3 * W + 1] == 3);
}

TEST_CASE("dfb handles the zero matrix") {
    const auto bands = dfb_decompose(Matrix(16, 16), 4, false);
    REQUIRE(bands.size() == 4);
    for (const auto& b : bands) {
        CHECK(matrix_energy(b) == 0.0);
    }
}

TEST_CASE("undecimated dfb partitions energy") {
    for (std::size_t d : {2, 4, 8}) {
        const Matrix detail = oracle::random_matrix(32, 32, 100 + d, -1.0, 1.0);
        const auto bands = dfb_decompose(detail, d, false);
        REQUIRE(bands.size() == d);
        double sum = 0.0;
        for (const auto& b : bands) {
            CHECK(b.rows == detail.rows);
            CHECK(b.cols == detail.cols);
            sum += matrix_energy(b);
        }
        const double in = matrix_energy(detail);
        CHECK(std::abs(sum - in) / in < 1e-9);
    }
}

TEST_CASE("critical sampling keeps the input coefficient count") {
    for (std::size_t d : {2, 4, 8, 16}) {
        const Matrix detail = oracle::random_matrix(32, 64, 200 + d, -1.0, 1.0);
        const auto bands = dfb_decompose(detail, d, true);
        std::size_t total = 0;
        for (const auto& b : bands) {
            total += b.size();
        }
        CHECK(total == detail.size());
    }
    // 128x128 with D=8: every subband holds 128*128/8 coefficients.
    const Matrix detail = oracle::random_matrix(128, 128, 5, -1.0, 1.0);
    for (const auto& b : dfb_decompose(detail, 8, true)) {
        CHECK(b.size() == 2048);
    }
}

TEST_CASE("critical sampling validates divisibility") {
    CHECK_THROWS_AS(dfb_decompose(Matrix(30, 32), 8, true), Error);
    CHECK_THROWS_AS(dfb_decompose(Matrix(31, 32), 2, true), Error);
}

TEST_CASE("dfb rejects unsupported direction counts") {
    CHECK_THROWS_AS(dfb_decompose(Matrix(16, 16), 3, false), Error);
    CHECK_THROWS_AS(dfb_decompose(Matrix(16, 16), 32, false), Error);
}

TEST_CASE("rct_plus subband counts and canonical order") {
    const GrayImage img = oracle::random_matrix(32, 32, 9);
    SUBCASE("17 subbands for D = (8, 4, 4)") {
        RctPlusConfig cfg;
        cfg.levels = 3;
        cfg.directions = {8, 4, 4};
        const auto decomp = rct_plus(img, cfg);
        CHECK(decomp.subbands.size() == 17);
    }
    SUBCASE("25 subbands for D = (8, 8, 8)") {
        const auto decomp = rct_plus(img, RctPlusConfig{});
        REQUIRE(decomp.subbands.size() == 25);
        std::size_t i = 0;
        for (std::size_t l = 1; l <= 3; ++l) {
            for (std::size_t d = 1; d <= 8; ++d, ++i) {
                CHECK(decomp.subbands[i].scale == l);
                CHECK(decomp.subbands[i].direction == d);
            }
        }
        CHECK(decomp.subbands.back().is_approximation());
        CHECK(decomp.subbands.back().scale == 3);
    }
}

TEST_CASE("rct_plus of a constant image") {
    RctPlusConfig cfg;
    cfg.critically_sampled = false;
    const auto decomp = rct_plus(GrayImage(32, 32, 77.0), cfg);
    for (const auto& sb : decomp.subbands) {
        if (sb.is_approximation()) {
            for (double v : sb.coefficients.data) {
                CHECK(v == doctest::Approx(77.0).epsilon(1e-13));
            }
        } else {
            for (double v : sb.coefficients.data) {
                CHECK(std::abs(v) < 1e-11);
            }
        }
    }
}

TEST_CASE("rct_plus config validation") {
    const GrayImage img(32, 32, 1.0);
    RctPlusConfig cfg;
    SUBCASE("direction list length") {
        cfg.directions = {8, 8};
        CHECK_THROWS_AS(rct_plus(img, cfg), Error);
    }
    SUBCASE("bad direction count") {
        cfg.directions = {8, 8, 6};
        CHECK_THROWS_AS(rct_plus(img, cfg), Error);
    }
    SUBCASE("bad sigma") {
        cfg.sigma0 = 0.0;
        CHECK_THROWS_AS(rct_plus(img, cfg), Error);
    }
}

TEST_CASE("rct_plus is linear") {
    const GrayImage i1 = oracle::random_matrix(32, 32, 21, -1.0, 1.0);
    const GrayImage i2 = oracle::random_matrix(32, 32, 22, -1.0, 1.0);
    const double a = 2.5, b = -1.25;
    GrayImage mix(32, 32);
    for (std::size_t i = 0; i < mix.size(); ++i) {
        mix.data[i] = a * i1.data[i] + b * i2.data[i];
    }
    for (bool sampled : {false, true}) {
        RctPlusConfig cfg;
        cfg.critically_sampled = sampled;
        const auto d1 = rct_plus(i1, cfg);
        const auto d2 = rct_plus(i2, cfg);
        const auto dm = rct_plus(mix, cfg);
        double max_rel = 0.0;
        for (std::size_t s = 0; s < dm.subbands.size(); ++s) {
            for (std::size_t i = 0; i < dm.subbands[s].coefficients.size(); ++i) {
                const double expected = a * d1.subbands[s].coefficients.data[i] +
                                        b * d2.subbands[s].coefficients.data[i];
                const double got = dm.subbands[s].coefficients.data[i];
                max_rel = std::max(max_rel, std::abs(got - expected));
            }
        }
        CHECK(max_rel < 1e-9);
    }
}

TEST_CASE("gratings land in the matching wedge") {
    // On-grid grating with frequency angle atan2(9, 6) = 0.983, inside
    // wedge floor(0.983 * 8 / pi) = 2.
    const GrayImage img = grating(64, 9, 6);
    RctPlusConfig cfg;
    cfg.levels = 2;
    cfg.directions = {8, 8};
    cfg.critically_sampled = false;
    const auto decomp = rct_plus(img, cfg);
    for (std::size_t l = 1; l <= 2; ++l) {
        double total = 0.0;
        double matched = 0.0;
        for (const auto& sb : decomp.subbands) {
            if (sb.scale != l || sb.is_approximation()) {
                continue;
            }
            const double e = matrix_energy(sb.coefficients);
            total += e;
            if (sb.direction == 3) {  // wedge 2, 1-based direction 3
                matched = e;
            }
        }
        REQUIRE(total > 1e-9);
        CHECK(matched / total >= 0.9);
    }
}

TEST_CASE("decomposition dump writes one file per subband") {
    fixtures::TempDir dir;
    RctPlusConfig cfg;
    cfg.levels = 1;
    cfg.directions = {2};
    const auto decomp = rct_plus(oracle::random_matrix(16, 16, 4), cfg);
    dump_decomposition(decomp, dir.file("dump"));
    std::ifstream in(dir.file("dump") + "/subband_1_1.bin", std::ios::binary);
    REQUIRE(in.good());
    std::string header;
    std::getline(in, header);
    CHECK(header == "RCTP1 1 1 8 16");  // wedge 0 of D=2: rows by 2
    std::vector<double> values(8 * 16);
    in.read(reinterpret_cast<char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(double)));
    CHECK(in.gcount() ==
          static_cast<std::streamsize>(values.size() * sizeof(double)));
    CHECK(values == decomp.subbands[0].coefficients.data);
}
