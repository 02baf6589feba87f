#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "texret/similarity.hpp"

using namespace texret;

namespace {

FeatureVector make_fv(FeatureMethod method, std::vector<SubbandRef> layout,
                      std::vector<double> values) {
    FeatureVector fv;
    fv.method = method;
    fv.layout = std::move(layout);
    fv.values = std::move(values);
    return fv;
}

}  // namespace

TEST_CASE("identical vectors are at distance zero") {
    const auto fv = make_fv(FeatureMethod::GGD1, {{1, 1}, {1, 0}},
                            {1.0, 2.0, 0.5, 1.5});
    CHECK(distance(fv, fv, Metric::KLD) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(distance(fv, fv, Metric::ED) == 0.0);
}

TEST_CASE("single-subband KLD distance matches the Gaussian oracle") {
    const auto q = make_fv(FeatureMethod::GGD1, {{1, 1}},
                           {std::sqrt(2.0), 2.0});
    const auto t = make_fv(FeatureMethod::GGD1, {{1, 1}},
                           {2.0 * std::sqrt(2.0), 2.0});
    CHECK(distance(q, t, Metric::KLD) == doctest::Approx(1.125).epsilon(1e-9));
    CHECK(distance(q, t, Metric::KLD) == distance(t, q, Metric::KLD));
}

TEST_CASE("single-coordinate Euclidean distance") {
    const auto q = make_fv(FeatureMethod::E, {{1, 1}}, {1.75, 2.5});
    const auto t = make_fv(FeatureMethod::E, {{1, 1}}, {1.75, 3.5});
    CHECK(distance(q, t, Metric::ED) == 1.0);
}

TEST_CASE("incompatible vectors are rejected") {
    const auto ggd = make_fv(FeatureMethod::GGD1, {{1, 1}}, {1.0, 2.0});
    const auto energy = make_fv(FeatureMethod::E, {{1, 1}}, {1.0, 2.0});
    const auto other_layout = make_fv(FeatureMethod::GGD1, {{2, 1}}, {1.0, 2.0});
    CHECK_THROWS_AS(distance(ggd, energy, Metric::ED), Error);
    CHECK_THROWS_AS(distance(ggd, other_layout, Metric::KLD), Error);
    CHECK_THROWS_AS(distance(energy, energy, Metric::KLD), Error);
}

TEST_CASE("the approximation term can be excluded") {
    const auto q = make_fv(FeatureMethod::GGD1, {{1, 1}, {1, 0}},
                           {1.0, 2.0, 1.0, 1.0});
    const auto t = make_fv(FeatureMethod::GGD1, {{1, 1}, {1, 0}},
                           {1.0, 2.0, 2.0, 1.0});
    DistanceOptions no_approx;
    no_approx.include_approx = false;
    CHECK(distance(q, t, Metric::KLD) > 1e-3);
    CHECK(std::abs(distance(q, t, Metric::KLD, no_approx)) < 1e-12);
}

TEST_CASE("metric symmetry and ED triangle inequality on random vectors") {
    oracle::Rng rng(10);
    const std::vector<SubbandRef> layout{{1, 1}, {1, 2}, {1, 0}};
    auto random_fv = [&](FeatureMethod m) {
        std::vector<double> v;
        for (int i = 0; i < 6; ++i) {
            v.push_back(i % 2 ? rng.uniform(0.3, 4.0)     // beta-ish
                              : std::exp(rng.uniform(-2.0, 3.0)));
        }
        return make_fv(m, layout, v);
    };
    for (int i = 0; i < 50; ++i) {
        const auto a = random_fv(FeatureMethod::GGD1);
        const auto b = random_fv(FeatureMethod::GGD1);
        const auto c = random_fv(FeatureMethod::GGD1);
        CHECK(distance(a, b, Metric::KLD) == distance(b, a, Metric::KLD));
        CHECK(distance(a, b, Metric::ED) == distance(b, a, Metric::ED));
        CHECK(distance(a, b, Metric::ED) + distance(b, c, Metric::ED) >=
              distance(a, c, Metric::ED) - 1e-12);
        CHECK(distance(a, b, Metric::KLD) >= 0.0);
    }
}

TEST_CASE("default metric follows the feature method") {
    CHECK(default_metric(FeatureMethod::GGD1) == Metric::KLD);
    CHECK(default_metric(FeatureMethod::GGD2) == Metric::KLD);
    CHECK(default_metric(FeatureMethod::E) == Metric::ED);
}
