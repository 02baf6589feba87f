#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "texret/evaluation.hpp"

using namespace texret;

namespace {

LabeledIndex toy_index(std::size_t classes, std::size_t per_class,
                       std::uint64_t seed) {
    oracle::Rng rng(seed);
    LabeledIndex index;
    index.method = FeatureMethod::E;
    index.config.levels = 1;
    index.config.directions = {2};
    const auto layout = canonical_layout(index.config);
    // Class centers on a circle: every class is one-vs-rest separable and
    // its members are mutually closest.
    for (std::size_t c = 0; c < classes; ++c) {
        const double angle = 2.0 * M_PI * static_cast<double>(c) /
                             static_cast<double>(classes);
        for (std::size_t i = 0; i < per_class; ++i) {
            char id[32];
            std::snprintf(id, sizeof(id), "c%zu_%zu", c, i);
            FeatureVector fv;
            fv.method = FeatureMethod::E;
            fv.layout = layout;
            fv.values = {20.0 * std::cos(angle) + rng.uniform(-1.0, 1.0),
                         20.0 * std::sin(angle) + rng.uniform(-1.0, 1.0),
                         rng.uniform(-1.0, 1.0),
                         0.0,
                         0.0,
                         0.0};
            index.entries.push_back({id, "cls" + std::to_string(c), std::move(fv)});
        }
    }
    return index;
}

RetrievalResult fake_result(std::vector<std::pair<std::string, std::string>> rows) {
    RetrievalResult r;
    r.query_id = "q";
    r.requested = rows.size();
    for (auto& [id, label] : rows) {
        r.ranked.push_back({id, label, 1.0});
    }
    return r;
}

// Independent AR% re-implementation: exhaustive ranking with its own
// arithmetic, no calls into the retrieval or similarity modules.
double brute_force_ar(const LabeledIndex& index, std::size_t top_n) {
    struct Rate {
        std::string id;
        double rate;
    };
    std::vector<Rate> rates;
    for (const auto& q : index.entries) {
        std::vector<std::pair<double, const LabeledEntry*>> order;
        for (const auto& t : index.entries) {
            if (t.id == q.id) {
                continue;
            }
            double sum = 0.0;
            for (std::size_t j = 0; j < q.features.values.size(); ++j) {
                const double d = q.features.values[j] - t.features.values[j];
                sum += d * d;
            }
            order.emplace_back(std::sqrt(sum), &t);
        }
        std::sort(order.begin(), order.end(),
                  [](const auto& a, const auto& b) {
                      if (a.first != b.first) return a.first < b.first;
                      return a.second->id < b.second->id;
                  });
        const std::size_t used = std::min(top_n, order.size());
        std::size_t relevant = 0;
        for (std::size_t i = 0; i < used; ++i) {
            relevant += order[i].second->label == q.label;
        }
        rates.push_back(
            {q.id, static_cast<double>(relevant) / static_cast<double>(used)});
    }
    std::sort(rates.begin(), rates.end(),
              [](const Rate& a, const Rate& b) { return a.id < b.id; });
    double sum = 0.0;
    for (const auto& r : rates) {
        sum += r.rate;
    }
    return 100.0 * sum / static_cast<double>(rates.size());
}

}  // namespace

TEST_CASE("retrieval rate counts same-class matches") {
    SUBCASE("all relevant") {
        std::vector<std::pair<std::string, std::string>> rows(
            15, {"id", "bark"});
        CHECK(retrieval_rate(fake_result(rows), "bark") == 1.0);
    }
    SUBCASE("12 of 15") {
        std::vector<std::pair<std::string, std::string>> rows(12, {"a", "bark"});
        for (int i = 0; i < 3; ++i) {
            rows.push_back({"b", "sand"});
        }
        CHECK(retrieval_rate(fake_result(rows), "bark") ==
              doctest::Approx(0.8));
    }
    SUBCASE("wrong predicted class retrieves nothing relevant") {
        std::vector<std::pair<std::string, std::string>> rows(15, {"a", "sand"});
        CHECK(retrieval_rate(fake_result(rows), "bark") == 0.0);
    }
    SUBCASE("empty list rates zero") {
        CHECK(retrieval_rate(fake_result({}), "bark") == 0.0);
    }
}

TEST_CASE("pipeline AR% equals the brute-force oracle exactly") {
    const LabeledIndex index = toy_index(5, 6, 99);
    EvalOptions opts;
    opts.top_n = 15;
    const EvalReport report = evaluate(index, Scheme::traditional, opts);
    CHECK(report.ar_percent == brute_force_ar(index, 15));
    CHECK(report.queries.size() == index.entries.size());
    // Same check at a pool-limited N.
    EvalOptions small;
    small.top_n = 4;
    CHECK(evaluate(index, Scheme::traditional, small).ar_percent ==
          brute_force_ar(index, 4));
}

TEST_CASE("well-separated fixture reaches AR% = 100 on all schemes") {
    const LabeledIndex index = toy_index(4, 6, 5);
    EvalOptions opts;
    opts.top_n = 5;
    opts.train_per_class = 0;  // classifier sees the whole index
    const auto trad = evaluate(index, Scheme::traditional, opts);
    CHECK(trad.ar_percent == 100.0);
    const auto knn = evaluate(index, Scheme::knn_cbir, opts);
    CHECK(knn.ar_percent == 100.0);
    CHECK(knn.false_predictions == 0);
    const auto svm = evaluate(index, Scheme::svm_cbir, opts);
    CHECK(svm.ar_percent == 100.0);
    CHECK(svm.false_predictions == 0);
}

TEST_CASE("kNN trained on the full index never mispredicts its own entries") {
    const LabeledIndex index = toy_index(3, 5, 31);
    EvalOptions opts;
    opts.top_n = 4;
    opts.train_per_class = 0;
    const auto report = evaluate(index, Scheme::knn_cbir, opts);
    CHECK(report.false_predictions == 0);
}

TEST_CASE("entry order does not change the report") {
    const LabeledIndex index = toy_index(4, 5, 77);
    LabeledIndex shuffled = index;
    std::mt19937_64 rng(123);
    std::shuffle(shuffled.entries.begin(), shuffled.entries.end(), rng);
    for (Scheme scheme :
         {Scheme::traditional, Scheme::knn_cbir, Scheme::svm_cbir}) {
        EvalOptions opts;
        opts.top_n = 4;
        opts.train_per_class = 3;
        opts.seed = 9;
        const auto a = evaluate(index, scheme, opts);
        const auto b = evaluate(shuffled, scheme, opts);
        CHECK(a.ar_percent == b.ar_percent);
        CHECK(a.false_predictions == b.false_predictions);
    }
}

TEST_CASE("held-out evaluation restricts the query set") {
    const LabeledIndex index = toy_index(3, 6, 13);
    EvalOptions opts;
    opts.top_n = 4;
    opts.train_per_class = 4;
    opts.heldout_only = true;
    const auto report = evaluate(index, Scheme::knn_cbir, opts);
    CHECK(report.queries.size() == 3 * (6 - 4));
}

TEST_CASE("training-pool restriction caps the available matches") {
    const LabeledIndex index = toy_index(2, 8, 21);
    EvalOptions opts;
    opts.top_n = 10;
    opts.train_per_class = 3;
    opts.pool_training_only = true;
    const auto report = evaluate(index, Scheme::knn_cbir, opts);
    for (const auto& q : report.queries) {
        CHECK(q.n_used <= 3);
    }
}

TEST_CASE("cross-validation accuracy lands in the report") {
    const LabeledIndex index = toy_index(3, 8, 41);
    EvalOptions opts;
    opts.top_n = 4;
    opts.train_per_class = 0;
    opts.cv_folds = 4;
    const auto report = evaluate(index, Scheme::knn_cbir, opts);
    REQUIRE(report.cv_accuracy.has_value());
    CHECK(*report.cv_accuracy > 0.9);  // well-separated clusters
}

TEST_CASE("comparison rows and formatting") {
    EvalReport ml, trad;
    ml.scheme = Scheme::svm_cbir;
    ml.method = FeatureMethod::GGD2;
    ml.top_n = 15;
    ml.ar_percent = 97.59;
    trad.scheme = Scheme::traditional;
    trad.method = FeatureMethod::GGD2;
    trad.top_n = 15;
    trad.ar_percent = 64.95;
    SUBCASE("difference in percentage points") {
        const auto row = compare_pair(ml, trad);
        CHECK(row.difference == doctest::Approx(32.64));
        const std::vector<ComparisonRow> rows{row};
        const std::string csv = comparison_csv(rows);
        CHECK(csv.find("+32.64") != std::string::npos);
        CHECK(csv.find("GGD2") != std::string::npos);
    }
    SUBCASE("kNN row from the other table") {
        EvalReport knn = ml;
        knn.scheme = Scheme::knn_cbir;
        knn.method = FeatureMethod::GGD1;
        knn.ar_percent = 99.69;
        EvalReport t2 = trad;
        t2.method = FeatureMethod::GGD1;
        t2.ar_percent = 77.15;
        CHECK(compare_pair(knn, t2).difference == doctest::Approx(22.54));
    }
    SUBCASE("identical reports differ by zero") {
        const auto row = compare_pair(trad, trad);
        CHECK(row.difference == 0.0);
        const std::vector<ComparisonRow> rows{row};
        CHECK(comparison_csv(rows).find(",0.00\n") != std::string::npos);
    }
    SUBCASE("mismatched settings are rejected") {
        EvalReport other = trad;
        other.method = FeatureMethod::E;
        CHECK_THROWS_AS(compare_pair(ml, other), Error);
        other = trad;
        other.top_n = 10;
        CHECK_THROWS_AS(compare_pair(ml, other), Error);
    }
    SUBCASE("table pairs ML schemes with their traditional counterpart") {
        const std::vector<EvalReport> reports{ml, trad};
        const auto rows = comparison_table(reports);
        REQUIRE(rows.size() == 1);
        CHECK(rows[0].scheme_a == Scheme::svm_cbir);
        CHECK(rows[0].scheme_b == Scheme::traditional);
    }
}

TEST_CASE("report CSV shape") {
    const LabeledIndex index = toy_index(3, 4, 3);
    EvalOptions opts;
    opts.top_n = 3;
    opts.train_per_class = 0;
    std::vector<EvalReport> reports{evaluate(index, Scheme::traditional, opts),
                                    evaluate(index, Scheme::knn_cbir, opts)};
    const std::string csv = report_csv(reports);
    CHECK(csv.find("scheme,method,AR_percent,false_predictions,accuracy,"
                   "n_queries") == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
    const std::string pq = per_query_csv(reports[1]);
    CHECK(std::count(pq.begin(), pq.end(), '\n') ==
          static_cast<long>(index.entries.size()) + 1);
    CHECK(pq.find("cls0") != std::string::npos);
}
