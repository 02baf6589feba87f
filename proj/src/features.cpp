#include "texret/features.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "texret/image.hpp"

namespace texret {

namespace {

GgdFit fit_subband(const Subband& sb, GgdEstimator estimator) {
    std::span<const double> samples(sb.coefficients.data);
    std::vector<double> centered;
    if (sb.is_approximation()) {
        double mean = 0.0;
        for (double v : samples) {
            mean += v;
        }
        mean /= static_cast<double>(samples.size());
        centered.reserve(samples.size());
        for (double v : samples) {
            centered.push_back(v - mean);
        }
        samples = centered;
    }
    return estimator == GgdEstimator::MME ? fit_mme(samples) : fit_mle(samples);
}

std::string format_value(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

[[noreturn]] void parse_error(const std::string& path, std::size_t lineno,
                              const std::string& what) {
    throw Error(Error::Kind::format,
                path + ":" + std::to_string(lineno) + ": " + what);
}

}  // namespace

std::string to_string(FeatureMethod m) {
    switch (m) {
        case FeatureMethod::GGD1: return "GGD1";
        case FeatureMethod::GGD2: return "GGD2";
        case FeatureMethod::E: return "E";
    }
    return "?";
}

FeatureMethod feature_method_from_string(const std::string& s) {
    if (s == "GGD1") return FeatureMethod::GGD1;
    if (s == "GGD2") return FeatureMethod::GGD2;
    if (s == "E") return FeatureMethod::E;
    throw Error(Error::Kind::config, "unknown feature method '" + s + "'");
}

std::vector<SubbandRef> canonical_layout(const RctPlusConfig& config) {
    config.validate();
    std::vector<SubbandRef> layout;
    for (std::size_t l = 0; l < config.levels; ++l) {
        for (std::size_t d = 1; d <= config.directions[l]; ++d) {
            layout.push_back({l + 1, d});
        }
    }
    layout.push_back({config.levels, 0});
    return layout;
}

FeatureVector extract_ggd_features(const RctPlusDecomposition& decomp,
                                   GgdEstimator estimator) {
    if (decomp.subbands.empty()) {
        throw Error(Error::Kind::config, "empty decomposition");
    }
    FeatureVector fv;
    fv.method = estimator == GgdEstimator::MME ? FeatureMethod::GGD1
                                               : FeatureMethod::GGD2;
    fv.layout.reserve(decomp.subbands.size());
    fv.values.reserve(2 * decomp.subbands.size());
    for (const auto& sb : decomp.subbands) {
        const GgdFit fit = fit_subband(sb, estimator);
        fv.layout.push_back({sb.scale, sb.direction});
        fv.values.push_back(fit.params.alpha);
        fv.values.push_back(fit.params.beta);
    }
    return fv;
}

FeatureVector extract_energy_features(const RctPlusDecomposition& decomp) {
    if (decomp.subbands.empty()) {
        throw Error(Error::Kind::config, "empty decomposition");
    }
    FeatureVector fv;
    fv.method = FeatureMethod::E;
    fv.layout.reserve(decomp.subbands.size());
    fv.values.reserve(2 * decomp.subbands.size());
    for (const auto& sb : decomp.subbands) {
        double abs_sum = 0.0, sq_sum = 0.0;
        for (double v : sb.coefficients.data) {
            abs_sum += std::abs(v);
            sq_sum += v * v;
        }
        const double n = static_cast<double>(sb.coefficients.size());
        fv.layout.push_back({sb.scale, sb.direction});
        fv.values.push_back(abs_sum / n);
        fv.values.push_back(std::sqrt(sq_sum / n));
    }
    return fv;
}

FeatureVector extract_features(const RctPlusDecomposition& decomp,
                               FeatureMethod method) {
    switch (method) {
        case FeatureMethod::GGD1:
            return extract_ggd_features(decomp, GgdEstimator::MME);
        case FeatureMethod::GGD2:
            return extract_ggd_features(decomp, GgdEstimator::MLE);
        case FeatureMethod::E:
            return extract_energy_features(decomp);
    }
    throw Error(Error::Kind::config, "unknown feature method");
}

std::vector<std::string> LabeledIndex::class_labels() const {
    std::set<std::string> labels;
    for (const auto& e : entries) {
        labels.insert(e.label);
    }
    return {labels.begin(), labels.end()};
}

void LabeledIndex::validate() const {
    const auto layout = canonical_layout(config);
    std::set<std::string> ids;
    for (const auto& e : entries) {
        if (e.features.method != method) {
            throw Error(Error::Kind::incompatible,
                        "entry '" + e.id + "' uses method " +
                            to_string(e.features.method) + ", index is " +
                            to_string(method));
        }
        if (e.features.layout != layout) {
            throw Error(Error::Kind::incompatible,
                        "entry '" + e.id + "' has a different subband layout");
        }
        if (e.features.values.size() != 2 * layout.size()) {
            throw Error(Error::Kind::incompatible,
                        "entry '" + e.id + "' has wrong feature length");
        }
        if (!ids.insert(e.id).second) {
            throw Error(Error::Kind::incompatible,
                        "duplicate image id '" + e.id + "'");
        }
    }
}

void save_index(const LabeledIndex& index, const std::string& path) {
    index.validate();
    std::ostringstream out;
    out << "#method=" << to_string(index.method) << "\n";
    out << "#L=" << index.config.levels << "\n";
    out << "#D=";
    for (std::size_t i = 0; i < index.config.directions.size(); ++i) {
        out << (i ? "," : "") << index.config.directions[i];
    }
    out << "\n#sampled=" << (index.config.critically_sampled ? 1 : 0) << "\n";
    if (index.config.sigma0 != 1.0) {
        out << "#sigma0=" << format_value(index.config.sigma0) << "\n";
    }
    for (const auto& e : index.entries) {
        out << e.id << "\t" << e.label << "\t";
        for (std::size_t i = 0; i < e.features.values.size(); ++i) {
            out << (i ? "," : "") << format_value(e.features.values[i]);
        }
        out << "\n";
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) {
        throw Error(Error::Kind::io, path + ": cannot open for writing");
    }
    file << out.str();
    if (!file) {
        throw Error(Error::Kind::io, path + ": write failed");
    }
}

LabeledIndex load_index(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(Error::Kind::io, path + ": cannot open index");
    }
    LabeledIndex index;
    bool have_method = false, have_levels = false, have_dirs = false,
         have_sampled = false;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                parse_error(path, lineno, "malformed header '" + line + "'");
            }
            const std::string key = line.substr(1, eq - 1);
            const std::string value = line.substr(eq + 1);
            try {
                if (key == "method") {
                    index.method = feature_method_from_string(value);
                    have_method = true;
                } else if (key == "L") {
                    index.config.levels = std::stoul(value);
                    have_levels = true;
                } else if (key == "D") {
                    index.config.directions.clear();
                    std::stringstream ss(value);
                    std::string tok;
                    while (std::getline(ss, tok, ',')) {
                        index.config.directions.push_back(std::stoul(tok));
                    }
                    have_dirs = true;
                } else if (key == "sampled") {
                    index.config.critically_sampled = std::stoul(value) != 0;
                    have_sampled = true;
                } else if (key == "sigma0") {
                    index.config.sigma0 = std::stod(value);
                } else {
                    parse_error(path, lineno, "unknown header '" + key + "'");
                }
            } catch (const Error&) {
                throw;
            } catch (const std::exception&) {
                parse_error(path, lineno, "bad header value '" + value + "'");
            }
            continue;
        }
        if (!(have_method && have_levels && have_dirs && have_sampled)) {
            parse_error(path, lineno, "entry before complete header");
        }
        std::size_t tab1 = line.find('\t');
        std::size_t tab2 = (tab1 == std::string::npos)
                               ? std::string::npos
                               : line.find('\t', tab1 + 1);
        if (tab2 == std::string::npos) {
            parse_error(path, lineno, "expected <id>\\t<label>\\t<values>");
        }
        LabeledEntry entry;
        entry.id = line.substr(0, tab1);
        entry.label = line.substr(tab1 + 1, tab2 - tab1 - 1);
        entry.features.method = index.method;
        std::stringstream values(line.substr(tab2 + 1));
        std::string tok;
        while (std::getline(values, tok, ',')) {
            try {
                std::size_t pos = 0;
                entry.features.values.push_back(std::stod(tok, &pos));
                if (pos != tok.size()) {
                    throw std::invalid_argument(tok);
                }
            } catch (const std::exception&) {
                parse_error(path, lineno, "bad value '" + tok + "'");
            }
        }
        index.entries.push_back(std::move(entry));
    }
    if (!(have_method && have_levels && have_dirs && have_sampled)) {
        throw Error(Error::Kind::format, path + ": missing index header");
    }
    const auto layout = canonical_layout(index.config);
    for (auto& e : index.entries) {
        e.features.layout = layout;
    }
    try {
        index.validate();
    } catch (const Error& err) {
        throw Error(Error::Kind::format, path + ": " + err.what());
    }
    return index;
}

namespace {

LabeledEntry extract_entry(const std::string& id, const std::string& label,
                           const GrayImage& img, FeatureMethod method,
                           const RctPlusConfig& config) {
    return {id, label, extract_features(rct_plus(img, config), method)};
}

// Deterministic parallel map: slot i always receives item i's result.
template <typename Work>
void parallel_for(std::size_t count, std::size_t jobs, Work&& work) {
    jobs = std::max<std::size_t>(1, std::min(jobs, count));
    if (jobs == 1) {
        for (std::size_t i = 0; i < count; ++i) {
            work(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(jobs);
    for (std::size_t t = 0; t < jobs; ++t) {
        threads.emplace_back([&, t] {
            try {
                for (std::size_t i = next.fetch_add(1); i < count;
                     i = next.fetch_add(1)) {
                    work(i);
                }
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : threads) {
        th.join();
    }
    for (const auto& err : errors) {
        if (err) {
            std::rethrow_exception(err);
        }
    }
}

}  // namespace

LabeledIndex build_index(const Dataset& dataset, FeatureMethod method,
                         const RctPlusConfig& config, std::size_t jobs) {
    config.validate();
    LabeledIndex index;
    index.method = method;
    index.config = config;
    index.entries.resize(dataset.images.size());
    parallel_for(dataset.images.size(), jobs, [&](std::size_t i) {
        const auto& im = dataset.images[i];
        index.entries[i] = extract_entry(im.id, im.label, im.image, method, config);
    });
    index.validate();
    return index;
}

LabeledIndex build_index_from_manifest(const DatasetManifest& manifest,
                                       FeatureMethod method,
                                       const RctPlusConfig& config,
                                       std::size_t jobs) {
    return std::move(
        build_indices_from_manifest(manifest, {method}, config, jobs).front());
}

std::vector<LabeledIndex> build_indices_from_manifest(
    const DatasetManifest& manifest, const std::vector<FeatureMethod>& methods,
    const RctPlusConfig& config, std::size_t jobs) {
    config.validate();
    if (manifest.entries.empty()) {
        throw Error(Error::Kind::manifest, "manifest lists no images");
    }
    if (methods.empty()) {
        throw Error(Error::Kind::config, "no feature methods requested");
    }

    struct PerSource {
        // One entry list per requested method.
        std::vector<std::vector<LabeledEntry>> entries;
        std::size_t rows = 0, cols = 0;
    };
    std::vector<PerSource> results(manifest.entries.size());
    parallel_for(manifest.entries.size(), jobs, [&](std::size_t i) {
        const auto& src = manifest.entries[i];
        GrayImage img = load_image(src.path);
        results[i].entries.resize(methods.size());
        results[i].rows = manifest.tile ? *manifest.tile : img.rows;
        results[i].cols = manifest.tile ? *manifest.tile : img.cols;
        std::vector<GrayImage> tiles;
        std::vector<std::string> ids;
        if (manifest.tile) {
            const std::size_t ts = *manifest.tile;
            if (img.rows % ts != 0 || img.cols % ts != 0) {
                throw Error(Error::Kind::manifest,
                            src.path + ": tile size " + std::to_string(ts) +
                                " does not divide " + std::to_string(img.rows) +
                                "x" + std::to_string(img.cols));
            }
            const std::size_t grid_cols = img.cols / ts;
            tiles = tile_image(img, ts);
            for (std::size_t k = 0; k < tiles.size(); ++k) {
                ids.push_back(src.id + "#" + std::to_string(k / grid_cols) +
                              "_" + std::to_string(k % grid_cols));
            }
        } else {
            tiles.push_back(std::move(img));
            ids.push_back(src.id);
        }
        for (std::size_t k = 0; k < tiles.size(); ++k) {
            const auto decomp = rct_plus(tiles[k], config);
            for (std::size_t m = 0; m < methods.size(); ++m) {
                results[i].entries[m].push_back(
                    {ids[k], src.label, extract_features(decomp, methods[m])});
            }
        }
    });

    std::vector<LabeledIndex> indices(methods.size());
    for (std::size_t m = 0; m < methods.size(); ++m) {
        indices[m].method = methods[m];
        indices[m].config = config;
    }
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (results[i].rows != results[0].rows ||
            results[i].cols != results[0].cols) {
            throw Error(Error::Kind::manifest,
                        manifest.entries[i].path +
                            ": image size differs from the rest of the dataset");
        }
        for (std::size_t m = 0; m < methods.size(); ++m) {
            for (auto& e : results[i].entries[m]) {
                indices[m].entries.push_back(std::move(e));
            }
        }
    }
    std::map<std::string, std::size_t> class_sizes;
    for (const auto& e : indices[0].entries) {
        ++class_sizes[e.label];
    }
    for (const auto& [label, n] : class_sizes) {
        if (n < 2) {
            throw Error(Error::Kind::manifest,
                        "class '" + label + "' has " + std::to_string(n) +
                            " member(s); every class needs at least 2");
        }
    }
    for (auto& index : indices) {
        index.validate();
    }
    return indices;
}

}  // namespace texret
