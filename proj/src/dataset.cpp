#include "texret/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "texret/image.hpp"

namespace texret {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

void check_class_sizes(const Dataset& ds) {
    std::map<std::string, std::size_t> counts;
    for (const auto& im : ds.images) {
        ++counts[im.label];
    }
    for (const auto& [label, n] : counts) {
        if (n < 2) {
            throw Error(Error::Kind::manifest,
                        "class '" + label + "' has " + std::to_string(n) +
                            " member(s); every class needs at least 2");
        }
    }
}

// mt19937_64 output mapped to [0,1) the same way on every platform.
double unit_double(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

DatasetManifest parse_manifest(std::istream& in, const std::string& name) {
    DatasetManifest manifest;
    std::string line;
    std::size_t lineno = 0;
    std::set<std::string> seen_ids;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        if (line[0] == '#') {
            if (lineno == 1 && line.rfind("#tile=", 0) == 0) {
                try {
                    manifest.tile = std::stoul(line.substr(6));
                } catch (const std::exception&) {
                    throw Error(Error::Kind::manifest,
                                name + ":1: bad tile size '" + line + "'");
                }
                if (*manifest.tile == 0) {
                    throw Error(Error::Kind::manifest,
                                name + ":1: tile size must be positive");
                }
            }
            continue;
        }
        auto fields = split(line, '\t');
        if (fields.size() != 3 || fields[0].empty() || fields[1].empty() ||
            fields[2].empty()) {
            throw Error(Error::Kind::manifest,
                        name + ":" + std::to_string(lineno) +
                            ": expected <id>\\t<label>\\t<path>");
        }
        if (!seen_ids.insert(fields[0]).second) {
            throw Error(Error::Kind::manifest,
                        name + ":" + std::to_string(lineno) +
                            ": duplicate image id '" + fields[0] + "'");
        }
        manifest.entries.push_back({fields[0], fields[1], fields[2]});
    }
    if (manifest.entries.empty()) {
        throw Error(Error::Kind::manifest, name + ": manifest lists no images");
    }
    return manifest;
}

DatasetManifest read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(Error::Kind::io, path + ": cannot open manifest");
    }
    DatasetManifest manifest = parse_manifest(in, path);
    const auto base = std::filesystem::path(path).parent_path();
    for (auto& entry : manifest.entries) {
        std::filesystem::path p(entry.path);
        if (p.is_relative() && !base.empty()) {
            entry.path = (base / p).string();
        }
    }
    return manifest;
}

Dataset build_dataset(const DatasetManifest& manifest) {
    if (manifest.entries.empty()) {
        throw Error(Error::Kind::manifest, "manifest lists no images");
    }
    Dataset ds;
    std::set<std::string> labels;
    std::size_t expect_rows = 0, expect_cols = 0;
    for (const auto& entry : manifest.entries) {
        GrayImage img = load_image(entry.path);
        std::vector<GrayImage> tiles;
        std::vector<std::string> ids;
        if (manifest.tile) {
            const std::size_t ts = *manifest.tile;
            if (img.rows % ts != 0 || img.cols % ts != 0) {
                throw Error(Error::Kind::manifest,
                            entry.path + ": tile size " + std::to_string(ts) +
                                " does not divide " + std::to_string(img.rows) +
                                "x" + std::to_string(img.cols));
            }
            const std::size_t grid_cols = img.cols / ts;
            tiles = tile_image(img, ts);
            for (std::size_t i = 0; i < tiles.size(); ++i) {
                ids.push_back(entry.id + "#" + std::to_string(i / grid_cols) +
                              "_" + std::to_string(i % grid_cols));
            }
        } else {
            tiles.push_back(std::move(img));
            ids.push_back(entry.id);
        }
        for (std::size_t i = 0; i < tiles.size(); ++i) {
            if (ds.images.empty()) {
                expect_rows = tiles[i].rows;
                expect_cols = tiles[i].cols;
            } else if (tiles[i].rows != expect_rows || tiles[i].cols != expect_cols) {
                throw Error(Error::Kind::manifest,
                            entry.path + ": image size " +
                                std::to_string(tiles[i].rows) + "x" +
                                std::to_string(tiles[i].cols) +
                                " differs from the rest of the dataset (" +
                                std::to_string(expect_rows) + "x" +
                                std::to_string(expect_cols) + ")");
            }
            ds.images.push_back({ids[i], entry.label, std::move(tiles[i])});
        }
        labels.insert(entry.label);
    }
    ds.classes.assign(labels.begin(), labels.end());
    check_class_sizes(ds);
    return ds;
}

Dataset generate_synthetic_dataset(std::size_t num_classes,
                                   std::size_t tiles_per_class,
                                   std::size_t tile_size, std::uint64_t seed) {
    if (num_classes == 0 || num_classes > 16) {
        throw Error(Error::Kind::config,
                    "num_classes must be in [1, 16], got " +
                        std::to_string(num_classes));
    }
    if (tiles_per_class == 0 || tile_size == 0) {
        throw Error(Error::Kind::config, "tiles_per_class and tile_size must be positive");
    }
    Dataset ds;
    std::mt19937_64 rng(seed);
    const double two_pi = 2.0 * M_PI;
    char idbuf[32];
    for (std::size_t c = 0; c < num_classes; ++c) {
        const double theta = static_cast<double>(c) * M_PI /
                             static_cast<double>(num_classes);
        const double freq = 0.08 + 0.02 * static_cast<double>(c % 4);
        const double fx = freq * std::cos(theta);
        const double fy = freq * std::sin(theta);
        std::snprintf(idbuf, sizeof(idbuf), "c%02zu", c);
        const std::string label(idbuf);
        for (std::size_t t = 0; t < tiles_per_class; ++t) {
            const double phase = two_pi * unit_double(rng);
            GrayImage img(tile_size, tile_size);
            for (std::size_t r = 0; r < tile_size; ++r) {
                for (std::size_t col = 0; col < tile_size; ++col) {
                    const double grating = 60.0 *
                        std::cos(two_pi * (fx * static_cast<double>(col) +
                                           fy * static_cast<double>(r)) + phase);
                    const double noise = -20.0 + 40.0 * unit_double(rng);
                    img.at(r, col) = 128.0 + grating + noise;
                }
            }
            std::snprintf(idbuf, sizeof(idbuf), "c%02zu_%03zu", c, t);
            ds.images.push_back({idbuf, label, std::move(img)});
        }
        ds.classes.push_back(label);
    }
    return ds;
}

}  // namespace texret
