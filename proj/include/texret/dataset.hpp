#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "texret/core.hpp"

namespace texret {

struct ManifestEntry {
    std::string id;
    std::string label;
    std::string path;
};

// Dataset manifest: one "<image_id>\t<class_label>\t<path>" line per
// source image, with an optional first line "#tile=<N>" requesting that
// each image be cut into N x N tiles.
struct DatasetManifest {
    std::vector<ManifestEntry> entries;
    std::optional<std::size_t> tile;
};

DatasetManifest parse_manifest(std::istream& in, const std::string& name);

// Reads a manifest file; relative entry paths are resolved against the
// manifest's directory.
DatasetManifest read_manifest(const std::string& path);

struct DatasetImage {
    std::string id;
    std::string label;
    GrayImage image;
};

struct Dataset {
    std::vector<DatasetImage> images;
    std::vector<std::string> classes;  // distinct labels, sorted
};

// Loads every manifest entry, applies tiling when requested (tile ids
// are "<image id>#<row>_<col>"), and validates the dataset invariants:
// unique ids, uniform dimensions, >= 2 members per class after tiling.
Dataset build_dataset(const DatasetManifest& manifest);

// Deterministic synthetic texture dataset: class c is an oriented
// sinusoidal grating (orientation c*pi/num_classes, spatial frequency
// 0.08 + 0.02*(c mod 4) cycles/pixel, amplitude 60, mean 128) plus
// uniform noise in [-20, 20]; every tile gets an independent phase and
// noise draw. Identical arguments and seed give bit-identical pixels.
Dataset generate_synthetic_dataset(std::size_t num_classes,
                                   std::size_t tiles_per_class,
                                   std::size_t tile_size, std::uint64_t seed);

}  // namespace texret
