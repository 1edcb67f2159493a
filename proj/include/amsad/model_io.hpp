#pragma once

// Fitted models on disk: versioned JSON holding the algorithm state, the
// normalization fitted on the training rows and the featurization used.

#include "amsad/cluster.hpp"
#include "amsad/features.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace amsad {

inline constexpr int kModelFormatVersion = 1;

struct ModelFile {
    ClusterModel model;
    NormalizationParams normalization;
    FeatureSelection features = FeatureSelection::all();
    std::optional<std::size_t> window_k;  // windows per signal used at training time
};

std::string model_to_json(const ModelFile& file);
/// Throws Error(input) naming the offending field on malformed or
/// unsupported content.
ModelFile model_from_json(const std::string& text);

void save_model(const ModelFile& file, const std::filesystem::path& path);
ModelFile load_model(const std::filesystem::path& path);

}  // namespace amsad
