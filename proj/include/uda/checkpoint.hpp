#pragma once

#include <filesystem>

#include "uda/classifier.hpp"
#include "uda/norm_vae.hpp"

namespace uda {

// Versioned JSON checkpoints: dims, row-major weights, bias per layer.
// Doubles are written in round-trip form, so load(save(p)) == p bit-exactly.
void save_classifier_checkpoint(const std::filesystem::path& path,
                                const ClassifierParams& params);
ClassifierParams load_classifier_checkpoint(const std::filesystem::path& path);

void save_norm_vae_checkpoint(const std::filesystem::path& path, const NormVaeParams& params);
NormVaeParams load_norm_vae_checkpoint(const std::filesystem::path& path);

}  // namespace uda
