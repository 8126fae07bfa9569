#ifndef FAIRREC_RECOMMENDERS_MODEL_IO_HPP_
#define FAIRREC_RECOMMENDERS_MODEL_IO_HPP_

#include <cstdint>
#include <filesystem>

#include "fairrec/recommenders/latent_model.hpp"

namespace fairrec {

inline constexpr std::uint32_t kLatentModelVersion = 1;

// model.bin: magic "FRLM", version, hyperparameters, seed, weights.
void save_latent_model(const LatentModel& model, const std::filesystem::path& path);
// Throws IoError on a version mismatch or truncated file.
LatentModel load_latent_model(const std::filesystem::path& path);

}  // namespace fairrec

#endif  // FAIRREC_RECOMMENDERS_MODEL_IO_HPP_
