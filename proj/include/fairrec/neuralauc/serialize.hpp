#ifndef FAIRREC_NEURALAUC_SERIALIZE_HPP_
#define FAIRREC_NEURALAUC_SERIALIZE_HPP_

#include <cstdint>
#include <filesystem>
#include <memory>

#include "fairrec/neuralauc/list_classifier.hpp"
#include "fairrec/neuralauc/skipgram.hpp"

namespace fairrec {

inline constexpr std::uint32_t kEmbeddingsVersion = 1;
inline constexpr std::uint32_t kClassifierVersion = 1;

// embeddings.bin: magic "FREM", version, dim, item count, rows, flags.
void save_embeddings(const EmbeddingTable& table, const std::filesystem::path& path);
EmbeddingTable load_embeddings(const std::filesystem::path& path);

// classifier.bin: magic "FRLC", version, hyperparameters, standardizer and
// head weights. The list encoder is not stored; pass it back in on load.
void save_classifier(const ListClassifier& classifier, const std::filesystem::path& path);
ListClassifier load_classifier(const std::filesystem::path& path,
                               std::shared_ptr<const ListEncoder> encoder);

}  // namespace fairrec

#endif  // FAIRREC_NEURALAUC_SERIALIZE_HPP_
