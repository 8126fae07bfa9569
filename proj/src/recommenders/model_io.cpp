#include "fairrec/recommenders/model_io.hpp"

#include "fairrec/core/binary_io.hpp"

namespace fairrec {

void save_latent_model(const LatentModel& model, const std::filesystem::path& path) {
  BinaryWriter w(path, "FRLM", kLatentModelVersion);
  const LatentHyper& h = model.hyper;
  w.put<std::int32_t>(h.latent_dim);
  w.put<std::int32_t>(h.epochs);
  w.put<std::int32_t>(h.batch_size);
  w.put(h.learning_rate);
  w.put(h.dropout);
  w.put(h.adversary_learning_rate);
  w.put<std::int32_t>(h.adversary_steps);
  w.put(h.fairness_weight);
  w.put<std::uint8_t>(static_cast<std::uint8_t>(h.adversary_objective));
  w.put(h.confusion_scale);
  w.put<std::uint8_t>(h.adversary_enabled ? 1 : 0);
  w.put(model.seed);
  w.put<std::int32_t>(model.num_items);
  w.put_matrix(model.encoder_weights);
  w.put_matrix(model.encoder_bias);
  w.put_matrix(model.decoder_weights);
  w.put_matrix(model.decoder_bias);
  w.put_matrix(model.adversary_weights);
  w.put(model.adversary_bias);
  w.finish();
}

LatentModel load_latent_model(const std::filesystem::path& path) {
  BinaryReader r(path, "FRLM", kLatentModelVersion);
  LatentModel m;
  LatentHyper& h = m.hyper;
  h.latent_dim = r.get<std::int32_t>();
  h.epochs = r.get<std::int32_t>();
  h.batch_size = r.get<std::int32_t>();
  h.learning_rate = r.get<double>();
  h.dropout = r.get<double>();
  h.adversary_learning_rate = r.get<double>();
  h.adversary_steps = r.get<std::int32_t>();
  h.fairness_weight = r.get<double>();
  {
    const auto o = r.get<std::uint8_t>();
    if (o > 1) throw IoError(path.string() + ": unknown adversary objective");
    h.adversary_objective = static_cast<AdversaryObjective>(o);
  }
  h.confusion_scale = r.get<double>();
  h.adversary_enabled = r.get<std::uint8_t>() != 0;
  m.seed = r.get<std::uint64_t>();
  m.num_items = r.get<std::int32_t>();
  m.encoder_weights = r.get_matrix();
  m.encoder_bias = r.get_matrix();
  m.decoder_weights = r.get_matrix();
  m.decoder_bias = r.get_matrix();
  m.adversary_weights = r.get_matrix();
  m.adversary_bias = r.get<double>();
  if (m.encoder_weights.rows() != h.latent_dim || m.encoder_weights.cols() != m.num_items ||
      m.decoder_weights.rows() != m.num_items || m.decoder_weights.cols() != h.latent_dim) {
    throw IoError(path.string() + ": inconsistent layer dimensions");
  }
  return m;
}

}  // namespace fairrec
