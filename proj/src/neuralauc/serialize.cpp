#include "fairrec/neuralauc/serialize.hpp"

#include "fairrec/core/binary_io.hpp"

namespace fairrec {

void save_embeddings(const EmbeddingTable& table, const std::filesystem::path& path) {
  BinaryWriter w(path, "FREM", kEmbeddingsVersion);
  w.put<std::int32_t>(table.dim());
  w.put<std::int32_t>(table.num_items());
  w.put<std::int32_t>(table.epochs);
  w.put_matrix(table.vectors);
  for (bool flag : table.never_paired) w.put<std::uint8_t>(flag ? 1 : 0);
  w.put<std::int32_t>(static_cast<std::int32_t>(table.loss_curve.size()));
  for (double l : table.loss_curve) w.put(l);
  w.finish();
}

EmbeddingTable load_embeddings(const std::filesystem::path& path) {
  BinaryReader r(path, "FREM", kEmbeddingsVersion);
  EmbeddingTable t;
  const auto dim = r.get<std::int32_t>();
  const auto items = r.get<std::int32_t>();
  t.epochs = r.get<std::int32_t>();
  t.vectors = r.get_matrix();
  if (t.vectors.rows() != items || t.vectors.cols() != dim) {
    throw IoError(path.string() + ": embedding shape does not match header");
  }
  t.never_paired.resize(items);
  for (int i = 0; i < items; ++i) t.never_paired[i] = r.get<std::uint8_t>() != 0;
  const auto n_loss = r.get<std::int32_t>();
  for (int i = 0; i < n_loss; ++i) t.loss_curve.push_back(r.get<double>());
  return t;
}

void save_classifier(const ListClassifier& c, const std::filesystem::path& path) {
  BinaryWriter w(path, "FRLC", kClassifierVersion);
  w.put<std::int32_t>(c.hyper.hidden);
  w.put(c.hyper.learning_rate);
  w.put(c.hyper.weight_decay);
  w.put<std::int32_t>(c.hyper.max_epochs);
  w.put<std::int32_t>(c.hyper.patience);
  w.put(c.hyper.validation_fraction);
  w.put<std::int32_t>(c.best_epoch);
  w.put(c.train_auc);
  w.put(c.validation_auc);
  w.put_matrix(c.standardizer.mean);
  w.put_matrix(c.standardizer.inv_scale);
  w.put_matrix(c.params.w1);
  w.put_matrix(c.params.b1);
  w.put_matrix(c.params.w2);
  w.put(c.params.b2);
  w.finish();
}

ListClassifier load_classifier(const std::filesystem::path& path,
                               std::shared_ptr<const ListEncoder> encoder) {
  BinaryReader r(path, "FRLC", kClassifierVersion);
  ListClassifier c;
  c.encoder = std::move(encoder);
  c.hyper.hidden = r.get<std::int32_t>();
  c.hyper.learning_rate = r.get<double>();
  c.hyper.weight_decay = r.get<double>();
  c.hyper.max_epochs = r.get<std::int32_t>();
  c.hyper.patience = r.get<std::int32_t>();
  c.hyper.validation_fraction = r.get<double>();
  c.best_epoch = r.get<std::int32_t>();
  c.train_auc = r.get<double>();
  c.validation_auc = r.get<double>();
  c.standardizer.mean = r.get_matrix();
  c.standardizer.inv_scale = r.get_matrix();
  c.params.w1 = r.get_matrix();
  c.params.b1 = r.get_matrix();
  c.params.w2 = r.get_matrix();
  c.params.b2 = r.get<double>();
  if (c.encoder && c.params.w1.cols() != c.encoder->feature_dim()) {
    throw IoError(path.string() + ": classifier feature size does not match the list encoder");
  }
  return c;
}

}  // namespace fairrec
