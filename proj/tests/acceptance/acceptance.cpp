// Acceptance suite. Prints one PASS/FAIL line per criterion; exit status is
// the number of failed criteria. Pass criterion numbers to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fairrec/core/split.hpp"
#include "fairrec/datagen/generator.hpp"
#include "fairrec/harness/config_json.hpp"
#include "fairrec/harness/experiment.hpp"
#include "fairrec/metrics/auc.hpp"
#include "fairrec/metrics/ranking.hpp"
#include "fairrec/neuralauc/list_classifier.hpp"
#include "fairrec/neuralauc/skipgram.hpp"
#include "fairrec/recommenders/baselines.hpp"
#include "fairrec/recommenders/latent_model.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace fairrec;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

// (dataset_id, model, metric) -> aggregate row
using Means = std::map<std::tuple<std::string, std::string, std::string>, AggregateRow>;

Means index(const SweepResult& r) {
  Means m;
  for (const auto& a : r.aggregates) m[{a.dataset_id, a.model, a.metric}] = a;
  return m;
}

int failures(const SweepResult& r) {
  return static_cast<int>(std::ranges::count_if(r.rows, [](const auto& row) { return is_failure(row); }));
}

SweepResult run(const json& j) { return run_experiment(experiment_config_from_json(j)); }

double pearson(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

std::vector<double> ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::ranges::sort(order, {}, [&](std::size_t i) { return v[i]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    for (std::size_t t = i; t <= j; ++t) r[order[t]] = (i + j) / 2.0 + 1;
    i = j + 1;
  }
  return r;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  const auto rx = ranks(x), ry = ranks(y);
  return pearson(rx, ry);
}

// ---------------------------------------------------------------------------

Outcome auc_oracle() {
  std::mt19937_64 rng(2024);
  double worst = 0;
  int instances = 0;
  while (instances < 1000) {
    const int n = std::uniform_int_distribution<int>(2, 200)(rng);
    const int levels = std::uniform_int_distribution<int>(1, 20)(rng);  // few levels force ties
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (int i = 0; i < n; ++i) {
      s[i] = std::uniform_int_distribution<int>(0, levels)(rng) / 3.0;
      y[i] = std::bernoulli_distribution(0.3)(rng);
    }
    if (std::ranges::count(y, 1) == 0 || std::ranges::count(y, 0) == 0) continue;
    double wins = 0, pairs = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (y[i] == 1 && y[j] == 0) {
          pairs += 1;
          wins += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
        }
      }
    }
    worst = std::max(worst, std::abs(auc_from_scores(s, y) - wins / pairs));
    ++instances;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "max |auc - oracle| = %.3g over 1000 instances", worst);
  return {worst <= 1e-12, buf};
}

Outcome kendall_endpoints() {
  const std::vector<int> a{1, 2, 3, 4}, b{5, 6, 7, 8};
  const std::vector<int> x{10, 20, 30}, y{10, 30, 20};
  const double same = kendall_tau_extended(a, a);
  const double disjoint = kendall_tau_extended(a, b);
  const double worked = kendall_tau_extended(x, y);
  return {same == 1.0 && disjoint == -1.0 && worked == 1.0 / 3.0,
          "identical " + fmt(same) + ", disjoint " + fmt(disjoint) + ", worked example " + fmt(worked)};
}

// One run shared by criteria 3 to 6.
const SweepResult& epsilon_grid_run() {
  static const SweepResult result = run(json::parse(R"({
    "dataset": {"generate": {"n_users": 2000, "n_items": 2000}},
    "models": ["pop", "rand", "dem_pop", "max_division",
               {"id": "latent_l0", "type": "latent", "fairness_weight": 0},
               {"id": "latent_l2", "type": "latent", "fairness_weight": 2}],
    "metrics": ["demographic_ratio_auc", "neural_auc", "item_ratio", "kendall_tau"],
    "k": 40, "replications": 5, "seed": 11,
    "sweep": {"parameter": "epsilon", "values": [0.02, 0.5, 1.0]}
  })"));
  return result;
}

Outcome discriminatory_saturate() {
  const auto& r = epsilon_grid_run();
  const auto m = index(r);
  bool ok = r.rows.size() == 360 && failures(r) == 0;
  std::string detail = std::to_string(r.rows.size()) + " rows;";
  for (const char* model : {"dem_pop", "max_division"}) {
    const double dr = m.at({"epsilon=0.02", model, "demographic_ratio_auc"}).mean;
    const double na = m.at({"epsilon=0.02", model, "neural_auc"}).mean;
    ok = ok && dr >= 0.95 && na >= 0.90;
    detail += std::string(" ") + model + " DR " + fmt(dr) + " NAUC " + fmt(na) + ";";
  }
  return {ok, detail};
}

Outcome overlap_kills_signal() {
  const auto m = index(epsilon_grid_run());
  bool ok = true;
  std::string detail;
  for (const char* model : {"pop", "rand", "dem_pop", "max_division", "latent_l0", "latent_l2"}) {
    const double dr = m.at({"epsilon=1", model, "demographic_ratio_auc"}).mean;
    const double na = m.at({"epsilon=1", model, "neural_auc"}).mean;
    const bool in = dr >= 0.45 && dr <= 0.60 && na >= 0.45 && na <= 0.60;
    ok = ok && in;
    detail += std::string(" ") + model + " DR " + fmt(dr) + " NAUC " + fmt(na) + (in ? ";" : " (out);");
  }
  return {ok, detail};
}

Outcome pop_inversion() {
  const double dr = index(epsilon_grid_run()).at({"epsilon=0.5", "pop", "demographic_ratio_auc"}).mean;
  return {dr < 0.5, "POP DR AUC at eps 0.5 = " + fmt(dr)};
}

Outcome rand_kendall() {
  const auto m = index(epsilon_grid_run());
  bool ok = true;
  std::string detail;
  for (const char* eps : {"epsilon=0.02", "epsilon=0.5", "epsilon=1"}) {
    const double tau = m.at({eps, "rand", "kendall_tau"}).mean;
    ok = ok && tau <= -0.8;
    detail += std::string(" ") + eps + " " + fmt(tau) + ";";
  }
  return {ok, "RAND mean Kendall-Tau:" + detail};
}

Outcome representation_linearity() {
  const auto r = run(json::parse(R"({
    "dataset": {"generate": {"n_users": 2000, "n_items": 2000}},
    "models": [{"id": "latent", "type": "latent", "fairness_weight": 0}],
    "metrics": ["representation_auc", "demographic_ratio_auc"],
    "k": 40, "replications": 5, "seed": 13,
    "sweep": {"parameter": "epsilon", "values": [0.1, 0.3, 0.5, 0.7, 0.9]}
  })"));
  std::map<std::pair<std::string, int>, std::pair<double, double>> cells;
  for (const auto& row : r.rows) {
    auto& c = cells[{row.dataset_id, row.replication}];
    (row.metric == metric_names::kRepresentationAuc ? c.first : c.second) = row.value;
  }
  std::vector<double> rep, dr;
  for (const auto& [key, v] : cells) rep.push_back(v.first), dr.push_back(v.second);
  const double rho = pearson(rep, dr);
  return {failures(r) == 0 && rep.size() == 25 && rho >= 0.9,
          "Pearson over " + std::to_string(rep.size()) + " cells = " + fmt(rho)};
}

Outcome fairness_monotone() {
  const auto r = run(json::parse(R"({
    "dataset": {"generate": {"n_users": 2000, "n_items": 2000, "epsilon": 0.3}},
    "models": [{"id": "latent", "type": "latent"}],
    "metrics": ["representation_auc", "demographic_ratio_auc", "item_ratio"],
    "k": 40, "replications": 5, "seed": 7, "fixed_dataset": true,
    "sweep": {"parameter": "fairness_weight", "values": [0, 0.5, 2, 8]}
  })"));
  const auto m = index(r);
  const std::vector<double> grid{0, 0.5, 2, 8};
  bool ok = failures(r) == 0;
  std::string detail;
  for (const char* metric : {"representation_auc", "demographic_ratio_auc", "item_ratio"}) {
    std::vector<double> means;
    for (const char* id : {"fairness_weight=0", "fairness_weight=0.5", "fairness_weight=2", "fairness_weight=8"}) {
      means.push_back(m.at({id, "latent", metric}).mean);
    }
    const double rho = spearman(grid, means);
    ok = ok && rho <= -0.8;
    detail += std::string(" ") + metric + " [";
    for (std::size_t i = 0; i < means.size(); ++i) detail += (i ? " " : "") + fmt(means[i]);
    detail += "] rho " + fmt(rho) + ";";
  }
  return {ok, detail};
}

Outcome item_ratio_precision() {
  const auto r = run(json::parse(R"({
    "dataset": {"generate": {"n_items": 2000, "epsilon": 0.5}},
    "models": ["rand"], "metrics": ["item_ratio"],
    "k": 40, "replications": 5, "seed": 17,
    "sweep": {"parameter": "n_users", "values": [500, 1000, 2000]}
  })"));
  const auto m = index(r);
  std::vector<double> v;
  for (const char* id : {"n_users=500", "n_users=1000", "n_users=2000"}) {
    v.push_back(m.at({id, "rand", "item_ratio"}).mean);
  }
  return {failures(r) == 0 && v[0] > v[1] && v[1] > v[2],
          "RAND item ratio 500/1000/2000 users: " + fmt(v[0]) + " " + fmt(v[1]) + " " + fmt(v[2])};
}

double relative_gradient_error(const std::function<double()>& loss,
                               const std::vector<std::pair<double*, double>>& params) {
  const double h = 1e-6;
  double worst = 0;
  for (auto [p, analytic] : params) {
    const double saved = *p;
    *p = saved + h;
    const double up = loss();
    *p = saved - h;
    const double down = loss();
    *p = saved;
    const double numeric = (up - down) / (2 * h);
    worst = std::max(worst, std::abs(analytic - numeric) /
                                std::max({std::abs(analytic), std::abs(numeric), 1e-6}));
  }
  return worst;
}

template <typename M>
void collect(std::vector<std::pair<double*, double>>& out, M& param, const M& grad) {
  for (Eigen::Index i = 0; i < param.size(); ++i) out.emplace_back(param.data() + i, grad.data()[i]);
}

Outcome neural_controls() {
  GeneratorConfig g;
  g.n_users = 2000;
  g.n_items = 2000;
  g.epsilon = 0.3;
  const auto d = generate_dataset(g, SeedSpec(19));
  const auto split = split_by_user(d, 0.2, SeedSpec(20));
  const NeuralSettings neural;
  const auto emb = train_cell_embeddings(split.train, neural, SeedSpec(21));
  const EmbeddingTable frozen = *emb;
  const auto table = std::make_shared<const DemographicRatioTable>(demographic_ratio_table(split.train));
  const auto enc = std::make_shared<const MeanPoolEncoder>(emb, table);

  // Shuffled labels on Dem. POP lists, the strongest signal a baseline carries.
  const auto train_recs = recommend_baseline(BaselineKind::kDemPop, split.train, split.train, 40, SeedSpec(1));
  const auto test_recs = recommend_baseline(BaselineKind::kDemPop, split.train, split.test, 40, SeedSpec(1));
  double shuffled_mean = 0;
  for (std::uint64_t s = 0; s < 5; ++s) {
    std::mt19937_64 rng(s);
    std::vector<int> tr(split.train.labels().begin(), split.train.labels().end());
    std::vector<int> te(split.test.labels().begin(), split.test.labels().end());
    std::shuffle(tr.begin(), tr.end(), rng);
    std::shuffle(te.begin(), te.end(), rng);
    shuffled_mean += evaluate_neural_auc(enc, train_recs, tr, test_recs, te, neural.classifier, SeedSpec(s)) / 5;
  }
  const bool frozen_ok = *emb == frozen;

  // Classifier gradient on a toy instance.
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z(0.0, 0.5);
  const auto fill = [&](auto& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = z(rng);
  };
  Eigen::MatrixXd x(7, 4);
  fill(x);
  const std::vector<int> y{1, 0, 0, 1, 1, 0, 0};
  ClassifierParams p;
  p.w1.resize(3, 4);
  p.b1.resize(3);
  p.w2.resize(3);
  fill(p.w1);
  fill(p.b1);
  fill(p.w2);
  ClassifierParams cg;
  classifier_loss(p, x, y, 1e-2, &cg);
  std::vector<std::pair<double*, double>> cp;
  collect(cp, p.w1, cg.w1);
  collect(cp, p.b1, cg.b1);
  collect(cp, p.w2, cg.w2);
  cp.emplace_back(&p.b2, cg.b2);
  const double clf_err = relative_gradient_error([&] { return classifier_loss(p, x, y, 1e-2, nullptr); }, cp);

  // Latent-model losses on 5 users x 8 items.
  LatentHyper h;
  h.latent_dim = 3;
  LatentModel m = init_latent_model(8, h, SeedSpec(5));
  fill(m.encoder_bias);
  fill(m.decoder_bias);
  m.adversary_bias = 0.2;
  const std::vector<std::vector<int>> kept{{0, 3}, {1, 2, 5}, {7}, {}, {2, 4, 6}};
  const std::vector<std::vector<int>> masked{{1}, {0, 7}, {3, 4}, {6}, {}};
  const std::vector<int> labels{1, 0, 0, 1, 0};
  const SparseRows xs = encode_inputs(kept, 8);
  double latent_err = 0;
  const auto latent_check = [&](auto loss, bool dec, bool adv) {
    LatentGradients lg = LatentGradients::zeros_like(m);
    loss(&lg);
    std::vector<std::pair<double*, double>> lp;
    collect(lp, m.encoder_weights, lg.encoder_weights);
    collect(lp, m.encoder_bias, lg.encoder_bias);
    if (dec) collect(lp, m.decoder_weights, lg.decoder_weights), collect(lp, m.decoder_bias, lg.decoder_bias);
    if (adv) collect(lp, m.adversary_weights, lg.adversary_weights), lp.emplace_back(&m.adversary_bias, lg.adversary_bias);
    latent_err = std::max(latent_err, relative_gradient_error([&] { return loss(nullptr); }, lp));
  };
  latent_check([&](LatentGradients* g) { return reconstruction_loss(m, xs, masked, g); }, true, false);
  latent_check([&](LatentGradients* g) { return adversary_loss(m, xs, labels, g); }, false, true);
  latent_check([&](LatentGradients* g) { return adversary_confusion_loss(m, xs, g); }, false, false);

  const bool ok = shuffled_mean >= 0.45 && shuffled_mean <= 0.55 && frozen_ok && clf_err < 1e-4 &&
                  latent_err < 1e-4;
  std::ostringstream detail;
  detail << "shuffled NAUC " << fmt(shuffled_mean) << ", embeddings " << (frozen_ok ? "unchanged" : "CHANGED")
         << ", gradient rel. error classifier " << clf_err << " latent " << latent_err;
  return {ok, detail.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const json j = json::parse(R"({
    "dataset": {"generate": {"n_users": 1000, "n_items": 2000}},
    "models": ["pop", "rand", "dem_pop", "max_division",
               {"id": "latent", "type": "latent", "fairness_weight": 1}],
    "k": 40, "replications": 2, "seed": 23,
    "sweep": {"parameter": "epsilon", "values": [0.02, 0.5, 1.0]}
  })");
  const fs::path root = fs::temp_directory_path() / "fairrec_acceptance_determinism";
  fs::remove_all(root);
  write_sweep_outputs(run(j), root / "a");
  write_sweep_outputs(run(j), root / "b");
  bool ok = true;
  std::string detail;
  for (const char* f : {"report.csv", "aggregate.csv", "errors.tsv"}) {
    const std::string a = slurp(root / "a" / f), b = slurp(root / "b" / f);
    const bool same = fs::exists(root / "a" / f) && a == b;
    ok = ok && same;
    detail += std::string(" ") + f + (same ? " identical (" + std::to_string(a.size()) + " bytes);" : " DIFFERS;");
  }
  return {ok, detail};
}

struct Criterion {
  int id;
  const char* name;
  Outcome (*check)();
};

const std::vector<Criterion> kCriteria = {
    {1, "AUC oracle equivalence", auc_oracle},
    {2, "Kendall endpoints", kendall_endpoints},
    {3, "Discriminatory baselines saturate at eps 0.02", discriminatory_saturate},
    {4, "Overlap kills signal at eps 1.0", overlap_kills_signal},
    {5, "POP inversion at eps 0.5", pop_inversion},
    {6, "RAND group aggregates diverge", rand_kendall},
    {7, "Representation vs recommendation linearity", representation_linearity},
    {8, "Fairness knob monotonicity", fairness_monotone},
    {9, "RAND item ratio improves with users", item_ratio_precision},
    {10, "Neural classifier controls", neural_controls},
    {11, "Sweep determinism", determinism},
};

}  // namespace

int main(int argc, char** argv) {
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failed = 0;
  for (const auto& c : kCriteria) {
    if (!selected.empty() && !selected.contains(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %d: %s | %s [%.0fs]\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed;
}
