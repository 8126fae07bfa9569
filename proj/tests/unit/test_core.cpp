#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <thread>

#include <gtest/gtest.h>

#include "fairrec/core/dataset.hpp"
#include "fairrec/core/error.hpp"
#include "fairrec/core/io.hpp"
#include "fairrec/core/random.hpp"
#include "fairrec/core/split.hpp"
#include "fairrec/core/topk.hpp"

namespace fs = std::filesystem;
using namespace fairrec;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("fairrec_core_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

// Users 0..n-1, each with a few items; labels as given.
InteractionDataset toy(std::vector<int> labels, int num_items = 20, std::uint64_t seed = 1) {
  Rng rng(seed);
  std::vector<std::vector<int>> hist(labels.size());
  std::uniform_int_distribution<int> pick(0, num_items - 1);
  for (auto& h : hist) {
    std::set<int> s;
    while (s.size() < 3) s.insert(pick(rng));
    h.assign(s.begin(), s.end());
  }
  return InteractionDataset::from_histories(num_items, std::move(hist), std::move(labels),
                                            Provenance::kSynthetic);
}

std::vector<int> labels_with(int majority, int minority) {
  std::vector<int> l(majority, 0);
  l.insert(l.end(), minority, 1);
  return l;
}

}  // namespace

TEST(SeedSpec, SameLabelsGiveSameStreams) {
  const SeedSpec a(42), b(42);
  EXPECT_EQ(a.derive("x").derive(3).value(), b.derive("x").derive(3).value());
  Rng ra = a.derive("y").engine(), rb = b.derive("y").engine();
  for (int i = 0; i < 100; ++i) EXPECT_EQ(ra(), rb());
}

TEST(SeedSpec, DifferentLabelsDiverge) {
  const SeedSpec s(42);
  EXPECT_NE(s.derive("a").value(), s.derive("b").value());
  EXPECT_NE(s.derive(0).value(), s.derive(1).value());
  EXPECT_NE(s.derive_value(0.1).value(), s.derive_value(0.2).value());
  EXPECT_NE(SeedSpec(1).derive("a").value(), SeedSpec(2).derive("a").value());
  EXPECT_EQ(s.derive("a").master(), 42u);
}

TEST(SeedSpec, StreamsIndependentOfThreadSchedule) {
  const SeedSpec root(9);
  std::vector<std::uint64_t> serial(16), parallel(16);
  for (int i = 0; i < 16; ++i) serial[i] = root.derive("user").derive(i).engine()();
  std::vector<std::jthread> pool;
  for (int i = 15; i >= 0; --i) {
    pool.emplace_back([&, i] { parallel[i] = root.derive("user").derive(i).engine()(); });
  }
  pool.clear();
  EXPECT_EQ(serial, parallel);
}

TEST(Dirichlet, SamplesLieOnSimplex) {
  Rng rng(3);
  Eigen::VectorXd alpha(4);
  alpha << 0.01, 0.5, 1.0, 3.0;
  for (int i = 0; i < 200; ++i) {
    const Eigen::VectorXd x = sample_dirichlet(alpha, rng);
    EXPECT_NEAR(x.sum(), 1.0, 1e-9);
    EXPECT_GE(x.minCoeff(), 0.0);
  }
}

TEST(Dataset, ConstructionAndAccessors) {
  const std::vector<std::pair<int, int>> pairs{{0, 2}, {0, 1}, {1, 0}};
  const auto d = InteractionDataset::from_pairs(2, 3, pairs, {0, 1}, Provenance::kSynthetic);
  EXPECT_EQ(d.num_users(), 2);
  EXPECT_EQ(d.num_interactions(), 3);
  EXPECT_EQ(std::vector<int>(d.items_of(0).begin(), d.items_of(0).end()), (std::vector<int>{1, 2}));
  EXPECT_TRUE(d.has_interaction(1, 0));
  EXPECT_FALSE(d.has_interaction(1, 2));
  EXPECT_EQ(d.item_counts(), (std::vector<std::int64_t>{1, 1, 1}));
}

TEST(Dataset, RejectsInvalidInput) {
  const std::vector<std::pair<int, int>> dup{{0, 1}, {0, 1}, {1, 0}};
  EXPECT_THROW(InteractionDataset::from_pairs(2, 3, dup, {0, 1}, Provenance::kSynthetic), DataError);
  const std::vector<std::pair<int, int>> oob{{0, 5}, {1, 0}};
  EXPECT_THROW(InteractionDataset::from_pairs(2, 3, oob, {0, 1}, Provenance::kSynthetic), DataError);
  const std::vector<std::pair<int, int>> lonely{{0, 1}};
  EXPECT_THROW(InteractionDataset::from_pairs(2, 3, lonely, {0, 1}, Provenance::kSynthetic),
               DataError);
  const std::vector<std::pair<int, int>> ok{{0, 1}, {1, 1}};
  EXPECT_THROW(InteractionDataset::from_pairs(2, 3, ok, {0, 2}, Provenance::kSynthetic), DataError);
  EXPECT_THROW(InteractionDataset::from_pairs(2, 3, {}, {0, 1}, Provenance::kSynthetic), DataError);
}

TEST(Dataset, LabelsCanonicalizedToSmallerMinority) {
  const auto d = toy({1, 1, 1, 0});
  EXPECT_EQ(d.group_size(kMinority), 1);
  EXPECT_EQ(d.label(3), 1);
  EXPECT_LE(minority_ratio(d), 0.5);
}

TEST(MinorityRatio, Counting) {
  EXPECT_DOUBLE_EQ(minority_ratio(toy(labels_with(7, 3))), 0.3);
  EXPECT_DOUBLE_EQ(minority_ratio(toy(labels_with(5, 5))), 0.5);
}

TEST(Dataset, SubsetKeepsLabelsVerbatim) {
  const auto d = toy(labels_with(7, 3));
  const std::vector<int> users{9, 8, 7, 0};
  const auto s = d.subset(users);
  ASSERT_EQ(s.num_users(), 4);
  // 3 minority of 4: not re-canonicalized.
  EXPECT_EQ(s.group_size(kMinority), 3);
  EXPECT_TRUE(std::ranges::equal(s.items_of(0), d.items_of(9)));
}

TEST(Split, TenUserCounts) {
  const auto d = toy(labels_with(7, 3));
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto split = split_by_user(d, 0.2, SeedSpec(seed));
    EXPECT_EQ(split.train.num_users(), 8);
    EXPECT_EQ(split.test.num_users(), 2);
    EXPECT_EQ(split.test.group_size(kMinority), 1);
  }
}

TEST(Split, DisjointCoverAndDeterministic) {
  const auto d = toy(labels_with(60, 40));
  const auto a = split_by_user(d, 0.25, SeedSpec(5));
  const auto b = split_by_user(d, 0.25, SeedSpec(5));
  EXPECT_EQ(a.train_users, b.train_users);
  EXPECT_EQ(a.test, b.test);
  std::vector<int> all = a.train_users;
  all.insert(all.end(), a.test_users.begin(), a.test_users.end());
  std::ranges::sort(all);
  std::vector<int> expected(100);
  std::iota(expected.begin(), expected.end(), 0);
  EXPECT_EQ(all, expected);
  EXPECT_EQ(a.train.num_items(), d.num_items());
  EXPECT_EQ(a.test.num_items(), d.num_items());
}

TEST(Split, PerGroupFractionWithinTwoPoints) {
  const auto d = toy(labels_with(700, 300));
  const auto s = split_by_user(d, 0.2, SeedSpec(1));
  EXPECT_NEAR(s.test.group_size(kMinority) / 300.0, 0.2, 0.02);
  EXPECT_NEAR(s.test.group_size(kMajority) / 700.0, 0.2, 0.02);
}

TEST(Split, StratificationOverSeeds) {
  const auto d = toy(labels_with(717, 283));
  double sum = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    sum += minority_ratio(split_by_user(d, 0.2, SeedSpec(seed)).test);
  }
  EXPECT_NEAR(sum / 100.0, 0.283, 0.01);
}

TEST(Split, ErrorsNameTheGroup) {
  const auto d = toy(labels_with(9, 1));
  try {
    split_by_user(d, 0.2, SeedSpec(0));
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("minority"), std::string::npos);
  }
  EXPECT_THROW(split_by_user(toy(labels_with(5, 5)), 0.0, SeedSpec(0)), ConfigError);
  EXPECT_THROW(split_by_user(toy(labels_with(5, 5)), 1.0, SeedSpec(0)), ConfigError);
}

TEST(Io, EmptyInteractionsFile) {
  const auto dir = scratch_dir("empty");
  write_text(dir / "interactions.tsv", "");
  write_text(dir / "demographics.tsv", "0\t0\n");
  try {
    read_dataset(DatasetPaths::in_directory(dir));
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("no interactions"), std::string::npos);
  }
}

TEST(Io, ThreeRowToyFile) {
  const auto dir = scratch_dir("toy");
  write_text(dir / "interactions.tsv", "0\t0\n0\t2\n1\t1\n");
  write_text(dir / "demographics.tsv", "0\t0\n1\t1\n");
  const auto d = read_dataset(DatasetPaths::in_directory(dir));
  EXPECT_EQ(d.num_users(), 2);
  EXPECT_EQ(d.num_interactions(), 3);
  EXPECT_EQ(d.num_items(), 3);
}

TEST(Io, MalformedRowReportsLine) {
  const auto dir = scratch_dir("malformed");
  write_text(dir / "interactions.tsv", "0\t0\n0 2\n");
  write_text(dir / "demographics.tsv", "0\t0\n");
  try {
    read_dataset(DatasetPaths::in_directory(dir));
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find(":2"), std::string::npos) << e.what();
  }
}

TEST(Io, UnknownUserInDemographics) {
  const auto dir = scratch_dir("unknown");
  write_text(dir / "interactions.tsv", "0\t0\n1\t1\n");
  write_text(dir / "demographics.tsv", "0\t0\n1\t1\n7\t0\n");
  EXPECT_THROW(read_dataset(DatasetPaths::in_directory(dir)), DataError);
}

TEST(Io, RoundTripGeneratedSizedDataset) {
  std::vector<int> labels(1000);
  for (int u = 0; u < 1000; ++u) labels[u] = u % 10 < 3;
  const auto d = toy(labels, 300, 17);
  const auto dir = scratch_dir("roundtrip");
  write_dataset_dir(d, dir / "a");
  const auto once = read_dataset_dir(dir / "a");
  EXPECT_EQ(once, d);
  write_dataset_dir(once, dir / "b");
  EXPECT_EQ(read_dataset_dir(dir / "b"), once);
}

TEST(Io, RecommendationsRoundTrip) {
  RecommendationTable t{2, {{3, 1}, {0, 2}}};
  const auto dir = scratch_dir("recs");
  write_recommendations(t, dir / "recs.tsv");
  EXPECT_EQ(read_recommendations(dir / "recs.tsv", 2), t);
}

TEST(IdMap, DenseAndPersistent) {
  IdMap m;
  EXPECT_EQ(m.intern("u7"), 0);
  EXPECT_EQ(m.intern("u3"), 1);
  EXPECT_EQ(m.intern("u7"), 0);
  EXPECT_FALSE(m.find("nope"));
  const auto dir = scratch_dir("idmap");
  m.write(dir / "ids.tsv");
  const IdMap r = IdMap::read(dir / "ids.tsv");
  EXPECT_EQ(r.size(), 2);
  EXPECT_EQ(r.external(1), "u3");
  EXPECT_EQ(*r.find("u7"), 0);
}

TEST(TopK, IndexTieBreakAndExclusion) {
  const std::vector<double> scores{1.0, 3.0, 3.0, 2.0};
  const std::vector<int> none;
  EXPECT_EQ(select_top_k<double>(scores, none, 3), (std::vector<int>{1, 2, 3}));
  const std::vector<int> ex{1};
  EXPECT_EQ(select_top_k<double>(scores, ex, 2), (std::vector<int>{2, 3}));
  EXPECT_THROW(select_top_k<double>(scores, ex, 4), DataError);
}

TEST(Recommendations, ValidationCatchesViolations) {
  const auto d = toy(labels_with(2, 2), 10);
  RecommendationTable ok{1, {}};
  for (int u = 0; u < 4; ++u) {
    for (int i = 0; i < 10; ++i) {
      if (!d.has_interaction(u, i)) {
        ok.lists.push_back({i});
        break;
      }
    }
  }
  EXPECT_NO_THROW(validate_recommendations(ok, d));
  RecommendationTable bad = ok;
  bad.lists[0] = {d.items_of(0)[0]};
  EXPECT_THROW(validate_recommendations(bad, d), DataError);
}
