// Copyright 2026 The smad Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "smad/classifiers.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace smad {
namespace {

// Two Gaussian blobs in `dim` dimensions, means at -sep and +sep on every axis.
TrainingSet blobs(int per_class, int dim, double sep, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  TrainingSet ts;
  ts.vectors.resize(2 * per_class, dim);
  for (int i = 0; i < 2 * per_class; ++i) {
    bool morph = i % 2 == 1;
    ts.labels.push_back(morph ? Label::Morph : Label::BonaFide);
    for (int j = 0; j < dim; ++j) ts.vectors(i, j) = (morph ? sep : -sep) + g(rng);
  }
  return ts;
}

double accuracy(const TrainedModel& m, const TrainingSet& ts) {
  int ok = 0;
  for (Eigen::Index i = 0; i < ts.vectors.rows(); ++i) {
    double s = m.score(std::span<const double>(ts.vectors.row(i).data(), std::size_t(ts.vectors.cols())));
    ok += (s > 0) == (ts.labels[std::size_t(i)] == Label::Morph);
  }
  return double(ok) / double(ts.vectors.rows());
}

TEST(Standardization, FitAndApply) {
  RowMatrix x(4, 3);
  x << 1, 5, 2,  //
      3, 5, 4,   //
      5, 5, 6,   //
      7, 5, 8;
  auto s = Standardization::fit(x);
  EXPECT_DOUBLE_EQ(s.mean[0], 4.0);
  EXPECT_DOUBLE_EQ(s.scale[0], std::sqrt(5.0));  // population deviation
  EXPECT_EQ(s.active[1], 0);
  std::vector<double> probe{4, 100, 5};
  auto z = s.apply(probe);
  EXPECT_DOUBLE_EQ(z[0], 0.0);
  EXPECT_DOUBLE_EQ(z[1], 0.0);
  EXPECT_DOUBLE_EQ(z[2], 0.0);
  std::vector<double> wrong(2);
  EXPECT_EQ(test::error_code_of([&] { s.apply(wrong); }), Errc::invalid);
}

TEST(Standardization, SmallCases) {
  RowMatrix one(1, 3);
  one << 4, 5, 6;
  auto z1 = Standardization::fit(one).apply(std::vector<double>{4, 5, 6});
  EXPECT_EQ(z1.norm(), 0.0);
  RowMatrix two(2, 2);
  two << 0, 0, 2, 2;
  auto rows = Standardization::fit(two).apply_rows(two);
  EXPECT_DOUBLE_EQ(rows(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(rows(1, 1), 1.0);
  std::mt19937_64 rng(40);
  std::normal_distribution<double> g(3.0, 2.0);
  RowMatrix x(50, 10);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = g(rng);
  auto t = Standardization::fit(x).apply_rows(x);
  for (Eigen::Index j = 0; j < 10; ++j) EXPECT_LT(std::abs(t.col(j).mean()), 1e-12);
}

TEST(Classifiers, TwoDimensionalBlobsMarginTwo) {
  // 40 points around (4, 1) and (1, 4) in raw coordinates. Kept uncentred: after
  // centring, two blobs lie along one line through the origin and the class
  // subspaces of a collaborative representation coincide.
  std::mt19937_64 rng(45);
  std::uniform_real_distribution<double> u(-0.9, 0.9);
  TrainingSet ts;
  ts.vectors.resize(40, 2);
  for (int i = 0; i < 40; ++i) {
    bool morph = i >= 20;
    ts.labels.push_back(morph ? Label::Morph : Label::BonaFide);
    ts.vectors(i, 0) = (morph ? 1.0 : 4.0) + u(rng);
    ts.vectors(i, 1) = (morph ? 4.0 : 1.0) + u(rng);
  }
  auto space = make_feature_space(ts, Standardize::no);
  EXPECT_EQ(accuracy(train_linear_svm(space, {10.0, 1e-9, 10'000'000}), ts), 1.0);
  EXPECT_EQ(accuracy(train_srkda(space), ts), 1.0);
  EXPECT_EQ(accuracy(train_pcrc(space), ts), 1.0);
}

TEST(Classifiers, SeparableBlobsPerfectOnTraining) {
  // More dimensions than samples, the regime the detector runs in.
  auto ts = blobs(20, 60, 1.0, 41);
  auto space = make_feature_space(ts);
  EXPECT_EQ(accuracy(train_linear_svm(space), ts), 1.0);
  EXPECT_EQ(accuracy(train_srkda(space), ts), 1.0);
  EXPECT_EQ(accuracy(train_pcrc(space), ts), 1.0);
}

TEST(Classifiers, SingleClassRejected) {
  auto ts = blobs(5, 3, 1.0, 1);
  for (auto& l : ts.labels) l = Label::BonaFide;
  EXPECT_EQ(test::error_code_of([&] { train_linear_svm(ts); }), Errc::invalid);
  EXPECT_EQ(test::error_code_of([&] { train_pcrc(ts); }), Errc::invalid);
}

TEST(Svm, TwoPointHardMargin) {
  TrainingSet ts;
  ts.vectors.resize(2, 2);
  ts.vectors << -1, 0, 1, 0;
  ts.labels = {Label::BonaFide, Label::Morph};
  auto m = train_linear_svm(make_feature_space(ts, Standardize::no), {10.0, 1e-9, 1'000'000});
  const auto& s = std::get<SvmState>(m.state);
  EXPECT_NEAR(s.w[0], 1.0, 1e-6);
  EXPECT_NEAR(s.w[1], 0.0, 1e-12);
  EXPECT_NEAR(s.b, 0.0, 1e-6);
  EXPECT_NEAR(s.alpha[0], 0.5, 1e-6);
  EXPECT_NEAR(s.alpha[1], 0.5, 1e-6);
}

TEST(Svm, TwoPointProbesAndHyperplane) {
  TrainingSet ts;
  ts.vectors.resize(2, 2);
  ts.vectors << -1, 0, 1, 0;
  ts.labels = {Label::BonaFide, Label::Morph};
  auto m = train_linear_svm(make_feature_space(ts, Standardize::no), {10.0, 1e-9, 1'000'000});
  EXPECT_GT(m.score(std::vector<double>{2, 0}), 0.0);
  EXPECT_LT(m.score(std::vector<double>{-2, 5}), 0.0);
  EXPECT_NEAR(m.score(std::vector<double>{0, 7}), 0.0, 1e-6);
}

TEST(Svm, DualityGapAndBoxConstraints) {
  auto ts = blobs(25, 6, 0.4, 42);  // overlapping, so some alphas hit C
  auto space = make_feature_space(ts);
  SvmParams p{0.5, 1e-6, 10'000'000};
  auto m = train_linear_svm(space, p);
  const auto& s = std::get<SvmState>(m.state);
  EXPECT_LE(s.duality_gap, 1e-6 * std::max(1.0, s.alpha.sum()));
  auto y = space->signs();
  EXPECT_NEAR(s.alpha.dot(y), 0.0, 1e-9);
  for (Eigen::Index i = 0; i < s.alpha.size(); ++i) {
    EXPECT_GE(s.alpha[i], 0.0);
    EXPECT_LE(s.alpha[i], p.c);
  }
  Eigen::VectorXd w = space->rows.transpose() * s.alpha.cwiseProduct(y);
  EXPECT_LT((w - s.w).norm(), 1e-12);
}

TEST(Srkda, DecisionsMatchGeneralizedEigenKda) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto ts = blobs(15, 4, 0.5, 100 + seed);
    auto space = make_feature_space(ts);
    auto m = train_srkda(space, {0.01, 0.0});
    const auto& st = std::get<SrkdaState>(m.state);
    auto oracle = oracle::kda(*space, st.sigma, st.delta);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.5);
    int agree = 0, total = 0;
    auto check = [&](const Eigen::VectorXd& z) {
      Eigen::VectorXd kz(space->size());
      for (Eigen::Index i = 0; i < space->size(); ++i)
        kz[i] = std::exp(-(space->rows.row(i).transpose() - z).squaredNorm() / (2 * st.sigma * st.sigma));
      bool oracle_morph = oracle.sign * (kz.dot(oracle.alpha) - oracle.threshold) > 0;
      bool model_morph = m.score_standardized(z) > 0;
      agree += oracle_morph == model_morph;
      ++total;
    };
    for (Eigen::Index i = 0; i < space->size(); ++i) check(space->rows.row(i).transpose());
    for (int t = 0; t < 50; ++t) {
      Eigen::VectorXd z(4);
      for (int j = 0; j < 4; ++j) z[j] = g(rng);
      check(z);
    }
    EXPECT_EQ(agree, total) << "seed " << seed;
  }
}

TEST(Srkda, MedianSigmaAndFixedSigma) {
  TrainingSet ts;
  ts.vectors.resize(3, 1);
  ts.vectors << 0, 1, 3;
  ts.labels = {Label::BonaFide, Label::Morph, Label::Morph};
  auto space = make_feature_space(ts, Standardize::no);
  // Pairwise distances 1, 2, 3.
  EXPECT_DOUBLE_EQ(std::get<SrkdaState>(train_srkda(space).state).sigma, 2.0);
  EXPECT_DOUBLE_EQ(std::get<SrkdaState>(train_srkda(space, {0.01, 0.7}).state).sigma, 0.7);
}

TEST(Srkda, TrainingProjectionsReproduceClassMeans) {
  auto ts = blobs(10, 3, 1.5, 46);
  auto space = make_feature_space(ts);
  auto m = train_srkda(space);
  const auto& st = std::get<SrkdaState>(m.state);
  double mb = 0, mm = 0;
  for (Eigen::Index i = 0; i < space->size(); ++i) {
    double p = srkda_project(m, space->rows.row(i).transpose());
    (space->labels[std::size_t(i)] == Label::Morph ? mm : mb) += p / 10.0;
  }
  EXPECT_NEAR(mb, st.mean_bona, 1e-9);
  EXPECT_NEAR(mm, st.mean_morph, 1e-9);
  EXPECT_GT(mm, mb);
  // A morph training point scores above the midpoint.
  EXPECT_GT(m.score_standardized(space->rows.row(1).transpose()), 0.0);
}

TEST(Srkda, DuplicatedTrainingSetKeepsLabels) {
  auto ts = blobs(10, 3, 1.5, 47);
  TrainingSet dup = ts;
  dup.vectors.resize(40, 3);
  dup.vectors << ts.vectors, ts.vectors;
  dup.labels.insert(dup.labels.end(), ts.labels.begin(), ts.labels.end());
  auto a = train_srkda(ts), b = train_srkda(dup);
  for (Eigen::Index i = 0; i < ts.vectors.rows(); ++i) {
    std::span<const double> row(ts.vectors.row(i).data(), 3);
    EXPECT_EQ(a.score(row) > 0, b.score(row) > 0);
  }
}

TEST(Pcrc, ToyDictionary) {
  TrainingSet ts;
  ts.vectors.resize(2, 2);
  ts.vectors << 1, 0, 0, 1;
  ts.labels = {Label::BonaFide, Label::Morph};
  auto m = train_pcrc(make_feature_space(ts, Standardize::no), {0.1});
  Eigen::VectorXd z(2);
  z << 1, 0;
  auto code = pcrc_code(m, z);
  EXPECT_NEAR(code.alpha[0], 1.0 / 1.1, 1e-12);
  EXPECT_NEAR(code.alpha[1], 0.0, 1e-12);
  EXPECT_NEAR(code.residual_bona, 1.0 - 1.0 / 1.1, 1e-12);
  EXPECT_NEAR(code.residual_morph, 1.0, 1e-12);
  EXPECT_LT(pcrc_score(m, z), 0.0);
}

TEST(Pcrc, ToyDictionaryLimits) {
  TrainingSet ts;
  ts.vectors.resize(2, 3);
  ts.vectors << 1, 0, 0, 0, 1, 0;
  ts.labels = {Label::BonaFide, Label::Morph};
  auto m = train_pcrc(make_feature_space(ts, Standardize::no), {0.1});
  Eigen::VectorXd e2(3), e3(3);
  e2 << 0, 1, 0;
  e3 << 0, 0, 2;
  auto c2 = pcrc_code(m, e2);
  EXPECT_LT(c2.residual_morph, c2.residual_bona);
  EXPECT_GT(pcrc_score(m, e2), 0.0);
  EXPECT_DOUBLE_EQ(pcrc_score(m, e3), 0.0);
  auto big = train_pcrc(make_feature_space(ts, Standardize::no), {1e6});
  auto cb = pcrc_code(big, e2);
  EXPECT_NEAR(cb.residual_bona, 1.0, 1e-3);
  EXPECT_NEAR(cb.residual_morph, 1.0, 1e-3);
}

TEST(Pcrc, CodingMatchesRidgeSolve) {
  auto ts = blobs(6, 9, 0.3, 43);
  auto space = make_feature_space(ts);
  auto m = train_pcrc(space, {0.05});
  std::mt19937_64 rng(44);
  std::normal_distribution<double> g;
  Eigen::VectorXd z(9);
  for (int j = 0; j < 9; ++j) z[j] = g(rng);
  Eigen::MatrixXd x = space->rows;  // one atom per row
  Eigen::MatrixXd a = x * x.transpose() + 0.05 * Eigen::MatrixXd::Identity(x.rows(), x.rows());
  Eigen::VectorXd alpha = a.colPivHouseholderQr().solve(x * z);
  auto code = pcrc_code(m, z);
  EXPECT_LT((code.alpha - alpha).norm(), 1e-10);
  Eigen::VectorXd rb = Eigen::VectorXd::Zero(9), rm = Eigen::VectorXd::Zero(9);
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    (space->labels[std::size_t(i)] == Label::Morph ? rm : rb) += alpha[i] * x.row(i).transpose();
  EXPECT_NEAR(pcrc_score(m, z), (z - rb).norm() - (z - rm).norm(), 1e-10);
}

TEST(ScoreGrid, ProbeScoresAllNineModels) {
  std::array<TrainingSet, 3> sets;
  ModelGrid grid;
  for (auto f : kFeatureTypes) {
    auto ts = blobs(8, 5, 1.0, 50 + std::uint64_t(f));
    ts.type = f;
    auto space = make_feature_space(ts);
    grid(f, ClassifierKind::Svm) = train_linear_svm(space);
    grid(f, ClassifierKind::Srkda) = train_srkda(space);
    grid(f, ClassifierKind::Pcrc) = train_pcrc(space);
    sets[std::size_t(f)] = ts;
  }
  ASSERT_TRUE(grid.complete());
  FeatureSet fs;
  for (auto f : kFeatureTypes) {
    const auto& row = sets[std::size_t(f)].vectors.row(0);
    fs[f].values.assign(row.data(), row.data() + row.size());
  }
  auto s = score_probe(grid, fs);
  for (auto f : kFeatureTypes)
    for (auto c : kClassifierKinds) {
      const auto& r = sets[std::size_t(f)].vectors.row(0);
      EXPECT_DOUBLE_EQ(s.at(f, c), grid(f, c)->score(std::span<const double>(r.data(), std::size_t(r.size()))));
    }
  grid(FeatureType::Hog, ClassifierKind::Pcrc).reset();
  EXPECT_EQ(test::error_code_of([&] { score_probe(grid, fs); }), Errc::invalid);
}

}  // namespace
}  // namespace smad
