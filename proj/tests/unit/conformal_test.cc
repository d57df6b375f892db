// Copyright 2026 The CLPC Authors
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

#include "clpc/conformal.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "clpc/random.h"
#include "test_util.h"

namespace clpc {
namespace {

using testing::Names;

const BinaryPrototype kTable1Prototype({1, 1, 0, 1, 0, 1, 0, 0});
const ConceptVector kTable1Scores({0.7, 0.9, 0.1, 1, 0, 0.8, 0.5, 0.2});

PrototypeModel Table1Model() {
  return PrototypeModel::FromPrototypes(
      Names(2), {kTable1Prototype, BinaryPrototype({0, 0, 1, 0, 1, 0, 1, 1})});
}

TEST(NonconformityTest, ClpcIsDistance) {
  const PrototypeModel m = Table1Model();
  EXPECT_NEAR(NonconformityClpc(kTable1Scores, m, 0), 1.4, 1e-12);
  EXPECT_EQ(NonconformityClpc(ConceptVector({1, 1, 0, 1, 0, 1, 0, 0}), m, 0), 0.0);
  Rng rng(1);
  for (int i = 0; i < 50; ++i) {
    std::vector<double> c(8);
    for (double& v : c) v = rng.Uniform();
    const ConceptVector cv(c);
    const std::vector<double> d = Distances(cv, m);
    const std::vector<double> s = NonconformityScores(cv, m);
    for (std::size_t j = 0; j < 2; ++j) {
      EXPECT_EQ(NonconformityClpc(cv, m, j), d[j]);
      EXPECT_EQ(s[j], d[j]);
    }
  }
}

TEST(NonconformityTest, LrIsOneMinusPosterior) {
  const LogisticModel uniform(Names(4), RealMatrix(4, 2), std::vector<double>(4, 0.0));
  for (std::size_t j = 0; j < 4; ++j) {
    EXPECT_EQ(NonconformityLr(ConceptVector({0.3, 0.6}), uniform, j), 0.75);
  }
  const LogisticModel saturated(Names(2), RealMatrix(2, 1), {60.0, 0.0});
  EXPECT_LE(NonconformityLr(ConceptVector({0.5}), saturated, 0), 1e-12);
  const LogisticModel two(Names(2), RealMatrix(2, 1), {0.0, std::log(3.0)});
  EXPECT_NEAR(NonconformityLr(ConceptVector({0.5}), two, 0), 0.75, 1e-12);
  EXPECT_NEAR(NonconformityLr(ConceptVector({0.5}), two, 1), 0.25, 1e-12);
}

TEST(CalibrateTest, RankRule) {
  EXPECT_EQ(QuantileRank(4, 0.5), 3u);
  const auto cal = ConformalCalibrator::Calibrate({4, 1, 3, 2}, 0.5);
  EXPECT_EQ(cal.quantile(), 3.0);
  EXPECT_EQ(cal.scores(), (std::vector<double>{1, 2, 3, 4}));
  EXPECT_EQ(QuantileRank(10, 0.05), 11u);
  const auto inf = ConformalCalibrator::Calibrate(std::vector<double>(10, 1.0), 0.05);
  EXPECT_TRUE(std::isinf(inf.quantile()));
  EXPECT_GT(inf.quantile(), 0.0);
}

TEST(CalibrateTest, ConstantScores) {
  for (double alpha : {0.1, 0.25, 0.5, 0.9}) {
    EXPECT_EQ(ConformalCalibrator::Calibrate(std::vector<double>(40, 7.0), alpha).quantile(),
              7.0);
  }
}

TEST(CalibrateTest, RankIsRobustToFloatingPointProducts) {
  // (N + 1)(1 - alpha) is an exact integer here but rounds slightly above it.
  EXPECT_EQ(QuantileRank(19, 0.1), 18u);
  EXPECT_EQ(QuantileRank(99, 0.1), 90u);
}

TEST(CalibrateTest, MatchesBruteForceSmallestValidThreshold) {
  // Smallest calibration score that at least (N+1)(1-alpha) scores do not
  // exceed, in exact integer arithmetic with alpha = a/100.
  Rng rng(99);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng.UniformIndex(60);
    const std::size_t a = 1 + rng.UniformIndex(99);
    std::vector<double> scores(n);
    for (double& v : scores) v = static_cast<double>(rng.UniformIndex(20)) / 4.0;
    double expected = INFINITY;
    for (double cand : scores) {
      const auto le = static_cast<std::size_t>(
          std::count_if(scores.begin(), scores.end(), [&](double v) { return v <= cand; }));
      if (le * 100 >= (n + 1) * (100 - a)) expected = std::min(expected, cand);
    }
    const double alpha = static_cast<double>(a) / 100.0;
    EXPECT_EQ(ConformalCalibrator::Calibrate(scores, alpha).quantile(), expected)
        << "n=" << n << " alpha=" << alpha;
  }
}

TEST(CalibrateTest, RejectsBadInput) {
  EXPECT_CLPC_ERROR(ConformalCalibrator::Calibrate({}, 0.1), ErrorKind::kInvalidInput);
  EXPECT_CLPC_ERROR(ConformalCalibrator::Calibrate({1.0}, 0.0), ErrorKind::kInvalidInput);
  EXPECT_CLPC_ERROR(ConformalCalibrator::Calibrate({1.0}, 1.0), ErrorKind::kInvalidInput);
  EXPECT_CLPC_ERROR(ConformalCalibrator::Calibrate({NAN}, 0.1), ErrorKind::kInvalidInput);
}

TEST(CalibrateTest, RestoreChecksQuantile) {
  EXPECT_EQ(ConformalCalibrator::Restore(0.5, {1, 2, 3, 4}, 3.0).quantile(), 3.0);
  EXPECT_CLPC_ERROR(ConformalCalibrator::Restore(0.5, {1, 2, 3, 4}, 2.0),
                    ErrorKind::kParse);
  EXPECT_CLPC_ERROR(ConformalCalibrator::Restore(0.5, {4, 1}, 4.0), ErrorKind::kParse);
}

TEST(PredictSetTest, InfiniteQuantileGivesAllLabels) {
  const PrototypeModel m = Table1Model();
  const auto cal = ConformalCalibrator::Calibrate(std::vector<double>(10, 0.5), 0.05);
  EXPECT_EQ(PredictSet(kTable1Scores, m, cal), (std::vector<std::size_t>{0, 1}));
}

TEST(PredictSetTest, ExactPrototypeWithZeroQuantile) {
  const PrototypeModel m = PrototypeModel::FromPrototypes(
      Names(3), {BinaryPrototype({1, 0}), BinaryPrototype({0, 1}), BinaryPrototype({1, 1})});
  const auto cal = ConformalCalibrator::Calibrate(std::vector<double>(5, 0.0), 0.5);
  ASSERT_EQ(cal.quantile(), 0.0);
  EXPECT_EQ(PredictSet(ConceptVector({0, 1}), m, cal), (std::vector<std::size_t>{1}));
}

TEST(PredictSetTest, EmptyWhenEveryDistanceExceedsQuantile) {
  const PrototypeModel m = PrototypeModel::FromPrototypes(
      Names(2), {BinaryPrototype({1, 1, 0, 0}), BinaryPrototype({0, 0, 1, 1})});
  const ConceptVector c({0.5, 0.5, 0.5, 0.5});  // distance 2.0 to both
  const auto cal = ConformalCalibrator::Calibrate({1.4, 1.4, 1.4}, 0.5);
  ASSERT_EQ(cal.quantile(), 1.4);
  EXPECT_TRUE(PredictSet(c, m, cal).empty());
}

TEST(PredictSetTest, SmallerAlphaGivesSuperset) {
  Rng rng(12);
  std::vector<double> scores(200);
  for (double& v : scores) v = rng.Uniform(0, 4);
  const auto wide = ConformalCalibrator::Calibrate(scores, 0.05);
  const auto narrow = wide.WithAlpha(0.2);
  EXPECT_LE(narrow.quantile(), wide.quantile());
  std::vector<BinaryPrototype> protos;
  for (int j = 0; j < 6; ++j) {
    std::vector<std::uint8_t> b(8);
    for (auto& v : b) v = rng.Bernoulli(0.5);
    protos.push_back(BinaryPrototype(b));
  }
  const PrototypeModel m = PrototypeModel::FromPrototypes(Names(6), protos);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> c(8);
    for (double& v : c) v = rng.Uniform();
    const auto a = PredictSet(ConceptVector(c), m, narrow);
    const auto b = PredictSet(ConceptVector(c), m, wide);
    EXPECT_TRUE(std::includes(b.begin(), b.end(), a.begin(), a.end()));
  }
}

TEST(SummarizeSetsTest, AllSingletonTruth) {
  const std::vector<std::size_t> truth{0, 1, 2};
  const ConformalMetrics m = SummarizeSets({{0}, {1}, {2}}, truth);
  EXPECT_EQ(m.set_accuracy, 1.0);
  EXPECT_EQ(m.avg_set_size_nonempty, 1.0);
  EXPECT_EQ(m.reject_ratio, 0.0);
}

TEST(SummarizeSetsTest, AllEmpty) {
  const std::vector<std::size_t> truth{0, 1};
  const ConformalMetrics m = SummarizeSets({{}, {}}, truth);
  EXPECT_EQ(m.set_accuracy, 0.0);
  EXPECT_EQ(m.reject_ratio, 1.0);
  EXPECT_FALSE(m.avg_set_size_nonempty.has_value());
}

TEST(SummarizeSetsTest, MixedToy) {
  // t = 0, u = 1: sets {t}, {}, {t,u}, {u} for four samples of class t.
  const std::vector<std::size_t> truth{0, 0, 0, 0};
  const ConformalMetrics m = SummarizeSets({{0}, {}, {0, 1}, {1}}, truth);
  EXPECT_EQ(m.num_samples, 4u);
  EXPECT_EQ(m.set_accuracy, 0.5);
  EXPECT_EQ(m.reject_ratio, 0.25);
  ASSERT_TRUE(m.avg_set_size_nonempty.has_value());
  EXPECT_NEAR(*m.avg_set_size_nonempty, 4.0 / 3.0, 1e-15);
}

TEST(EvaluateConformalTest, CalibrateOnTestGivesCoverage) {
  const PrototypeModel m = Table1Model();
  const LabeledDataset data(8, Names(2),
                            {{kTable1Scores, 0, {}},
                             {ConceptVector({0, 0, 1, 0, 1, 0, 1, 1}), 1, {}},
                             {ConceptVector({0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5}), 1, {}}});
  const ConformalCalibrator cal = CalibrateClpc(m, data, 0.2);
  ASSERT_TRUE(std::isinf(cal.quantile()));
  const ConformalMetrics r = EvaluateConformal(m, cal, data);
  EXPECT_EQ(r.set_accuracy, 1.0);
  EXPECT_EQ(r.avg_set_size_nonempty, 2.0);
  EXPECT_EQ(r.reject_ratio, 0.0);
  EXPECT_EQ(r.empirical_coverage, 1.0);
}

TEST(CalibrateModelTest, RejectsEmptyCalibrationSet) {
  const LabeledDataset empty(8, Names(2), {});
  EXPECT_CLPC_ERROR(CalibrateClpc(Table1Model(), empty, 0.1), ErrorKind::kInvalidInput);
}

}  // namespace
}  // namespace clpc
