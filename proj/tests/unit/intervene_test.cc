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

#include "clpc/intervene.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "clpc/random.h"
#include "test_util.h"

namespace clpc {
namespace {

using testing::Names;

LogisticModel LrWithTargetRow(std::vector<double> row) {
  RealMatrix w(2, row.size());
  for (std::size_t k = 0; k < row.size(); ++k) w(0, k) = row[k];
  return LogisticModel(Names(2), w, {0.0, 0.0});
}

TEST(ClpcGainTest, Table1) {
  const PrototypeModel m = PrototypeModel::FromPrototypes(
      Names(2), {BinaryPrototype({1, 1, 0, 1, 0, 1, 0, 0}),
                 BinaryPrototype({0, 0, 0, 0, 1, 1, 1, 1})});
  const ConceptVector c({0.7, 0.9, 0.1, 1, 0, 0.8, 0.5, 0.2});
  const std::vector<double> expect{0.3, 0.1, 0.1, 0, 0, 0.2, 0.5, 0.2};
  const std::vector<double> g = ClpcGain(c, m, 0);
  const DistanceDecomposition d = Decompose(c, m.prototype(0));
  for (std::size_t k = 0; k < 8; ++k) {
    EXPECT_NEAR(g[k], expect[k], 1e-12);
    EXPECT_EQ(g[k], d.per_concept[k].contribution);
  }
  EXPECT_EQ(GainOrder(g).front(), 6u);
}

TEST(ClpcGainTest, ZeroAtPrototype) {
  const PrototypeModel m = PrototypeModel::FromPrototypes(
      Names(2), {BinaryPrototype({1, 0, 1}), BinaryPrototype({0, 1, 1})});
  for (double v : ClpcGain(ConceptVector({1, 0, 1}), m, 0)) EXPECT_EQ(v, 0.0);
}

TEST(LrGainTest, HandValues) {
  const LogisticModel m = LrWithTargetRow({2.0, -3.0, 0.0});
  const std::vector<double> g = LrGain(ConceptVector({0.25, 0.4, 0.9}), m, 0);
  EXPECT_NEAR(g[0], 1.5, 1e-15);
  EXPECT_NEAR(g[1], 1.2, 1e-15);
  EXPECT_EQ(g[2], 0.0);
  for (double v : LrGain(ConceptVector({0.25, 0.4, 0.9}),
                         LrWithTargetRow({0.0, 0.0, 0.0}), 0)) {
    EXPECT_EQ(v, 0.0);
  }
}

TEST(LrGainTest, MatchesGenericGainAndIsNonNegative) {
  Rng rng(31);
  for (int draw = 0; draw < 300; ++draw) {
    const std::size_t k = 1 + rng.UniformIndex(12);
    std::vector<double> row(k), c(k), star(k);
    for (std::size_t i = 0; i < k; ++i) {
      row[i] = 3 * rng.Normal();
      c[i] = rng.Uniform();
      star[i] = row[i] > 0 ? 1.0 : 0.0;
    }
    const auto lr = LrGain(ConceptVector(c), LrWithTargetRow(row), 0);
    const auto generic = GenericGain(row, ConceptVector(c), star);
    for (std::size_t i = 0; i < k; ++i) {
      EXPECT_GE(lr[i], 0.0);
      EXPECT_NEAR(lr[i], generic[i], 1e-12);
    }
  }
}

TEST(GenericGainTest, Examples) {
  const std::vector<double> zero{0.0, 0.0};
  for (double v : GenericGain(zero, ConceptVector({0.5, 0.5}), std::vector<double>{1, 0})) {
    EXPECT_EQ(v, 0.0);
  }
  const std::vector<double> same{0.3, 0.7};
  for (double v : GenericGain(std::vector<double>{2, -1}, ConceptVector(same), same)) {
    EXPECT_EQ(v, 0.0);
  }
  const auto g = GenericGain(std::vector<double>{2, -1}, ConceptVector({0.5, 0.5}),
                             std::vector<double>{1, 0});
  EXPECT_EQ(g, (std::vector<double>{1.0, 0.5}));
  EXPECT_CLPC_ERROR(GenericGain(std::vector<double>{1}, ConceptVector({0.5, 0.5}),
                                std::vector<double>{1, 0}),
                    ErrorKind::kInvalidInput);
}

TEST(LrFiOrderTest, AbsoluteWeightOrder) {
  EXPECT_EQ(LrFiOrder(LrWithTargetRow({0.1, -5, 2}), 0),
            (std::vector<std::size_t>{1, 2, 0}));
  EXPECT_EQ(LrFiOrder(LrWithTargetRow({1, -1, 1, -1}), 0),
            (std::vector<std::size_t>{0, 1, 2, 3}));
  EXPECT_EQ(LrFiOrder(LrWithTargetRow({4}), 0), (std::vector<std::size_t>{0}));
  EXPECT_CLPC_ERROR(LrFiOrder(LrWithTargetRow({4}), 2), ErrorKind::kInvalidInput);
}

TEST(GainOrderTest, StableOnTies) {
  EXPECT_EQ(GainOrder(std::vector<double>{0.2, 0.5, 0.2, 0.5}),
            (std::vector<std::size_t>{1, 3, 0, 2}));
}

TEST(CorrectionTargetTest, Sources) {
  const PrototypeModel m = PrototypeModel::FromPrototypes(
      Names(2), {BinaryPrototype({1, 0}), BinaryPrototype({0, 1})});
  EXPECT_EQ(CorrectionTarget(0, m, 0, CorrectionSource::kAnsatz), 1.0);
  const LogisticModel lr = LrWithTargetRow({-3.0, 2.0});
  EXPECT_EQ(CorrectionTarget(0, lr, 0, CorrectionSource::kAnsatz), 0.0);
  EXPECT_EQ(CorrectionTarget(1, lr, 0, CorrectionSource::kAnsatz), 1.0);
  const std::vector<std::uint8_t> gt{0, 1};
  EXPECT_EQ(CorrectionTarget(1, m, 0, CorrectionSource::kGroundTruth, gt), 1.0);
  EXPECT_CLPC_ERROR(CorrectionTarget(1, m, 0, CorrectionSource::kGroundTruth),
                    ErrorKind::kInvalidInput);
}

TEST(ParseTest, NamesRoundTrip) {
  for (Strategy s : {Strategy::kLrFi, Strategy::kLrGain, Strategy::kClpcGain}) {
    EXPECT_EQ(ParseStrategy(ToString(s)), s);
  }
  EXPECT_EQ(ParseCorrectionSource("gt"), CorrectionSource::kGroundTruth);
  EXPECT_EQ(ParseCorrectionSource("ground-truth-concepts"), CorrectionSource::kGroundTruth);
  EXPECT_EQ(ParseCorrectionSource("ansatz"), CorrectionSource::kAnsatz);
  EXPECT_CLPC_ERROR(ParseStrategy("random"), ErrorKind::kInvalidInput);
}

TEST(InterveneTest, AlreadyCorrect) {
  const AnyModel m = PrototypeModel::FromPrototypes(
      Names(2), {BinaryPrototype({1, 0}), BinaryPrototype({0, 1})});
  const InterventionTrace t = Intervene(ConceptVector({0.9, 0.1}), m, 0,
                                        Strategy::kClpcGain, CorrectionSource::kAnsatz);
  EXPECT_TRUE(t.succeeded);
  EXPECT_EQ(t.steps_used, 0u);
  EXPECT_TRUE(t.steps.empty());
}

TEST(InterveneTest, HandSimulatedTwoClass) {
  const PrototypeModel proto = PrototypeModel::FromPrototypes(
      Names(2), {BinaryPrototype({1, 0}), BinaryPrototype({0, 1})});
  const ConceptVector c({0.2, 0.9});
  const std::vector<double> g = ClpcGain(c, proto, 0);
  EXPECT_NEAR(g[0], 0.8, 1e-15);
  EXPECT_NEAR(g[1], 0.9, 1e-15);
  const InterventionTrace t =
      Intervene(c, AnyModel(proto), 0, Strategy::kClpcGain, CorrectionSource::kAnsatz);
  EXPECT_EQ(t.initial_prediction, 1u);
  ASSERT_EQ(t.steps.size(), 1u);
  EXPECT_EQ(t.steps[0].concept_index, 1u);
  EXPECT_EQ(t.steps[0].old_score, 0.9);
  EXPECT_EQ(t.steps[0].new_score, 0.0);
  EXPECT_EQ(t.steps[0].prediction_after, 0u);
  EXPECT_TRUE(t.succeeded);
  EXPECT_EQ(t.steps_used, 1u);
  const ConceptVector after = ApplyTrace(c, t);
  const std::vector<double> d = Distances(after, proto);
  EXPECT_NEAR(d[0], 0.8, 1e-15);
  EXPECT_NEAR(d[1], 1.2, 1e-15);
}

TEST(InterveneTest, AllEditsReachTargetPrototype) {
  Rng rng(44);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t l = 2 + rng.UniformIndex(5);
    const std::size_t k = 3 + rng.UniformIndex(10);  // 2^3 >= 6 classes
    std::vector<BinaryPrototype> protos;
    while (protos.size() < l) {
      std::vector<std::uint8_t> b(k);
      for (auto& v : b) v = rng.Bernoulli(0.5);
      BinaryPrototype p(b);
      if (std::find(protos.begin(), protos.end(), p) == protos.end()) protos.push_back(p);
    }
    const PrototypeModel m = PrototypeModel::FromPrototypes(Names(l), protos);
    std::vector<double> c(k);
    for (double& v : c) v = rng.Uniform();
    const std::size_t target = rng.UniformIndex(l);
    const InterventionTrace t = Intervene(ConceptVector(c), AnyModel(m), target,
                                          Strategy::kClpcGain, CorrectionSource::kAnsatz);
    EXPECT_TRUE(t.succeeded);
    // Each step lowers the target distance by exactly the recorded gain.
    ConceptVector cur(c);
    double d = L1Distance(cur, m.prototype(target));
    for (const InterventionStep& s : t.steps) {
      cur.Set(s.concept_index, s.new_score);
      const double next = L1Distance(cur, m.prototype(target));
      EXPECT_NEAR(d - next, s.gain, 1e-12);
      d = next;
    }
  }
}

TEST(InterveneTest, RerankGivesSameFirstStep) {
  const PrototypeModel m = PrototypeModel::FromPrototypes(
      Names(3), {BinaryPrototype({1, 0, 0, 1}), BinaryPrototype({0, 1, 1, 0}),
                 BinaryPrototype({0, 1, 0, 1})});
  const ConceptVector c({0.3, 0.8, 0.9, 0.2});
  const auto a = Intervene(c, AnyModel(m), 0, Strategy::kClpcGain,
                           CorrectionSource::kAnsatz, {}, {false});
  const auto b = Intervene(c, AnyModel(m), 0, Strategy::kClpcGain,
                           CorrectionSource::kAnsatz, {}, {true});
  ASSERT_FALSE(a.steps.empty());
  ASSERT_FALSE(b.steps.empty());
  EXPECT_EQ(a.steps[0].concept_index, b.steps[0].concept_index);
  EXPECT_TRUE(a.succeeded);
  EXPECT_TRUE(b.succeeded);
}

TEST(InterveneTest, LrStrategiesAndGroundTruth) {
  RealMatrix w(2, 3);
  w(0, 0) = 4.0;
  w(0, 1) = -1.0;
  w(0, 2) = 0.5;
  w(1, 0) = -4.0;
  const LogisticModel lr(Names(2), w, {0.0, 0.0});
  const ConceptVector c({0.1, 0.9, 0.1});
  ASSERT_EQ(LrPredict(c, lr).label_index, 1u);
  const std::vector<std::uint8_t> gt{1, 0, 1};
  for (Strategy s : {Strategy::kLrFi, Strategy::kLrGain}) {
    const auto t = Intervene(c, AnyModel(lr), 0, s, CorrectionSource::kGroundTruth, gt);
    EXPECT_TRUE(t.succeeded);
    ASSERT_FALSE(t.steps.empty());
    EXPECT_EQ(t.steps[0].concept_index, 0u);
    EXPECT_EQ(t.steps[0].new_score, 1.0);
    EXPECT_DOUBLE_EQ(t.steps[0].gain, s == Strategy::kLrFi ? 4.0 : 4.0 * 0.9);
  }
}

TEST(InterveneTest, StrategyModelMismatchIsTypeError) {
  const AnyModel lr = LrWithTargetRow({1.0});
  EXPECT_CLPC_ERROR(Intervene(ConceptVector({0.5}), lr, 0, Strategy::kClpcGain,
                              CorrectionSource::kAnsatz),
                    ErrorKind::kType);
  const AnyModel proto = PrototypeModel::FromPrototypes(
      Names(2), {BinaryPrototype({1}), BinaryPrototype({0})});
  EXPECT_CLPC_ERROR(Intervene(ConceptVector({0.5}), proto, 0, Strategy::kLrGain,
                              CorrectionSource::kAnsatz),
                    ErrorKind::kType);
}

}  // namespace
}  // namespace clpc
