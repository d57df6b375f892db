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

#include "clpc/core.h"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "test_util.h"

namespace clpc {
namespace {

using testing::Names;

const BinaryPrototype kTable1Prototype({1, 1, 0, 1, 0, 1, 0, 0});
const ConceptVector kTable1Scores({0.7, 0.9, 0.1, 1, 0, 0.8, 0.5, 0.2});

TEST(ConceptVectorTest, RejectsOutOfRangeAndNonFinite) {
  EXPECT_CLPC_ERROR(ConceptVector({0.5, 1.01}), ErrorKind::kInvalidInput);
  EXPECT_CLPC_ERROR(ConceptVector({-0.1}), ErrorKind::kInvalidInput);
  EXPECT_CLPC_ERROR(ConceptVector({NAN}), ErrorKind::kInvalidInput);
  ConceptVector c({0.0, 1.0});
  EXPECT_CLPC_ERROR(c.Set(0, 2.0), ErrorKind::kInvalidInput);
  EXPECT_CLPC_ERROR(c.Set(5, 0.5), ErrorKind::kInvalidInput);
  c.Set(1, 0.25);
  EXPECT_EQ(c[1], 0.25);
}

TEST(BinaryPrototypeTest, RejectsNonBinaryBits) {
  EXPECT_CLPC_ERROR(BinaryPrototype({0, 2}), ErrorKind::kInvalidInput);
}

TEST(L1DistanceTest, Table1Golden) {
  EXPECT_NEAR(L1Distance(kTable1Scores, kTable1Prototype), 1.4, 1e-12);
}

TEST(L1DistanceTest, ZeroForIdenticalBinaryVector) {
  const BinaryPrototype p({1, 0, 1, 1, 0});
  EXPECT_EQ(L1Distance(ConceptVector({1, 0, 1, 1, 0}), p), 0.0);
}

TEST(L1DistanceTest, HandSum) {
  EXPECT_NEAR(L1Distance(ConceptVector({0.25, 0.5}), BinaryPrototype({1, 0})), 1.25,
              1e-15);
}

TEST(L1DistanceTest, DimensionMismatchIsRejected) {
  EXPECT_CLPC_ERROR(L1Distance(ConceptVector({0.5}), BinaryPrototype({1, 0})),
                    ErrorKind::kInvalidInput);
}

TEST(DecomposeTest, Table1DeltaRow) {
  const DistanceDecomposition d = Decompose(kTable1Scores, kTable1Prototype);
  const std::vector<double> delta{0.3, 0.1, 0.1, 0, 0, 0.2, 0.5, 0.2};
  ASSERT_EQ(d.per_concept.size(), delta.size());
  for (std::size_t k = 0; k < delta.size(); ++k) {
    EXPECT_NEAR(d.per_concept[k].contribution, delta[k], 1e-12) << k;
    EXPECT_EQ(d.per_concept[k].concept_index, k);
  }
  EXPECT_NEAR(d.total, 1.4, 1e-12);
  // concept 4 (0-based 3) is present with a perfect score
  EXPECT_EQ(d.per_concept[3].band, Band::kMatchedPresent);
  EXPECT_EQ(d.per_concept[0].band, Band::kGapPresent);
  EXPECT_EQ(d.per_concept[6].band, Band::kUndesiredAbsent);
  double yellow_red = 0.0;
  for (const auto& c : d.per_concept) yellow_red += c.yellow() + c.red();
  EXPECT_NEAR(yellow_red, 1.4, 1e-12);
}

TEST(DecomposeTest, AllZero) {
  const DistanceDecomposition d =
      Decompose(ConceptVector({0, 0, 0}), BinaryPrototype({0, 0, 0}));
  EXPECT_EQ(d.total, 0.0);
  for (const auto& c : d.per_concept) {
    EXPECT_EQ(c.contribution, 0.0);
    EXPECT_EQ(c.band, Band::kUndesiredAbsent);
  }
}

TEST(DecomposeTest, SinglePresentConceptSegments) {
  const DistanceDecomposition d = Decompose(ConceptVector({0.4}), BinaryPrototype({1}));
  ASSERT_EQ(d.per_concept.size(), 1u);
  const ConceptContribution& c = d.per_concept[0];
  EXPECT_NEAR(c.contribution, 0.6, 1e-15);
  EXPECT_EQ(c.band, Band::kGapPresent);
  EXPECT_NEAR(c.green(), 0.4, 1e-15);
  EXPECT_NEAR(c.yellow(), 0.6, 1e-15);
  EXPECT_EQ(c.red(), 0.0);
}

TEST(DecomposeTest, AbsentConceptAtHalfIsHalfRed) {
  const DistanceDecomposition d = Decompose(ConceptVector({0.5}), BinaryPrototype({0}));
  EXPECT_EQ(d.per_concept[0].red(), 0.5);
  EXPECT_EQ(d.per_concept[0].green(), 0.0);
}

TEST(DistancesTest, TwoPrototypes) {
  const auto m = PrototypeModel::FromPrototypes(
      Names(2), {BinaryPrototype({1, 0}), BinaryPrototype({0, 1})});
  const std::vector<double> d = Distances(ConceptVector({0.9, 0.2}), m);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_NEAR(d[0], 0.3, 1e-15);
  EXPECT_NEAR(d[1], 1.7, 1e-15);
}

TEST(DistancesTest, SymmetricPoint) {
  const auto m = PrototypeModel::FromPrototypes(
      Names(2), {BinaryPrototype({1, 1}), BinaryPrototype({0, 0})});
  const std::vector<double> d = Distances(ConceptVector({0.5, 0.5}), m);
  EXPECT_EQ(d[0], 1.0);
  EXPECT_EQ(d[1], 1.0);
}

TEST(DistancesTest, UnfinalizedModelIsAStateError) {
  const PrototypeModel m(Names(2), RealMatrix(2, 3));
  EXPECT_FALSE(m.is_finalized());
  EXPECT_CLPC_ERROR(Distances(ConceptVector({0, 0, 0}), m), ErrorKind::kState);
}

TEST(PredictTest, LabelAndMargin) {
  const auto m = PrototypeModel::FromPrototypes(
      Names(2), {BinaryPrototype({1, 0}), BinaryPrototype({0, 1})});
  const PredictionResult r = Predict(ConceptVector({0.9, 0.2}), m);
  EXPECT_EQ(r.label_index, 0u);
  EXPECT_NEAR(r.margin, 1.4, 1e-15);
}

TEST(PredictTest, ExactPrototypeIsItsClass) {
  const std::vector<BinaryPrototype> p{BinaryPrototype({0, 0, 1}),
                                       BinaryPrototype({0, 1, 0}),
                                       BinaryPrototype({1, 0, 0})};
  const auto m = PrototypeModel::FromPrototypes(Names(3), p);
  for (std::size_t j = 0; j < p.size(); ++j) {
    std::vector<double> c(p[j].bits().begin(), p[j].bits().end());
    const PredictionResult r = Predict(ConceptVector(c), m);
    EXPECT_EQ(r.label_index, j);
    EXPECT_EQ(r.distances[j], 0.0);
  }
}

TEST(PredictTest, TieGoesToSmallestIndex) {
  // classes 1 and 3 both sit at distance 1 from c, classes 0 and 2 further.
  const auto m = PrototypeModel::FromPrototypes(
      Names(4), {BinaryPrototype({0, 0}), BinaryPrototype({1, 0}),
                 BinaryPrototype({0, 0}), BinaryPrototype({1, 0})});
  const auto m2 = PrototypeModel::FromPrototypes(
      Names(4), {BinaryPrototype({0, 0, 0}), BinaryPrototype({1, 1, 0}),
                 BinaryPrototype({0, 0, 1}), BinaryPrototype({1, 0, 1})});
  const PredictionResult r = Predict(ConceptVector({1, 0.5, 0.5}), m2);
  EXPECT_EQ(r.distances[1], r.distances[3]);
  EXPECT_LT(r.distances[1], r.distances[0]);
  EXPECT_LT(r.distances[1], r.distances[2]);
  EXPECT_EQ(r.label_index, 1u);
  EXPECT_EQ(r.margin, 0.0);
  EXPECT_EQ(Predict(ConceptVector({1, 0}), m).label_index, 1u);
}

TEST(PrototypeModelTest, ValidatesShape) {
  EXPECT_CLPC_ERROR(PrototypeModel(Names(1), RealMatrix(1, 2)), ErrorKind::kInvalidInput);
  EXPECT_CLPC_ERROR(PrototypeModel(Names(3), RealMatrix(2, 2)), ErrorKind::kInvalidInput);
  RealMatrix w(2, 1);
  w(0, 0) = INFINITY;
  EXPECT_CLPC_ERROR(PrototypeModel(Names(2), w), ErrorKind::kInvalidInput);
}

TEST(PrototypeModelTest, FinalizedThresholdsAtHalf) {
  RealMatrix w(2, 3);
  w(0, 0) = 0.0;
  w(0, 1) = -0.1;
  w(0, 2) = 7.0;
  const PrototypeModel m = PrototypeModel(Names(2), w).Finalized();
  ASSERT_TRUE(m.is_finalized());
  EXPECT_EQ(m.prototype(0)[0], 1);
  EXPECT_EQ(m.prototype(0)[1], 0);
  EXPECT_EQ(m.prototype(0)[2], 1);
}

TEST(SigmoidTest, StableAtExtremes) {
  EXPECT_EQ(Sigmoid(0.0), 0.5);
  EXPECT_GT(Sigmoid(800.0), 0.0);
  EXPECT_EQ(Sigmoid(800.0), 1.0);
  EXPECT_GE(Sigmoid(-800.0), 0.0);
  EXPECT_NEAR(Sigmoid(std::log(9.0)), 0.9, 1e-15);
}

}  // namespace
}  // namespace clpc
