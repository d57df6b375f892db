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

#include "clpc/service.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <thread>
#include <vector>

#include "clpc/artifact.h"
#include "httplib.h"
#include "json.hpp"
#include "test_util.h"

namespace clpc {
namespace {

using Json = nlohmann::json;
using testing::Names;

const std::vector<double> kTable1Scores{0.7, 0.9, 0.1, 1, 0, 0.8, 0.5, 0.2};

Artifact Table1Artifact(bool calibrated) {
  Artifact a;
  a.model = PrototypeModel::FromPrototypes(
      {"bird", "fish"}, {BinaryPrototype({1, 1, 0, 1, 0, 1, 0, 0}),
                         BinaryPrototype({0, 0, 1, 0, 1, 0, 1, 1})});
  if (calibrated) {
    a.calibration =
        Calibration{ConformalCalibrator::Calibrate({0.5, 1.0, 1.5, 2.0, 2.5, 3.0}, 0.2), ""};
  }
  return a;
}

Artifact LrArtifact() {
  RealMatrix w(3, 2);
  w(0, 0) = 2.0;
  w(1, 1) = 2.0;
  w(2, 0) = -1.0;
  Artifact a;
  a.model = LogisticModel(Names(3), w, {0.0, 0.0, 0.5});
  return a;
}

Json Body(const HttpResponse& r) { return Json::parse(r.body); }

TEST(WhatIfServiceTest, HealthAndModel) {
  WhatIfService s(Table1Artifact(true), "fnv1a64:1234");
  EXPECT_EQ(Body(s.Health())["artifact_digest"], "fnv1a64:1234");
  const HttpResponse r = s.Model();
  EXPECT_EQ(r.status, 200);
  const Json m = Body(r);
  EXPECT_EQ(m["kind"], "clpc");
  EXPECT_EQ(m["calibrated"], true);
  EXPECT_EQ(m["quantile"], 3.0);
  EXPECT_EQ(m["prototypes"].size(), 2u);
  EXPECT_EQ(s.Model().body, r.body);

  WhatIfService lr(LrArtifact(), "d");
  const Json l = Body(lr.Model());
  EXPECT_EQ(l["kind"], "lr");
  EXPECT_FALSE(l.contains("prototypes"));
  EXPECT_EQ(l["weights_shape"], Json::array({3, 2}));
  EXPECT_EQ(l["calibrated"], false);
}

TEST(WhatIfServiceTest, Table1Decomposition) {
  WhatIfService s(Table1Artifact(false), "d");
  const HttpResponse r = s.WhatIf(Json{{"scores", kTable1Scores}, {"target", 0}}.dump());
  ASSERT_EQ(r.status, 200) << r.body;
  const Json b = Body(r);
  EXPECT_EQ(b["prediction"]["label"], "bird");
  EXPECT_NEAR(b["prediction"]["distances"][0].get<double>(), 1.4, 1e-12);
  const Json& target = b["decomposition"]["target"];
  EXPECT_NEAR(target["total"].get<double>(), 1.4, 1e-12);
  const std::vector<double> delta{0.3, 0.1, 0.1, 0, 0, 0.2, 0.5, 0.2};
  double area = 0.0;
  for (std::size_t k = 0; k < 8; ++k) {
    const Json& c = target["per_concept"][k];
    EXPECT_NEAR(c["contribution"].get<double>(), delta[k], 1e-12);
    area += c["yellow"].get<double>() + c["red"].get<double>();
  }
  EXPECT_NEAR(area, 1.4, 1e-12);
  EXPECT_EQ(target["per_concept"][3]["band"], "matched-present");
  const Json& ranked = b["gains"]["ranked"];
  EXPECT_EQ(ranked[0]["concept_index"], 6);
  EXPECT_NEAR(ranked[0]["gain"].get<double>(), 0.5, 1e-12);
  EXPECT_FALSE(b.contains("conformal") && !b["conformal"].is_null());
}

TEST(WhatIfServiceTest, TopEditReducesTargetDistanceByItsGain) {
  WhatIfService s(Table1Artifact(false), "d");
  const Json first =
      Body(s.WhatIf(Json{{"scores", kTable1Scores}, {"target", "fish"}}.dump()));
  const Json& top = first["gains"]["ranked"][0];
  const double before = first["prediction"]["distances"][1].get<double>();
  const Json second = Body(s.WhatIf(
      Json{{"scores", kTable1Scores},
           {"target", "fish"},
           {"edits", Json::array({{{"concept_index", top["concept_index"]},
                                   {"value", top["correction"]}}})}}
          .dump()));
  const double after = second["prediction"]["distances"][1].get<double>();
  EXPECT_NEAR(before - after, top["gain"].get<double>(), 1e-12);
}

TEST(WhatIfServiceTest, EditsToPrototypeGiveZeroDistance) {
  WhatIfService s(Table1Artifact(false), "d");
  Json edits = Json::array();
  const std::vector<int> fish{0, 0, 1, 0, 1, 0, 1, 1};
  for (int k = 0; k < 8; ++k) edits.push_back({{"concept_index", k}, {"value", fish[k]}});
  const Json b = Body(s.WhatIf(Json{{"scores", kTable1Scores}, {"edits", edits}}.dump()));
  EXPECT_EQ(b["prediction"]["label_index"], 1);
  EXPECT_EQ(b["prediction"]["distances"][1], 0.0);
}

TEST(WhatIfServiceTest, RequestValidation) {
  WhatIfService s(Table1Artifact(false), "d");
  EXPECT_EQ(s.WhatIf("not json").status, 400);
  EXPECT_EQ(s.WhatIf("[1]").status, 400);
  EXPECT_EQ(s.WhatIf(Json{{"scores", {0.5}}}.dump()).status, 400);
  std::vector<double> bad = kTable1Scores;
  bad[2] = 1.5;
  EXPECT_EQ(s.WhatIf(Json{{"scores", bad}}.dump()).status, 400);
  const Json dup = Json::array({{{"concept_index", 1}, {"value", 0.5}},
                                {{"concept_index", 1}, {"value", 0.6}}});
  EXPECT_EQ(s.WhatIf(Json{{"scores", kTable1Scores}, {"edits", dup}}.dump()).status, 400);
  const HttpResponse unknown =
      s.WhatIf(Json{{"scores", kTable1Scores}, {"target", "whale"}}.dump());
  EXPECT_EQ(unknown.status, 404);
  EXPECT_EQ(Body(unknown)["error"]["code"], 404);
  EXPECT_EQ(s.WhatIf(Json{{"scores", kTable1Scores}, {"target", 9}}.dump()).status, 404);
  EXPECT_EQ(
      s.WhatIf(Json{{"scores", kTable1Scores}, {"alpha_override", 0.1}}.dump()).status,
      409);
  EXPECT_EQ(
      s.WhatIf(Json{{"scores", kTable1Scores}, {"strategy", "lr-gain"}}.dump()).status,
      400);
}

TEST(WhatIfServiceTest, ConformalEndpoint) {
  WhatIfService bare(Table1Artifact(false), "d");
  EXPECT_EQ(bare.Conformal(Json{{"scores", kTable1Scores}}.dump()).status, 409);

  WhatIfService s(Table1Artifact(true), "d");
  // quantile 3.0: only the bird prototype (1.4) qualifies, fish is at 6.6
  const Json b = Body(s.Conformal(Json{{"scores", kTable1Scores}}.dump()));
  EXPECT_EQ(b["set"], Json::array({0}));
  EXPECT_EQ(b["rejected"], false);

  const std::vector<double> far{0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5};
  const Json tight =
      Body(s.Conformal(Json{{"scores", far}, {"alpha_override", 0.9}}.dump()));
  EXPECT_EQ(tight["set"], Json::array());
  EXPECT_EQ(tight["rejected"], true);

  const Json loose = Body(s.Conformal(Json{{"scores", far}, {"alpha_override", 0.01}}.dump()));
  EXPECT_EQ(loose["quantile"], "inf");
  EXPECT_EQ(loose["set"], Json::array({0, 1}));
  EXPECT_EQ(loose["rejected"], false);

  const std::vector<double> mid{1, 1, 0.5, 1, 0.5, 1, 0.5, 0.5};  // bird at 2, fish at 6
  const auto base = Body(s.Conformal(Json{{"scores", mid}}.dump()))["set"].get<std::vector<int>>();
  EXPECT_EQ(base, std::vector<int>{0});
  for (double alpha : {0.3, 0.5, 0.7, 0.9}) {
    const auto sub = Body(s.Conformal(Json{{"scores", mid}, {"alpha_override", alpha}}.dump()))
                         ["set"].get<std::vector<int>>();
    EXPECT_TRUE(std::includes(base.begin(), base.end(), sub.begin(), sub.end())) << alpha;
  }
}

TEST(WhatIfServiceTest, LrResponse) {
  WhatIfService s(LrArtifact(), "d");
  const Json b = Body(s.WhatIf(Json{{"scores", {0.9, 0.1}}, {"target", 1}}.dump()));
  EXPECT_EQ(b["kind"], "lr");
  EXPECT_TRUE(b["prediction"].contains("posterior"));
  EXPECT_FALSE(b.contains("decomposition") && !b["decomposition"].is_null());
  EXPECT_EQ(b["gains"]["strategy"], "lr-gain");
  const Json fi = Body(s.WhatIf(
      Json{{"scores", {0.9, 0.1}}, {"target", 1}, {"strategy", "lr-fi"}}.dump()));
  EXPECT_EQ(fi["gains"]["strategy"], "lr-fi");
  EXPECT_EQ(fi["gains"]["ranked"][0]["concept_index"], 1);
}

TEST(WhatIfServiceTest, ReloadSwapsModel) {
  WhatIfService s(Table1Artifact(false), "a");
  s.Reload(LrArtifact(), "b");
  EXPECT_EQ(Body(s.Model())["kind"], "lr");
  EXPECT_EQ(Body(s.Health())["artifact_digest"], "b");
}

TEST(ServerTest, ServesOverHttp) {
  WhatIfService s(Table1Artifact(false), "d");
  Server server(s);
  const int port = server.Bind("127.0.0.1", 0);
  ASSERT_GT(port, 0);
  std::thread t([&] { server.Listen(); });
  httplib::Client client("127.0.0.1", port);
  auto model = client.Get("/v1/model");
  ASSERT_TRUE(model);
  EXPECT_EQ(model->status, 200);
  EXPECT_EQ(Json::parse(model->body)["class_names"], Json::array({"bird", "fish"}));
  EXPECT_TRUE(model->has_header("Access-Control-Allow-Origin"));
  auto whatif = client.Post("/v1/whatif", Json{{"scores", kTable1Scores}}.dump(),
                            "application/json");
  ASSERT_TRUE(whatif);
  EXPECT_EQ(whatif->status, 200);
  auto conformal = client.Post("/v1/conformal", Json{{"scores", kTable1Scores}}.dump(),
                               "application/json");
  ASSERT_TRUE(conformal);
  EXPECT_EQ(conformal->status, 409);
  auto missing = client.Get("/v1/nothing");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);
  auto options = client.Options("/v1/whatif");
  ASSERT_TRUE(options);
  EXPECT_EQ(options->status, 204);

  Server other(s);
  EXPECT_CLPC_ERROR(other.Bind("127.0.0.1", port), ErrorKind::kIo);
  server.Stop();
  t.join();
}

}  // namespace
}  // namespace clpc
