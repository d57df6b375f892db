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

#include <atomic>
#include <chrono>
#include <cmath>
#include <csignal>
#include <cstdio>
#include <optional>
#include <string>
#include <thread>
#include <unordered_set>
#include <utility>
#include <vector>

#include "clpc/csv.h"
#include "clpc/error.h"
#include "clpc/intervene.h"
#include "httplib.h"
#include "json.hpp"

namespace clpc {
namespace {

using Json = nlohmann::ordered_json;

struct HttpError {
  int status;
  std::string message;
};

[[noreturn]] void Reject(int status, std::string message) {
  throw HttpError{status, std::move(message)};
}

std::string_view StatusKind(int status) {
  switch (status) {
    case 400: return "bad-request";
    case 404: return "not-found";
    case 409: return "conflict";
    default: return "internal";
  }
}

HttpResponse ErrorResponse(int status, const std::string& message) {
  Json body;
  body["error"] = {{"code", status}, {"kind", StatusKind(status)}, {"message", message}};
  return {status, body.dump()};
}

HttpResponse Ok(const Json& body) { return {200, body.dump()}; }

Json NumberOrInf(double v) {
  if (std::isinf(v)) return "inf";
  return v;
}

Json ParseObject(std::string_view body) {
  Json doc = Json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) Reject(400, "request body is not valid JSON");
  if (!doc.is_object()) Reject(400, "request body must be a JSON object");
  return doc;
}

double ReadUnitValue(const Json& v, const std::string& what) {
  if (!v.is_number()) Reject(400, what + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x) || x < 0.0 || x > 1.0) {
    Reject(400, what + " must lie in [0,1]");
  }
  return x;
}

std::size_t ReadIndex(const Json& v, const std::string& what) {
  if (!v.is_number_integer()) Reject(400, what + " must be an integer");
  const auto i = v.get<long long>();
  if (i < 0) Reject(400, what + " must be non-negative");
  return static_cast<std::size_t>(i);
}

// Scores with edits applied; everything is validated before a
// ConceptVector is built.
ConceptVector ReadScores(const Json& doc, std::size_t k_size) {
  if (!doc.contains("scores")) Reject(400, "missing field 'scores'");
  const Json& scores = doc["scores"];
  if (!scores.is_array()) Reject(400, "'scores' must be an array");
  if (scores.size() != k_size) {
    Reject(400, "'scores' has " + std::to_string(scores.size()) +
                    " entries, model expects K = " + std::to_string(k_size));
  }
  std::vector<double> values(k_size);
  for (std::size_t k = 0; k < k_size; ++k) {
    values[k] = ReadUnitValue(scores[k], "scores[" + std::to_string(k) + "]");
  }
  if (doc.contains("edits") && !doc["edits"].is_null()) {
    const Json& edits = doc["edits"];
    if (!edits.is_array()) Reject(400, "'edits' must be an array");
    std::unordered_set<std::size_t> seen;
    for (std::size_t i = 0; i < edits.size(); ++i) {
      const Json& e = edits[i];
      const std::string at = "edits[" + std::to_string(i) + "]";
      if (!e.is_object() || !e.contains("concept_index") || !e.contains("value")) {
        Reject(400, at + " must have concept_index and value");
      }
      const std::size_t k = ReadIndex(e["concept_index"], at + ".concept_index");
      if (k >= k_size) Reject(400, at + ".concept_index out of range");
      if (!seen.insert(k).second) Reject(400, at + " repeats concept " + std::to_string(k));
      values[k] = ReadUnitValue(e["value"], at + ".value");
    }
  }
  return ConceptVector(std::move(values));
}

std::optional<std::size_t> ReadTarget(const Json& doc, const AnyModel& model) {
  if (!doc.contains("target") || doc["target"].is_null()) return std::nullopt;
  const Json& t = doc["target"];
  const auto& names = ClassNames(model);
  if (t.is_string()) {
    const std::string name = t.get<std::string>();
    for (std::size_t j = 0; j < names.size(); ++j) {
      if (names[j] == name) return j;
    }
    Reject(404, "unknown target class '" + name + "'");
  }
  if (!t.is_number_integer()) Reject(400, "'target' must be a class index or name");
  const auto j = t.get<long long>();
  if (j < 0 || static_cast<std::size_t>(j) >= names.size()) {
    Reject(404, "unknown target class " + std::to_string(j));
  }
  return static_cast<std::size_t>(j);
}

std::optional<double> ReadAlpha(const Json& doc) {
  if (!doc.contains("alpha_override") || doc["alpha_override"].is_null()) {
    return std::nullopt;
  }
  const Json& a = doc["alpha_override"];
  if (!a.is_number()) Reject(400, "'alpha_override' must be a number");
  const double alpha = a.get<double>();
  if (!(alpha > 0.0 && alpha < 1.0)) Reject(400, "'alpha_override' must lie in (0,1)");
  return alpha;
}

Json PredictionJson(const PredictionResult& p, const AnyModel& model) {
  Json out;
  out["label_index"] = p.label_index;
  out["label"] = ClassNames(model)[p.label_index];
  if (std::holds_alternative<PrototypeModel>(model)) {
    out["distances"] = p.distances;
  } else {
    std::vector<double> posterior = p.distances;
    for (double& v : posterior) v = 1.0 - v;
    out["nonconformity"] = p.distances;
    out["posterior"] = posterior;
  }
  out["margin"] = p.margin;
  return out;
}

Json DecompositionJson(const DistanceDecomposition& d, std::size_t class_index) {
  Json rows = Json::array();
  for (const ConceptContribution& c : d.per_concept) {
    rows.push_back({{"concept_index", c.concept_index},
                    {"prototype_bit", c.prototype_bit},
                    {"score", c.score},
                    {"contribution", c.contribution},
                    {"band", ToString(c.band)},
                    {"green", c.green()},
                    {"yellow", c.yellow()},
                    {"red", c.red()}});
  }
  return {{"class_index", class_index}, {"total", d.total}, {"per_concept", rows}};
}

Json ConformalJson(const ConceptVector& c, const AnyModel& model,
                   const ConformalCalibrator& cal) {
  const std::vector<std::size_t> set = cal.PredictSet(NonconformityAny(c, model));
  Json labels = Json::array();
  for (std::size_t j : set) labels.push_back(ClassNames(model)[j]);
  return {{"alpha", cal.alpha()},
          {"quantile", NumberOrInf(cal.quantile())},
          {"set", set},
          {"labels", labels},
          {"rejected", set.empty()}};
}

Strategy ReadStrategy(const Json& doc, const AnyModel& model) {
  Strategy strategy = std::holds_alternative<PrototypeModel>(model) ? Strategy::kClpcGain
                                                                    : Strategy::kLrGain;
  if (doc.contains("strategy") && !doc["strategy"].is_null()) {
    if (!doc["strategy"].is_string()) Reject(400, "'strategy' must be a string");
    try {
      strategy = ParseStrategy(doc["strategy"].get<std::string>());
    } catch (const Error& e) {
      Reject(400, e.what());
    }
    if (!StrategyMatches(strategy, model)) {
      Reject(400, "strategy " + std::string(ToString(strategy)) +
                      " does not apply to a " + std::string(KindName(model)) + " model");
    }
  }
  return strategy;
}

Json GainsJson(const ConceptVector& c, const AnyModel& model, std::size_t target,
               Strategy strategy) {
  std::vector<double> gains;
  std::vector<std::size_t> order;
  if (strategy == Strategy::kClpcGain) {
    gains = ClpcGain(c, std::get<PrototypeModel>(model), target);
    order = GainOrder(gains);
  } else {
    const auto& lr = std::get<LogisticModel>(model);
    if (strategy == Strategy::kLrGain) {
      gains = LrGain(c, lr, target);
      order = GainOrder(gains);
    } else {
      order = LrFiOrder(lr, target);
      gains.resize(c.size());
      for (std::size_t k = 0; k < c.size(); ++k) gains[k] = std::abs(lr.weights()(target, k));
    }
  }
  Json ranked = Json::array();
  for (std::size_t k : order) {
    const double correction = std::visit(
        [&](const auto& m) {
          return CorrectionTarget(k, m, target, CorrectionSource::kAnsatz);
        },
        model);
    ranked.push_back({{"concept_index", k},
                      {"gain", gains[k]},
                      {"score", c[k]},
                      {"correction", correction}});
  }
  return {{"strategy", ToString(strategy)}, {"target", target}, {"ranked", ranked}};
}

template <typename Fn>
HttpResponse Guard(Fn&& fn) {
  try {
    return fn();
  } catch (const HttpError& e) {
    return ErrorResponse(e.status, e.message);
  } catch (const Error& e) {
    const int status = e.kind() == ErrorKind::kNotFound ? 404
                       : e.kind() == ErrorKind::kState  ? 409
                                                        : 400;
    return ErrorResponse(status, e.what());
  } catch (const std::exception& e) {
    return ErrorResponse(500, e.what());
  }
}

std::atomic<bool> g_interrupted{false};

extern "C" void HandleSignal(int) { g_interrupted.store(true); }

}  // namespace

WhatIfService::WhatIfService(Artifact artifact, std::string digest)
    : snapshot_(std::make_shared<const Snapshot>(
          Snapshot{std::move(artifact), std::move(digest)})) {}

WhatIfService WhatIfService::FromFile(const std::filesystem::path& path) {
  const std::string text = ReadFile(path);
  Artifact artifact;
  try {
    artifact = ParseArtifact(text);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
  return WhatIfService(std::move(artifact), Digest(text));
}

std::shared_ptr<const WhatIfService::Snapshot> WhatIfService::snapshot() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return snapshot_;
}

void WhatIfService::Reload(Artifact artifact, std::string digest) {
  auto next = std::make_shared<const Snapshot>(
      Snapshot{std::move(artifact), std::move(digest)});
  std::lock_guard<std::mutex> lock(mutex_);
  snapshot_ = std::move(next);
}

HttpResponse WhatIfService::Health() const {
  const auto snap = snapshot();
  return Ok({{"status", "ok"}, {"artifact_digest", snap->digest}});
}

HttpResponse WhatIfService::Model() const {
  const auto snap = snapshot();
  const AnyModel& model = snap->artifact.model;
  Json out;
  out["kind"] = KindName(model);
  out["K"] = NumConcepts(model);
  out["L"] = NumClasses(model);
  out["class_names"] = ClassNames(model);
  if (const auto* clpc = std::get_if<PrototypeModel>(&model)) {
    Json rows = Json::array();
    for (std::size_t j = 0; j < clpc->num_classes(); ++j) {
      auto p = clpc->prototype(j);
      rows.push_back(std::vector<int>(p.begin(), p.end()));
    }
    out["prototypes"] = rows;
  } else {
    out["weights_shape"] = {NumClasses(model), NumConcepts(model)};
  }
  const auto& cal = snap->artifact.calibration;
  out["calibrated"] = cal.has_value();
  if (cal) {
    out["alpha"] = cal->calibrator.alpha();
    out["quantile"] = NumberOrInf(cal->calibrator.quantile());
    out["calibration_size"] = cal->calibrator.size();
  }
  out["artifact_digest"] = snap->digest;
  return Ok(out);
}

HttpResponse WhatIfService::WhatIf(std::string_view body) const {
  return Guard([&] {
    const auto snap = snapshot();
    const AnyModel& model = snap->artifact.model;
    const Json doc = ParseObject(body);
    const ConceptVector c = ReadScores(doc, NumConcepts(model));
    const std::optional<std::size_t> target = ReadTarget(doc, model);
    const std::optional<double> alpha = ReadAlpha(doc);
    const auto& calibration = snap->artifact.calibration;
    if (alpha && !calibration) {
      Reject(409, "alpha_override given but the artifact has no calibrator");
    }
    const Strategy strategy = ReadStrategy(doc, model);

    const PredictionResult prediction = PredictAny(c, model);
    Json out;
    out["kind"] = KindName(model);
    out["scores"] = std::vector<double>(c.scores().begin(), c.scores().end());
    out["prediction"] = PredictionJson(prediction, model);
    if (const auto* clpc = std::get_if<PrototypeModel>(&model)) {
      Json decomposition;
      decomposition["predicted"] =
          DecompositionJson(Decompose(c, clpc->prototype(prediction.label_index)),
                            prediction.label_index);
      if (target) {
        decomposition["target"] =
            DecompositionJson(Decompose(c, clpc->prototype(*target)), *target);
      }
      out["decomposition"] = decomposition;
    }
    if (calibration) {
      const ConformalCalibrator cal =
          alpha ? calibration->calibrator.WithAlpha(*alpha) : calibration->calibrator;
      out["conformal"] = ConformalJson(c, model, cal);
    }
    if (target) out["gains"] = GainsJson(c, model, *target, strategy);
    return Ok(out);
  });
}

HttpResponse WhatIfService::Conformal(std::string_view body) const {
  return Guard([&] {
    const auto snap = snapshot();
    const AnyModel& model = snap->artifact.model;
    const auto& calibration = snap->artifact.calibration;
    if (!calibration) Reject(409, "the served artifact has no conformal calibrator");
    const Json doc = ParseObject(body);
    const ConceptVector c = ReadScores(doc, NumConcepts(model));
    const std::optional<double> alpha = ReadAlpha(doc);
    const ConformalCalibrator cal =
        alpha ? calibration->calibrator.WithAlpha(*alpha) : calibration->calibrator;
    return Ok(ConformalJson(c, model, cal));
  });
}

struct Server::Impl {
  httplib::Server http;
  bool bound = false;
  std::atomic<bool> listened{false};
};

Server::Server(WhatIfService& service) : impl_(std::make_unique<Impl>()) {
  auto& http = impl_->http;
  // Without SO_REUSEPORT a second server on the same port fails to bind.
  http.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  http.set_keep_alive_timeout(1);
  auto reply = [](httplib::Response& res, const HttpResponse& r) {
    res.status = r.status;
    res.set_content(r.body, "application/json; charset=utf-8");
  };
  http.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                            {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                            {"Access-Control-Allow-Headers", "Content-Type"}});
  http.Options(R"(/v1/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
  });
  http.Get("/v1/health", [&service, reply](const httplib::Request&, httplib::Response& res) {
    reply(res, service.Health());
  });
  http.Get("/v1/model", [&service, reply](const httplib::Request&, httplib::Response& res) {
    reply(res, service.Model());
  });
  http.Post("/v1/whatif", [&service, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.WhatIf(req.body));
  });
  http.Post("/v1/conformal", [&service, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.Conformal(req.body));
  });
}

Server::~Server() {
  if (impl_->bound && !impl_->listened.load()) {
    // httplib only releases a bound socket from a running server.
    std::thread t([this] { impl_->http.listen_after_bind(); });
    impl_->http.wait_until_ready();
    impl_->http.stop();
    t.join();
  }
}

int Server::Bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->http.bind_to_any_port(host);
    Require(bound > 0, ErrorKind::kIo, "cannot bind " + host);
    impl_->bound = true;
    return bound;
  }
  Require(impl_->http.bind_to_port(host, port), ErrorKind::kIo,
          "cannot bind " + host + ":" + std::to_string(port) + " (port in use?)");
  impl_->bound = true;
  return port;
}

void Server::Listen() {
  impl_->listened.store(true);
  impl_->http.listen_after_bind();
}

void Server::Stop() { impl_->http.stop(); }

int ServeUntilInterrupted(WhatIfService& service, const std::string& host, int port) {
  Server server(service);
  const int bound = server.Bind(host, port);
  g_interrupted.store(false);
  std::signal(SIGINT, HandleSignal);
  std::signal(SIGTERM, HandleSignal);
  std::thread watcher([&server] {
    while (!g_interrupted.load()) {
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
    server.Stop();
  });
  std::fprintf(stderr, "serving on http://%s:%d\n", host.c_str(), bound);
  server.Listen();
  g_interrupted.store(true);
  watcher.join();
  std::signal(SIGINT, SIG_DFL);
  std::signal(SIGTERM, SIG_DFL);
  return 0;
}

}  // namespace clpc
