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

// Stateless what-if HTTP interface over a loaded model artifact.
//
//   GET  /v1/health     status and artifact digest
//   GET  /v1/model      kind, shape, class names, prototypes, calibration
//   POST /v1/whatif     prediction, decompositions, conformal set and gain
//                       ranking for a score vector with optional edits
//   POST /v1/conformal  prediction set for a score vector
//
// Handlers are plain member functions so they can be exercised without a
// socket; Server binds them to cpp-httplib.

#ifndef CLPC_SERVICE_H_
#define CLPC_SERVICE_H_

#include <atomic>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

#include "clpc/artifact.h"

namespace clpc {

struct HttpResponse {
  int status = 200;
  std::string body;  // JSON
};

class WhatIfService {
 public:
  WhatIfService(Artifact artifact, std::string digest);
  static WhatIfService FromFile(const std::filesystem::path& path);

  HttpResponse Health() const;
  HttpResponse Model() const;
  HttpResponse WhatIf(std::string_view body) const;
  HttpResponse Conformal(std::string_view body) const;

  // Swaps the served artifact; requests already running keep the snapshot
  // they started with.
  void Reload(Artifact artifact, std::string digest);

 private:
  struct Snapshot {
    Artifact artifact;
    std::string digest;
  };

  std::shared_ptr<const Snapshot> snapshot() const;

  mutable std::mutex mutex_;
  std::shared_ptr<const Snapshot> snapshot_;
};

class Server {
 public:
  explicit Server(WhatIfService& service);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds to host:port (port 0 picks a free port) and returns the bound
  // port. Throws kIo when the port cannot be bound.
  int Bind(const std::string& host, int port);
  // Blocks until Stop().
  void Listen();
  void Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Serves until SIGINT or SIGTERM; returns 0 after a clean shutdown.
int ServeUntilInterrupted(WhatIfService& service, const std::string& host, int port);

}  // namespace clpc

#endif  // CLPC_SERVICE_H_
