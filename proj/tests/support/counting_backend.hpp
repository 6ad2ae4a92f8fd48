/* Copyright 2026 The offload-tuner Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <atomic>
#include <map>
#include <mutex>
#include <string>

#include "offload/backend.hpp"

namespace offload::testing {

/// Forwards to another backend and counts calls per fingerprint.
class CountingBackend : public MeasurementBackend {
 public:
  explicit CountingBackend(MeasurementBackend& inner) : inner_(inner) {}

  Measurement measure(const BackendRequest& request) override {
    {
      std::lock_guard lock(mutex_);
      ++per_fingerprint_[request.pattern.fingerprint()];
    }
    ++calls_;
    return inner_.measure(request);
  }
  std::string id() const override { return inner_.id(); }
  std::size_t parallelism() const override { return inner_.parallelism(); }

  std::size_t calls() const { return calls_.load(); }
  std::map<std::string, int> per_fingerprint() const {
    std::lock_guard lock(mutex_);
    return per_fingerprint_;
  }

 private:
  MeasurementBackend& inner_;
  std::atomic<std::size_t> calls_{0};
  mutable std::mutex mutex_;
  std::map<std::string, int> per_fingerprint_;
};

}  // namespace offload::testing
