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

#include <compare>
#include <filesystem>
#include <map>
#include <set>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "offload/fitness.hpp"
#include "offload/pattern.hpp"

namespace offload {

struct CacheKey {
  std::string model_digest;
  std::string device;
  std::string fingerprint;
  std::string backend_id;

  friend auto operator<=>(const CacheKey&, const CacheKey&) = default;
};

/// Builds the key for `pattern`. All-CPU patterns share one key per model.
CacheKey make_cache_key(const std::string& model_digest, const OffloadPattern& pattern,
                        const std::string& backend_id);

/// Thread-safe measurement store. Identical keys overwrite (last writer wins).
class MeasurementCache {
 public:
  MeasurementCache() = default;
  MeasurementCache(const MeasurementCache&) = delete;
  MeasurementCache& operator=(const MeasurementCache&) = delete;

  std::optional<Measurement> lookup(const CacheKey& key) const;
  void insert(const CacheKey& key, Measurement measurement);
  std::size_t size() const;
  std::vector<std::pair<CacheKey, Measurement>> entries() const;

  /// Entries inserted since the last load or store, in insertion order.
  std::vector<std::pair<CacheKey, Measurement>> take_unsaved();

 private:
  friend std::vector<std::string> cache_load(const std::filesystem::path&, MeasurementCache&);

  mutable std::mutex mutex_;
  std::map<CacheKey, Measurement> entries_;
  std::vector<CacheKey> unsaved_;
};

/// Reads a JSON-lines cache file into `cache`. A missing file is an empty
/// cache. A corrupt final record is skipped and reported in the returned
/// warnings; corruption anywhere else throws ParseError.
std::vector<std::string> cache_load(const std::filesystem::path& path, MeasurementCache& cache);

/// Appends unsaved, non-failed entries to `path`. Throws InputError when the
/// file cannot be written.
void cache_store(const std::filesystem::path& path, MeasurementCache& cache);

/// Exclusive `<cache>.lock` file held for the lifetime of the object. A second
/// holder fails immediately with InputError.
class CacheFileLock {
 public:
  explicit CacheFileLock(std::filesystem::path cache_path);
  ~CacheFileLock();
  CacheFileLock(const CacheFileLock&) = delete;
  CacheFileLock& operator=(const CacheFileLock&) = delete;

 private:
  std::filesystem::path lock_path_;
  int fd_ = -1;
};

}  // namespace offload
