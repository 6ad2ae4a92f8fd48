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

#include "offload/cache.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>

#include "offload/errors.hpp"
#include "offload/report.hpp"

namespace offload {

CacheKey make_cache_key(const std::string& model_digest, const OffloadPattern& pattern,
                        const std::string& backend_id) {
  return {model_digest, pattern.any() ? std::string(to_string(pattern.device)) : "cpu",
          pattern.fingerprint(), backend_id};
}

std::optional<Measurement> MeasurementCache::lookup(const CacheKey& key) const {
  std::lock_guard lock(mutex_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void MeasurementCache::insert(const CacheKey& key, Measurement measurement) {
  std::lock_guard lock(mutex_);
  entries_[key] = std::move(measurement);
  unsaved_.push_back(key);
}

std::size_t MeasurementCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

std::vector<std::pair<CacheKey, Measurement>> MeasurementCache::entries() const {
  std::lock_guard lock(mutex_);
  return {entries_.begin(), entries_.end()};
}

std::vector<std::pair<CacheKey, Measurement>> MeasurementCache::take_unsaved() {
  std::lock_guard lock(mutex_);
  std::vector<std::pair<CacheKey, Measurement>> out;
  std::set<CacheKey> seen;
  for (const auto& key : unsaved_) {
    if (!seen.insert(key).second) continue;
    out.emplace_back(key, entries_.at(key));
  }
  unsaved_.clear();
  return out;
}

std::vector<std::string> cache_load(const std::filesystem::path& path, MeasurementCache& cache) {
  std::vector<std::string> warnings;
  std::ifstream in(path);
  if (!in) {
    if (std::filesystem::exists(path)) throw InputError("cache file not readable: " + path.string());
    return warnings;
  }
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);)
    if (line.find_first_not_of(" \t\r") != std::string::npos) lines.push_back(std::move(line));

  std::vector<std::pair<CacheKey, Measurement>> records;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    try {
      const auto doc = nlohmann::json::parse(lines[i]);
      CacheKey key{doc.at("model").get<std::string>(), doc.at("device").get<std::string>(),
                   doc.at("fingerprint").get<std::string>(), doc.at("backend").get<std::string>()};
      records.emplace_back(std::move(key), measurement_from_json(doc.at("measurement")));
    } catch (const std::exception& e) {
      if (i + 1 == lines.size()) {
        warnings.push_back(path.string() + ": skipped corrupt final record (" + e.what() + ")");
        break;
      }
      throw ParseError(path.string() + ":" + std::to_string(i + 1) + ": corrupt cache record");
    }
  }
  std::lock_guard lock(cache.mutex_);
  for (auto& [key, m] : records) cache.entries_[key] = std::move(m);
  cache.unsaved_.clear();
  return warnings;
}

void cache_store(const std::filesystem::path& path, MeasurementCache& cache) {
  auto fresh = cache.take_unsaved();
  std::ofstream out(path, std::ios::app);
  if (!out) throw InputError("cannot write cache file: " + path.string());
  for (const auto& [key, m] : fresh) {
    if (m.failed) continue;
    nlohmann::json doc = {{"model", key.model_digest},
                          {"device", key.device},
                          {"fingerprint", key.fingerprint},
                          {"backend", key.backend_id},
                          {"measurement", to_json(m, true)}};
    out << doc.dump() << '\n';
  }
  out.flush();
  if (!out) throw InputError("failed writing cache file: " + path.string());
}

CacheFileLock::CacheFileLock(std::filesystem::path cache_path)
    : lock_path_(cache_path.string() + ".lock") {
  fd_ = ::open(lock_path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
  if (fd_ < 0) {
    if (errno == EEXIST)
      throw InputError("cache is locked by another run (" + lock_path_.string() + ")");
    throw InputError("cannot create cache lock " + lock_path_.string() + ": " + std::strerror(errno));
  }
}

CacheFileLock::~CacheFileLock() {
  if (fd_ >= 0) {
    ::close(fd_);
    std::error_code ec;
    std::filesystem::remove(lock_path_, ec);
  }
}

}  // namespace offload
