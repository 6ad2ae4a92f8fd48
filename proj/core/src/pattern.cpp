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

#include "offload/pattern.hpp"

#include <algorithm>

#include "offload/errors.hpp"
#include "offload/hashing.hpp"

namespace offload {

namespace {

char device_letter(Device d) {
  switch (d) {
    case Device::cpu: return 'c';
    case Device::manycore_cpu: return 'm';
    case Device::gpu: return 'g';
    case Device::fpga: return 'f';
  }
  return '?';
}

}  // namespace

OffloadPattern OffloadPattern::cpu_only(Device device, std::size_t gene_count) {
  return OffloadPattern{device, std::vector<std::uint8_t>(gene_count, 0)};
}

OffloadPattern OffloadPattern::from_bits(Device device, std::string_view bits) {
  OffloadPattern p{device, {}};
  p.genes.reserve(bits.size());
  for (char c : bits) {
    if (c != '0' && c != '1') throw InputError("pattern bits must be '0' or '1'");
    p.genes.push_back(c == '1' ? 1 : 0);
  }
  return p;
}

bool OffloadPattern::any() const noexcept {
  return std::any_of(genes.begin(), genes.end(), [](std::uint8_t g) { return g != 0; });
}

std::size_t OffloadPattern::count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(genes.begin(), genes.end(), [](std::uint8_t g) { return g != 0; }));
}

std::string OffloadPattern::bits() const {
  std::string s;
  s.reserve(genes.size());
  for (auto g : genes) s.push_back(g ? '1' : '0');
  return s;
}

std::string OffloadPattern::placement() const {
  std::string s;
  s.reserve(genes.size());
  const char letter = device_letter(device);
  for (auto g : genes) s.push_back(g ? letter : 'c');
  return s;
}

std::string OffloadPattern::fingerprint() const { return hex_digest(placement()); }

void check_pattern(const ProgramModel& model, const OffloadPattern& pattern) {
  if (pattern.size() != model.eligible_loops().size())
    throw InputError("pattern has " + std::to_string(pattern.size()) + " genes but the model has " +
                     std::to_string(model.eligible_loops().size()) + " eligible loops");
  if (pattern.device == Device::cpu && pattern.any())
    throw InputError("a pattern cannot offload to the host cpu");
}

std::vector<bool> device_placement(const ProgramModel& model, const OffloadPattern& pattern) {
  check_pattern(model, pattern);
  std::vector<bool> own(model.loop_count(), false);
  const auto eligible = model.eligible_loops();
  for (std::size_t g = 0; g < pattern.size(); ++g)
    if (pattern.genes[g]) own[eligible[g]] = true;
  std::vector<bool> placed(model.loop_count(), false);
  // Preorder visits parents before children.
  for (std::size_t i : model.preorder()) {
    auto parent = model.parent_of(i);
    placed[i] = own[i] || (parent && placed[*parent]);
  }
  return placed;
}

std::vector<std::string> offloaded_loop_ids(const ProgramModel& model,
                                            const OffloadPattern& pattern) {
  check_pattern(model, pattern);
  std::vector<std::string> ids;
  const auto eligible = model.eligible_loops();
  for (std::size_t g = 0; g < pattern.size(); ++g)
    if (pattern.genes[g]) ids.push_back(model.loop(eligible[g]).id);
  return ids;
}

}  // namespace offload
