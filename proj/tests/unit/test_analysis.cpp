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

#include <gtest/gtest.h>

#include <cmath>

#include "offload/analysis.hpp"
#include "offload/errors.hpp"
#include "test_util.hpp"

namespace offload {
namespace {

using nlohmann::json;
using testing::model_of;

json scored_loop(const std::string& id, std::uint64_t iters, double ops, double bytes, double res,
                 bool par = true) {
  return {{"id", id},       {"parent", nullptr},        {"parallelizable", par},
          {"iteration_count", iters}, {"per_iteration_ops", ops}, {"bytes_accessed", bytes},
          {"fpga_resource_estimate", res}};
}

TEST(Analysis, ArithmeticIntensity) {
  LoopStatement l;
  l.iteration_count = 1000;
  l.per_iteration_ops = 8;
  l.bytes_accessed = 4000;
  EXPECT_DOUBLE_EQ(arithmetic_intensity(l), 2.0);
  l.bytes_accessed = 0;
  EXPECT_TRUE(std::isinf(arithmetic_intensity(l)));
}

TEST(Analysis, MriqFixtureNarrowsToFour) {
  const auto model = load_model(testing::fixture("mriq/model.json"));
  const auto profile = load_profile(testing::fixture("mriq/profile.json"));
  const auto c = narrow_candidates(model, profile);
  ASSERT_EQ(c.size(), 4u);
  EXPECT_EQ(c[0].loop_id, "computeq_samples");
  EXPECT_EQ(c[1].loop_id, "phimag");
  EXPECT_EQ(c[2].loop_id, "setup_kvals");
  EXPECT_EQ(c[3].loop_id, "read_kx");  // ties broken by document order
  EXPECT_EQ(score_loops(model, profile).size(), 16u);
}

TEST(Analysis, FiltersAndTruncation) {
  const auto model = model_of({scored_loop("few", 10, 100, 1, 0.1),       // too few iterations
                               scored_loop("big", 5000, 100, 1, 0.95),    // too large
                               scored_loop("ser", 5000, 100, 1, 0.1, false),
                               scored_loop("hi", 5000, 10, 1, 0.1),
                               scored_loop("lo", 5000, 1, 1, 0.1),
                               scored_loop("none", 5000, 1, 0, 0.1)});
  const auto profile = testing::simple_profile(Device::fpga);
  const auto all = score_loops(model, profile);
  ASSERT_EQ(all.size(), 5u);
  EXPECT_FALSE(all[1].passed_resource_check);
  EXPECT_TRUE(all[4].degenerate);

  auto c = narrow_candidates(model, profile, {4, 1000});
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c[0].loop_id, "none");  // no bytes: infinite intensity ranks first
  EXPECT_EQ(c[1].loop_id, "hi");
  EXPECT_EQ(c[2].loop_id, "lo");
  EXPECT_EQ(c[1].gene, 2u);

  c = narrow_candidates(model, profile, {1, 1000});
  ASSERT_EQ(c.size(), 1u);
  c = narrow_candidates(model, profile, {4, 1});
  EXPECT_EQ(c.size(), 4u);
  EXPECT_THROW(narrow_candidates(model, profile, {0, 1}), InputError);
}

TEST(Analysis, EmptyWhenNothingEligible) {
  const auto model = model_of({scored_loop("a", 5000, 1, 1, 0.1, false)});
  EXPECT_TRUE(narrow_candidates(model, testing::simple_profile(Device::fpga)).empty());
}

}  // namespace
}  // namespace offload
