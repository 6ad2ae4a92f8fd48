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

// Structured (JSON) forms of reports and measurements.

#include "json.hpp"
#include "offload/orchestrator.hpp"
#include "offload/search_report.hpp"

namespace offload {

inline constexpr std::string_view kSearchReportSchema = "offload-tuner/search-report/v1";
inline constexpr std::string_view kOrchestrationReportSchema = "offload-tuner/orchestration-report/v1";

nlohmann::json to_json(const Measurement& m, bool with_samples = false);
/// Throws ParseError / ValidationError.
Measurement measurement_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const TransferPlan& plan);
nlohmann::json to_json(const CandidateScore& score);
nlohmann::json to_json(const SearchReport& report);
nlohmann::json to_json(const OrchestrationReport& report);

}  // namespace offload
