#pragma once

#include <functional>
#include <string>

#include <json.hpp>

#include "adstitch/diversity.hpp"
#include "adstitch/ingest.hpp"
#include "adstitch/quality.hpp"
#include "adstitch/serve.hpp"
#include "adstitch/sim.hpp"
#include "adstitch/types.hpp"

namespace adstitch {

// ordered_json everywhere: field order is part of the output contract, since
// repeated runs must produce byte-identical files.
using Json = nlohmann::ordered_json;

Json to_json(const LandingPage& page);
LandingPage page_from_json(const Json& j);

Json to_json(const AdAsset& asset);
AdAsset asset_from_json(const Json& j);

Json to_json(const AdCopyRecord& record);
AdCopyRecord adcopy_from_json(const Json& j);

Json to_json(const StitchedAd& ad);
StitchedAd stitched_ad_from_json(const Json& j);

Json to_json(const Judgment& judgment);
Judgment judgment_from_json(const Json& j);

Json to_json(const GateReport& report);

Json to_json(const DiversityReport& report);

Json to_json(const EpisodeLog& log);
EpisodeLog episode_log_from_json(const Json& j);

Json to_json(const BusinessMetrics& metrics);

Json to_json(const AbReport& report);

Json to_json(const ServeRequest& request);
ServeRequest serve_request_from_json(const Json& j);

Json to_json(const ServeResponse& response);

// Calls fn(line_number, parsed) per non-blank line; parse failures throw
// std::runtime_error naming the file and line.
void read_jsonl(const std::string& path,
                const std::function<void(std::size_t, const Json&)>& fn);

// Serializes one record per line, no trailing spaces, '\n' terminated.
std::string to_jsonl_line(const Json& j);

}  // namespace adstitch
