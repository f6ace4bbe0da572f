#include "adstitch/records.hpp"

#include <fstream>
#include <stdexcept>

namespace adstitch {

namespace {

std::string require_string(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw std::runtime_error(std::string("missing or non-string field \"") + key + "\"");
  }
  return it->get<std::string>();
}

std::vector<std::string> string_list(const Json& j, const char* key) {
  std::vector<std::string> out;
  auto it = j.find(key);
  if (it == j.end()) return out;
  if (!it->is_array()) {
    throw std::runtime_error(std::string("field \"") + key + "\" must be an array");
  }
  for (const auto& v : *it) {
    if (!v.is_string()) {
      throw std::runtime_error(std::string("field \"") + key + "\" must contain only strings");
    }
    out.push_back(v.get<std::string>());
  }
  return out;
}

}  // namespace

Json to_json(const LandingPage& page) {
  Json j;
  j["url"] = page.url;
  j["domain"] = page.domain;
  j["page_title"] = page.page_title;
  j["visual_headings"] = page.visual_headings;
  j["body_snippets"] = page.body_snippets;
  j["full_text"] = page.full_text;
  return j;
}

LandingPage page_from_json(const Json& j) {
  LandingPage page;
  page.url = require_string(j, "url");
  page.domain = require_string(j, "domain");
  if (auto it = j.find("page_title"); it != j.end() && it->is_string()) {
    page.page_title = it->get<std::string>();
  }
  page.visual_headings = string_list(j, "visual_headings");
  page.body_snippets = string_list(j, "body_snippets");
  if (auto it = j.find("full_text"); it != j.end() && it->is_string()) {
    page.full_text = it->get<std::string>();
  }
  return page;
}

Json to_json(const AdAsset& asset) {
  Json j;
  j["format"] = "asset";
  j["id"] = asset.id;
  j["page_url"] = asset.page_url;
  j["kind"] = to_string(asset.kind);
  j["text"] = asset.text;
  j["source"] = to_string(asset.source);
  if (asset.category) j["category"] = *asset.category;
  return j;
}

AdAsset asset_from_json(const Json& j) {
  AdAsset asset;
  asset.page_url = require_string(j, "page_url");
  std::string kind = require_string(j, "kind");
  auto parsed_kind = asset_kind_from(kind);
  if (!parsed_kind) throw std::runtime_error("unknown asset kind \"" + kind + "\"");
  asset.kind = *parsed_kind;
  asset.text = require_string(j, "text");
  asset.source = AssetSource::Advertiser;
  if (auto it = j.find("source"); it != j.end() && it->is_string()) {
    auto parsed = asset_source_from(it->get<std::string>());
    if (!parsed) {
      throw std::runtime_error("unknown asset source \"" +
                               it->get<std::string>() + "\"");
    }
    asset.source = *parsed;
  }
  if (auto it = j.find("id"); it != j.end() && it->is_string()) {
    asset.id = it->get<std::string>();
  }
  if (auto it = j.find("category"); it != j.end() && it->is_string()) {
    asset.category = it->get<std::string>();
  }
  return asset;
}

Json to_json(const AdCopyRecord& record) {
  Json j;
  j["format"] = "adcopy";
  j["page_url"] = record.page_url;
  j["titles"] = record.titles;
  j["descriptions"] = record.descriptions;
  return j;
}

AdCopyRecord adcopy_from_json(const Json& j) {
  AdCopyRecord record;
  record.page_url = require_string(j, "page_url");
  record.titles = string_list(j, "titles");
  record.descriptions = string_list(j, "descriptions");
  return record;
}

Json to_json(const StitchedAd& ad) {
  Json j;
  for (int p = 0; p < kNumPositions; ++p) {
    Position pos = static_cast<Position>(p);
    const auto& slot = slot_of(ad, pos);
    j[to_string(pos)] = slot ? to_json(*slot) : Json(nullptr);
  }
  return j;
}

StitchedAd stitched_ad_from_json(const Json& j) {
  StitchedAd ad;
  for (int p = 0; p < kNumPositions; ++p) {
    Position pos = static_cast<Position>(p);
    auto it = j.find(to_string(pos));
    if (it == j.end() || it->is_null()) continue;
    slot_of(ad, pos) = asset_from_json(*it);
  }
  return ad;
}

Json to_json(const Judgment& judgment) {
  Json j;
  j["asset_id"] = judgment.asset_id;
  j["text_quality"] = to_string(judgment.text_quality);
  j["human_like"] = judgment.human_like;
  j["factual"] = judgment.factual;
  j["relevant"] = judgment.relevant;
  return j;
}

Judgment judgment_from_json(const Json& j) {
  Judgment judgment;
  judgment.asset_id = require_string(j, "asset_id");
  judgment.text_quality = text_quality_from_string(require_string(j, "text_quality"));
  for (const char* key : {"human_like", "factual", "relevant"}) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_boolean()) {
      throw std::runtime_error(std::string("missing or non-boolean field \"") +
                               key + "\"");
    }
  }
  judgment.human_like = j["human_like"].get<bool>();
  judgment.factual = j["factual"].get<bool>();
  judgment.relevant = j["relevant"].get<bool>();
  return judgment;
}

Json to_json(const GateReport& report) {
  Json j;
  j["n"] = report.n;
  j["overall_good_count"] = report.overall_good_count;
  j["overall_good_rate"] = report.overall_good_rate;
  j["lower_bound"] = report.lower_bound;
  j["threshold"] = report.threshold;
  j["confidence"] = report.confidence;
  j["passed"] = report.passed;
  j["text_quality_rate"] = report.text_quality_rate;
  j["human_like_rate"] = report.human_like_rate;
  j["factual_rate"] = report.factual_rate;
  j["relevant_rate"] = report.relevant_rate;
  return j;
}

Json to_json(const DiversityReport& report) {
  Json j;
  j["n_texts"] = report.n_texts;
  Json orders = Json::array();
  for (int n = 1; n <= 4; ++n) {
    const OrderMetrics& m = report.per_order[static_cast<std::size_t>(n - 1)];
    Json o;
    o["order"] = n;
    o["pairwise_bleu"] = m.pairwise_bleu;
    o["self_bleu"] = m.self_bleu;
    o["distinct"] = m.distinct ? Json(*m.distinct) : Json(nullptr);
    orders.push_back(std::move(o));
  }
  j["per_order"] = std::move(orders);
  j["pairwise_bleu_avg"] = report.pairwise_bleu_avg;
  j["self_bleu_avg"] = report.self_bleu_avg;
  j["distinct_avg"] = report.distinct_avg;
  return j;
}

Json to_json(const EpisodeLog& log) {
  Json j;
  j["policy"] = log.policy;
  j["run_seed"] = log.run_seed;
  j["srpv"] = log.srpv;
  j["impressions"] = log.impressions;
  j["clicks"] = log.clicks;
  j["quick_backs"] = log.quick_backs;
  j["revenue"] = log.revenue;
  Json shards = Json::array();
  for (const auto& s : log.shards) {
    shards.push_back(Json::array({s.srpv, s.impressions, s.clicks, s.quick_backs,
                                  s.revenue}));
  }
  j["shards"] = std::move(shards);
  return j;
}

EpisodeLog episode_log_from_json(const Json& j) {
  EpisodeLog log;
  log.policy = require_string(j, "policy");
  log.run_seed = j.at("run_seed").get<std::uint64_t>();
  log.srpv = j.at("srpv").get<std::uint64_t>();
  log.impressions = j.at("impressions").get<std::uint64_t>();
  log.clicks = j.at("clicks").get<std::uint64_t>();
  log.quick_backs = j.at("quick_backs").get<std::uint64_t>();
  log.revenue = j.at("revenue").get<double>();
  auto it = j.find("shards");
  if (it == j.end() || !it->is_array()) {
    throw std::runtime_error("missing shards array");
  }
  for (const auto& row : *it) {
    if (!row.is_array() || row.size() != 5) {
      throw std::runtime_error("shard rows must have 5 entries");
    }
    ShardTally s;
    s.srpv = row[0].get<std::uint64_t>();
    s.impressions = row[1].get<std::uint64_t>();
    s.clicks = row[2].get<std::uint64_t>();
    s.quick_backs = row[3].get<std::uint64_t>();
    s.revenue = row[4].get<double>();
    log.shards.push_back(s);
  }
  return log;
}

Json to_json(const BusinessMetrics& metrics) {
  Json j;
  j["rpm"] = metrics.rpm;
  j["iy"] = metrics.iy;
  j["ctr"] = metrics.ctr;
  j["qbr"] = metrics.qbr;
  return j;
}

namespace {

Json to_json(const MetricDelta& delta) {
  Json j;
  j["treatment"] = delta.treatment;
  j["control"] = delta.control;
  j["delta_pct"] = delta.defined ? Json(delta.delta_pct) : Json(nullptr);
  j["significant"] = delta.significant;
  return j;
}

}  // namespace

Json to_json(const AbReport& report) {
  Json j;
  j["rpm"] = to_json(report.rpm);
  j["iy"] = to_json(report.iy);
  j["ctr"] = to_json(report.ctr);
  j["qbr"] = to_json(report.qbr);
  j["ctr_z"] = report.ctr_z;
  j["qbr_z"] = report.qbr_z;
  j["resamples"] = report.resamples;
  j["seed"] = report.seed;
  return j;
}

Json to_json(const ServeRequest& request) {
  Json j;
  j["request_id"] = request.request_id;
  j["page_url"] = request.page_url;
  j["query"] = request.query;
  j["mode"] = to_string(request.mode);
  return j;
}

ServeRequest serve_request_from_json(const Json& j) {
  ServeRequest request;
  request.page_url = require_string(j, "page_url");
  if (auto it = j.find("request_id"); it != j.end() && it->is_string()) {
    request.request_id = it->get<std::string>();
  }
  if (auto it = j.find("query"); it != j.end() && it->is_string()) {
    request.query = it->get<std::string>();
  }
  if (auto it = j.find("mode"); it != j.end() && it->is_string()) {
    request.mode = stitch_mode_from_string(it->get<std::string>());
  }
  return request;
}

Json to_json(const ServeResponse& response) {
  Json j;
  j["request_id"] = response.request_id;
  j["ok"] = response.ok;
  if (!response.ok) {
    j["error"] = response.error;
    return j;
  }
  j["ad"] = to_json(response.ad);
  Json scores;
  for (int p = 0; p < kNumPositions; ++p) {
    const auto& s = response.slot_scores[static_cast<std::size_t>(p)];
    scores[to_string(static_cast<Position>(p))] = s ? Json(*s) : Json(nullptr);
  }
  j["slot_scores"] = std::move(scores);
  j["latency_micros"] = response.latency_micros;
  return j;
}

void read_jsonl(const std::string& path,
                const std::function<void(std::size_t, const Json&)>& fn) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    bool blank = true;
    for (char c : line) {
      if (c != ' ' && c != '\t' && c != '\r') { blank = false; break; }
    }
    if (blank) continue;
    Json j = Json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      throw std::runtime_error(path + " line " + std::to_string(line_no) +
                               ": malformed JSON");
    }
    try {
      fn(line_no, j);
    } catch (const std::exception& e) {
      throw std::runtime_error(path + " line " + std::to_string(line_no) + ": " +
                               e.what());
    }
  }
}

std::string to_jsonl_line(const Json& j) { return j.dump() + "\n"; }

}  // namespace adstitch
