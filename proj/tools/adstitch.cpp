#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "adstitch/checkpoint.hpp"
#include "adstitch/config.hpp"
#include "adstitch/crosscheck.hpp"
#include "adstitch/diversity.hpp"
#include "adstitch/dpp.hpp"
#include "adstitch/ingest.hpp"
#include "adstitch/quality.hpp"
#include "adstitch/records.hpp"
#include "adstitch/serve.hpp"
#include "adstitch/sim.hpp"
#include "adstitch/text.hpp"

namespace {

using namespace adstitch;

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  return out;
}

void write_catalog(const AssetCatalog& catalog, const std::string& path) {
  std::ofstream out = open_out(path);
  for (const auto& [url, entry] : catalog) {
    for (const auto& a : entry.titles) out << to_jsonl_line(to_json(a));
    for (const auto& a : entry.descriptions) out << to_jsonl_line(to_json(a));
  }
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

SystemConfig config_from(const std::string& path) {
  return load_config_with_env(path);
}

ModelBank load_bank(const std::string& path) { return load_checkpoint(path); }

int cmd_ingest(const std::string& pages_path, const std::string& assets_path,
               bool extract, const std::string& out_path,
               const std::string& config_path) {
  SystemConfig config = config_from(config_path);
  LoadResult loaded = load_catalog(pages_path, assets_path);
  print_warnings(loaded.warnings);

  if (extract) {
    for (const auto& page : loaded.pages) {
      auto& entry = loaded.catalog[page.url];
      std::set<std::string> seen;
      auto key_of = [](const AdAsset& a) {
        return std::string(to_string(a.kind)) + "|" + case_fold(normalize(a.text));
      };
      for (const auto& a : entry.titles) seen.insert(key_of(a));
      for (const auto& a : entry.descriptions) seen.insert(key_of(a));
      for (auto& a : extract_assets(page, config)) {
        if (!seen.insert(key_of(a)).second) continue;
        (a.kind == AssetKind::Title ? entry.titles : entry.descriptions)
            .push_back(std::move(a));
      }
    }
  }

  // drop anything violating the asset invariants, loudly
  std::size_t dropped = 0;
  for (auto& [url, entry] : loaded.catalog) {
    auto sweep = [&](std::vector<AdAsset>& assets) {
      std::vector<AdAsset> kept;
      for (auto& a : assets) {
        Verdict v = validate_asset(a, config);
        if (v.ok) {
          kept.push_back(std::move(a));
        } else {
          ++dropped;
          std::cerr << "warning: asset " << a.id << " dropped:";
          for (const auto& reason : v.violations) std::cerr << " " << reason << ";";
          std::cerr << "\n";
        }
      }
      assets = std::move(kept);
    };
    sweep(entry.titles);
    sweep(entry.descriptions);
  }

  write_catalog(loaded.catalog, out_path);
  std::size_t titles = 0, descs = 0;
  for (const auto& [url, entry] : loaded.catalog) {
    titles += entry.titles.size();
    descs += entry.descriptions.size();
  }
  std::cout << "pages=" << loaded.pages.size() << " titles=" << titles
            << " descriptions=" << descs << " dropped=" << dropped
            << " warnings=" << loaded.warnings.size() << "\n";
  return 0;
}

int cmd_filter(const std::string& pages_path, const std::string& assets_path,
               const std::string& rules_path, const std::string& out_path,
               const std::string& rejected_path) {
  LoadResult loaded = load_catalog(pages_path, assets_path);
  print_warnings(loaded.warnings);
  RuleSet rules = load_rules(rules_path);
  FilterResult result = filter_catalog(loaded.catalog, loaded.pages, rules);
  write_catalog(result.kept, out_path);
  if (!rejected_path.empty()) {
    std::ofstream out = open_out(rejected_path);
    for (const auto& [asset, verdict] : result.rejected) {
      Json j;
      j["asset"] = to_json(asset);
      Json violations = Json::array();
      for (const auto& v : verdict.violations) {
        Json vj;
        vj["rule"] = to_string(v.rule);
        vj["span"] = v.span;
        violations.push_back(std::move(vj));
      }
      j["violations"] = std::move(violations);
      out << to_jsonl_line(j);
    }
  }
  std::cout << "kept=" << catalog_size(result.kept)
            << " rejected=" << result.rejected.size() << "\n";
  return 0;
}

int cmd_select(const std::string& pages_path, const std::string& assets_path,
               const std::string& out_path, const std::string& config_path) {
  SystemConfig config = config_from(config_path);
  LoadResult loaded = load_catalog(pages_path, assets_path);
  print_warnings(loaded.warnings);
  HashedEmbedder embedder;
  AssetCatalog selected =
      select_catalog(loaded.catalog, embedder, config.title_budget,
                     config.desc_budget, config.dpp_epsilon);
  write_catalog(selected, out_path);
  std::cout << "pages=" << selected.size() << " assets=" << catalog_size(selected)
            << "\n";
  return 0;
}

int cmd_diversity(const std::string& pages_path, const std::string& assets_path,
                  const std::string& kind_name, const std::string& out_path) {
  LoadResult loaded = load_catalog(pages_path, assets_path);
  print_warnings(loaded.warnings);
  auto kind = asset_kind_from(kind_name);
  if (!kind) throw std::runtime_error("unknown asset kind \"" + kind_name + "\"");

  std::ofstream out;
  if (!out_path.empty()) out = open_out(out_path);

  double pb = 0, sb = 0, dn = 0;
  std::size_t scored = 0;
  std::cout << std::fixed << std::setprecision(2);
  for (const auto& [url, entry] : loaded.catalog) {
    const auto& pool =
        *kind == AssetKind::Title ? entry.titles : entry.descriptions;
    if (pool.size() < 2) continue;
    std::vector<std::string> texts;
    texts.reserve(pool.size());
    for (const auto& a : pool) texts.push_back(a.text);
    DiversityReport report = diversity_report(texts);
    if (out.is_open()) {
      Json j;
      j["page_url"] = url;
      j["kind"] = to_string(*kind);
      j["report"] = to_json(report);
      out << to_jsonl_line(j);
    }
    std::cout << url << " n=" << report.n_texts
              << " pairwise_bleu=" << report.pairwise_bleu_avg
              << " self_bleu=" << report.self_bleu_avg
              << " distinct=" << report.distinct_avg << "\n";
    pb += report.pairwise_bleu_avg;
    sb += report.self_bleu_avg;
    dn += report.distinct_avg;
    ++scored;
  }
  if (scored == 0) {
    std::cout << "no page has 2+ assets of kind " << to_string(*kind) << "\n";
    return 0;
  }
  double k = static_cast<double>(scored);
  std::cout << "mean over " << scored << " pages: pairwise_bleu=" << pb / k
            << " self_bleu=" << sb / k << " distinct=" << dn / k << "\n";
  return 0;
}

int cmd_gate(const std::string& judgments_path, double threshold,
             double confidence, const std::string& out_path) {
  std::vector<Judgment> judgments;
  read_jsonl(judgments_path, [&](std::size_t, const Json& j) {
    judgments.push_back(judgment_from_json(j));
  });
  GateReport report = gate(judgments, threshold, confidence);
  std::string line = to_jsonl_line(to_json(report));
  std::cout << line;
  std::cout << (report.passed ? "PASS" : "FAIL") << " lower_bound="
            << report.lower_bound << " threshold=" << threshold << "\n";
  if (!out_path.empty()) open_out(out_path) << line;
  return report.passed ? 0 : 2;
}

int cmd_checkpoint(bool init, const std::string& inspect_path,
                   const std::string& copy_src, const std::string& out_path,
                   const std::string& config_path) {
  if (init) {
    if (out_path.empty()) throw std::runtime_error("--init requires --out");
    SystemConfig config = config_from(config_path);
    save_checkpoint(ModelBank::make(config.hash_bits), out_path);
    std::cout << "initialized hash_bits=" << config.hash_bits << " at "
              << out_path << "\n";
    return 0;
  }
  if (!inspect_path.empty()) {
    ModelBank bank = load_bank(inspect_path);
    std::cout << "hash_bits=" << bank.hash_bits << "\n";
    for (const auto& m : bank.positions) {
      std::size_t nonzero = 0;
      for (float w : m.weights) {
        if (w != 0.0f) ++nonzero;
      }
      std::cout << to_string(m.position) << " updates_seen=" << m.updates_seen
                << " bias=" << m.bias << " nonzero_weights=" << nonzero << "\n";
    }
    return 0;
  }
  if (!copy_src.empty()) {
    if (out_path.empty()) throw std::runtime_error("--copy requires --out");
    save_checkpoint(load_bank(copy_src), out_path);
    std::cout << "copied " << copy_src << " -> " << out_path << "\n";
    return 0;
  }
  throw std::runtime_error("checkpoint needs one of --init, --inspect, --copy");
}

int cmd_train(const std::string& model_path, const std::string& events_path,
              const std::string& out_path, const std::string& config_path) {
  SystemConfig config = config_from(config_path);
  ModelBank bank = load_bank(model_path);

  std::array<std::vector<TrainExample>, kNumPositions> pending;
  int pending_total = 0;
  std::size_t applied = 0;
  auto flush = [&]() {
    for (int p = 0; p < kNumPositions; ++p) {
      auto& batch = pending[static_cast<std::size_t>(p)];
      if (batch.empty()) continue;
      train_online(bank.positions[static_cast<std::size_t>(p)], batch,
                   config.learning_rate);
      applied += batch.size();
      batch.clear();
    }
    pending_total = 0;
  };

  read_jsonl(events_path, [&](std::size_t, const Json& j) {
    Position pos = position_from_string(j.at("position").get<std::string>());
    std::string text = j.at("text").get<std::string>();
    std::string query = j.value("query", std::string());
    int label = j.at("label").get<int>();
    TrainExample ex;
    ex.features = featurize_salted(text, tokenize(normalize(query)), pos,
                                   bank.hash_bits, "");
    ex.label = label;
    pending[static_cast<std::size_t>(static_cast<int>(pos))].push_back(
        std::move(ex));
    if (++pending_total >= config.batch_size) flush();
  });
  flush();

  save_checkpoint(bank, out_path);
  std::cout << "trained examples=" << applied << " -> " << out_path << "\n";
  return 0;
}

void print_metrics(const char* label, const BusinessMetrics& m) {
  std::cout << label << " rpm=" << m.rpm << " iy=" << m.iy << " ctr=" << m.ctr
            << " qbr=" << m.qbr << "\n";
}

int cmd_simulate(const std::string& pages_path, const std::string& assets_path,
                 const std::string& world_path, const std::string& model_path,
                 const std::string& policy_name, const std::string& mode_name,
                 std::uint64_t srpv, bool train, std::uint64_t run_seed,
                 int prestitch_m, const std::string& out_path,
                 const std::string& out_model_path,
                 const std::string& config_path) {
  SystemConfig config = config_from(config_path);
  LoadResult loaded = load_catalog(pages_path, assets_path);
  print_warnings(loaded.warnings);
  WorldSpec spec = load_world_spec(world_path);
  ModelBank bank = load_bank(model_path);
  World world(spec, loaded.pages, loaded.catalog, bank.hash_bits);

  TrainOptions train_options;
  train_options.enabled = train;
  train_options.learning_rate = config.learning_rate;
  train_options.batch_size = config.batch_size;
  train_options.label = config.train_label;

  std::unique_ptr<StitchPolicy> policy;
  if (policy_name == "online") {
    policy = std::make_unique<OnlinePolicy>(bank,
                                            stitch_mode_from_string(mode_name),
                                            config.trial_scale, train_options);
  } else if (policy_name == "prestitch") {
    if (train) throw std::runtime_error("prestitch policy cannot train");
    policy = std::make_unique<PrestitchPolicy>(bank, world, prestitch_m,
                                               derive_seed(spec.seed, 0xF0));
  } else {
    throw std::runtime_error("unknown policy \"" + policy_name + "\"");
  }

  SimOptions options;
  options.run_seed = run_seed;
  options.train = train_options;
  EpisodeLog log = simulate(world, *policy, srpv, options);

  std::cout << std::fixed << std::setprecision(6);
  print_metrics(log.policy.c_str(), business_metrics(log));
  if (!out_path.empty()) open_out(out_path) << to_jsonl_line(to_json(log));
  if (!out_model_path.empty()) save_checkpoint(bank, out_model_path);
  return 0;
}

EpisodeLog read_episode_log(const std::string& path) {
  std::vector<EpisodeLog> logs;
  read_jsonl(path, [&](std::size_t, const Json& j) {
    logs.push_back(episode_log_from_json(j));
  });
  if (logs.size() != 1) {
    throw std::runtime_error(path + ": expected exactly one episode record, found " +
                             std::to_string(logs.size()));
  }
  return logs.front();
}

int cmd_ab(const std::string& treatment_path, const std::string& control_path,
           std::uint64_t seed, int resamples, const std::string& out_path) {
  EpisodeLog treatment = read_episode_log(treatment_path);
  EpisodeLog control = read_episode_log(control_path);
  AbReport report = ab_compare(treatment, control, seed, resamples);

  std::string line = to_jsonl_line(to_json(report));
  std::cout << std::fixed << std::setprecision(6);
  auto row = [](const char* name, const MetricDelta& d) {
    std::cout << name << " treatment=" << d.treatment << " control=" << d.control;
    if (d.defined) {
      std::cout << " delta_pct=" << d.delta_pct;
    } else {
      std::cout << " delta_pct=n/a";
    }
    std::cout << (d.significant ? " significant" : " not-significant") << "\n";
  };
  row("rpm", report.rpm);
  row("iy", report.iy);
  row("ctr", report.ctr);
  row("qbr", report.qbr);
  if (!out_path.empty()) open_out(out_path) << line;
  return 0;
}

int cmd_serve(const std::string& pages_path, const std::string& assets_path,
              const std::string& model_path, const std::string& requests_path,
              const std::string& out_path, int listen_port, bool zero_latency,
              const std::string& config_path) {
  SystemConfig config = config_from(config_path);
  LoadResult loaded = load_catalog(pages_path, assets_path);
  print_warnings(loaded.warnings);
  auto bank = std::make_shared<const ModelBank>(load_bank(model_path));
  Service service(std::move(loaded.catalog), bank, config);

  if (listen_port >= 0) {
    TcpServer server(service, listen_port);
    std::cout << "listening on 127.0.0.1:" << server.port() << "\n" << std::flush;
    server.run();
    return 0;
  }

  if (requests_path.empty()) {
    throw std::runtime_error("serve needs --requests or --listen");
  }
  std::ofstream out = open_out(out_path.empty() ? "/dev/stdout" : out_path);
  std::size_t served = 0, failed = 0;
  read_jsonl(requests_path, [&](std::size_t, const Json& j) {
    ServeResponse response = service.handle(serve_request_from_json(j));
    if (zero_latency) response.latency_micros = 0;
    out << to_jsonl_line(to_json(response));
    response.ok ? ++served : ++failed;
  });
  std::cout << "served=" << served << " failed=" << failed << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ad asset pipeline and stitching engine"};
  app.require_subcommand(1);

  std::string pages, assets, rules, config_path, out, rejected, model, events;
  std::string world_path, kind = "Title", policy = "online", mode = "exploit";
  std::string treatment, control, requests, inspect_path, copy_src, out_model;
  bool extract = false, train = false, zero_latency = false, init = false;
  double threshold = 0.90, confidence = 0.975;
  std::uint64_t srpv = 100000, run_seed = 1, ab_seed = 7;
  int resamples = 1000, prestitch_m = 5, listen_port = -1;

  auto* ingest = app.add_subcommand("ingest", "load, split and extract assets");
  ingest->add_option("--pages", pages)->required();
  ingest->add_option("--assets", assets)->required();
  ingest->add_option("--out", out)->required();
  ingest->add_option("--config", config_path);
  ingest->add_flag("--extract", extract, "add landing page extraction candidates");

  auto* filter = app.add_subcommand("filter", "crosscheck factualty filtering");
  filter->add_option("--pages", pages)->required();
  filter->add_option("--assets", assets)->required();
  filter->add_option("--rules", rules)->required();
  filter->add_option("--out", out)->required();
  filter->add_option("--rejected", rejected);

  auto* select = app.add_subcommand("select", "diversity-aware pool selection");
  select->add_option("--pages", pages)->required();
  select->add_option("--assets", assets)->required();
  select->add_option("--out", out)->required();
  select->add_option("--config", config_path);

  auto* diversity = app.add_subcommand("diversity", "per-page diversity report");
  diversity->add_option("--pages", pages)->required();
  diversity->add_option("--assets", assets)->required();
  diversity->add_option("--kind", kind, "Title or Description");
  diversity->add_option("--out", out);

  auto* gate_cmd = app.add_subcommand("gate", "launch gate over judgments");
  gate_cmd->add_option("--judgments", events)->required();
  gate_cmd->add_option("--threshold", threshold);
  gate_cmd->add_option("--confidence", confidence);
  gate_cmd->add_option("--out", out);

  auto* checkpoint = app.add_subcommand("checkpoint", "model snapshot tools");
  checkpoint->add_flag("--init", init, "write a fresh zero model");
  checkpoint->add_option("--inspect", inspect_path);
  checkpoint->add_option("--copy", copy_src);
  checkpoint->add_option("--out", out);
  checkpoint->add_option("--config", config_path);

  auto* train_cmd = app.add_subcommand("train", "replay labeled events into a model");
  train_cmd->add_option("--model", model)->required();
  train_cmd->add_option("--events", events)->required();
  train_cmd->add_option("--out", out)->required();
  train_cmd->add_option("--config", config_path);

  auto* simulate = app.add_subcommand("simulate", "run a synthetic traffic episode");
  simulate->add_option("--pages", pages)->required();
  simulate->add_option("--assets", assets)->required();
  simulate->add_option("--world", world_path)->required();
  simulate->add_option("--model", model)->required();
  simulate->add_option("--policy", policy, "online or prestitch");
  simulate->add_option("--mode", mode, "explore or exploit");
  simulate->add_option("--srpv", srpv);
  simulate->add_flag("--train", train);
  simulate->add_option("--run-seed", run_seed);
  simulate->add_option("--prestitch-m", prestitch_m);
  simulate->add_option("--out", out);
  simulate->add_option("--out-model", out_model);
  simulate->add_option("--config", config_path);

  auto* ab = app.add_subcommand("ab", "compare two episode logs");
  ab->add_option("--treatment", treatment)->required();
  ab->add_option("--control", control)->required();
  ab->add_option("--seed", ab_seed);
  ab->add_option("--resamples", resamples);
  ab->add_option("--out", out);

  auto* serve = app.add_subcommand("serve", "answer stitch requests");
  serve->add_option("--pages", pages)->required();
  serve->add_option("--assets", assets)->required();
  serve->add_option("--model", model)->required();
  serve->add_option("--requests", requests);
  serve->add_option("--out", out);
  serve->add_option("--listen", listen_port, "TCP port; 0 picks a free one");
  serve->add_flag("--zero-latency", zero_latency,
                  "report latency as 0 for reproducible output files");
  serve->add_option("--config", config_path);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(ingest)) {
      return cmd_ingest(pages, assets, extract, out, config_path);
    }
    if (app.got_subcommand(filter)) {
      return cmd_filter(pages, assets, rules, out, rejected);
    }
    if (app.got_subcommand(select)) {
      return cmd_select(pages, assets, out, config_path);
    }
    if (app.got_subcommand(diversity)) {
      return cmd_diversity(pages, assets, kind, out);
    }
    if (app.got_subcommand(gate_cmd)) {
      return cmd_gate(events, threshold, confidence, out);
    }
    if (app.got_subcommand(checkpoint)) {
      return cmd_checkpoint(init, inspect_path, copy_src, out, config_path);
    }
    if (app.got_subcommand(train_cmd)) {
      return cmd_train(model, events, out, config_path);
    }
    if (app.got_subcommand(simulate)) {
      return cmd_simulate(pages, assets, world_path, model, policy, mode, srpv,
                          train, run_seed, prestitch_m, out, out_model,
                          config_path);
    }
    if (app.got_subcommand(ab)) {
      return cmd_ab(treatment, control, ab_seed, resamples, out);
    }
    if (app.got_subcommand(serve)) {
      return cmd_serve(pages, assets, model, requests, out, listen_port,
                       zero_latency, config_path);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
