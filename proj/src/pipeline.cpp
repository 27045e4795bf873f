// Copyright 2026 The DaoEval Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "daoeval/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "daoeval/diagnostics.hpp"
#include "daoeval/dynamics.hpp"
#include "daoeval/error.hpp"
#include "daoeval/http.hpp"
#include "daoeval/llm.hpp"
#include "daoeval/market.hpp"
#include "daoeval/sources.hpp"
#include "daoeval/store.hpp"
#include "daoeval/synth.hpp"

namespace daoeval {
namespace fs = std::filesystem;
namespace {

std::vector<CutoffKind> cutoff_kinds(CutoffMode mode) {
  switch (mode) {
    case CutoffMode::kExAnte: return {CutoffKind::kExAnte};
    case CutoffMode::kExPost: return {CutoffKind::kExPost};
    case CutoffMode::kBoth: return {CutoffKind::kExAnte, CutoffKind::kExPost};
  }
  return {CutoffKind::kExPost};
}

std::string env_or_empty(const std::string& name) {
  if (name.empty()) return {};
  const char* v = std::getenv(name.c_str());
  return v ? std::string(v) : std::string();
}

std::string now_iso() {
  const auto now = std::chrono::duration_cast<std::chrono::seconds>(
                       std::chrono::system_clock::now().time_since_epoch())
                       .count();
  return format_iso8601(now);
}

Json opt_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json coverage_json(const SegmentCoverage& c) { return Json{{"pre", c.pre}, {"post", c.post}}; }

Json market_window_json(const MarketWindow& w) {
  return Json{{"proposal_id", w.proposal_id},
              {"window_days", w.window_days},
              {"event_day", w.event_day},
              {"price_pct_change", opt_json(w.price_pct_change)},
              {"adj_return", opt_json(w.adj_return)},
              {"tvl_abnormal", opt_json(w.tvl_abnormal)},
              {"treasury_abnormal", opt_json(w.treasury_abnormal)},
              {"coverage", Json{{"price", coverage_json(w.price_coverage)},
                                {"index", coverage_json(w.index_coverage)},
                                {"tvl", coverage_json(w.tvl_coverage)},
                                {"treasury", coverage_json(w.treasury_coverage)}}}};
}

std::shared_ptr<HttpTransport> make_transport(const RunConfig& c) {
  return std::make_shared<HttplibTransport>(std::chrono::seconds(c.sources.timeout_seconds));
}

RetryPolicy retry_policy(const RunConfig& c) {
  RetryPolicy r;
  r.max_attempts = c.sources.max_attempts;
  r.initial_backoff = std::chrono::milliseconds(c.sources.initial_backoff_ms);
  return r;
}

std::string jsonl(const std::vector<Json>& lines) {
  std::string out;
  for (const auto& l : lines) out += l.dump() + "\n";
  return out;
}

}  // namespace

void parallel_for(std::size_t n, std::size_t workers,
                  const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  workers = std::max<std::size_t>(1, std::min(workers, n));
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) threads.emplace_back(work);
    for (auto& t : threads) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

Json decision_line_to_json(const DecisionLine& line, const Proposal& proposal) {
  Json j;
  j["proposal_id"] = line.proposal_id;
  j["status"] = line.status;
  if (line.decision) {
    const auto& d = *line.decision;
    j["policy_id"] = d.policy_id;
    j["cutoff"] = to_string(d.cutoff.kind);
    j["cutoff_at"] = d.cutoff.at;
    j["selected_option"] = d.selected_option + 1;
    j["choice"] = proposal.choices.at(d.selected_option);
    j["fallback"] = d.fallback;
    j["justification"] = d.justification;
  } else {
    j["detail"] = line.detail;
  }
  return j;
}

DecisionLine decision_line_from_json(const Json& j) {
  DecisionLine line;
  line.proposal_id = require_string(j, "proposal_id");
  line.status = require_string(j, "status");
  if (line.status == "ok") {
    PolicyDecision d;
    d.proposal_id = line.proposal_id;
    d.policy_id = require_string(j, "policy_id");
    d.cutoff.kind = parse_cutoff_kind(require_string(j, "cutoff"));
    d.cutoff.at = require_integer(j, "cutoff_at");
    const std::int64_t sel = require_integer(j, "selected_option");
    if (sel < 1) throw Error(ErrorCode::kInvalidRecord, "selected_option must be >= 1");
    d.selected_option = static_cast<std::size_t>(sel - 1);
    d.fallback = j.value("fallback", false);
    d.justification = j.value("justification", "");
    line.decision = std::move(d);
  } else if (line.status == "inapplicable" || line.status == "failed") {
    line.detail = j.value("detail", "");
  } else {
    throw Error(ErrorCode::kInvalidRecord, "unknown decision status '" + line.status + "'");
  }
  return line;
}

fs::path decisions_path(const RunConfig& c, CutoffKind kind) {
  return c.output_dir / "decisions" / (c.policy_id + "." + std::string(to_string(kind)) + ".jsonl");
}

Pipeline::Pipeline(RunConfig config, Diagnostics& diag) : config_(std::move(config)), diag_(diag) {}

void Pipeline::run(Command command) {
  validate_for_command(config_, command);
  diag_.Info("command_start", to_string(command));
  switch (command) {
    case Command::kIngest: ingest(); break;
    case Command::kFeatures: features(); break;
    case Command::kSimulate: simulate(); break;
    case Command::kEvaluate: evaluate(); break;
    case Command::kReport: report(); break;
    case Command::kSynth: synth(); break;
  }
  diag_.Info("command_done", to_string(command));
}

void Pipeline::ingest() {
  const auto& src = config_.sources;
  auto transport = make_transport(config_);
  const RetryPolicy retry = retry_policy(config_);
  HttpClient snapshot_http("snapshot", transport, retry, src.requests_per_second, &diag_);
  SnapshotClient snapshot(snapshot_http, src.snapshot_url, &diag_);

  std::vector<Proposal> proposals;
  if (!config_.ingest.spaces.empty()) proposals = snapshot.fetch_proposals(config_.ingest.spaces);
  for (const auto& id : config_.ingest.proposal_ids) {
    const bool known = std::any_of(proposals.begin(), proposals.end(),
                                   [&](const Proposal& p) { return p.id == id; });
    if (!known) proposals.push_back(snapshot.fetch_proposal(id));
  }
  if (config_.ingest.labels_file) apply_label_file(*config_.ingest.labels_file, proposals);
  diag_.Info("proposals_fetched", std::to_string(proposals.size()));

  std::vector<std::vector<VoteRecord>> votes(proposals.size());
  parallel_for(proposals.size(), config_.workers,
               [&](std::size_t i) { votes[i] = snapshot.fetch_votes(proposals[i]); });

  Dataset ds;
  std::vector<SourceRecord> sources{{"snapshot", src.snapshot_url, now_iso()}};
  for (auto& v : votes) {
    ds.votes.insert(ds.votes.end(), std::make_move_iterator(v.begin()),
                    std::make_move_iterator(v.end()));
  }

  std::set<std::string> ids;
  for (const auto& p : proposals) ids.insert(p.id);
  if (src.forum_file) {
    for (auto& f : load_forum_file(*src.forum_file)) {
      if (ids.contains(f.proposal_id)) ds.forum.push_back(std::move(f));
    }
    sources.push_back({"forum", src.forum_file->string(), now_iso()});
  } else if (src.forum_url) {
    HttpClient forum_http("forum", transport, retry, src.requests_per_second, &diag_);
    std::vector<std::optional<ForumSignal>> threads(proposals.size());
    parallel_for(proposals.size(), config_.workers, [&](std::size_t i) {
      threads[i] = fetch_forum_signal(forum_http, *src.forum_url, proposals[i].id);
    });
    for (auto& t : threads) {
      if (t) ds.forum.push_back(std::move(*t));
    }
    sources.push_back({"forum", *src.forum_url, now_iso()});
  }

  if (config_.ingest.market && !proposals.empty()) {
    HttpClient llama_http("defillama", transport, retry, src.requests_per_second, &diag_);
    HttpClient cmc_http("coinmarketcap", transport, retry, src.requests_per_second, &diag_);
    DefiLlamaClient llama(llama_http, src.defillama_url);
    CoinMarketCapClient cmc(cmc_http, src.coinmarketcap_url, env_or_empty(src.coinmarketcap_key_env),
                            src.coinmarketcap_index_path);
    MarketSource market(llama, cmc, config_.ingest.symbols);

    Day first = day_of(proposals.front().end);
    Day last = first;
    std::vector<std::string> protocols;
    for (const auto& p : proposals) {
      first = std::min(first, day_of(p.end));
      last = std::max(last, day_of(p.end));
      const std::string proto = protocol_for_space(p.space_id, config_.protocol_map);
      if (std::find(protocols.begin(), protocols.end(), proto) == protocols.end()) {
        protocols.push_back(proto);
      }
    }
    const DayRange range{first - config_.window_days - 1, last + config_.window_days + 1};
    auto fetch = [&](const std::string& proto, MarketMetric metric) {
      try {
        ds.market.push_back(market.fetch_market_series(proto, metric, range));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kNotFound && e.code() != ErrorCode::kNoData) throw;
        diag_.Warn(warn::kRecordSkipped, proto + "/" + std::string(to_string(metric)) + ": " +
                                             e.what());
      }
    };
    for (const auto& proto : protocols) {
      for (auto metric : {MarketMetric::kPrice, MarketMetric::kTvl, MarketMetric::kTreasury}) {
        fetch(proto, metric);
      }
    }
    fetch(config_.index_id, MarketMetric::kIndex);
    sources.push_back({"defillama", src.defillama_url, now_iso()});
    sources.push_back({"coinmarketcap", src.coinmarketcap_url, now_iso()});
  }

  ds.proposals = std::move(proposals);
  DatasetStore(config_.dataset_root).save(ds, sources);
  diag_.Info("dataset_saved", config_.dataset_root.string());
}

void Pipeline::features() {
  const Dataset ds = DatasetStore(config_.dataset_root).load();
  const DatasetIndex index(ds);
  const ContextOptions opts = context_options(config_);
  const std::size_t n = ds.proposals.size();

  std::vector<std::optional<std::string>> rows(n);
  std::vector<MarketWindow> windows(n);
  parallel_for(n, config_.workers, [&](std::size_t i) {
    const Proposal& p = ds.proposals[i];
    const auto votes = index.votes_for(p.id);
    if (!votes.empty()) {
      const ProposalOutcome outcome = tally_outcome(p, votes);
      const ParticipationSeries series = build_participation_series(p, votes, &diag_);
      rows[i] = dynamics_csv_row(series, compute_dynamics(series, outcome.final_option));
    } else {
      diag_.Warn(warn::kRecordSkipped, "no ballots for " + p.id);
    }
    windows[i] = compute_market_window(p, series_bundle_for(index, p, opts), config_.window_days,
                                       &diag_);
  });

  std::string csv = dynamics_csv_header() + "\n";
  for (const auto& r : rows) {
    if (r) csv += *r + "\n";
  }
  std::vector<Json> lines;
  for (const auto& w : windows) lines.push_back(market_window_json(w));
  write_file_atomic(config_.output_dir / "features" / "dynamics.csv", csv);
  write_file_atomic(config_.output_dir / "features" / "market_windows.jsonl", jsonl(lines));
}

void Pipeline::simulate() {
  const Dataset ds = DatasetStore(config_.dataset_root).load();
  const DatasetIndex index(ds);
  const ContextOptions opts = context_options(config_);
  const std::size_t n = ds.proposals.size();
  const bool llm = config_.policy == "llm";
  const auto baseline = parse_baseline_policy(config_.policy);

  std::unique_ptr<HttpClient> llm_http;
  std::unique_ptr<LlmClient> llm_client;
  if (llm) {
    llm_http = std::make_unique<HttpClient>("llm", make_transport(config_), retry_policy(config_),
                                            config_.sources.requests_per_second, &diag_);
    LlmEndpoint ep;
    ep.url = config_.llm.url;
    ep.model = config_.llm.model;
    ep.api_key = env_or_empty(config_.llm.api_key_env);
    ep.temperature = config_.llm.temperature;
    llm_client = std::make_unique<LlmClient>(*llm_http, ep);
  }

  for (CutoffKind kind : cutoff_kinds(config_.cutoff)) {
    std::vector<DecisionLine> lines(n);
    std::vector<std::vector<AuditRecord>> audits(n);
    parallel_for(n, config_.workers, [&](std::size_t i) {
      const Proposal& p = ds.proposals[i];
      DecisionLine& line = lines[i];
      line.proposal_id = p.id;
      const DecisionContext ctx = build_decision_context(index, p.id, kind, opts);
      try {
        if (llm) {
          AuditLog audit;
          try {
            line.decision = decide_llm(ctx, *llm_client, &audit, &diag_, config_.policy_id);
          } catch (...) {
            audits[i] = audit.records();
            throw;
          }
          audits[i] = audit.records();
        } else {
          line.decision = decide_baseline(ctx, *baseline, config_.seed);
          line.decision->policy_id = config_.policy_id;
        }
        if (line.decision->fallback) diag_.Warn(warn::kEmptyVisibleVotes, p.id);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::kPolicyInapplicable) {
          line.status = "inapplicable";
        } else if (e.code() == ErrorCode::kPolicyFailure) {
          line.status = "failed";
        } else {
          throw;
        }
        line.detail = e.what();
        diag_.Warn("policy_" + line.status, p.id);
      }
    });

    std::vector<Json> out;
    for (std::size_t i = 0; i < n; ++i) {
      out.push_back(decision_line_to_json(lines[i], ds.proposals[i]));
    }
    write_file_atomic(decisions_path(config_, kind), jsonl(out));
    if (llm) {
      std::string audit_text;
      for (const auto& records : audits) {
        for (const auto& r : records) audit_text += AuditLog::to_jsonl(r);
      }
      write_file_atomic(config_.output_dir / "audit" /
                            (config_.policy_id + "." + std::string(to_string(kind)) + ".jsonl"),
                        audit_text);
    }
  }
}

EvaluationReport Pipeline::build_report() {
  const Dataset ds = DatasetStore(config_.dataset_root).load();
  const DatasetIndex index(ds);
  const ContextOptions opts = context_options(config_);
  const std::size_t n = ds.proposals.size();
  const auto kinds = cutoff_kinds(config_.cutoff);

  // Decisions per cutoff, keyed by proposal id.
  std::vector<std::map<std::string, DecisionLine, std::less<>>> decisions(kinds.size());
  for (std::size_t k = 0; k < kinds.size(); ++k) {
    const fs::path path = decisions_path(config_, kinds[k]);
    if (!fs::exists(path)) {
      throw Error(ErrorCode::kCoverageError,
                  "no decisions for cutoff " + std::string(to_string(kinds[k])) + " at " +
                      path.string() + "; run simulate first");
    }
    const std::string text = read_file(path);
    std::size_t pos = 0, line_no = 0;
    while (pos < text.size()) {
      std::size_t nl = text.find('\n', pos);
      if (nl == std::string::npos) nl = text.size();
      ++line_no;
      const std::string_view raw(text.data() + pos, nl - pos);
      pos = nl + 1;
      if (raw.empty()) continue;
      try {
        DecisionLine line = decision_line_from_json(Json::parse(raw));
        decisions[k][line.proposal_id] = std::move(line);
      } catch (const std::exception& e) {
        throw Error(ErrorCode::kLoadError,
                    path.string() + ":" + std::to_string(line_no) + ": " + e.what());
      }
    }
  }

  struct Slot {
    std::optional<ProposalOutcome> outcome;
    std::vector<std::optional<ProposalAlignment>> alignment;
    std::string excluded;
    std::vector<std::string> missing;
  };
  std::vector<Slot> slots(n);
  parallel_for(n, config_.workers, [&](std::size_t i) {
    const Proposal& p = ds.proposals[i];
    Slot& s = slots[i];
    s.alignment.resize(kinds.size());
    const auto votes = index.votes_for(p.id);
    for (std::size_t k = 0; k < kinds.size(); ++k) {
      if (!decisions[k].contains(p.id)) {
        s.missing.push_back(p.id + " (" + std::string(to_string(kinds[k])) + ")");
      }
    }
    if (votes.empty()) {
      s.excluded = "no_ballots";
      return;
    }
    s.outcome = tally_outcome(p, votes);
    for (std::size_t k = 0; k < kinds.size(); ++k) {
      auto it = decisions[k].find(p.id);
      if (it == decisions[k].end()) continue;
      if (it->second.status != "ok") {
        if (s.excluded.empty()) s.excluded = "policy_" + it->second.status;
        continue;
      }
      try {
        s.alignment[k] = proposal_alignment(p, *s.outcome, votes, *it->second.decision);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kDegenerateTally) throw;
        diag_.Warn(warn::kDegenerateTally, p.id);
        s.excluded = "degenerate_tally";
      }
    }
    if (!s.excluded.empty()) {
      for (auto& a : s.alignment) a.reset();
    }
  });

  std::vector<std::string> missing;
  for (const auto& s : slots) missing.insert(missing.end(), s.missing.begin(), s.missing.end());
  if (!missing.empty()) {
    std::string msg = "decisions missing for " + std::to_string(missing.size()) + " proposal(s):";
    for (const auto& m : missing) msg += " " + m;
    throw Error(ErrorCode::kCoverageError, msg);
  }

  EvaluationReport r;
  r.policy_id = config_.policy_id;
  r.cutoff = std::string(to_string(config_.cutoff));
  r.parameters.contested_threshold = config_.contested_threshold;
  r.parameters.min_participation = config_.min_participation;
  r.parameters.window_days = config_.window_days;
  r.parameters.price_measure = config_.price_measure;
  r.parameters.exclude_ties = config_.exclude_ties;

  const std::size_t primary = kinds.size() - 1;  // ex-post when both are present
  std::vector<std::vector<ProposalAlignment>> per_kind(kinds.size());
  std::vector<TalliedProposal> tallied;
  std::vector<std::size_t> evaluated;
  for (std::size_t i = 0; i < n; ++i) {
    const Slot& s = slots[i];
    if (!s.excluded.empty()) {
      r.excluded.push_back({ds.proposals[i].id, s.excluded});
      continue;
    }
    if (config_.exclude_ties && s.outcome->tie) {
      r.excluded.push_back({ds.proposals[i].id, "tie"});
      continue;
    }
    for (std::size_t k = 0; k < kinds.size(); ++k) per_kind[k].push_back(*s.alignment[k]);
    tallied.push_back({&ds.proposals[i], *s.outcome, index.votes_for(ds.proposals[i].id)});
    evaluated.push_back(i);
  }
  if (evaluated.empty()) {
    throw Error(ErrorCode::kEmptyEvaluation, "no proposal could be evaluated");
  }

  std::vector<MarketWindow> windows(evaluated.size());
  parallel_for(evaluated.size(), config_.workers, [&](std::size_t j) {
    const Proposal& p = ds.proposals[evaluated[j]];
    windows[j] = compute_market_window(p, series_bundle_for(index, p, opts), config_.window_days,
                                       &diag_);
  });

  r.voters = voter_benchmarks(tallied, config_.min_participation, &diag_);
  r.proposals = per_kind[primary];
  r.summary = aggregate_alignment(r.proposals, r.voters);
  r.buckets = bucket_agreement(r.proposals);
  r.expost = expost_validity(r.proposals, windows, config_.price_measure);
  r.contested = contested_subset(r.proposals, config_.contested_threshold);
  if (kinds.size() == 2) r.temporal = temporal_comparison(per_kind[0], per_kind[1]);
  return r;
}

void Pipeline::evaluate() {
  const EvaluationReport r = build_report();
  write_file_atomic(config_.report_json, report_to_json(r).dump(2) + "\n");
  diag_.Info("report_written", config_.report_json.string());
}

void Pipeline::report() {
  if (!fs::exists(config_.report_json)) {
    throw Error(ErrorCode::kConfigError,
                "no report at " + config_.report_json.string() + "; run evaluate first");
  }
  Json doc;
  try {
    doc = Json::parse(read_file(config_.report_json));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kLoadError, config_.report_json.string() + ": " + e.what());
  }
  write_file_atomic(config_.report_markdown, render_markdown(doc));
  for (const auto& [name, content] : render_csv(doc)) {
    write_file_atomic(config_.report_csv_dir / name, content);
  }
}

void Pipeline::synth() {
  Json scenario;
  if (config_.scenario_file) {
    try {
      scenario = Json::parse(read_file(*config_.scenario_file));
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::kSpecError, config_.scenario_file->string() + ": " + e.what());
    }
  } else {
    scenario = *config_.scenario_inline;
  }
  const ScenarioSpec spec = scenario_from_json(scenario);
  const SyntheticDataset out = generate_dataset(spec);
  // A fixed fetch time keeps the manifest byte-identical across runs.
  const std::vector<SourceRecord> sources{
      {"synth", "seed:" + std::to_string(spec.seed), format_iso8601(spec.first_start)}};
  DatasetStore(config_.dataset_root).save(out.dataset, sources);
  write_file_atomic(config_.output_dir / "synth_truth.json",
                    sidecar_to_json(spec, out.truth).dump(2) + "\n");
}

}  // namespace daoeval
