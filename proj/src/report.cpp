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

#include "daoeval/report.hpp"

#include <cstdio>

#include "daoeval/error.hpp"

namespace daoeval {
namespace {

Json opt(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }
Json opt(const std::optional<bool>& v) { return v ? Json(*v) : Json(nullptr); }

Json stats_json(const SummaryStats& s) {
  return Json{{"n", s.n},         {"mean", s.mean}, {"median", s.median}, {"std", s.std},
              {"q25", s.q25},     {"q75", s.q75},   {"max", s.max}};
}

Json subset_json(const SubsetStats& s) {
  return Json{{"n", s.n},
              {"p_ai_final", opt(s.p_ai_final)},
              {"mean_A", opt(s.mean_A)},
              {"mean_H", opt(s.mean_H)},
              {"mean_S", opt(s.mean_S)}};
}

Json cell_json(const ConditionalCell& c) {
  return Json{{"n", c.n}, {"positive", c.positive}, {"p", opt(c.probability)}};
}

Json expost_row_json(std::string_view bucket, const ExpostRow& r) {
  return Json{{"bucket", bucket},
              {"price_ai", cell_json(r.price_ai)},
              {"price_final", cell_json(r.price_final)},
              {"tvl_ai", cell_json(r.tvl_ai)},
              {"tvl_final", cell_json(r.tvl_final)}};
}

// ---- rendering helpers (operate on the JSON document) ----

std::string num(const Json& v, int digits = 4) {
  if (v.is_null()) return "n/a";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v.get<double>());
  return buf;
}

std::string signed_num(const Json& v, int digits) {
  if (v.is_null()) return "n/a";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%+.*f", digits, v.get<double>());
  return buf;
}

std::string integer(const Json& v) {
  if (v.is_null()) return "n/a";
  return std::to_string(v.get<std::int64_t>());
}

std::string csv_num(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  return v.dump();
}

std::string bucket_title(const std::string& key) {
  if (key == "all") return "All";
  for (Bucket b : kAllBuckets) {
    if (to_string(b) == key) return std::string(bucket_label(b));
  }
  return key;
}

void table_row(std::string& out, const std::vector<std::string>& cells) {
  out += "|";
  for (const auto& c : cells) out += " " + c + " |";
  out += "\n";
}

void table_head(std::string& out, const std::vector<std::string>& cells) {
  table_row(out, cells);
  out += "|";
  for (std::size_t i = 0; i < cells.size(); ++i) out += i == 0 ? " --- |" : " ---: |";
  out += "\n";
}

}  // namespace

Json report_to_json(const EvaluationReport& r) {
  Json doc;
  doc["schema"] = kReportSchema;
  doc["schema_version"] = kReportSchemaVersion;
  doc["policy_id"] = r.policy_id;
  doc["cutoff"] = r.cutoff;
  doc["parameters"] = Json{{"contested_threshold", r.parameters.contested_threshold},
                           {"min_participation", r.parameters.min_participation},
                           {"window_days", r.parameters.window_days},
                           {"price_measure", to_string(r.parameters.price_measure)},
                           {"exclude_ties", r.parameters.exclude_ties}};

  const auto& s = r.summary;
  Json summary;
  summary["n_proposals"] = s.n_proposals;
  summary["n_ties"] = s.n_ties;
  summary["p_ai_final"] = s.p_ai_final;
  summary["stats"] = Json{{"A", stats_json(s.A)},
                          {"H", stats_json(s.H)},
                          {"S", stats_json(s.S)},
                          {"N_voters", stats_json(s.n_voters)}};
  summary["voters"] = Json{{"total", s.n_voters_total},
                           {"eligible", s.n_voters_eligible},
                           {"median_tilde_A", opt(s.median_tilde_A)},
                           {"median_hat_A", opt(s.median_hat_A)},
                           {"mean_hat_A", opt(s.mean_hat_A)}};
  summary["comparisons"] = Json{{"token", opt(s.ai_exceeds_token_benchmark)},
                                {"headcount", opt(s.ai_exceeds_headcount_benchmark)}};
  doc["summary"] = std::move(summary);

  Json buckets = Json::array();
  for (const auto& b : r.buckets) {
    buckets.push_back(Json{{"bucket", to_string(b.bucket)},
                           {"n", b.n},
                           {"human", opt(b.human)},
                           {"ai", opt(b.ai)},
                           {"difference_pp", opt(b.difference_pp)}});
  }
  doc["buckets"] = std::move(buckets);

  Json expost;
  expost["price_measure"] = to_string(r.expost.price_measure);
  Json rows = Json::array();
  for (const auto& row : r.expost.rows) rows.push_back(expost_row_json(to_string(row.bucket), row));
  expost["rows"] = std::move(rows);
  expost["overall"] = expost_row_json("all", r.expost.overall);
  doc["expost"] = std::move(expost);

  doc["contested"] = Json{{"threshold", r.contested.threshold},
                          {"all", subset_json(r.contested.all)},
                          {"binary", subset_json(r.contested.binary)},
                          {"multi", subset_json(r.contested.multi)},
                          {"proposal_ids", r.contested.proposal_ids}};

  if (r.temporal) {
    const auto& t = *r.temporal;
    doc["temporal"] = Json{{"n", t.n},
                           {"n_diverging", t.n_diverging},
                           {"divergence", t.divergence},
                           {"ex_ante", subset_json(t.ex_ante)},
                           {"ex_post", subset_json(t.ex_post)},
                           {"diverging_ids", t.diverging_ids}};
  } else {
    doc["temporal"] = nullptr;
  }

  Json excluded = Json::array();
  for (const auto& e : r.excluded) {
    excluded.push_back(Json{{"proposal_id", e.proposal_id}, {"reason", e.reason}});
  }
  doc["excluded"] = std::move(excluded);

  Json proposals = Json::array();
  for (const auto& p : r.proposals) {
    proposals.push_back(Json{{"proposal_id", p.proposal_id},
                             {"kind", to_string(p.kind)},
                             {"calls_for_change", p.calls_for_change
                                                      ? Json(*p.calls_for_change)
                                                      : Json(nullptr)},
                             {"final_option", p.final_option + 1},
                             {"ai_option", p.ai_option + 1},
                             {"tie", p.tie},
                             {"ai_equals_final", p.ai_equals_final},
                             {"S", p.S},
                             {"A", p.A},
                             {"H", p.H},
                             {"n_voters", p.n_voters},
                             {"total_vp", p.total_vp}});
  }
  doc["proposals"] = std::move(proposals);

  Json voters = Json::array();
  for (const auto& v : r.voters) {
    voters.push_back(Json{{"voter", v.voter},
                          {"n_proposals", v.n_proposals},
                          {"tilde_A", opt(v.tilde_A)},
                          {"hat_A", v.hat_A},
                          {"eligible", v.eligible}});
  }
  doc["voters"] = std::move(voters);
  return doc;
}

void check_report_schema(const Json& doc) {
  if (!doc.is_object() || doc.value("schema", "") != kReportSchema) {
    throw Error(ErrorCode::kLoadError, "not a daoeval report document");
  }
  const int version = doc.value("schema_version", 0);
  if (version != kReportSchemaVersion) {
    throw Error(ErrorCode::kLoadError,
                "unsupported report schema version " + std::to_string(version));
  }
}

std::string render_markdown(const Json& doc) {
  check_report_schema(doc);
  std::string out;
  out += "# Alignment report\n\n";
  out += "- policy: `" + doc["policy_id"].get<std::string>() + "`\n";
  out += "- cutoff: " + doc["cutoff"].get<std::string>() + "\n";
  const Json& params = doc["parameters"];
  out += "- contested threshold: S_p <= " + num(params["contested_threshold"], 2) + "\n";
  out += "- minimum participation: |P_i| >= " + integer(params["min_participation"]) + "\n";
  out += "- market window: +/-" + integer(params["window_days"]) + " days (" +
         params["price_measure"].get<std::string>() + ")\n";
  out += std::string("- ties excluded: ") + (params["exclude_ties"].get<bool>() ? "yes" : "no") +
         "\n";
  const Json& summary = doc["summary"];
  out += "- proposals evaluated: " + integer(summary["n_proposals"]) + " (ties: " +
         integer(summary["n_ties"]) + ", excluded: " + std::to_string(doc["excluded"].size()) +
         ")\n\n";

  out += "## Aggregate statistics across proposals\n\n";
  table_head(out, {"Metric", "Mean", "Median", "Std", "Q25", "Q75", "Max"});
  for (const auto& [key, label] :
       std::vector<std::pair<std::string, std::string>>{{"A", "A_p (token)"},
                                                        {"H", "H_p (headcount)"},
                                                        {"S", "S_p"},
                                                        {"N_voters", "N_voters"}}) {
    const Json& s = summary["stats"][key];
    const int d = key == "N_voters" ? 2 : 4;
    table_row(out, {label, num(s["mean"], d), num(s["median"], d), num(s["std"], d),
                    num(s["q25"], d), num(s["q75"], d), num(s["max"], d)});
  }
  out += "\n";
  const Json& voters = summary["voters"];
  const Json& cmp = summary["comparisons"];
  auto verdict = [](const Json& v) {
    return v.is_null() ? std::string("n/a") : std::string(v.get<bool>() ? "yes" : "no");
  };
  out += "- P(AI = final): " + num(summary["p_ai_final"]) + "\n";
  out += "- voters: " + integer(voters["total"]) + " total, " + integer(voters["eligible"]) +
         " with sufficient participation\n";
  out += "- median human token agreement: " + num(voters["median_tilde_A"]) +
         "; AI mean exceeds it: " + verdict(cmp["token"]) + "\n";
  out += "- median human headcount agreement: " + num(voters["median_hat_A"]) +
         "; AI mean exceeds it: " + verdict(cmp["headcount"]) + "\n";
  out += "- mean human headcount agreement: " + num(voters["mean_hat_A"]) + "\n\n";

  out += "## Agreement with final decision by decision type\n\n";
  table_head(out, {"Bucket", "N", "Humans", "AI", "Difference (pp)"});
  for (const auto& b : doc["buckets"]) {
    table_row(out, {bucket_title(b["bucket"].get<std::string>()), integer(b["n"]),
                    num(b["human"]), num(b["ai"]), signed_num(b["difference_pp"], 2)});
  }
  out += "\n";

  const Json& expost = doc["expost"];
  auto cell = [](const Json& c) {
    return num(c["p"], 3) + " (N=" + integer(c["n"]) + ")";
  };
  out += "## Positive ex-post responses\n\n";
  out += "Price measure: " + expost["price_measure"].get<std::string>() + "\n\n";
  table_head(out, {"Proposal type", "P(dP>0 | AI)", "P(dP>0 | Final)", "P(dTVL>0 | AI)",
                   "P(dTVL>0 | Final)"});
  std::vector<Json> rows(expost["rows"].begin(), expost["rows"].end());
  rows.push_back(expost["overall"]);
  for (const auto& r : rows) {
    table_row(out, {bucket_title(r["bucket"].get<std::string>()), cell(r["price_ai"]),
                    cell(r["price_final"]), cell(r["tvl_ai"]), cell(r["tvl_final"])});
  }
  out += "\n";

  const Json& contested = doc["contested"];
  out += "## Contested proposals (S_p <= " + num(contested["threshold"], 2) + ")\n\n";
  table_head(out, {"Metric", "All", "Binary", "Multi-option"});
  const Json& ca = contested["all"];
  const Json& cb = contested["binary"];
  const Json& cm = contested["multi"];
  table_row(out, {"P(AI = final)", num(ca["p_ai_final"]), num(cb["p_ai_final"]),
                  num(cm["p_ai_final"])});
  table_row(out, {"mean A (token)", num(ca["mean_A"]), num(cb["mean_A"]), num(cm["mean_A"])});
  table_row(out,
            {"mean H (headcount)", num(ca["mean_H"]), num(cb["mean_H"]), num(cm["mean_H"])});
  table_row(out, {"mean S", num(ca["mean_S"]), num(cb["mean_S"]), num(cm["mean_S"])});
  table_row(out, {"N", integer(ca["n"]), integer(cb["n"]), integer(cm["n"])});
  out += "\n";

  out += "## Ex-ante vs ex-post\n\n";
  const Json& t = doc["temporal"];
  if (t.is_null()) {
    out += "Not computed (only one cutoff evaluated).\n";
  } else {
    table_head(out, {"Metric (mean)", "Ex-ante", "Ex-post"});
    table_row(out, {"P(AI = final)", num(t["ex_ante"]["p_ai_final"]),
                    num(t["ex_post"]["p_ai_final"])});
    table_row(out, {"mean A (token)", num(t["ex_ante"]["mean_A"]), num(t["ex_post"]["mean_A"])});
    table_row(out,
              {"mean H (headcount)", num(t["ex_ante"]["mean_H"]), num(t["ex_post"]["mean_H"])});
    table_row(out, {"mean S", num(t["ex_ante"]["mean_S"]), num(t["ex_post"]["mean_S"])});
    out += "\nDiverging selections: " + integer(t["n_diverging"]) + " of " + integer(t["n"]) +
           " (" + num(Json(t["divergence"].get<double>() * 100.0), 2) + "%)\n";
  }
  return out;
}

std::map<std::string, std::string> render_csv(const Json& doc) {
  check_report_schema(doc);
  std::map<std::string, std::string> files;

  std::string stats = "metric,mean,median,std,q25,q75,max\n";
  for (const char* key : {"A", "H", "S", "N_voters"}) {
    const Json& s = doc["summary"]["stats"][key];
    stats += std::string(key) + "," + csv_num(s["mean"]) + "," + csv_num(s["median"]) + "," +
             csv_num(s["std"]) + "," + csv_num(s["q25"]) + "," + csv_num(s["q75"]) + "," +
             csv_num(s["max"]) + "\n";
  }
  files["aggregate_stats.csv"] = std::move(stats);

  std::string buckets = "bucket,n,human,ai,difference_pp\n";
  for (const auto& b : doc["buckets"]) {
    buckets += b["bucket"].get<std::string>() + "," + csv_num(b["n"]) + "," +
               csv_num(b["human"]) + "," + csv_num(b["ai"]) + "," + csv_num(b["difference_pp"]) +
               "\n";
  }
  files["buckets.csv"] = std::move(buckets);

  std::string expost =
      "bucket,price_ai_p,price_ai_n,price_final_p,price_final_n,tvl_ai_p,tvl_ai_n,"
      "tvl_final_p,tvl_final_n\n";
  std::vector<Json> rows(doc["expost"]["rows"].begin(), doc["expost"]["rows"].end());
  rows.push_back(doc["expost"]["overall"]);
  for (const auto& r : rows) {
    expost += r["bucket"].get<std::string>();
    for (const char* c : {"price_ai", "price_final", "tvl_ai", "tvl_final"}) {
      expost += "," + csv_num(r[c]["p"]) + "," + csv_num(r[c]["n"]);
    }
    expost += "\n";
  }
  files["expost.csv"] = std::move(expost);

  std::string contested = "subset,n,p_ai_final,mean_A,mean_H,mean_S\n";
  for (const char* key : {"all", "binary", "multi"}) {
    const Json& s = doc["contested"][key];
    contested += std::string(key) + "," + csv_num(s["n"]) + "," + csv_num(s["p_ai_final"]) +
                 "," + csv_num(s["mean_A"]) + "," + csv_num(s["mean_H"]) + "," +
                 csv_num(s["mean_S"]) + "\n";
  }
  files["contested.csv"] = std::move(contested);

  if (!doc["temporal"].is_null()) {
    std::string temporal = "cutoff,n,p_ai_final,mean_A,mean_H,mean_S\n";
    for (const char* key : {"ex_ante", "ex_post"}) {
      const Json& s = doc["temporal"][key];
      temporal += std::string(key) + "," + csv_num(s["n"]) + "," + csv_num(s["p_ai_final"]) +
                  "," + csv_num(s["mean_A"]) + "," + csv_num(s["mean_H"]) + "," +
                  csv_num(s["mean_S"]) + "\n";
    }
    files["temporal.csv"] = std::move(temporal);
  }

  std::string proposals = "proposal_id,kind,calls_for_change,final_option,ai_option,tie,S,A,H,"
                          "n_voters\n";
  for (const auto& p : doc["proposals"]) {
    std::string id = p["proposal_id"].get<std::string>();
    if (id.find_first_of(",\"\n") != std::string::npos) {
      std::string q = "\"";
      for (char c : id) q += c == '"' ? std::string("\"\"") : std::string(1, c);
      id = q + "\"";
    }
    proposals += id + "," + p["kind"].get<std::string>() + "," +
                 csv_num(p["calls_for_change"]) + "," + csv_num(p["final_option"]) + "," +
                 csv_num(p["ai_option"]) + "," + csv_num(p["tie"]) + "," + csv_num(p["S"]) +
                 "," + csv_num(p["A"]) + "," + csv_num(p["H"]) + "," + csv_num(p["n_voters"]) +
                 "\n";
  }
  files["proposals.csv"] = std::move(proposals);
  return files;
}

}  // namespace daoeval
