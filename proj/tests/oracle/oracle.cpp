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

#include "oracle.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <stdexcept>
#include <variant>

namespace oracle {

std::vector<long double> allocation(const daoeval::ChoiceExpr& expr, std::size_t n) {
  std::vector<long double> out(n, 0.0L);
  if (const auto* s = std::get_if<daoeval::SingleChoice>(&expr)) {
    out.at(s->option - 1) = 1.0L;
  } else if (const auto* a = std::get_if<daoeval::ApprovalChoice>(&expr)) {
    std::set<std::size_t> picked(a->options.begin(), a->options.end());
    for (auto o : picked) out.at(o - 1) = 1.0L / static_cast<long double>(picked.size());
  } else {
    const auto& w = std::get<daoeval::WeightedChoice>(expr).weights;
    long double sum = 0;
    for (const auto& [o, x] : w) sum += x;
    for (const auto& [o, x] : w) out.at(o - 1) = static_cast<long double>(x) / sum;
  }
  return out;
}

Tally tally(const Proposal& p, const std::vector<VoteRecord>& votes) {
  Tally t;
  t.per_option.assign(p.choices.size(), 0.0L);
  std::set<std::string> seen;
  for (const auto& v : votes) {
    const auto a = allocation(v.choice, p.choices.size());
    for (std::size_t o = 0; o < a.size(); ++o) t.per_option[o] += v.vp * a[o];
    t.total += v.vp;
    seen.insert(v.voter);
  }
  t.voters = seen.size();
  // Winner: first option not beaten by any other. A near-tie (within 1e-12
  // of the total) is reported as a tie, since summation order decides it.
  const long double tol = 1e-12L * std::max<long double>(t.total, 1.0L);
  for (std::size_t o = 0; o < t.per_option.size(); ++o) {
    bool best = true;
    for (std::size_t k = 0; k < t.per_option.size(); ++k) {
      if (t.per_option[k] > t.per_option[o] + tol) best = false;
    }
    if (best) {
      t.winner = o;
      break;
    }
  }
  for (std::size_t k = 0; k < t.per_option.size(); ++k) {
    if (k != t.winner && std::fabs(t.per_option[k] - t.per_option[t.winner]) <= tol) {
      t.tie = true;
    }
  }
  return t;
}

Alignment alignment(const Proposal& p, const std::vector<VoteRecord>& votes,
                    std::size_t final_option, std::size_t ai_option) {
  long double total = 0, on_final = 0, on_ai = 0, heads_ai = 0, heads_final = 0;
  for (const auto& v : votes) {
    const auto a = allocation(v.choice, p.choices.size());
    total += v.vp;
    on_final += v.vp * a[final_option];
    on_ai += v.vp * a[ai_option];
    heads_ai += a[ai_option];
    heads_final += a[final_option];
  }
  Alignment r;
  r.S = on_final / total;
  r.A = on_ai / total;
  r.H = heads_ai / static_cast<long double>(votes.size());
  r.final_mass = heads_final;
  return r;
}

std::map<std::string, Voter> voters(const std::vector<Proposal>& proposals,
                                    const std::vector<std::vector<VoteRecord>>& by_proposal,
                                    const std::vector<std::size_t>& winners) {
  std::set<std::string> everyone;
  for (const auto& vs : by_proposal) {
    for (const auto& v : vs) everyone.insert(v.voter);
  }
  std::map<std::string, Voter> out;
  for (const auto& who : everyone) {
    long double w_sum = 0, w_match = 0, match_sum = 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < proposals.size(); ++i) {
      for (const auto& v : by_proposal[i]) {
        if (v.voter != who) continue;
        const auto a = allocation(v.choice, proposals[i].choices.size());
        ++n;
        w_sum += v.vp;
        w_match += v.vp * a[winners[i]];
        match_sum += a[winners[i]];
      }
    }
    Voter r;
    r.n = n;
    if (w_sum > 0) r.tilde_A = w_match / w_sum;
    r.hat_A = match_sum / static_cast<long double>(n);
    out.emplace(who, r);
  }
  return out;
}

long double quantile(std::vector<long double> values, long double q) {
  std::sort(values.begin(), values.end());
  const long double pos = q * static_cast<long double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  return values[lo] + (values[hi] - values[lo]) * (pos - static_cast<long double>(lo));
}

Stats stats(const std::vector<long double>& values) {
  if (values.empty()) throw std::invalid_argument("stats of nothing");
  Stats s;
  long double sum = 0;
  for (auto v : values) sum += v;
  s.mean = sum / static_cast<long double>(values.size());
  long double ss = 0;
  for (auto v : values) ss += (v - s.mean) * (v - s.mean);
  s.std = values.size() > 1 ? std::sqrt(ss / static_cast<long double>(values.size() - 1)) : 0;
  s.median = quantile(values, 0.5L);
  s.q25 = quantile(values, 0.25L);
  s.q75 = quantile(values, 0.75L);
  s.max = *std::max_element(values.begin(), values.end());
  return s;
}

int quartile(daoeval::Timestamp start, daoeval::Timestamp end, daoeval::Timestamp ts) {
  // Boundaries sit at start + k/4 * (end - start); the last interval is closed.
  const long double off = static_cast<long double>(ts - start);
  const long double span = static_cast<long double>(end - start);
  int q = 0;
  for (int k = 1; k <= 3; ++k) {
    if (4.0L * off >= static_cast<long double>(k) * span) q = k;
  }
  return span > 0 ? q : 0;
}

std::vector<Event> events(const Proposal& p, const std::vector<VoteRecord>& votes) {
  std::vector<Event> out;
  for (const auto& v : votes) {
    if (v.timestamp < p.start || v.timestamp > p.end) continue;
    out.push_back(Event{v.timestamp, v.voter, allocation(v.choice, p.choices.size()), v.vp,
                        quartile(p.start, p.end, v.timestamp)});
  }
  // Insertion sort: stable, obviously correct, and fine for test sizes.
  for (std::size_t i = 1; i < out.size(); ++i) {
    for (std::size_t j = i; j > 0; --j) {
      const auto& a = out[j - 1];
      const auto& b = out[j];
      const bool after = a.ts > b.ts || (a.ts == b.ts && a.voter > b.voter);
      if (!after) break;
      std::swap(out[j - 1], out[j]);
    }
  }
  return out;
}

Lead lead(const Proposal& p, const std::vector<Event>& ev) {
  const std::size_t n = p.choices.size();
  std::vector<std::vector<long double>> hits(4, std::vector<long double>(n, 0));
  std::vector<long double> votes_q(4, 0);
  for (std::size_t i = 0; i < ev.size(); ++i) {
    votes_q[ev[i].quartile] += 1;
    std::vector<double> cum(n, 0.0);
    for (std::size_t j = 0; j <= i; ++j) {
      for (std::size_t o = 0; o < n; ++o) {
        cum[o] += static_cast<double>(ev[j].vp) * static_cast<double>(ev[j].alloc[o]);
      }
    }
    for (std::size_t o = 0; o < n; ++o) {
      bool strict = true;
      for (std::size_t k = 0; k < n; ++k) {
        if (k != o && !(cum[o] > cum[k])) strict = false;
      }
      if (strict) hits[ev[i].quartile][o] += 1;
    }
  }
  Lead out;
  out.by_quartile.assign(4, std::vector<long double>(n, 0));
  out.total.assign(n, 0);
  out.early.assign(n, 0);
  long double all = 0, q1 = 0;
  for (std::size_t q = 0; q < 4; ++q) {
    for (std::size_t o = 0; o < n; ++o) {
      out.by_quartile[q][o] = hits[q][o] / std::max<long double>(1, votes_q[q]);
      all += hits[q][o];
      if (q == 0) q1 += hits[q][o];
    }
  }
  for (std::size_t o = 0; o < n; ++o) {
    long double h = 0;
    for (std::size_t q = 0; q < 4; ++q) h += hits[q][o];
    out.total[o] = all > 0 ? h / all : 0;
    out.early[o] = hits[0][o] / std::max<long double>(1, q1);
  }
  return out;
}

std::optional<Spike> spike(const std::vector<Event>& ev, std::size_t winner) {
  long double winner_total = 0;
  for (const auto& e : ev) winner_total += e.vp * e.alloc[winner];
  if (!(winner_total > 0)) return std::nullopt;
  std::size_t at = 0;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    bool earliest_max = true;
    for (std::size_t j = 0; j < ev.size(); ++j) {
      if (ev[j].vp > ev[i].vp || (j < i && ev[j].vp == ev[i].vp)) earliest_max = false;
    }
    if (earliest_max) {
      at = i;
      break;
    }
  }
  Spike s;
  const long double raw = ev[at].vp / winner_total;
  s.overflow = raw > 1;
  s.index = std::min<long double>(1, raw);
  long double tail = 0, tail_winner = 0;
  for (std::size_t i = at + 1; i < ev.size(); ++i) {
    tail += ev[i].vp;
    tail_winner += ev[i].vp * ev[i].alloc[winner];
  }
  s.empty_tail = !(tail > 0);
  s.follow = s.empty_tail ? 0 : tail_winner / tail;
  return s;
}

std::optional<long double> stairwise(const std::vector<Event>& ev, std::size_t winner) {
  std::vector<long double> c;
  for (const auto& e : ev) {
    if (e.alloc[winner] > 0) c.push_back(e.vp * e.alloc[winner]);
  }
  long double total = 0;
  for (auto x : c) total += x;
  if (c.empty() || !(total > 0)) return std::nullopt;
  std::sort(c.begin(), c.end(), [](long double a, long double b) { return a > b; });
  const auto top = static_cast<std::size_t>(std::ceil(0.1L * static_cast<long double>(c.size())));
  long double mass = 0;
  for (std::size_t i = 0; i < top; ++i) mass += c[i];
  return 1 - mass / total;
}

long double half_slope(const Proposal& p, const std::vector<Event>& ev) {
  const long double mid = (static_cast<long double>(p.start) + static_cast<long double>(p.end)) / 2;
  long double es = 0, ls = 0, en = 0, ln = 0;
  for (const auto& e : ev) {
    if (static_cast<long double>(e.ts) < mid) {
      es += e.vp;
      en += 1;
    } else {
      ls += e.vp;
      ln += 1;
    }
  }
  return (ln > 0 ? ls / ln : 0) - (en > 0 ? es / en : 0);
}

namespace {

// Mean of the samples whose day lies in [lo, hi]; nullopt when none do.
std::optional<long double> mean_days(const daoeval::MarketSeries* s, daoeval::Day lo,
                                     daoeval::Day hi) {
  if (s == nullptr) return std::nullopt;
  long double sum = 0, n = 0;
  for (const auto& x : s->samples) {
    if (x.day >= lo && x.day <= hi) {
      sum += x.value;
      n += 1;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / n;
}

std::optional<long double> ratio(const daoeval::MarketSeries* s, daoeval::Day event, int w) {
  const auto pre = mean_days(s, event - w, event - 1);
  const auto post = mean_days(s, event + 1, event + w);
  if (!pre || !post || !(*pre > 0)) return std::nullopt;
  return *post / *pre - 1;
}

}  // namespace

Window market(const Proposal& p, const daoeval::MarketSeries* price,
              const daoeval::MarketSeries* index, const daoeval::MarketSeries* tvl,
              const daoeval::MarketSeries* treasury, int w) {
  const daoeval::Day event = static_cast<daoeval::Day>(
      std::floor(static_cast<long double>(p.end) / 86400.0L));
  Window out;
  const auto rp = ratio(price, event, w);
  const auto ri = ratio(index, event, w);
  if (rp) out.price = *rp * 100;
  if (rp && ri) out.adj = (*rp - *ri) * 100;
  out.tvl = ratio(tvl, event, w);
  out.treasury = ratio(treasury, event, w);
  return out;
}

bool is_binary(const Proposal& p) {
  std::size_t kept = 0;
  for (const auto& label : p.choices) {
    std::string t;
    for (char c : label) {
      if (!std::isspace(static_cast<unsigned char>(c))) {
        t += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      }
    }
    if (t != "abstain") ++kept;
  }
  return kept == 2;
}

int bucket(const Row& r) {
  if (!r.change) return 4;
  return (r.binary ? 0 : 2) + (*r.change ? 0 : 1);
}

std::vector<BucketOut> buckets(const std::vector<Row>& rows) {
  std::vector<BucketOut> out(5);
  for (int b = 0; b < 5; ++b) {
    long double mass = 0, ballots = 0, agree = 0;
    for (const auto& r : rows) {
      if (bucket(r) != b) continue;
      ++out[b].n;
      mass += r.final_mass;
      ballots += static_cast<long double>(r.voters);
      agree += r.agree ? 1 : 0;
    }
    if (out[b].n > 0) {
      out[b].human = mass / ballots;
      out[b].ai = agree / static_cast<long double>(out[b].n);
    }
  }
  return out;
}

std::vector<std::vector<Cell>> expost(const std::vector<Row>& rows,
                                      const std::vector<std::optional<long double>>& price,
                                      const std::vector<std::optional<long double>>& tvl) {
  std::vector<std::vector<Cell>> out(6, std::vector<Cell>(4));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (int target : {bucket(rows[i]), 5}) {
      auto& cells = out[target];
      if (price[i]) {
        cells[1].n++;
        cells[1].positive += *price[i] > 0;
        if (rows[i].agree) {
          cells[0].n++;
          cells[0].positive += *price[i] > 0;
        }
      }
      if (tvl[i]) {
        cells[3].n++;
        cells[3].positive += *tvl[i] > 0;
        if (rows[i].agree) {
          cells[2].n++;
          cells[2].positive += *tvl[i] > 0;
        }
      }
    }
  }
  return out;
}

Subset subset(const std::vector<Row>& rows) {
  Subset s;
  s.n = rows.size();
  if (rows.empty()) return s;
  for (const auto& r : rows) {
    s.p += r.agree ? 1 : 0;
    s.A += r.A;
    s.H += r.H;
    s.S += r.S;
  }
  const auto n = static_cast<long double>(rows.size());
  s.p /= n;
  s.A /= n;
  s.H /= n;
  s.S /= n;
  return s;
}

std::vector<Row> contested(const std::vector<Row>& rows, long double threshold) {
  std::vector<Row> out;
  for (const auto& r : rows) {
    if (r.S <= threshold) out.push_back(r);
  }
  return out;
}

}  // namespace oracle
