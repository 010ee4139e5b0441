#pragma once

#include <algorithm>
#include <chrono>
#include <functional>
#include <limits>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mmass/distributions.hpp"
#include "mmass/errors.hpp"
#include "mmass/estimators.hpp"
#include "mmass/intervals.hpp"
#include "mmass/io.hpp"
#include "mmass/parallel.hpp"
#include "mmass/profile.hpp"
#include "mmass/ratematch.hpp"
#include "mmass/rng.hpp"

namespace mmass {

using Json = nlohmann::ordered_json;

enum class ExperimentKind {
  concentration_left,
  concentration_right,
  mnr_concentration,
  coverage_theta,
  coverage_match,
  consistency_theta,
  consistency_match,
  oracle_check,
};

inline constexpr std::pair<ExperimentKind, std::string_view> kExperimentKinds[] = {
    {ExperimentKind::concentration_left, "concentration-left"},
    {ExperimentKind::concentration_right, "concentration-right"},
    {ExperimentKind::mnr_concentration, "mnr-concentration"},
    {ExperimentKind::coverage_theta, "coverage-theta"},
    {ExperimentKind::coverage_match, "coverage-match"},
    {ExperimentKind::consistency_theta, "consistency-theta"},
    {ExperimentKind::consistency_match, "consistency-match"},
    {ExperimentKind::oracle_check, "oracle-check"},
};

inline std::string_view to_string(ExperimentKind k) {
  for (const auto& [kind, name] : kExperimentKinds)
    if (kind == k) return name;
  return "?";
}

inline ExperimentKind parse_experiment_kind(std::string_view name) {
  name = trim(name);
  for (const auto& [kind, n] : kExperimentKinds)
    if (n == name) return kind;
  throw parse_error("unknown experiment kind '" + std::string(name) + "'");
}

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::concentration_left;
  std::string dist;
  std::vector<std::uint64_t> ns;
  std::vector<unsigned> rs{1};
  std::vector<double> xs{1.0};
  std::uint64_t reps = 1000;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;  // 0 = all cores; never affects results

  bool uses_x() const {
    return kind != ExperimentKind::consistency_theta && kind != ExperimentKind::consistency_match;
  }

  void validate() const {
    if (!seed) throw parse_error("experiment needs a seed");
    if (dist.empty()) throw parse_error("experiment needs a dist");
    require(reps >= 100, "reps must be >= 100");
    require(!ns.empty(), "n grid must not be empty");
    require(!rs.empty(), "r grid must not be empty");
    for (const auto n : ns) require(n >= 1, "n must be >= 1");
    for (const auto r : rs) require(r >= 1, "r must be >= 1");
    if (uses_x()) {
      require(!xs.empty(), "x grid must not be empty");
      for (const auto x : xs) require(x > 0.0 && std::isfinite(x), "x must be a positive real");
    }
    for (const auto n : ns)
      for (const auto r : rs) {
        switch (kind) {
          case ExperimentKind::coverage_theta: require(n > 2ull * r, "coverage requires n > 2r"); break;
          case ExperimentKind::mnr_concentration: require(n > r, "mnr-concentration requires n > r"); break;
          case ExperimentKind::concentration_left:
          case ExperimentKind::concentration_right:
          case ExperimentKind::consistency_theta:
          case ExperimentKind::oracle_check: require(n >= r, "requires n >= r"); break;
          default: break;
        }
      }
    if (kind == ExperimentKind::coverage_match)
      for (const auto n : ns) require(n > 4, "match coverage requires n > 4");
    if (kind == ExperimentKind::consistency_theta || kind == ExperimentKind::consistency_match) {
      require(ns.size() >= 2, "consistency needs at least two sample sizes");
      require(std::is_sorted(ns.begin(), ns.end()) && std::adjacent_find(ns.begin(), ns.end()) == ns.end(),
              "consistency n grid must be strictly increasing");
    }
  }
};

// Flat `key = value` lines; `#` starts a comment; grids are comma-separated.
// Keys left out keep their defaults, with `kind` falling back to default_kind.
inline ExperimentConfig parse_config(std::string_view text,
                                     ExperimentKind default_kind = ExperimentKind::concentration_left) {
  ExperimentConfig cfg;
  cfg.kind = default_kind;
  std::size_t line_no = 0;
  for (auto line : split(text, '\n')) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "config line " + std::to_string(line_no);
    if (eq == std::string_view::npos) throw parse_error(where + ": expected key = value");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key == "kind") {
      cfg.kind = parse_experiment_kind(value);
    } else if (key == "dist") {
      cfg.dist = std::string(value);
    } else if (key == "n") {
      cfg.ns.clear();
      for (const auto v : split(value, ',')) cfg.ns.push_back(parse_u64(v, where));
    } else if (key == "r") {
      cfg.rs.clear();
      for (const auto v : split(value, ',')) cfg.rs.push_back(static_cast<unsigned>(parse_u64(v, where)));
    } else if (key == "x") {
      cfg.xs.clear();
      for (const auto v : split(value, ',')) cfg.xs.push_back(parse_double(v, where));
    } else if (key == "reps") {
      cfg.reps = parse_u64(value, where);
    } else if (key == "seed") {
      cfg.seed = parse_u64(value, where);
    } else if (key == "threads") {
      cfg.threads = static_cast<unsigned>(parse_u64(value, where));
    } else {
      throw parse_error(where + ": unknown key '" + std::string(key) + "'");
    }
  }
  return cfg;
}

struct Cell {
  Json params;
  std::string check;  // at_most | at_least | matches_exact | rate
  double empirical = 0.0;
  double bound = 0.0;
  double stderr_ = 0.0;
  bool pass = false;
  Json extra;  // null when absent
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<Cell> cells;
  double runtime_seconds = 0.0;

  bool all_pass() const {
    return std::all_of(cells.begin(), cells.end(), [](const Cell& c) { return c.pass; });
  }
};

// Infinite values become the string "inf"; JSON has no literal for them.
inline Json json_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return nullptr;
  return v;
}

inline Json config_json(const ExperimentConfig& c) {
  Json j;
  j["kind"] = to_string(c.kind);
  j["dist"] = c.dist;
  j["n"] = c.ns;
  j["r"] = c.rs;
  if (c.uses_x()) j["x"] = c.xs;
  j["reps"] = c.reps;
  j["seed"] = c.seed.value_or(0);
  return j;
}

inline Json to_json(const ExperimentReport& rep, bool with_runtime = true) {
  Json j;
  j["config"] = config_json(rep.config);
  Json cells = Json::array();
  for (const auto& c : rep.cells) {
    Json cj;
    cj["params"] = c.params;
    cj["check"] = c.check;
    cj["empirical"] = json_number(c.empirical);
    cj["bound"] = json_number(c.bound);
    cj["stderr"] = json_number(c.stderr_);
    cj["pass"] = c.pass;
    if (!c.extra.is_null()) cj["extra"] = c.extra;
    cells.push_back(std::move(cj));
  }
  j["cells"] = std::move(cells);
  if (with_runtime) j["runtime_seconds"] = rep.runtime_seconds;
  j["all_pass"] = rep.all_pass();
  return j;
}

// One row per cell; parameter keys become columns.
inline std::string to_csv(const ExperimentReport& rep) {
  std::vector<std::string> keys;
  for (const auto& c : rep.cells)
    for (const auto& [k, v] : c.params.items())
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
  std::ostringstream out;
  out.precision(17);
  for (const auto& k : keys) out << k << ',';
  out << "check,empirical,bound,stderr,pass\n";
  const auto cell_text = [](const Json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_array()) {
      std::string s;
      for (const auto& e : v) s += (s.empty() ? "" : ";") + e.dump();
      return s;
    }
    return v.dump();
  };
  for (const auto& c : rep.cells) {
    for (const auto& k : keys) out << (c.params.contains(k) ? cell_text(c.params[k]) : "") << ',';
    out << c.check << ',' << cell_text(json_number(c.empirical)) << ',' << cell_text(json_number(c.bound)) << ','
        << cell_text(json_number(c.stderr_)) << ',' << (c.pass ? "true" : "false") << '\n';
  }
  return out.str();
}

namespace detail {

inline double binomial_stderr(double p, std::uint64_t reps) {
  return std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(reps));
}

inline Cell at_most_cell(Json params, std::uint64_t hits, std::uint64_t reps, double bound, Json extra = nullptr) {
  Cell c;
  c.params = std::move(params);
  c.check = "at_most";
  c.empirical = static_cast<double>(hits) / static_cast<double>(reps);
  c.bound = bound;
  c.stderr_ = binomial_stderr(c.empirical, reps);
  c.pass = c.empirical <= bound + 3.0 * c.stderr_;
  c.extra = std::move(extra);
  return c;
}

inline Cell at_least_cell(Json params, std::uint64_t hits, std::uint64_t reps, double bound, Json extra = nullptr) {
  Cell c = at_most_cell(std::move(params), hits, reps, bound, std::move(extra));
  c.check = "at_least";
  c.pass = c.empirical >= bound - 3.0 * c.stderr_;
  return c;
}

// Per replicate and order r: theta_r and the counts M_{n,r}, C_{n,r}.
struct RepStat {
  double theta = 0.0;
  std::uint64_t m = 0;
  std::uint64_t c = 0;
};

// Replicate i of n-cell `cell` draws its sample from derive_seed(seed, cell, i);
// the same sample serves every r and x of that cell.
inline std::vector<RepStat> collect(const DiscreteDistribution& dist, std::uint64_t n, std::uint64_t cell,
                                    const std::vector<unsigned>& rs, std::uint64_t reps, std::uint64_t seed,
                                    unsigned threads) {
  const std::size_t nr = rs.size();
  std::vector<RepStat> out(reps * nr);
  parallel_for(reps, threads, [&](std::size_t i) {
    const auto t = tally(dist.sample(n, derive_seed(seed, cell, i)));
    const auto profile = t.profile();
    for (std::size_t k = 0; k < nr; ++k) {
      auto& s = out[i * nr + k];
      s.theta = dist.unseen_power_sum(t.ids, rs[k]);
      s.m = profile.m_r(rs[k]);
      s.c = profile.c_r(rs[k]);
    }
  });
  return out;
}

// theta - E theta <= -t. With t = 0 (zero variance proxy) only a strict
// deficit counts, so a degenerate theta == E theta is not an exceedance.
inline bool left_event(double deviation, double t) { return t > 0.0 ? deviation <= -t : deviation < 0.0; }

inline bool lower_covers(double theta, double raw_lower) { return theta >= std::clamp(raw_lower, 0.0, 1.0); }
inline bool upper_covers(double theta, double raw_upper) { return theta <= std::clamp(raw_upper, 0.0, 1.0); }

// Nearest-rank quantile of sorted data.
inline double quantile_sorted(const std::vector<double>& v, double p) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  const auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(v.size())));
  return v[std::clamp<std::size_t>(rank, 1, v.size()) - 1];
}

// Half the spread of the order statistics one binomial standard deviation
// either side of the p-quantile rank.
inline double quantile_stderr_sorted(const std::vector<double>& v, double p) {
  const double m = static_cast<double>(v.size());
  const double h = std::sqrt(m * p * (1.0 - p));
  const double lo = quantile_sorted(v, std::max(0.0, p - h / m));
  const double hi = quantile_sorted(v, std::min(1.0, p + h / m));
  return 0.5 * (hi - lo);
}

inline void run_concentration(const ExperimentConfig& cfg, const DiscreteDistribution& dist,
                              ExperimentReport& rep) {
  const bool left = cfg.kind == ExperimentKind::concentration_left;
  for (std::size_t ni = 0; ni < cfg.ns.size(); ++ni) {
    const auto n = cfg.ns[ni];
    const auto stats = collect(dist, n, ni, cfg.rs, cfg.reps, *cfg.seed, cfg.threads);
    for (std::size_t ri = 0; ri < cfg.rs.size(); ++ri) {
      const unsigned r = cfg.rs[ri];
      const auto ms = moment_set(dist, n, r);
      for (const double x : cfg.xs) {
        const double t = left ? theta_left_deviation(ms.v_n, x) : theta_right_deviation(ms.v_n, n, r, x);
        std::uint64_t hits = 0;
        for (std::uint64_t i = 0; i < cfg.reps; ++i) {
          const double dev = stats[i * cfg.rs.size() + ri].theta - ms.expected_theta;
          hits += left ? left_event(dev, t) : dev >= t;
        }
        Json params{{"n", n}, {"r", r}, {"x", x}, {"tail", left ? "left" : "right"}};
        Json extra{{"expected_theta", ms.expected_theta}, {"v_n", ms.v_n}, {"threshold", t}};
        const double bound = (left ? 1.0 : 2.0) * std::exp(-x);
        rep.cells.push_back(at_most_cell(std::move(params), hits, cfg.reps, bound, std::move(extra)));
      }
    }
  }
}

inline void run_mnr_concentration(const ExperimentConfig& cfg, const DiscreteDistribution& dist,
                                  ExperimentReport& rep) {
  for (std::size_t ni = 0; ni < cfg.ns.size(); ++ni) {
    const auto n = cfg.ns[ni];
    const auto stats = collect(dist, n, ni, cfg.rs, cfg.reps, *cfg.seed, cfg.threads);
    for (std::size_t ri = 0; ri < cfg.rs.size(); ++ri) {
      const unsigned r = cfg.rs[ri];
      const auto ms = moment_set(dist, n, r);
      for (const double x : cfg.xs) {
        const double tm = m_deviation(ms.w_n, x);
        const double tcl = c_lower_deviation(ms.expected_c, x);
        const double tcu = c_upper_deviation(ms.expected_c, x);
        std::uint64_t m_hits = 0, cl_hits = 0, cu_hits = 0;
        for (std::uint64_t i = 0; i < cfg.reps; ++i) {
          const auto& s = stats[i * cfg.rs.size() + ri];
          m_hits += std::abs(static_cast<double>(s.m) - ms.expected_m) >= tm;
          cl_hits += static_cast<double>(s.c) <= ms.expected_c - tcl;
          cu_hits += static_cast<double>(s.c) >= ms.expected_c + tcu;
        }
        const auto params = [&](const char* stat) { return Json{{"n", n}, {"r", r}, {"x", x}, {"statistic", stat}}; };
        rep.cells.push_back(at_most_cell(params("m_two_sided"), m_hits, cfg.reps, 4.0 * std::exp(-x),
                                         Json{{"expected_m", ms.expected_m}, {"w_n", ms.w_n}, {"threshold", tm}}));
        rep.cells.push_back(at_most_cell(params("c_lower"), cl_hits, cfg.reps, std::exp(-x),
                                         Json{{"expected_c", ms.expected_c}, {"threshold", tcl}}));
        rep.cells.push_back(at_most_cell(params("c_upper"), cu_hits, cfg.reps, std::exp(-x),
                                         Json{{"expected_c", ms.expected_c}, {"threshold", tcu}}));
      }
    }
  }
}

inline void run_coverage_theta(const ExperimentConfig& cfg, const DiscreteDistribution& dist, ExperimentReport& rep) {
  for (std::size_t ni = 0; ni < cfg.ns.size(); ++ni) {
    const auto n = cfg.ns[ni];
    const auto stats = collect(dist, n, ni, cfg.rs, cfg.reps, *cfg.seed, cfg.threads);
    for (std::size_t ri = 0; ri < cfg.rs.size(); ++ri) {
      const unsigned r = cfg.rs[ri];
      for (const double x : cfg.xs) {
        std::uint64_t lo = 0, up = 0, both = 0;
        for (std::uint64_t i = 0; i < cfg.reps; ++i) {
          const auto& s = stats[i * cfg.rs.size() + ri];
          const bool l = lower_covers(s.theta, lower_bound(n, r, s.m, s.c, x));
          const bool u = upper_covers(s.theta, upper_bound(n, r, s.m, s.c, x));
          lo += l;
          up += u;
          both += l && u;
        }
        const auto params = [&](const char* side) { return Json{{"n", n}, {"r", r}, {"x", x}, {"side", side}}; };
        rep.cells.push_back(at_least_cell(params("lower"), lo, cfg.reps, 1.0 - 6.0 * std::exp(-x)));
        rep.cells.push_back(at_least_cell(params("upper"), up, cfg.reps, 1.0 - 7.0 * std::exp(-x)));
        rep.cells.push_back(at_least_cell(params("joint"), both, cfg.reps, 1.0 - 13.0 * std::exp(-x)));
      }
    }
  }
}

inline void run_coverage_match(const ExperimentConfig& cfg, const DiscreteDistribution& dist, ExperimentReport& rep) {
  const std::vector<unsigned> orders{1, 2};
  for (std::size_t ni = 0; ni < cfg.ns.size(); ++ni) {
    const auto n = cfg.ns[ni];
    const auto stats = collect(dist, n, ni, orders, cfg.reps, *cfg.seed, cfg.threads);
    for (const double x : cfg.xs) {
      std::uint64_t covered = 0, undefined = 0, infinite_high = 0;
      for (std::uint64_t i = 0; i < cfg.reps; ++i) {
        const auto& s1 = stats[2 * i];
        const auto& s2 = stats[2 * i + 1];
        const auto m = match_interval(n, s1.m, s1.c, s2.m, s2.c, x);
        const auto truth = ratio_of(s1.theta, s2.theta);
        infinite_high += !m.high_finite;
        if (truth.status == RatioStatus::undefined) {
          // every symbol observed: T has no value, so score the two
          // component statements the interval is built from
          ++undefined;
          covered += lower_covers(s1.theta, m.lower_1) && upper_covers(s1.theta, m.upper_1) &&
                     lower_covers(s2.theta, m.lower_2) && upper_covers(s2.theta, m.upper_2);
        } else {
          covered += interval_contains(m, truth);
        }
      }
      Json extra{{"undefined_truth", undefined}, {"infinite_high", infinite_high}};
      rep.cells.push_back(at_least_cell(Json{{"n", n}, {"x", x}}, covered, cfg.reps, 1.0 - 26.0 * std::exp(-x),
                                        std::move(extra)));
    }
  }
}

inline void run_consistency(const ExperimentConfig& cfg, const DiscreteDistribution& dist, ExperimentReport& rep) {
  const auto tail = dist.tail_index();
  require(tail.has_value(), "consistency needs a distribution with a known tail index (zipf or lemma2)");
  const bool match = cfg.kind == ExperimentKind::consistency_match;
  const std::vector<unsigned> orders = match ? std::vector<unsigned>{1, 2} : cfg.rs;
  const std::size_t no = orders.size();

  // losses[ni][series][rep]; series = order index, or a single ratio series
  const std::size_t series = match ? 1 : no;
  std::vector<std::vector<std::vector<double>>> losses(cfg.ns.size(), std::vector<std::vector<double>>(series));
  std::vector<std::vector<std::uint64_t>> skipped(cfg.ns.size(), std::vector<std::uint64_t>(series, 0));
  for (std::size_t ni = 0; ni < cfg.ns.size(); ++ni) {
    const auto n = cfg.ns[ni];
    const auto stats = collect(dist, n, ni, orders, cfg.reps, *cfg.seed, cfg.threads);
    for (std::uint64_t i = 0; i < cfg.reps; ++i) {
      if (match) {
        const auto& s1 = stats[i * no];
        const auto& s2 = stats[i * no + 1];
        const auto truth = ratio_of(s1.theta, s2.theta);
        if (truth.status != RatioStatus::finite || truth.value == 0.0) {
          ++skipped[ni][0];
          continue;
        }
        const double est = s2.m > 0 ? static_cast<double>(s1.m) * static_cast<double>(n - 1) /
                                          (2.0 * static_cast<double>(s2.m))
                                    : std::numeric_limits<double>::infinity();
        losses[ni][0].push_back(std::abs(est / truth.value - 1.0));
      } else {
        for (std::size_t k = 0; k < no; ++k) {
          const auto& s = stats[i * no + k];
          if (s.theta == 0.0) {
            ++skipped[ni][k];
            continue;
          }
          losses[ni][k].push_back(std::abs(gt_estimate(n, orders[k], s.m) / s.theta - 1.0));
        }
      }
    }
  }

  for (std::size_t k = 0; k < series; ++k) {
    Json per_n = Json::array();
    std::vector<double> medians, p95s, p95_se;
    for (std::size_t ni = 0; ni < cfg.ns.size(); ++ni) {
      const double n = static_cast<double>(cfg.ns[ni]);
      const double scale = std::sqrt(std::pow(n, tail->alpha) * tail->L);
      auto v = losses[ni][k];
      std::sort(v.begin(), v.end());
      std::vector<double> scaled(v.size());
      std::transform(v.begin(), v.end(), scaled.begin(), [scale](double l) { return scale * l; });
      medians.push_back(quantile_sorted(v, 0.5));
      p95s.push_back(quantile_sorted(scaled, 0.95));
      p95_se.push_back(quantile_stderr_sorted(scaled, 0.95));
      per_n.push_back(Json{{"n", cfg.ns[ni]},
                           {"median_loss", json_number(medians.back())},
                           {"median_scaled", json_number(quantile_sorted(scaled, 0.5))},
                           {"p95_scaled", json_number(p95s.back())},
                           {"p95_stderr", json_number(p95_se.back())},
                           {"skipped", skipped[ni][k]}});
    }
    bool decreasing = true;
    for (std::size_t ni = 1; ni < medians.size(); ++ni) decreasing = decreasing && medians[ni] < medians[ni - 1];
    Cell c;
    c.params = match ? Json{{"statistic", "match_ratio"}, {"n", cfg.ns}}
                     : Json{{"statistic", "theta"}, {"r", orders[k]}, {"n", cfg.ns}};
    c.check = "rate";
    c.empirical = p95s.back();
    c.bound = 2.0 * p95s.front();
    c.stderr_ = p95_se.back();
    c.pass = std::isfinite(c.empirical) && c.empirical <= c.bound && decreasing;
    c.extra = Json{{"alpha", tail->alpha}, {"L", tail->L}, {"medians_decreasing", decreasing}, {"per_n", per_n}};
    rep.cells.push_back(std::move(c));
  }
}

// Monte Carlo frequencies of every event the harness scores, next to their
// exact probabilities from full enumeration.
inline void run_oracle_check(const ExperimentConfig& cfg, const DiscreteDistribution& dist, ExperimentReport& rep) {
  require(dist.kind() == DiscreteDistribution::Kind::finite && dist.finite_masses().size() <= 4,
          "oracle-check needs a finite distribution with at most 4 atoms");
  for (const auto n : cfg.ns) require(n <= 8, "oracle-check needs n <= 8");
  for (std::size_t ni = 0; ni < cfg.ns.size(); ++ni) {
    const auto n = cfg.ns[ni];
    const auto stats = collect(dist, n, ni, cfg.rs, cfg.reps, *cfg.seed, cfg.threads);
    for (std::size_t ri = 0; ri < cfg.rs.size(); ++ri) {
      const unsigned r = cfg.rs[ri];
      const auto ms = moment_set(dist, n, r);
      const auto law = enumerate_exact(dist, n, r);
      for (const double x : cfg.xs) {
        struct Event {
          const char* name;
          std::function<bool(double, std::uint64_t, std::uint64_t)> holds;  // (theta, m, c)
        };
        const double tl = theta_left_deviation(ms.v_n, x);
        const double tr = theta_right_deviation(ms.v_n, n, r, x);
        const double tm = m_deviation(ms.w_n, x);
        std::vector<Event> events{
            {"theta_left", [&](double th, auto, auto) { return left_event(th - ms.expected_theta, tl); }},
            {"theta_right", [&](double th, auto, auto) { return th - ms.expected_theta >= tr; }},
            {"m_two_sided",
             [&](double, std::uint64_t m, auto) { return std::abs(static_cast<double>(m) - ms.expected_m) >= tm; }},
        };
        if (n > 2ull * r) {
          events.push_back({"cover_lower", [&](double th, std::uint64_t m, std::uint64_t c) {
                              return lower_covers(th, lower_bound(n, r, m, c, x));
                            }});
          events.push_back({"cover_upper", [&](double th, std::uint64_t m, std::uint64_t c) {
                              return upper_covers(th, upper_bound(n, r, m, c, x));
                            }});
        }
        for (const auto& ev : events) {
          const double exact = law.probability([&](const ExactOutcome& o) { return ev.holds(o.theta, o.m, o.c); });
          std::uint64_t hits = 0;
          for (std::uint64_t i = 0; i < cfg.reps; ++i) {
            const auto& s = stats[i * cfg.rs.size() + ri];
            hits += ev.holds(s.theta, s.m, s.c);
          }
          Cell c;
          c.params = Json{{"n", n}, {"r", r}, {"x", x}, {"event", ev.name}};
          c.check = "matches_exact";
          c.empirical = static_cast<double>(hits) / static_cast<double>(cfg.reps);
          c.bound = exact;
          c.stderr_ = binomial_stderr(exact, cfg.reps);
          c.pass = std::abs(c.empirical - exact) <= 4.0 * c.stderr_ + 1e-12;
          rep.cells.push_back(std::move(c));
        }
      }
    }
  }
}

}  // namespace detail

inline ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto dist = parse_distribution(cfg.dist);
  ExperimentReport rep;
  rep.config = cfg;
  switch (cfg.kind) {
    case ExperimentKind::concentration_left:
    case ExperimentKind::concentration_right: detail::run_concentration(cfg, dist, rep); break;
    case ExperimentKind::mnr_concentration: detail::run_mnr_concentration(cfg, dist, rep); break;
    case ExperimentKind::coverage_theta: detail::run_coverage_theta(cfg, dist, rep); break;
    case ExperimentKind::coverage_match: detail::run_coverage_match(cfg, dist, rep); break;
    case ExperimentKind::consistency_theta:
    case ExperimentKind::consistency_match: detail::run_consistency(cfg, dist, rep); break;
    case ExperimentKind::oracle_check: detail::run_oracle_check(cfg, dist, rep); break;
  }
  rep.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace mmass
