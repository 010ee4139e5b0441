#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "mmass/montecarlo.hpp"

using namespace mmass;

namespace {

ExperimentConfig small(ExperimentKind kind, std::string dist, std::vector<std::uint64_t> ns) {
  ExperimentConfig c;
  c.kind = kind;
  c.dist = std::move(dist);
  c.ns = std::move(ns);
  c.rs = {1, 2};
  c.xs = {1.0, 3.0};
  c.reps = 400;
  c.seed = 17;
  c.threads = 1;
  return c;
}

std::size_t count_lines(const std::string& s) { return std::count(s.begin(), s.end(), '\n'); }

}  // namespace

TEST(Config, ParsesAllKeys) {
  const auto c = parse_config(
      "# demo\nkind = coverage-theta\ndist = zipf:alpha=0.5\nn = 100, 200\nr = 1,2\nx = 2, 4.5\n"
      "reps = 500  # trailing comment\nseed = 9\nthreads = 2\n");
  EXPECT_EQ(c.kind, ExperimentKind::coverage_theta);
  EXPECT_EQ(c.dist, "zipf:alpha=0.5");
  EXPECT_EQ(c.ns, (std::vector<std::uint64_t>{100, 200}));
  EXPECT_EQ(c.rs, (std::vector<unsigned>{1, 2}));
  EXPECT_EQ(c.xs, (std::vector<double>{2.0, 4.5}));
  EXPECT_EQ(c.reps, 500u);
  EXPECT_EQ(*c.seed, 9u);
  EXPECT_EQ(c.threads, 2u);
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, Errors) {
  EXPECT_THROW(parse_config("colour = red\n"), parse_error);
  EXPECT_THROW(parse_config("n = ten\n"), parse_error);
  EXPECT_THROW(parse_config("just words\n"), parse_error);
  EXPECT_THROW(parse_config("kind = nonsense\n"), parse_error);
  auto c = parse_config("dist = uniform:k=3\nn = 10\n");
  EXPECT_THROW(c.validate(), parse_error);  // no seed
  c.seed = 1;
  EXPECT_NO_THROW(c.validate());
  c.reps = 50;
  EXPECT_THROW(c.validate(), precondition_error);
  c.reps = 100;
  c.kind = ExperimentKind::coverage_theta;
  c.ns = {2};
  EXPECT_THROW(c.validate(), precondition_error);
  c.kind = ExperimentKind::consistency_theta;
  c.ns = {100};
  EXPECT_THROW(c.validate(), precondition_error);
  c.ns = {200, 100};
  EXPECT_THROW(c.validate(), precondition_error);
}

TEST(Config, DefaultKind) {
  EXPECT_EQ(parse_config("", ExperimentKind::coverage_match).kind, ExperimentKind::coverage_match);
  for (const auto& [k, name] : kExperimentKinds) EXPECT_EQ(parse_experiment_kind(name), k);
}

TEST(Harness, DeterministicAcrossRunsAndThreads) {
  auto c = small(ExperimentKind::coverage_theta, "zipf:alpha=0.5", {50, 120});
  const auto a = to_json(run_experiment(c), false).dump();
  const auto b = to_json(run_experiment(c), false).dump();
  c.threads = 3;
  const auto t = to_json(run_experiment(c), false).dump();
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, t);
  c.seed = 18;
  EXPECT_NE(a, to_json(run_experiment(c), false).dump());
}

TEST(Harness, PointMassHasNoExceedances) {
  for (auto kind : {ExperimentKind::concentration_left, ExperimentKind::concentration_right}) {
    const auto rep = run_experiment(small(kind, "finite:p=1", {5, 20}));
    for (const auto& cell : rep.cells) {
      EXPECT_EQ(cell.empirical, 0.0);
      EXPECT_TRUE(cell.pass);
    }
  }
}

TEST(Harness, HugeXNeverExceeds) {
  auto c = small(ExperimentKind::concentration_right, "geometric:q=0.5", {200});
  c.xs = {40.0};
  for (const auto& cell : run_experiment(c).cells) EXPECT_EQ(cell.empirical, 0.0);
}

TEST(Harness, ConcentrationCellsCarryThresholds) {
  const auto rep = run_experiment(small(ExperimentKind::concentration_left, "uniform:k=20", {30}));
  ASSERT_EQ(rep.cells.size(), 4u);
  const auto ms = moment_set(DiscreteDistribution::uniform(20), 30, 1);
  EXPECT_DOUBLE_EQ(rep.cells[0].extra["expected_theta"].get<double>(), ms.expected_theta);
  EXPECT_DOUBLE_EQ(rep.cells[0].extra["threshold"].get<double>(), std::sqrt(2 * ms.v_n * 1.0));
  EXPECT_DOUBLE_EQ(rep.cells[0].bound, std::exp(-1.0));
  EXPECT_TRUE(rep.all_pass());
}

TEST(Harness, MnrAndMatchCoveragePass) {
  EXPECT_TRUE(run_experiment(small(ExperimentKind::mnr_concentration, "uniform:k=50", {60, 300})).all_pass());
  auto c = small(ExperimentKind::coverage_match, "zipf:alpha=0.5", {400});
  c.xs = {4.0};
  const auto rep = run_experiment(c);
  ASSERT_EQ(rep.cells.size(), 1u);
  EXPECT_TRUE(rep.all_pass());
}

TEST(Harness, OracleCheckMatchesEnumeration) {
  for (const char* d : {"uniform:k=2", "twopoint:omega=0.1", "finite:p=0.4|0.3|0.2|0.1"}) {
    auto c = small(ExperimentKind::oracle_check, d, {2, 5, 8});
    c.reps = 5000;
    const auto rep = run_experiment(c);
    for (const auto& cell : rep.cells)
      EXPECT_TRUE(cell.pass) << d << " " << cell.params.dump() << " " << cell.empirical << " vs " << cell.bound;
  }
  auto bad = small(ExperimentKind::oracle_check, "uniform:k=5", {4});
  EXPECT_THROW(run_experiment(bad), precondition_error);
}

TEST(Harness, ConsistencyReportsPerN) {
  auto c = small(ExperimentKind::consistency_theta, "lemma2:alpha=0.5,L=1", {300, 3000});
  c.rs = {1};
  c.reps = 200;
  const auto rep = run_experiment(c);
  ASSERT_EQ(rep.cells.size(), 1u);
  EXPECT_EQ(rep.cells[0].extra["per_n"].size(), 2u);
  EXPECT_EQ(rep.cells[0].check, "rate");
  auto u = c;
  u.dist = "uniform:k=10";
  EXPECT_THROW(run_experiment(u), precondition_error);
}

TEST(Harness, FailingCellIsReported) {
  Json params{{"n", 1}};
  const auto c = detail::at_most_cell(params, 50, 100, 0.1);
  EXPECT_FALSE(c.pass);
  EXPECT_TRUE(detail::at_most_cell(params, 0, 100, 0.0).pass);
  EXPECT_FALSE(detail::at_least_cell(params, 50, 100, 0.9).pass);
  ExperimentReport rep;
  rep.cells = {c};
  EXPECT_FALSE(rep.all_pass());
  EXPECT_FALSE(to_json(rep)["all_pass"].get<bool>());
}

TEST(Output, JsonShapeAndCsv) {
  const auto rep = run_experiment(small(ExperimentKind::coverage_theta, "uniform:k=30", {40}));
  const auto j = to_json(rep);
  EXPECT_TRUE(j.contains("runtime_seconds"));
  EXPECT_FALSE(to_json(rep, false).contains("runtime_seconds"));
  EXPECT_EQ(j["cells"].size(), 12u);
  for (const auto& key : {"params", "check", "empirical", "bound", "stderr", "pass"}) EXPECT_TRUE(j["cells"][0].contains(key));
  const auto csv = to_csv(rep);
  EXPECT_EQ(count_lines(csv), rep.cells.size() + 1);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "n,r,x,side,check,empirical,bound,stderr,pass");
  EXPECT_EQ(json_number(INFINITY), "inf");
}

TEST(Quantiles, NearestRank) {
  const std::vector<double> v{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  EXPECT_EQ(detail::quantile_sorted(v, 0.5), 5.0);
  EXPECT_EQ(detail::quantile_sorted(v, 0.95), 10.0);
  EXPECT_EQ(detail::quantile_sorted(v, 0.0), 1.0);
  EXPECT_TRUE(std::isnan(detail::quantile_sorted({}, 0.5)));
  EXPECT_GE(detail::quantile_stderr_sorted(v, 0.5), 0.0);
}

TEST(Events, LeftTailStrictAtZeroThreshold) {
  EXPECT_FALSE(detail::left_event(0.0, 0.0));
  EXPECT_TRUE(detail::left_event(-1e-18, 0.0));
  EXPECT_TRUE(detail::left_event(-0.5, 0.5));
  EXPECT_FALSE(detail::left_event(-0.4, 0.5));
  EXPECT_TRUE(detail::lower_covers(0.0, -3.0));
  EXPECT_TRUE(detail::upper_covers(1.0, 7.0));
}
