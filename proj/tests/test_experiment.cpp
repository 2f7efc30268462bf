#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hmg/experiment.hpp"
#include "hmg/stats.hpp"

using hmg::ConfigError;
using hmg::Conditioning;
using hmg::CsvTable;
using hmg::ExperimentConfig;
using hmg::IncidenceGraph;
using hmg::LimitDistribution;
using hmg::Rng;

namespace {

IncidenceGraph from_incidences(int nv, int ne, const std::vector<std::pair<int, int>>& pairs) {
  IncidenceGraph g(nv, ne);
  for (auto [v, e] : pairs) g.add_incidence(v, e);
  return g;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    rows.push_back(std::move(cells));
  }
  return rows;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  REQUIRE(is.good());
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

std::filesystem::path fresh_dir(const std::string& name) {
  std::filesystem::path dir = std::filesystem::temp_directory_path() / ("hmg-test-" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("summary statistics") {
  hmg::SummaryStats s = hmg::summarize({1.0, 2.0, 3.0, 4.0});
  REQUIRE(s.count == 4);
  REQUIRE(s.mean == Catch::Approx(2.5));
  REQUIRE(s.variance == Catch::Approx(5.0 / 3.0));
  REQUIRE(s.std_error == Catch::Approx(std::sqrt(5.0 / 12.0)));
  REQUIRE(s.min == 1.0);
  REQUIRE(s.max == 4.0);

  hmg::SummaryStats one = hmg::summarize({7.0});
  REQUIRE(one.variance == 0.0);
  REQUIRE(one.std_error == 0.0);
  REQUIRE_THROWS_AS(hmg::summarize({}), ConfigError);
}

TEST_CASE("total variation distance") {
  std::map<int, double> a{{0, 0.5}, {1, 0.5}};
  REQUIRE(hmg::tv_distance(a, a) == 0.0);
  std::map<int, double> b{{0, 0.25}, {1, 0.75}};
  REQUIRE(hmg::tv_distance(a, b) == Catch::Approx(0.25));
  std::map<int, double> c{{5, 1.0}};
  REQUIRE(hmg::tv_distance(a, c) == Catch::Approx(1.0));
  REQUIRE(hmg::tv_distance(std::map<int, double>{}, c) == Catch::Approx(0.5));

  std::map<int, long long> counts{{1, 3}, {2, 1}};
  std::map<int, double> freq = hmg::frequencies(counts);
  REQUIRE(freq[1] == Catch::Approx(0.75));
  REQUIRE(freq[2] == Catch::Approx(0.25));
  REQUIRE(hmg::frequencies(std::map<int, long long>{}).empty());
}

TEST_CASE("line fits and log-log slopes") {
  hmg::LineFit fit = hmg::fit_line({0.0, 1.0, 2.0}, {1.0, 3.0, 5.0});
  REQUIRE(fit.slope == Catch::Approx(2.0));
  REQUIRE(fit.intercept == Catch::Approx(1.0));

  std::vector<double> x{500.0, 2000.0, 8000.0};
  std::vector<double> y{7.0 / 500.0, 7.0 / 2000.0, 7.0 / 8000.0};
  REQUIRE(hmg::log_log_slope(x, y) == Catch::Approx(-1.0).margin(1e-12));

  REQUIRE_THROWS_AS(hmg::fit_line({1.0}, {1.0}), ConfigError);
  REQUIRE_THROWS_AS(hmg::fit_line({1.0, 1.0}, {1.0, 2.0}), ConfigError);
  REQUIRE_THROWS_AS(hmg::log_log_slope({1.0, -2.0}, {1.0, 1.0}), ConfigError);
}

TEST_CASE("csv formatting is canonical") {
  REQUIRE(hmg::csv_number(1.0) == "1");
  REQUIRE(hmg::csv_number(0.25) == "0.25");
  REQUIRE(hmg::csv_number(static_cast<long long>(-12)) == "-12");
  for (double v : {1.0 / 3.0, 1e300, 6.02e23, 0.1, 1.0 - std::exp(-1.0)}) {
    std::string text = hmg::csv_number(v);
    REQUIRE(std::strtod(text.c_str(), nullptr) == v);
  }
  REQUIRE(hmg::csv_escape("plain") == "plain");
  REQUIRE(hmg::csv_escape("a,b") == "\"a,b\"");
  REQUIRE(hmg::csv_escape("a\"b") == "\"a\"\"b\"");

  CsvTable t({"a", "b"});
  t.add_row({"1", "2"});
  REQUIRE(t.to_string() == "a,b\n1,2\n");
  REQUIRE_THROWS_AS(t.add_row({"only"}), ConfigError);
  REQUIRE_THROWS_AS(CsvTable(std::vector<std::string>{}), ConfigError);
}

TEST_CASE("experiment config json round trip and validation") {
  nlohmann::json j;
  j["vdist"] = LimitDistribution::dirac(3).to_json();
  j["edist"] = LimitDistribution::dirac(2).to_json();
  j["sizes"] = {100, 200};
  j["tasks"] = {"census", "simplicity"};
  ExperimentConfig c = hmg::config_from_json(j);
  REQUIRE(c.samples == 100);
  REQUIRE(c.seed == 1);
  REQUIRE(c.conditioning == Conditioning::None);
  REQUIRE(c.sizes == std::vector<long long>{100, 200});

  c.samples = 7;
  c.seed = 99;
  c.conditioning = Conditioning::Hypergraph;
  c.estimate_sentence = "(exists x (v x))";
  nlohmann::json echoed = hmg::config_to_json(c);
  ExperimentConfig back = hmg::config_from_json(echoed);
  REQUIRE(hmg::config_to_json(back) == echoed);

  auto expect_error = [&](const nlohmann::json& bad, const std::string& needle) {
    try {
      hmg::config_from_json(bad);
      FAIL("expected ConfigError mentioning " + needle);
    } catch (const ConfigError& e) {
      INFO(e.what());
      REQUIRE(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  nlohmann::json bad = j;
  bad.erase("vdist");
  expect_error(bad, "vdist");
  bad = j;
  bad["sizes"] = {200, 100};
  expect_error(bad, "sizes[1]");
  bad = j;
  bad["sizes"] = nlohmann::json::array();
  expect_error(bad, "sizes");
  bad = j;
  bad["samples"] = 0;
  expect_error(bad, "samples");
  bad = j;
  bad["tasks"] = {"census", "frobnicate"};
  expect_error(bad, "tasks[1]");
  bad = j;
  bad["tasks"] = {"census", "census"};
  expect_error(bad, "tasks[1]");
  bad = j;
  bad["tasks"] = {"admissibility"};
  bad["sizes"] = {100};
  expect_error(bad, "sizes");
  bad = j;
  bad["estimate_sentence"] = "(v x";
  expect_error(bad, "estimate_sentence");
  bad = j;
  bad["estimate_sentence"] = "(v x)";  // free variable
  expect_error(bad, "estimate_sentence");
  bad = j;
  bad["er_mean"] = -1.0;
  expect_error(bad, "er_mean");
  bad = j;
  bad["conditioning"] = "sideways";
  expect_error(bad, "conditioning");
}

TEST_CASE("clustering study on hand-checked graphs") {
  // one size-4 edge: every member sees every neighbour pair inside the edge
  IncidenceGraph onebig = from_incidences(4, 1, {{0, 0}, {1, 0}, {2, 0}, {3, 0}});
  hmg::ClusteringEntry entry = hmg::clustering_study(onebig);
  REQUIRE(entry.contributing == 4);
  REQUIRE(entry.excluded == 0);
  REQUIRE(entry.mean_set == Catch::Approx(1.0));
  REQUIRE(entry.mean_formula == Catch::Approx(1.0));

  // centre vertex in two disjoint size-3 edges: C = 1/3; leaves have C = 1
  IncidenceGraph bowtie =
      from_incidences(5, 2, {{0, 0}, {1, 0}, {2, 0}, {0, 1}, {3, 1}, {4, 1}});
  entry = hmg::clustering_study(bowtie);
  REQUIRE(entry.contributing == 5);
  REQUIRE(entry.mean_set == Catch::Approx((1.0 / 3.0 + 4.0) / 5.0));
  REQUIRE(entry.mean_formula == Catch::Approx((1.0 / 3.0 + 4.0) / 5.0));

  // two edges overlapping in two vertices: the multiplicity-counting formula
  // sees four pair slots where the set estimator sees three
  IncidenceGraph overlap =
      from_incidences(4, 2, {{0, 0}, {1, 0}, {2, 0}, {0, 1}, {1, 1}, {3, 1}});
  entry = hmg::clustering_study(overlap);
  REQUIRE(entry.contributing == 4);
  REQUIRE(entry.mean_set > entry.mean_formula);

  // path: the middle vertex has two non-adjacent neighbours, ends are excluded
  IncidenceGraph path = from_incidences(3, 2, {{0, 0}, {1, 0}, {1, 1}, {2, 1}});
  entry = hmg::clustering_study(path);
  REQUIRE(entry.contributing == 1);
  REQUIRE(entry.excluded == 2);
  REQUIRE(entry.mean_set == 0.0);

  REQUIRE(hmg::clustering_study(IncidenceGraph(0, 0)).contributing == 0);
  IncidenceGraph doubled = from_incidences(2, 1, {{0, 0}, {0, 0}, {1, 0}});
  REQUIRE_THROWS_AS(hmg::clustering_study(doubled), ConfigError);
}

TEST_CASE("clustering reference value") {
  // one size-3 edge per vertex: all neighbour pairs share it
  REQUIRE(hmg::clustering_reference(LimitDistribution::dirac(1), LimitDistribution::dirac(3)) ==
          Catch::Approx(1.0));
  // two locally-disjoint size-3 edges: 2 of the 6 pairs are linked
  REQUIRE(hmg::clustering_reference(LimitDistribution::dirac(2), LimitDistribution::dirac(3)) ==
          Catch::Approx(1.0 / 3.0));
  // three locally-disjoint size-3 edges: 3 of 15
  REQUIRE(hmg::clustering_reference(LimitDistribution::dirac(3), LimitDistribution::dirac(3)) ==
          Catch::Approx(0.2));
  // ordinary graphs: no size-3 edge ever appears
  REQUIRE(hmg::clustering_reference(LimitDistribution::dirac(3), LimitDistribution::dirac(2)) ==
          0.0);
  // nobody ever has two neighbour pairs
  REQUIRE(std::isnan(
      hmg::clustering_reference(LimitDistribution::dirac(1), LimitDistribution::dirac(2))));
}

TEST_CASE("clustering empirics approach the reference") {
  ExperimentConfig c;
  c.vdist = LimitDistribution::dirac(3);
  c.edist = LimitDistribution::dirac(3);
  c.sizes = {1500};
  c.samples = 3;
  c.seed = 11;
  CsvTable table = hmg::clustering_table(c, 1500);
  auto rows = parse_csv(table.to_string());
  REQUIRE(rows.size() == 2);
  std::map<std::string, std::string> row;
  for (std::size_t i = 0; i < rows[0].size(); ++i) row[rows[0][i]] = rows[1][i];
  double mean_set = std::strtod(row["mean_c_set"].c_str(), nullptr);
  double reference = std::strtod(row["reference"].c_str(), nullptr);
  REQUIRE(reference == Catch::Approx(0.2));
  REQUIRE(mean_set >= 0.0);
  REQUIRE(mean_set <= 1.0);
  REQUIRE(std::abs(mean_set - reference) < 0.04);
}

TEST_CASE("gnp sampler") {
  Rng rng(5);
  REQUIRE(hmg::sample_gnp(50, 0.0, rng).n_e() == 0);
  IncidenceGraph full = hmg::sample_gnp(5, 1.0, rng);
  REQUIRE(full.n_e() == 10);
  REQUIRE(hmg::sample_gnp(0, 0.5, rng).n_v() == 0);
  REQUIRE(hmg::sample_gnp(1, 0.5, rng).n_e() == 0);
  REQUIRE_THROWS_AS(hmg::sample_gnp(5, 1.5, rng), ConfigError);

  // every edge is a distinct unordered pair; edge count matches np in the mean
  double total_edges = 0.0;
  for (int trial = 0; trial < 30; ++trial) {
    Rng r(1000 + trial);
    IncidenceGraph g = hmg::sample_gnp(200, 0.05, r);
    std::set<std::pair<int, int>> seen;
    for (int e = 0; e < g.n_e(); ++e) {
      std::vector<int> mem = g.sorted_members(e);
      REQUIRE(mem.size() == 2);
      REQUIRE(mem[0] < mem[1]);
      REQUIRE(seen.emplace(mem[0], mem[1]).second);
    }
    total_edges += g.n_e();
  }
  double mean_edges = total_edges / 30.0;
  REQUIRE(mean_edges > 900.0);  // expectation 995
  REQUIRE(mean_edges < 1090.0);

  Rng r1(77), r2(77);
  REQUIRE(hmg::to_text(hmg::sample_gnp(100, 0.03, r1)) ==
          hmg::to_text(hmg::sample_gnp(100, 0.03, r2)));
}

TEST_CASE("triangle and wedge counts") {
  IncidenceGraph triangle =
      from_incidences(3, 3, {{0, 0}, {1, 0}, {1, 1}, {2, 1}, {0, 2}, {2, 2}});
  REQUIRE(hmg::triangle_count(triangle) == 1);
  REQUIRE(hmg::two_path_count(triangle) == 3);

  IncidenceGraph square = from_incidences(
      4, 4, {{0, 0}, {1, 0}, {1, 1}, {2, 1}, {2, 2}, {3, 2}, {3, 3}, {0, 3}});
  REQUIRE(hmg::triangle_count(square) == 0);
  REQUIRE(hmg::two_path_count(square) == 4);

  // a size-3 hyper-edge projects to a triangle
  IncidenceGraph parlour = from_incidences(3, 1, {{0, 0}, {1, 0}, {2, 0}});
  REQUIRE(hmg::triangle_count(parlour) == 1);
  REQUIRE(hmg::two_path_count(parlour) == 3);

  // parallel pairs deduplicate
  IncidenceGraph parallel = from_incidences(2, 2, {{0, 0}, {1, 0}, {0, 1}, {1, 1}});
  REQUIRE(hmg::triangle_count(parallel) == 0);
  REQUIRE(hmg::two_path_count(parallel) == 0);
}

TEST_CASE("er comparison table") {
  CsvTable table = hmg::er_compare_table(2.0, 300, 8, 424242);
  auto rows = parse_csv(table.to_string());
  REQUIRE(rows[0] == std::vector<std::string>{"n", "samples", "seed", "metric", "incidence",
                                              "gnp", "gap"});
  REQUIRE(rows.size() == 1 + 4 + 5);  // tv, three paired metrics, five sentences
  std::map<std::string, std::vector<std::string>> by_metric;
  for (std::size_t i = 1; i < rows.size(); ++i) by_metric[rows[i][3]] = rows[i];
  double tv = std::strtod(by_metric.at("degree-histogram-tv")[6].c_str(), nullptr);
  REQUIRE(tv >= 0.0);
  REQUIRE(tv < 0.2);
  double mean_gap = std::strtod(by_metric.at("mean-degree")[6].c_str(), nullptr);
  REQUIRE(mean_gap < 0.5);
  // both conditioned-simple models never contain an incidence quadrilateral
  REQUIRE(by_metric.at("sentence:four-cycle")[4] == "0");
  REQUIRE(by_metric.at("sentence:four-cycle")[5] == "0");
  REQUIRE(by_metric.at("sentence:no-duplicate-hyperedges")[4] == "1");

  CsvTable again = hmg::er_compare_table(2.0, 300, 8, 424242);
  REQUIRE(again.to_string() == table.to_string());

  std::vector<CsvTable> bundle = hmg::er_correspondence_study(2.0, {100, 200}, 3, 5);
  REQUIRE(bundle.size() == 2);
}

TEST_CASE("run writes a reproducible bundle") {
  ExperimentConfig c;
  c.vdist = LimitDistribution::dirac(3);
  c.edist = LimitDistribution::dirac(2);
  c.sizes = {40, 80};
  c.samples = 5;
  c.seed = 7;
  c.conditioning = Conditioning::None;
  c.tasks = {"census", "bgw-compare", "axioms", "estimate", "clustering", "simplicity",
             "admissibility"};

  std::filesystem::path dir1 = fresh_dir("bundle1");
  std::filesystem::path dir2 = fresh_dir("bundle2");
  c.out_dir = dir1.string();
  nlohmann::json manifest = hmg::run(c);
  c.out_dir = dir2.string();
  hmg::run(c);

  std::vector<std::string> files = manifest["files"].get<std::vector<std::string>>();
  REQUIRE(files.size() == 13);  // six per-size tasks x two sizes + admissibility
  for (const std::string& name : files) {
    INFO(name);
    REQUIRE(std::filesystem::exists(dir1 / name));
    REQUIRE(slurp(dir1 / name) == slurp(dir2 / name));  // byte-identical reruns
  }
  REQUIRE(std::filesystem::exists(dir1 / "manifest.json"));
  REQUIRE(manifest["config"]["sizes"] == nlohmann::json({40, 80}));

  auto census = parse_csv(slurp(dir1 / "census-n80.csv"));
  REQUIRE(census[0] == std::vector<std::string>{"pattern", "n", "samples", "seed",
                                                "conditioning", "mean", "std_error", "expected"});
  REQUIRE(census.size() == 4);
  REQUIRE(census[1][0] == "four-cycle");
  REQUIRE(census[1][7] == "1");  // lambda = 1 for this pair

  auto axioms = parse_csv(slurp(dir1 / "axioms-n40.csv"));
  REQUIRE(axioms.size() > 1);
  auto clustering = parse_csv(slurp(dir1 / "clustering-n40.csv"));
  double c_set = std::strtod(clustering[1][4].c_str(), nullptr);
  REQUIRE(c_set >= 0.0);
  REQUIRE(c_set <= 1.0);
  auto admiss = parse_csv(slurp(dir1 / "admissibility.csv"));
  REQUIRE(admiss.size() == 5);  // header + two sizes x two sides
  for (std::size_t i = 1; i < admiss.size(); ++i) REQUIRE(admiss[i][9] == "true");

  // empty task list: manifest only
  ExperimentConfig quiet = c;
  quiet.tasks = {};
  std::filesystem::path dir3 = fresh_dir("bundle3");
  quiet.out_dir = dir3.string();
  nlohmann::json m2 = hmg::run(quiet);
  REQUIRE(m2["files"].empty());
  REQUIRE(std::filesystem::exists(dir3 / "manifest.json"));

  std::filesystem::remove_all(dir1);
  std::filesystem::remove_all(dir2);
  std::filesystem::remove_all(dir3);
}

TEST_CASE("simplicity fraction approaches its reference") {
  ExperimentConfig c;
  c.vdist = LimitDistribution::dirac(3);
  c.edist = LimitDistribution::dirac(2);
  c.sizes = {600};
  c.samples = 200;
  c.seed = 31;
  CsvTable table = hmg::simplicity_table(c, 600);
  auto rows = parse_csv(table.to_string());
  std::map<std::string, std::string> row;
  for (std::size_t i = 0; i < rows[0].size(); ++i) row[rows[0][i]] = rows[1][i];
  double fraction = std::strtod(row["fraction_simple"].c_str(), nullptr);
  double reference = std::strtod(row["reference"].c_str(), nullptr);
  REQUIRE(reference == Catch::Approx(std::exp(-1.0)));
  REQUIRE(std::abs(fraction - reference) < 0.12);
}

TEST_CASE("shipped example configs are valid") {
  std::filesystem::path dir = std::filesystem::path(HMG_SOURCE_DIR) / "configs";
  REQUIRE(std::filesystem::exists(dir));
  int seen = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".json") continue;
    ++seen;
    INFO(entry.path().string());
    std::ifstream is(entry.path());
    nlohmann::json j;
    is >> j;
    REQUIRE_NOTHROW(hmg::config_from_json(j));
  }
  REQUIRE(seen >= 4);
}

TEST_CASE("duplicate hyperedge predicate") {
  REQUIRE_FALSE(hmg::has_duplicate_hyperedge(IncidenceGraph(3, 0)));
  IncidenceGraph dup = from_incidences(2, 2, {{0, 0}, {1, 0}, {0, 1}, {1, 1}});
  REQUIRE(hmg::has_duplicate_hyperedge(dup));
  // multiset semantics: {v0, v0} and {v0, v1} differ
  IncidenceGraph near = from_incidences(2, 2, {{0, 0}, {0, 0}, {0, 1}, {1, 1}});
  REQUIRE_FALSE(hmg::has_duplicate_hyperedge(near));
  IncidenceGraph loops = from_incidences(1, 2, {{0, 0}, {0, 0}, {0, 1}, {0, 1}});
  REQUIRE(hmg::has_duplicate_hyperedge(loops));
}
