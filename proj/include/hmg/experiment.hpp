#pragma once

// Batch experiment harness: a JSON configuration describes distributions,
// sizes, seeds and a task list; running it produces one CSV per task per size
// plus a JSON manifest. Given an identical configuration the CSV bytes are
// identical run to run (every random draw descends from the config seed).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hmg/bgw.hpp"
#include "hmg/canonical.hpp"
#include "hmg/degree_sequence.hpp"
#include "hmg/distribution.hpp"
#include "hmg/errors.hpp"
#include "hmg/formula.hpp"
#include "hmg/incidence.hpp"
#include "hmg/model_check.hpp"
#include "hmg/pattern.hpp"
#include "hmg/rng.hpp"
#include "hmg/sampler.hpp"
#include "hmg/stats.hpp"
#include "json.hpp"

namespace hmg {

inline constexpr const char* library_version = "0.1.0";

// --- configuration ------------------------------------------------------------

inline const std::set<std::string>& known_tasks() {
  static const std::set<std::string> tasks = {"census",     "bgw-compare", "axioms",
                                              "estimate",   "clustering",  "simplicity",
                                              "admissibility"};
  return tasks;
}

struct ExperimentConfig {
  LimitDistribution vdist = LimitDistribution::dirac(3);
  LimitDistribution edist = LimitDistribution::dirac(2);
  std::vector<long long> sizes = {500};
  long long samples = 100;
  std::uint64_t seed = 1;
  Conditioning conditioning = Conditioning::None;
  std::vector<std::string> tasks;
  std::string out_dir = "reports";
  std::string estimate_sentence;  // s-expression; empty selects the quadrilateral event
  double er_mean = 2.0;           // mean degree c of the G(n, c/n) comparison
};

inline void validate(const ExperimentConfig& c) {
  if (c.sizes.empty()) throw ConfigError("sizes: must be nonempty");
  for (std::size_t i = 0; i < c.sizes.size(); ++i) {
    if (c.sizes[i] < 1)
      throw ConfigError("sizes[" + std::to_string(i) + "]: must be >= 1");
    if (i > 0 && c.sizes[i] <= c.sizes[i - 1])
      throw ConfigError("sizes[" + std::to_string(i) + "]: must exceed sizes[" +
                        std::to_string(i - 1) + "]");
  }
  if (c.samples < 1) throw ConfigError("samples: must be >= 1");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < c.tasks.size(); ++i) {
    if (!known_tasks().count(c.tasks[i]))
      throw ConfigError("tasks[" + std::to_string(i) + "]: unknown task '" + c.tasks[i] + "'");
    if (!seen.insert(c.tasks[i]).second)
      throw ConfigError("tasks[" + std::to_string(i) + "]: duplicate task '" + c.tasks[i] +
                        "'");
  }
  if (seen.count("admissibility") && c.sizes.size() < 2)
    throw ConfigError("sizes: the admissibility task needs at least two probe sizes");
  if (!(c.er_mean > 0.0)) throw ConfigError("er_mean: must be > 0");
  if (!c.estimate_sentence.empty()) {
    FormulaPtr f;
    try {
      f = parse_sexpr(c.estimate_sentence);
    } catch (const FormulaError& e) {
      throw ConfigError(std::string("estimate_sentence: ") + e.what());
    }
    if (!is_sentence(*f))
      throw ConfigError("estimate_sentence: formula has free variables");
  }
}

inline nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["vdist"] = c.vdist.to_json();
  j["edist"] = c.edist.to_json();
  j["sizes"] = c.sizes;
  j["samples"] = c.samples;
  j["seed"] = c.seed;
  j["conditioning"] = to_string(c.conditioning);
  j["tasks"] = c.tasks;
  j["out_dir"] = c.out_dir;
  j["estimate_sentence"] = c.estimate_sentence;
  j["er_mean"] = c.er_mean;
  return j;
}

namespace experiment_detail {

template <typename T>
T field_as(const nlohmann::json& j, const std::string& name) {
  try {
    return j.at(name).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(name + ": " + e.what());
  }
}

}  // namespace experiment_detail

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  ExperimentConfig c;
  for (const char* required : {"vdist", "edist", "sizes", "tasks"})
    if (!j.contains(required))
      throw ConfigError(std::string(required) + ": missing required field");
  try {
    c.vdist = LimitDistribution::from_json(j.at("vdist"));
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("vdist: ") + e.what());
  }
  try {
    c.edist = LimitDistribution::from_json(j.at("edist"));
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("edist: ") + e.what());
  }
  c.sizes = experiment_detail::field_as<std::vector<long long>>(j, "sizes");
  c.tasks = experiment_detail::field_as<std::vector<std::string>>(j, "tasks");
  if (j.contains("samples")) c.samples = experiment_detail::field_as<long long>(j, "samples");
  if (j.contains("seed")) c.seed = experiment_detail::field_as<std::uint64_t>(j, "seed");
  if (j.contains("conditioning")) {
    try {
      c.conditioning =
          conditioning_from_string(experiment_detail::field_as<std::string>(j, "conditioning"));
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("conditioning: ") + e.what());
    }
  }
  if (j.contains("out_dir")) c.out_dir = experiment_detail::field_as<std::string>(j, "out_dir");
  if (j.contains("estimate_sentence"))
    c.estimate_sentence = experiment_detail::field_as<std::string>(j, "estimate_sentence");
  if (j.contains("er_mean")) c.er_mean = experiment_detail::field_as<double>(j, "er_mean");
  validate(c);
  return c;
}

// --- shared pieces --------------------------------------------------------------

namespace experiment_detail {

inline Pattern quadrilateral() {
  IncidenceGraph g(2, 2);
  for (int e = 0; e < 2; ++e)
    for (int v = 0; v < 2; ++v) g.add_incidence(v, e);
  return make_pattern(std::move(g), "four-cycle");
}

inline Pattern six_cycle() {
  IncidenceGraph g(3, 3);
  for (int i = 0; i < 3; ++i) {
    g.add_incidence(i, i);
    g.add_incidence((i + 1) % 3, i);
  }
  return make_pattern(std::move(g), "six-cycle");
}

inline Pattern double_triple() {  // two vertices in three common edges; excess 1
  IncidenceGraph g(2, 3);
  for (int e = 0; e < 3; ++e)
    for (int v = 0; v < 2; ++v) g.add_incidence(v, e);
  return make_pattern(std::move(g), "theta-1-1-1");
}

inline std::string size_file(const std::string& task, long long n) {
  return task + "-n" + std::to_string(n) + ".csv";
}

// smallest edge size the limit law allows
inline int min_edge_size(const SupportSet& supp_e) {
  for (int k = 2; k <= 1 << 20; ++k)
    if (supp_e.contains(k)) return k;
  throw ConfigError("edge support has no size >= 2");
}

// the path with `edges` hyper-edges of size `size`: spine vertices alternate
// with edges; every edge is padded with pendant leaves up to `size`
inline IncidenceGraph path_tree(int edges, int size) {
  if (edges == 0) return IncidenceGraph(1, 0);
  int pendants = size - 2;
  IncidenceGraph g(edges + 1 + edges * pendants, edges);
  int next = edges + 1;
  for (int e = 0; e < edges; ++e) {
    g.add_incidence(e, e);
    g.add_incidence(e + 1, e);
    for (int t = 0; t < pendants; ++t) g.add_incidence(next++, e);
  }
  return g;
}

// every path with <= max_edges edges whose node degrees fit the supports
inline std::vector<std::pair<int, IncidenceGraph>> realisable_paths(const LimitTheorySpec& spec,
                                                                    int max_edges) {
  std::vector<std::pair<int, IncidenceGraph>> out;
  if (spec.supp_v.contains(0)) out.emplace_back(0, path_tree(0, 2));
  int s0 = min_edge_size(spec.supp_e);
  bool leaf_ok = spec.supp_v.contains(1);
  bool spine_ok = spec.supp_v.contains(2);
  for (int k = 1; k <= max_edges; ++k) {
    if (!leaf_ok) break;
    if (k >= 2 && !spine_ok) break;
    out.emplace_back(k, path_tree(k, s0));
  }
  return out;
}

inline void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open " + path.string() + " for writing");
  os << bytes;
  if (!os) throw ConfigError("failed writing " + path.string());
}

// shared manifest tail: echo the config, list the emitted files, stamp versions
inline nlohmann::json finish_manifest(const std::filesystem::path& dir,
                                      const ExperimentConfig& config,
                                      const std::vector<std::string>& files,
                                      std::chrono::steady_clock::time_point started) {
  nlohmann::json manifest;
  manifest["config"] = config_to_json(config);
  manifest["seed"] = config.seed;
  manifest["files"] = files;
  manifest["versions"] = {{"hmg", library_version},
                          {"json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                       std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                       std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                          {"compiler", __VERSION__}};
  manifest["wall_time_ms"] =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                            started)
          .count();
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
  return manifest;
}

}  // namespace experiment_detail

// --- clustering ----------------------------------------------------------------

// Per-graph local-clustering summary. Both estimators average over vertices
// with at least two distinct neighbours in the ~-graph:
//   set semantics:   C(v) = (neighbour pairs sharing an edge) / C(|N(v)|, 2)
//   slot formula:    C(v) = sum_{e:v in e} C(|e|-1, 2) / C(M, 2),
//                    M = sum_{e:v in e} (|e|-1)  (counts repeats across edges)
struct ClusteringEntry {
  double mean_set = 0.0;
  double mean_formula = 0.0;
  long long contributing = 0;
  long long excluded = 0;
};

inline ClusteringEntry clustering_study(const IncidenceGraph& g) {
  if (!g.simple_incidence())
    throw ConfigError("clustering_study expects a simple-incidence graph");
  // distinct ~-neighbours per vertex
  std::vector<std::vector<int>> nb(g.n_v());
  for (int v = 0; v < g.n_v(); ++v) {
    for (int e : g.edges_of(v))
      for (int u : g.members_of(e))
        if (u != v) nb[v].push_back(u);
    std::sort(nb[v].begin(), nb[v].end());
    nb[v].erase(std::unique(nb[v].begin(), nb[v].end()), nb[v].end());
  }
  auto adjacent = [&nb](int u, int w) {
    return std::binary_search(nb[u].begin(), nb[u].end(), w);
  };
  ClusteringEntry entry;
  double sum_set = 0.0, sum_formula = 0.0;
  for (int v = 0; v < g.n_v(); ++v) {
    const std::vector<int>& ns = nb[v];
    if (ns.size() < 2) {
      ++entry.excluded;
      continue;
    }
    long long linked = 0;
    for (std::size_t i = 0; i < ns.size(); ++i)
      for (std::size_t j = i + 1; j < ns.size(); ++j)
        if (adjacent(ns[i], ns[j])) ++linked;
    double pairs = 0.5 * static_cast<double>(ns.size()) * static_cast<double>(ns.size() - 1);
    sum_set += static_cast<double>(linked) / pairs;

    long long m = 0, within = 0;
    for (int e : g.edges_of(v)) {
      long long size = static_cast<long long>(g.members_of(e).size());
      m += size - 1;
      within += (size - 1) * (size - 2) / 2;
    }
    sum_formula += static_cast<double>(within) / (0.5 * static_cast<double>(m) *
                                                  static_cast<double>(m - 1));
    ++entry.contributing;
  }
  if (entry.contributing > 0) {
    entry.mean_set = sum_set / static_cast<double>(entry.contributing);
    entry.mean_formula = sum_formula / static_cast<double>(entry.contributing);
  }
  return entry;
}

// Reference value for the average local clustering under the limit laws:
//   E[d^v] * E[(d^e)_3] / (2 E[d^e])   over   E[C(M, 2)]
// with M a sum of d^v independent size-biased (edge size - 1) draws. NaN when
// no vertex ever accumulates two neighbour pairs in the limit.
inline double clustering_reference(const LimitDistribution& vdist,
                                   const LimitDistribution& edist) {
  double me = edist.mean();
  double f2 = edist.falling_moment(2);
  double f3 = edist.falling_moment(3);
  double mu = f2 / me;              // E[size-biased size - 1]
  double s2 = (f3 + f2) / me;       // E[(size-biased size - 1)^2]
  double numerator = vdist.mean() * f3 / me;
  double denominator = vdist.mean() * (s2 - mu) + vdist.falling_moment(2) * mu * mu;
  if (denominator <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return numerator / denominator;
}

// --- G(n, p) and the Erdos–Renyi comparison -------------------------------------

// geometric-skip sampler over the C(n,2) vertex pairs, returned as an
// incidence graph with one size-2 edge per picked pair
inline IncidenceGraph sample_gnp(int n, double p, Rng& rng) {
  if (n < 0 || p < 0.0 || p > 1.0) throw ConfigError("sample_gnp: need n >= 0, p in [0,1]");
  std::vector<std::pair<int, int>> picked;
  const long long total = static_cast<long long>(n) * (n - 1) / 2;
  if (p >= 1.0) {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) picked.emplace_back(i, j);
  } else if (p > 0.0) {
    const double log_q = std::log1p(-p);
    long long idx = -1;
    int row = 0;
    long long row_start = 0;  // pair index of (row, row+1)
    for (;;) {
      double u = rng.uniform01();
      idx += 1 + static_cast<long long>(std::floor(std::log1p(-u) / log_q));
      if (idx >= total || idx < 0) break;
      while (idx - row_start >= n - 1 - row) {
        row_start += n - 1 - row;
        ++row;
      }
      picked.emplace_back(row, row + 1 + static_cast<int>(idx - row_start));
    }
  }
  IncidenceGraph g(n, static_cast<int>(picked.size()));
  for (std::size_t e = 0; e < picked.size(); ++e) {
    g.add_incidence(picked[e].first, static_cast<int>(e));
    g.add_incidence(picked[e].second, static_cast<int>(e));
  }
  return g;
}

namespace experiment_detail {

// distinct-neighbour projection shared by the triangle/wedge counters
inline std::vector<std::vector<int>> neighbour_lists(const IncidenceGraph& g) {
  std::vector<std::vector<int>> nb(g.n_v());
  for (int e = 0; e < g.n_e(); ++e) {
    const std::vector<int>& mem = g.members_of(e);
    for (std::size_t i = 0; i < mem.size(); ++i)
      for (std::size_t j = 0; j < mem.size(); ++j)
        if (mem[i] != mem[j]) nb[mem[i]].push_back(mem[j]);
  }
  for (auto& ns : nb) {
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  }
  return nb;
}

}  // namespace experiment_detail

inline long long triangle_count(const IncidenceGraph& g) {
  std::vector<std::vector<int>> nb = experiment_detail::neighbour_lists(g);
  long long triangles = 0;
  for (int v = 0; v < g.n_v(); ++v)
    for (std::size_t i = 0; i < nb[v].size(); ++i) {
      int u = nb[v][i];
      if (u <= v) continue;
      for (std::size_t j = i + 1; j < nb[v].size(); ++j) {
        int w = nb[v][j];
        if (w <= v) continue;
        if (std::binary_search(nb[u].begin(), nb[u].end(), w)) ++triangles;
      }
    }
  return triangles;
}

inline long long two_path_count(const IncidenceGraph& g) {
  std::vector<std::vector<int>> nb = experiment_detail::neighbour_lists(g);
  long long wedges = 0;
  for (const auto& ns : nb)
    wedges += static_cast<long long>(ns.size()) * (static_cast<long long>(ns.size()) - 1) / 2;
  return wedges;
}

// --- per-task tables -------------------------------------------------------------

inline CsvTable census_table(const ExperimentConfig& c, long long n) {
  std::vector<Pattern> patterns;
  patterns.push_back(experiment_detail::quadrilateral());
  patterns.push_back(experiment_detail::six_cycle());
  patterns.push_back(experiment_detail::double_triple());
  SequencePair pair = pair_sequences_adjusted(c.vdist, c.edist, n);
  SampleOptions opts;
  opts.seed = Rng::substream(c.seed, {static_cast<std::uint64_t>(n), 1}).next();
  opts.conditioning = c.conditioning;
  std::vector<std::vector<double>> counts(patterns.size());
  for (long long i = 0; i < c.samples; ++i) {
    IncidenceGraph g = sample_incidence(pair, opts, i).graph;
    HostIndex index(g);
    for (std::size_t p = 0; p < patterns.size(); ++p)
      counts[p].push_back(static_cast<double>(count_realisations(patterns[p], index)));
  }
  CsvTable table({"pattern", "n", "samples", "seed", "conditioning", "mean", "std_error",
                  "expected"});
  for (std::size_t p = 0; p < patterns.size(); ++p) {
    SummaryStats s = summarize(counts[p]);
    table.add_row({patterns[p].name, csv_number(n), csv_number(c.samples),
                   std::to_string(c.seed), to_string(c.conditioning), csv_number(s.mean),
                   csv_number(s.std_error),
                   csv_number(expected_realisations(patterns[p], c.vdist, c.edist, n).value)});
  }
  return table;
}

inline CsvTable bgw_compare_table(const ExperimentConfig& c, long long n) {
  const int radius = 2;
  SequencePair pair = pair_sequences_adjusted(c.vdist, c.edist, n);
  SampleOptions opts;
  opts.seed = Rng::substream(c.seed, {static_cast<std::uint64_t>(n), 2}).next();
  opts.conditioning = c.conditioning;
  std::map<std::string, long long> empirical;
  for (long long i = 0; i < c.samples; ++i) {
    IncidenceGraph g = sample_incidence(pair, opts, i).graph;
    for (int v = 0; v < g.n_v(); ++v)
      empirical[canonical_type(ball(g, NodeRef{Side::V, v}, radius)).canonical_key] += 1;
  }
  BGWSpec spec{c.vdist, c.edist, Side::V};
  long long bgw_samples = std::min<long long>(200000, std::max<long long>(20000, c.samples * n));
  std::map<std::string, double> limit_law = ball_type_distribution(
      spec, radius, bgw_samples, Rng::substream(c.seed, {static_cast<std::uint64_t>(n), 3}).next());
  double tv = tv_distance(frequencies(empirical), limit_law);
  CsvTable table({"n", "samples", "seed", "conditioning", "radius", "bgw_samples",
                  "tv_distance"});
  table.add_row({csv_number(n), csv_number(c.samples), std::to_string(c.seed),
                 to_string(c.conditioning), csv_number(static_cast<long long>(radius)),
                 csv_number(bgw_samples), csv_number(tv)});
  return table;
}

inline CsvTable axioms_table(const ExperimentConfig& c, long long n) {
  LimitTheorySpec spec = limit_theory_spec(c.vdist, c.edist);
  AxiomBounds bounds;
  bounds.excluded_degree_bound = 6;
  bounds.dense_max_r = 2;
  bounds.dense_max_s = 2;
  std::vector<Sentence> axioms = limit_theory_axioms(spec, bounds);
  for (auto& [edges, tree] : experiment_detail::realisable_paths(spec, 3)) {
    Sentence s = axiom_tree_copies(tree, 1);
    s.name = "path-" + std::to_string(edges) + "e-copies-1";
    axioms.push_back(std::move(s));
  }
  SequencePair pair = pair_sequences_adjusted(c.vdist, c.edist, n);
  SampleOptions opts;
  opts.seed = Rng::substream(c.seed, {static_cast<std::uint64_t>(n), 4}).next();
  opts.conditioning = c.conditioning;
  std::vector<long long> holds(axioms.size(), 0);
  for (long long i = 0; i < c.samples; ++i) {
    IncidenceGraph g = sample_incidence(pair, opts, i).graph;
    for (std::size_t a = 0; a < axioms.size(); ++a)
      if (evaluate(axioms[a], g)) ++holds[a];
  }
  CsvTable table({"axiom", "n", "samples", "seed", "conditioning", "holds", "fraction"});
  for (std::size_t a = 0; a < axioms.size(); ++a) {
    table.add_row({axioms[a].name, csv_number(n), csv_number(c.samples),
                   std::to_string(c.seed), to_string(c.conditioning),
                   csv_number(holds[a]),
                   csv_number(static_cast<double>(holds[a]) / static_cast<double>(c.samples))});
  }
  return table;
}

inline CsvTable estimate_table(const ExperimentConfig& c, long long n) {
  Sentence sentence = c.estimate_sentence.empty()
                          ? sentence_four_cycle()
                          : Sentence{"configured-sentence", parse_sexpr(c.estimate_sentence),
                                     std::nullopt};
  std::vector<LimitingEstimate> est = estimate_limiting_probability(
      sentence, c.vdist, c.edist, {n}, c.samples,
      Rng::substream(c.seed, {static_cast<std::uint64_t>(n), 5}).next(), c.conditioning);
  CsvTable table({"sentence", "n", "samples", "seed", "conditioning", "mean", "std_error"});
  table.add_row({sentence.name, csv_number(n), csv_number(c.samples),
                 std::to_string(c.seed), to_string(c.conditioning),
                 csv_number(est[0].mean), csv_number(est[0].std_error)});
  return table;
}

inline CsvTable clustering_table(const ExperimentConfig& c, long long n) {
  // the study needs simple incidences; weaker configured modes are upgraded
  Conditioning mode = c.conditioning == Conditioning::Graph ? Conditioning::Graph
                                                            : Conditioning::SimpleIncidence;
  SequencePair pair = pair_sequences_adjusted(c.vdist, c.edist, n);
  SampleOptions opts;
  opts.seed = Rng::substream(c.seed, {static_cast<std::uint64_t>(n), 6}).next();
  opts.conditioning = mode;
  std::vector<double> set_means, formula_means;
  long long contributing = 0, excluded = 0;
  for (long long i = 0; i < c.samples; ++i) {
    ClusteringEntry entry = clustering_study(sample_incidence(pair, opts, i).graph);
    set_means.push_back(entry.mean_set);
    formula_means.push_back(entry.mean_formula);
    contributing += entry.contributing;
    excluded += entry.excluded;
  }
  SummaryStats set_stats = summarize(set_means);
  SummaryStats formula_stats = summarize(formula_means);
  double excluded_fraction =
      contributing + excluded == 0
          ? 0.0
          : static_cast<double>(excluded) / static_cast<double>(contributing + excluded);
  CsvTable table({"n", "samples", "seed", "conditioning", "mean_c_set", "se_c_set",
                  "mean_c_formula", "se_c_formula", "excluded_fraction", "reference"});
  table.add_row({csv_number(n), csv_number(c.samples), std::to_string(c.seed),
                 to_string(mode), csv_number(set_stats.mean), csv_number(set_stats.std_error),
                 csv_number(formula_stats.mean), csv_number(formula_stats.std_error),
                 csv_number(excluded_fraction),
                 csv_number(clustering_reference(c.vdist, c.edist))});
  return table;
}

inline bool has_duplicate_hyperedge(const IncidenceGraph& g) {
  std::vector<std::vector<int>> keys;
  keys.reserve(g.n_e());
  for (int e = 0; e < g.n_e(); ++e) keys.push_back(g.sorted_members(e));
  std::sort(keys.begin(), keys.end());
  return std::adjacent_find(keys.begin(), keys.end()) != keys.end();
}

inline CsvTable simplicity_table(const ExperimentConfig& c, long long n) {
  // simplicity is a property of the raw pairing; conditioning is not applied
  SequencePair pair = pair_sequences_adjusted(c.vdist, c.edist, n);
  SampleOptions opts;
  opts.seed = Rng::substream(c.seed, {static_cast<std::uint64_t>(n), 7}).next();
  long long simple = 0;
  for (long long i = 0; i < c.samples; ++i)
    if (!has_duplicate_hyperedge(sample_incidence(pair, opts, i).graph)) ++simple;
  double mean = static_cast<double>(simple) / static_cast<double>(c.samples);
  double se = std::sqrt(mean * (1.0 - mean) / static_cast<double>(c.samples));
  // only size-2 duplicates survive in the limit (larger ones carry excess)
  double reference = 1.0;
  if (c.edist.support_set().contains(2))
    reference = std::exp(
        -expected_realisations(experiment_detail::quadrilateral(), c.vdist, c.edist, 1).value);
  CsvTable table({"n", "samples", "seed", "conditioning", "fraction_simple", "std_error",
                  "reference"});
  table.add_row({csv_number(n), csv_number(c.samples), std::to_string(c.seed),
                 "none", csv_number(mean), csv_number(se), csv_number(reference)});
  return table;
}

inline CsvTable admissibility_table(const ExperimentConfig& c) {
  AdmissibilityReport report = check_admissibility(
      [&c](long long n) { return pair_sequences_adjusted(c.vdist, c.edist, n); }, c.sizes,
      c.vdist, c.edist);
  CsvTable table({"n", "side", "sup_distance", "second_moment", "fourth_over_n",
                  "weak_convergence", "support_contained", "second_moment_stable",
                  "fourth_moment_vanishing", "admissible", "trivial"});
  for (std::size_t i = 0; i < report.probes.size(); ++i) {
    for (const char* side : {"vertex", "edge"}) {
      const SideAdmissibility& a = side == std::string("vertex") ? report.vertex : report.edge;
      table.add_row({csv_number(report.probes[i]), side, csv_number(a.sup_distance[i]),
                     csv_number(a.second_moment[i]), csv_number(a.fourth_over_n[i]),
                     a.weak_convergence ? "true" : "false",
                     a.support_contained ? "true" : "false",
                     a.second_moment_stable ? "true" : "false",
                     a.fourth_moment_vanishing ? "true" : "false",
                     report.admissible() ? "true" : "false",
                     report.trivial ? "true" : "false"});
    }
  }
  return table;
}

// Fixed tagged-sentence battery for the model comparison; every member has a
// fast evaluator, so n = 5000 hosts are fine.
inline std::vector<Sentence> er_battery() {
  std::vector<Sentence> out;
  out.push_back(axiom_no_vertex_of_degree(0));
  out.push_back(axiom_no_vertex_of_degree(1));
  out.push_back(sentence_four_cycle());
  out.push_back(sentence_no_duplicate_hyperedges());
  Sentence path = axiom_tree_copies(experiment_detail::path_tree(2, 2), 1);
  path.name = "path-2e-copies-1";
  out.push_back(std::move(path));
  return out;
}

inline CsvTable er_compare_table(double c_mean, long long n, long long samples,
                                 std::uint64_t seed) {
  if (!(c_mean > 0.0)) throw ConfigError("er_mean: must be > 0");
  SequencePair pair =
      pair_sequences_adjusted(LimitDistribution::poisson(c_mean), LimitDistribution::dirac(2), n);
  SampleOptions opts;
  opts.seed = Rng::substream(seed, {static_cast<std::uint64_t>(n), 8}).next();
  opts.conditioning = Conditioning::Graph;
  std::vector<Sentence> battery = er_battery();

  std::map<int, long long> degrees_a, degrees_b;
  std::vector<double> tri_a, tri_b, wedge_a, wedge_b, mean_deg_a, mean_deg_b;
  std::vector<std::vector<double>> sat_a(battery.size()), sat_b(battery.size());
  for (long long i = 0; i < samples; ++i) {
    IncidenceGraph g = sample_incidence(pair, opts, i).graph;
    double deg_sum = 0.0;
    for (int v = 0; v < g.n_v(); ++v) {
      int d = static_cast<int>(g.edges_of(v).size());
      degrees_a[d] += 1;
      deg_sum += d;
    }
    mean_deg_a.push_back(deg_sum / static_cast<double>(g.n_v()));
    tri_a.push_back(static_cast<double>(triangle_count(g)));
    wedge_a.push_back(static_cast<double>(two_path_count(g)));
    for (std::size_t s = 0; s < battery.size(); ++s)
      sat_a[s].push_back(evaluate(battery[s], g) ? 1.0 : 0.0);

    Rng rng = Rng::substream(seed, {static_cast<std::uint64_t>(n), 9,
                                    static_cast<std::uint64_t>(i)});
    IncidenceGraph h = sample_gnp(static_cast<int>(n), c_mean / static_cast<double>(n), rng);
    deg_sum = 0.0;
    for (int v = 0; v < h.n_v(); ++v) {
      int d = static_cast<int>(h.edges_of(v).size());
      degrees_b[d] += 1;
      deg_sum += d;
    }
    mean_deg_b.push_back(deg_sum / static_cast<double>(h.n_v()));
    tri_b.push_back(static_cast<double>(triangle_count(h)));
    wedge_b.push_back(static_cast<double>(two_path_count(h)));
    for (std::size_t s = 0; s < battery.size(); ++s)
      sat_b[s].push_back(evaluate(battery[s], h) ? 1.0 : 0.0);
  }

  CsvTable table({"n", "samples", "seed", "metric", "incidence", "gnp", "gap"});
  auto add = [&](const std::string& metric, const std::string& a, const std::string& b,
                 double gap) {
    table.add_row({csv_number(n), csv_number(samples), std::to_string(seed),
                   metric, a, b, csv_number(gap)});
  };
  double tv = tv_distance(frequencies(degrees_a), frequencies(degrees_b));
  add("degree-histogram-tv", "", "", tv);
  auto paired = [&](const std::string& metric, const std::vector<double>& a,
                    const std::vector<double>& b) {
    double ma = summarize(a).mean, mb = summarize(b).mean;
    add(metric, csv_number(ma), csv_number(mb), std::abs(ma - mb));
  };
  paired("mean-degree", mean_deg_a, mean_deg_b);
  paired("triangles", tri_a, tri_b);
  paired("two-paths", wedge_a, wedge_b);
  for (std::size_t s = 0; s < battery.size(); ++s)
    paired("sentence:" + battery[s].name, sat_a[s], sat_b[s]);
  return table;
}

inline CsvTable er_compare_table(const ExperimentConfig& c, long long n) {
  return er_compare_table(c.er_mean, n, c.samples, c.seed);
}

/// one comparison table per requested size, bundled
inline std::vector<CsvTable> er_correspondence_study(double c_mean,
                                                     const std::vector<long long>& n_list,
                                                     long long samples, std::uint64_t seed) {
  std::vector<CsvTable> out;
  for (long long n : n_list) out.push_back(er_compare_table(c_mean, n, samples, seed));
  return out;
}

// --- the runner ------------------------------------------------------------------

// Executes every configured task for every size, writes `<task>-n<size>.csv`
// files (admissibility: one cross-size `admissibility.csv`), then writes and
// returns the manifest. CSV bytes depend only on the configuration.
inline nlohmann::json run(const ExperimentConfig& config) {
  validate(config);
  auto started = std::chrono::steady_clock::now();
  std::filesystem::path dir(config.out_dir);
  std::filesystem::create_directories(dir);
  std::vector<std::string> files;

  auto emit = [&](const std::string& name, const CsvTable& table) {
    experiment_detail::write_file(dir / name, table.to_string());
    files.push_back(name);
  };
  for (const std::string& task : config.tasks) {
    if (task == "admissibility") {
      emit("admissibility.csv", admissibility_table(config));
      continue;
    }
    for (long long n : config.sizes) {
      CsvTable table = task == "census"        ? census_table(config, n)
                       : task == "bgw-compare" ? bgw_compare_table(config, n)
                       : task == "axioms"      ? axioms_table(config, n)
                       : task == "estimate"    ? estimate_table(config, n)
                       : task == "clustering"  ? clustering_table(config, n)
                                                : simplicity_table(config, n);
      emit(experiment_detail::size_file(task, n), table);
    }
  }

  return experiment_detail::finish_manifest(dir, config, files, started);
}

// Samples `samples` incidence graphs per size under the configured
// conditioning and writes each in the incidence text format as
// `graph-n<size>-s<index>.txt`, plus the usual manifest.
inline nlohmann::json generate_bundle(const ExperimentConfig& config) {
  validate(config);
  auto started = std::chrono::steady_clock::now();
  std::filesystem::path dir(config.out_dir);
  std::filesystem::create_directories(dir);
  std::vector<std::string> files;
  for (long long n : config.sizes) {
    SequencePair pair = pair_sequences_adjusted(config.vdist, config.edist, n);
    SampleOptions opts;
    opts.seed = Rng::substream(config.seed, {static_cast<std::uint64_t>(n), 0}).next();
    opts.conditioning = config.conditioning;
    for (long long i = 0; i < config.samples; ++i) {
      std::string name =
          "graph-n" + std::to_string(n) + "-s" + std::to_string(i) + ".txt";
      experiment_detail::write_file(dir / name, to_text(sample_incidence(pair, opts, i).graph));
      files.push_back(std::move(name));
    }
  }
  return experiment_detail::finish_manifest(dir, config, files, started);
}

// One model-comparison table per size (`er-compare-n<size>.csv`) plus manifest.
inline nlohmann::json er_compare_bundle(const ExperimentConfig& config) {
  validate(config);
  auto started = std::chrono::steady_clock::now();
  std::filesystem::path dir(config.out_dir);
  std::filesystem::create_directories(dir);
  std::vector<std::string> files;
  for (long long n : config.sizes) {
    std::string name = "er-compare-n" + std::to_string(n) + ".csv";
    experiment_detail::write_file(dir / name, er_compare_table(config, n).to_string());
    files.push_back(std::move(name));
  }
  return experiment_detail::finish_manifest(dir, config, files, started);
}

}  // namespace hmg
