#ifndef PGMATCH_IO_HPP
#define PGMATCH_IO_HPP

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pgmatch/common.hpp"
#include "pgmatch/eval.hpp"
#include "pgmatch/graph.hpp"
#include "pgmatch/matcher.hpp"
#include "pgmatch/pot.hpp"
#include "pgmatch/synth.hpp"

namespace pgmatch {

namespace detail {

inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw invalid_input("cannot open file: " + path);
  try {
    nlohmann::json j;
    in >> j;
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw invalid_input("malformed JSON in " + path + ": " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw invalid_input("cannot write file: " + path);
  out << body;
}

}  // namespace detail

// Graph document: {nodes: [{id, type?, features?}], edges: [{src, dst,
// weight}]}; ids 0-based contiguous, undirected edges mirrored on load.
inline Graph load_graph(const std::string& path) {
  const auto j = detail::read_json_file(path);
  try {
    require(j.contains("nodes") && j.contains("edges"),
            "graph file needs 'nodes' and 'edges': " + path);
    const auto& nodes = j.at("nodes");
    const int n = static_cast<int>(nodes.size());
    require(n > 0, "graph file has no nodes: " + path);

    std::vector<bool> seen(n, false);
    Graph g;
    std::map<std::string, int> type_ids;
    const bool typed = nodes.at(0).contains("type");
    const bool featured = nodes.at(0).contains("features");
    if (typed) g.node_types.resize(n);
    for (const auto& node : nodes) {
      const int id = node.at("id").get<int>();
      require(id >= 0 && id < n, "node id out of range (ids must be 0-based "
                                 "contiguous): " + path);
      require(!seen[id], "duplicate node id in " + path);
      seen[id] = true;
      require(node.contains("type") == typed &&
                  node.contains("features") == featured,
              "nodes must agree on having 'type'/'features': " + path);
      if (typed) {
        const std::string name = node.at("type").get<std::string>();
        auto [it, fresh] = type_ids.try_emplace(
            name, static_cast<int>(g.type_names.size()));
        if (fresh) g.type_names.push_back(name);
        g.node_types[id] = it->second;
      }
      if (featured) {
        const auto& f = node.at("features");
        if (g.features.size() == 0)
          g.features = Mat::Zero(n, static_cast<int>(f.size()));
        require(static_cast<int>(f.size()) == g.features.cols(),
                "inconsistent feature lengths in " + path);
        for (int c = 0; c < g.features.cols(); ++c)
          g.features(id, c) = f.at(c).get<double>();
      }
    }

    g.weights = Mat::Zero(n, n);
    for (const auto& e : j.at("edges")) {
      const int s = e.at("src").get<int>(), t = e.at("dst").get<int>();
      require(s >= 0 && s < n && t >= 0 && t < n,
              "edge endpoint out of range in " + path);
      const double w = e.at("weight").get<double>();
      g.weights(s, t) = w;
      g.weights(t, s) = w;
    }
    g.validate();
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw invalid_input("bad graph document " + path + ": " + e.what());
  }
}

inline void save_graph(const std::string& path, const Graph& g) {
  nlohmann::json nodes = nlohmann::json::array();
  for (int i = 0; i < g.node_count(); ++i) {
    nlohmann::json node{{"id", i}};
    if (g.has_types()) node["type"] = g.type_names.at(g.node_types[i]);
    if (g.has_features()) {
      std::vector<double> f(g.features.cols());
      for (int c = 0; c < g.features.cols(); ++c) f[c] = g.features(i, c);
      node["features"] = f;
    }
    nodes.push_back(std::move(node));
  }
  nlohmann::json edges = nlohmann::json::array();
  for (int u = 0; u < g.node_count(); ++u)
    for (int v = u; v < g.node_count(); ++v)
      if (g.weights(u, v) != 0.0)
        edges.push_back({{"src", u}, {"dst", v}, {"weight", g.weights(u, v)}});
  detail::write_text_file(
      path, nlohmann::json{{"nodes", nodes}, {"edges", edges}}.dump(2) + "\n");
}

inline void save_ground_truth(const std::string& path,
                              const std::vector<std::pair<int, int>>& truth) {
  std::string body = "source_id,target_id\n";
  for (const auto& [s, t] : truth)
    body += std::to_string(s) + "," + std::to_string(t) + "\n";
  detail::write_text_file(path, body);
}

inline std::vector<std::pair<int, int>> load_ground_truth(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw invalid_input("cannot open file: " + path);
  std::vector<std::pair<int, int>> truth;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    require(comma != std::string::npos, "bad ground-truth row: " + line);
    truth.push_back(
        {std::stoi(line.substr(0, comma)), std::stoi(line.substr(comma + 1))});
  }
  return truth;
}

// Rows ordered by source id; sources matched to the dummy print DUMMY with
// their dummy-column mass as the score.
inline void save_correspondence(const std::string& path,
                                const Correspondence& c) {
  std::string body = "source_id,target_id,score\n";
  std::size_t pi = 0, ui = 0;
  while (pi < c.pairs.size() || ui < c.unmatched.size()) {
    const bool take_pair =
        ui >= c.unmatched.size() ||
        (pi < c.pairs.size() && c.pairs[pi].source < c.unmatched[ui]);
    if (take_pair) {
      body += std::to_string(c.pairs[pi].source) + "," +
              std::to_string(c.pairs[pi].target) + "," +
              detail::fmt_double(c.pairs[pi].score) + "\n";
      ++pi;
    } else {
      body += std::to_string(c.unmatched[ui]) + ",DUMMY," +
              detail::fmt_double(c.unmatched_scores[ui]) + "\n";
      ++ui;
    }
  }
  detail::write_text_file(path, body);
}

inline void save_trace(const std::string& path,
                       const std::vector<SolveTraceRow>& rows) {
  std::string body =
      "outer_iter,inner_iter,objective,residual_c1,residual_c2,residual_c3\n";
  for (const auto& r : rows)
    body += std::to_string(r.outer) + "," + std::to_string(r.inner) + "," +
            detail::fmt_double(r.objective) + "," +
            detail::fmt_double(r.residual_c1) + "," +
            detail::fmt_double(r.residual_c2) + "," +
            detail::fmt_double(r.residual_c3) + "\n";
  detail::write_text_file(path, body);
}

inline void save_results(const std::string& path,
                         const std::vector<ExperimentCell>& table) {
  std::string body = "dataset,rho,b,seed,recall,precision,f1,wall_seconds\n";
  for (const auto& cell : table)
    for (const auto& r : cell.rows)
      body += r.dataset + "," + detail::fmt_double(r.rho) + "," +
              detail::fmt_double(r.b) + "," + std::to_string(r.seed) + "," +
              detail::fmt_double(r.metrics.recall) + "," +
              detail::fmt_double(r.metrics.precision) + "," +
              detail::fmt_double(r.metrics.f1) + "," +
              detail::fmt_double(r.wall_seconds) + "\n";
  detail::write_text_file(path, body);
}

// Per-cell mean +- sample-std table, one row per (dataset, rho, b).
inline void save_summary(const std::string& path,
                         const std::vector<ExperimentCell>& table) {
  std::string body =
      "dataset,rho,b,recall_mean,recall_std,precision_mean,precision_std,"
      "f1_mean,f1_std\n";
  for (const auto& cell : table)
    body += cell.dataset + "," + detail::fmt_double(cell.rho) + "," +
            detail::fmt_double(cell.b) + "," +
            detail::fmt_double(cell.recall.mean) + "," +
            detail::fmt_double(cell.recall.stddev) + "," +
            detail::fmt_double(cell.precision.mean) + "," +
            detail::fmt_double(cell.precision.stddev) + "," +
            detail::fmt_double(cell.f1.mean) + "," +
            detail::fmt_double(cell.f1.stddev) + "\n";
  detail::write_text_file(path, body);
}

// Embedding checkpoint: {node_count, d, seed, rows: [[...], ...]}.
inline void save_embedding(const std::string& path, const Mat& Z,
                           std::uint64_t seed) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < Z.rows(); ++i) {
    std::vector<double> row(Z.cols());
    for (int c = 0; c < Z.cols(); ++c) row[c] = Z(i, c);
    rows.push_back(row);
  }
  nlohmann::json j{{"node_count", Z.rows()},
                   {"d", Z.cols()},
                   {"seed", seed},
                   {"rows", rows}};
  detail::write_text_file(path, j.dump(2) + "\n");
}

inline Mat load_embedding(const std::string& path) {
  const auto j = detail::read_json_file(path);
  try {
    const int n = j.at("node_count").get<int>();
    const int d = j.at("d").get<int>();
    const auto& rows = j.at("rows");
    require(static_cast<int>(rows.size()) == n,
            "embedding row count mismatch: " + path);
    Mat Z(n, d);
    for (int i = 0; i < n; ++i) {
      require(static_cast<int>(rows.at(i).size()) == d,
              "embedding width mismatch: " + path);
      for (int c = 0; c < d; ++c) Z(i, c) = rows.at(i).at(c).get<double>();
    }
    return Z;
  } catch (const nlohmann::json::exception& e) {
    throw invalid_input("bad embedding file " + path + ": " + e.what());
  }
}

// Explicit partial-Wasserstein problem: {mu_s, mu_t, K}; used by match and
// sweep-b when the pairwise term is disabled.
struct FixtureProblem {
  Vec mu_s, mu_t;
  Mat K;
};

inline FixtureProblem parse_fixture(const nlohmann::json& j,
                                    const std::string& path) {
  try {
    FixtureProblem fx;
    const auto& ms = j.at("mu_s");
    const auto& mt = j.at("mu_t");
    fx.mu_s = Vec(ms.size());
    for (std::size_t i = 0; i < ms.size(); ++i)
      fx.mu_s(static_cast<int>(i)) = ms.at(i).get<double>();
    fx.mu_t = Vec(mt.size());
    for (std::size_t i = 0; i < mt.size(); ++i)
      fx.mu_t(static_cast<int>(i)) = mt.at(i).get<double>();
    const auto& K = j.at("K");
    require(K.size() == ms.size(), "fixture K row count mismatch: " + path);
    fx.K = Mat(ms.size(), mt.size());
    for (std::size_t i = 0; i < K.size(); ++i) {
      require(K.at(i).size() == mt.size(),
              "fixture K column count mismatch: " + path);
      for (std::size_t c = 0; c < mt.size(); ++c)
        fx.K(static_cast<int>(i), static_cast<int>(c)) =
            K.at(i).at(c).get<double>();
    }
    return fx;
  } catch (const nlohmann::json::exception& e) {
    throw invalid_input("bad fixture file " + path + ": " + e.what());
  }
}

inline FixtureProblem load_fixture(const std::string& path) {
  return parse_fixture(detail::read_json_file(path), path);
}

// Config documents mirror the config-struct field names, nested:
//   {"synth": {...}, "match": {..., "solver": {...}, "embed": {...,
//    "kernel": {...}}, "hetero": {...}}, "typed": {...}}
inline SynthConfig parse_synth_config(const nlohmann::json& j) {
  SynthConfig cfg;
  try {
    if (j.contains("kind")) {
      const std::string kind = j.at("kind").get<std::string>();
      if (kind == "knn")
        cfg.kind = SynthKind::knn;
      else if (kind == "ba")
        cfg.kind = SynthKind::ba;
      else
        throw invalid_input("synth config: unknown kind '" + kind + "'");
    }
    cfg.k = j.value("k", cfg.k);
    cfg.m_ba = j.value("m_ba", cfg.m_ba);
    cfg.n_match = j.value("n_match", cfg.n_match);
    cfg.rho = j.value("rho", cfg.rho);
    cfg.feat_dim = j.value("feat_dim", cfg.feat_dim);
    cfg.noise_scale = j.value("noise_scale", cfg.noise_scale);
    cfg.seed = j.value("seed", cfg.seed);
  } catch (const nlohmann::json::exception& e) {
    throw invalid_input(std::string("bad synth config: ") + e.what());
  }
  return cfg;
}

inline TypedSynthConfig parse_typed_synth_config(const nlohmann::json& j) {
  TypedSynthConfig cfg;
  try {
    cfg.base = parse_synth_config(j);
    const auto& t = j.at("typed");
    cfg.type_names = t.at("type_names").get<std::vector<std::string>>();
    cfg.type_proportions =
        t.at("type_proportions").get<std::vector<double>>();
    cfg.type_rho = t.at("type_rho").get<std::vector<double>>();
    cfg.type_sep = t.value("type_sep", cfg.type_sep);
  } catch (const nlohmann::json::exception& e) {
    throw invalid_input(std::string("bad typed synth config: ") + e.what());
  }
  return cfg;
}

inline MatchConfig parse_match_config(const nlohmann::json& j) {
  MatchConfig cfg;
  try {
    cfg.rounds = j.value("rounds", cfg.rounds);
    cfg.b = j.value("b", cfg.b);
    cfg.alpha1 = j.value("alpha1", cfg.alpha1);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.wasserstein_only = j.value("wasserstein_only", cfg.wasserstein_only);
    if (j.contains("mode")) {
      const std::string mode = j.at("mode").get<std::string>();
      if (mode == "homogeneous" || mode == "homo")
        cfg.mode = MatchMode::homogeneous;
      else if (mode == "heterogeneous" || mode == "hetero")
        cfg.mode = MatchMode::heterogeneous;
      else
        throw invalid_input("match config: unknown mode '" + mode + "'");
    }
    if (j.contains("solver")) {
      const auto& s = j.at("solver");
      cfg.solver.gamma = s.value("gamma", cfg.solver.gamma);
      cfg.solver.tau = s.value("tau", cfg.solver.tau);
      cfg.solver.outer_iters = s.value("outer_iters", cfg.solver.outer_iters);
      cfg.solver.pgd_iters = s.value("pgd_iters", cfg.solver.pgd_iters);
      cfg.solver.proj_cycles = s.value("proj_cycles", cfg.solver.proj_cycles);
      cfg.solver.tol = s.value("tol", cfg.solver.tol);
    }
    if (j.contains("embed")) {
      const auto& e = j.at("embed");
      cfg.embed.dim = e.value("dim", cfg.embed.dim);
      cfg.embed.lr = e.value("lr", cfg.embed.lr);
      cfg.embed.epochs = e.value("epochs", cfg.embed.epochs);
      cfg.embed.beta1 = e.value("beta1", cfg.embed.beta1);
      cfg.embed.beta2 = e.value("beta2", cfg.embed.beta2);
      cfg.embed.eps = e.value("eps", cfg.embed.eps);
      if (e.contains("kernel"))
        cfg.embed.kernel.delta = e.at("kernel").value("delta",
                                                      cfg.embed.kernel.delta);
    }
    if (j.contains("hetero")) {
      const auto& h = j.at("hetero");
      cfg.hetero.zeta = h.value("zeta", cfg.hetero.zeta);
      cfg.hetero.neg_per_node = h.value("neg_per_node",
                                        cfg.hetero.neg_per_node);
    }
  } catch (const nlohmann::json::exception& e) {
    throw invalid_input(std::string("bad match config: ") + e.what());
  }
  return cfg;
}

}  // namespace pgmatch

#endif  // PGMATCH_IO_HPP
