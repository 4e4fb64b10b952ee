// Copyright 2026 The mt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file
 * JSON file formats.
 *
 *   matrix      {"rows": n, "cols": m, "entries": [[re, im], ...]}  row-major
 *   vector      [[re, im], ...]
 *   observable  {"outcomes": [...], "effects": [matrix, ...]}
 *   classical   {"omega_size": n, "effects": [[reals], ...], "outcomes"?: [...]}
 *   channel     {"kraus": [matrix, ...]} | {"stochastic": [[reals], ...]}
 *   tree        {"nodes": [{"id", "space": {"quantum": d} | {"classical": m},
 *                           "observable"}],
 *                "edges": [{"parent", "child", "channel"}]}
 *   scenario    {"A1", "A2", "Ahat1", "Ahat2": matrix, "s": vector, "hbar"?: real}
 *   zeno        {"hamiltonian": matrix, "psi": vector, "n_values": [N, ...],
 *                "hbar"?: real, "total_time"?: real}
 *
 * Structural problems raise ErrorKind::ParseError; a well-formed document that
 * violates a mathematical invariant raises the invariant's own error.
 */

#pragma once

#include <cstddef>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "mt/causality.hpp"
#include "mt/errors.hpp"
#include "mt/measurement.hpp"
#include "mt/operator_core.hpp"
#include "mt/uncertainty.hpp"
#include "mt/zeno.hpp"

namespace mt::io {

using json = nlohmann::json;

namespace detail {
[[noreturn]] inline void parse_fail(const std::string &what) {
  throw Error(ErrorKind::ParseError, what);
}

inline const json &field(const json &j, const char *key) {
  if (!j.is_object() || !j.contains(key)) {
    parse_fail(std::string("missing field '") + key + "'");
  }
  return j.at(key);
}

inline double real_of(const json &j) {
  if (!j.is_number()) {
    parse_fail("expected a number, got " + j.dump());
  }
  return j.get<double>();
}

inline std::size_t count_of(const json &j, const char *what) {
  if (!j.is_number_integer() || j.get<long long>() < 0) {
    parse_fail(std::string(what) + " must be a non-negative integer");
  }
  return j.get<std::size_t>();
}

inline Complex complex_of(const json &j) {
  if (j.is_number()) {
    return {j.get<double>(), 0.0};
  }
  if (!j.is_array() || j.size() != 2) {
    parse_fail("complex number must be [re, im], got " + j.dump());
  }
  return {real_of(j[0]), real_of(j[1])};
}
} // namespace detail

inline json to_json(Complex z) { return json::array({z.real(), z.imag()}); }

inline json matrix_to_json(const ComplexMatrix &m) {
  json entries = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      entries.push_back(to_json(m(i, j)));
    }
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"entries", std::move(entries)}};
}

inline ComplexMatrix matrix_from_json(const json &j) {
  const auto rows = detail::count_of(detail::field(j, "rows"), "rows");
  const auto cols = detail::count_of(detail::field(j, "cols"), "cols");
  const auto &entries = detail::field(j, "entries");
  if (rows == 0 || cols == 0) {
    detail::parse_fail("matrix dimensions must be positive");
  }
  if (!entries.is_array() || entries.size() != rows * cols) {
    detail::parse_fail("matrix needs rows*cols entries");
  }
  ComplexMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t k = 0; k < entries.size(); ++k) {
    m(static_cast<Eigen::Index>(k / cols), static_cast<Eigen::Index>(k % cols)) =
        detail::complex_of(entries[k]);
  }
  if (!all_finite(m)) {
    detail::parse_fail("matrix has non-finite entries");
  }
  return m;
}

inline json vector_to_json(const ComplexVector &v) {
  json out = json::array();
  for (const auto &z : v) {
    out.push_back(to_json(z));
  }
  return out;
}

inline ComplexVector vector_from_json(const json &j) {
  if (!j.is_array() || j.empty()) {
    detail::parse_fail("vector must be a non-empty array");
  }
  ComplexVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) {
    v(static_cast<Eigen::Index>(k)) = detail::complex_of(j[k]);
  }
  return v;
}

inline RealVector real_vector_from_json(const json &j) {
  if (!j.is_array() || j.empty()) {
    detail::parse_fail("real vector must be a non-empty array");
  }
  RealVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) {
    v(static_cast<Eigen::Index>(k)) = detail::real_of(j[k]);
  }
  return v;
}

inline json to_json(const Label &l) {
  if (l.is_number()) {
    return l.number();
  }
  if (l.is_tuple()) {
    json arr = json::array();
    for (const auto &p : l.parts()) {
      arr.push_back(to_json(p));
    }
    return arr;
  }
  return std::get<std::string>(l.value);
}

inline Label label_from_json(const json &j) {
  if (j.is_number()) {
    return Label(j.get<double>());
  }
  if (j.is_string()) {
    return Label(j.get<std::string>());
  }
  if (j.is_array()) {
    Label::Tuple parts;
    for (const auto &p : j) {
      parts.push_back(label_from_json(p));
    }
    return Label::tuple(std::move(parts));
  }
  detail::parse_fail("outcome label must be a number, string, or array");
}

inline json observable_to_json(const Observable &o) {
  json outcomes = json::array(), effects = json::array();
  for (const auto &l : o.outcomes()) {
    outcomes.push_back(to_json(l));
  }
  for (const auto &e : o.effects()) {
    effects.push_back(matrix_to_json(e));
  }
  return {{"outcomes", std::move(outcomes)}, {"effects", std::move(effects)}};
}

inline json observable_to_json(const ClassicalObservable &o) {
  json outcomes = json::array(), effects = json::array();
  for (const auto &l : o.outcomes()) {
    outcomes.push_back(to_json(l));
  }
  for (const auto &f : o.effects()) {
    effects.push_back(std::vector<double>(f.data(), f.data() + f.size()));
  }
  return {{"omega_size", o.omega_size()},
          {"outcomes", std::move(outcomes)},
          {"effects", std::move(effects)}};
}

inline Observable observable_from_json(const json &j) {
  const auto &outcomes = detail::field(j, "outcomes");
  const auto &effects = detail::field(j, "effects");
  if (!outcomes.is_array() || !effects.is_array()) {
    detail::parse_fail("observable outcomes and effects must be arrays");
  }
  std::vector<Label> labels;
  for (const auto &l : outcomes) {
    labels.push_back(label_from_json(l));
  }
  std::vector<ComplexMatrix> mats;
  for (const auto &e : effects) {
    mats.push_back(matrix_from_json(e));
  }
  return {std::move(labels), std::move(mats)};
}

inline ClassicalObservable classical_observable_from_json(const json &j) {
  const auto omega = detail::count_of(detail::field(j, "omega_size"), "omega_size");
  const auto &effects = detail::field(j, "effects");
  if (!effects.is_array()) {
    detail::parse_fail("classical effects must be an array");
  }
  std::vector<RealVector> vecs;
  for (const auto &e : effects) {
    vecs.push_back(real_vector_from_json(e));
  }
  if (j.contains("outcomes")) {
    std::vector<Label> labels;
    for (const auto &l : j.at("outcomes")) {
      labels.push_back(label_from_json(l));
    }
    return {omega, std::move(labels), std::move(vecs)};
  }
  return {omega, std::move(vecs)};
}

inline json channel_to_json(const MarkovChannel &ch) {
  if (ch.kind() == ChannelKind::classical) {
    const auto &m = ch.stochastic_matrix();
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      std::vector<double> row(static_cast<std::size_t>(m.cols()));
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        row[static_cast<std::size_t>(c)] = m(r, c);
      }
      rows.push_back(row);
    }
    return {{"stochastic", std::move(rows)}};
  }
  json ops = json::array();
  for (const auto &k : ch.kraus_family()) {
    ops.push_back(matrix_to_json(k));
  }
  return {{"kraus", std::move(ops)}};
}

inline MarkovChannel channel_from_json(const json &j) {
  if (j.is_object() && j.contains("kraus")) {
    std::vector<ComplexMatrix> ops;
    for (const auto &k : j.at("kraus")) {
      ops.push_back(matrix_from_json(k));
    }
    return MarkovChannel::kraus(std::move(ops));
  }
  if (j.is_object() && j.contains("stochastic")) {
    const auto &rows = j.at("stochastic");
    if (!rows.is_array() || rows.empty() || !rows[0].is_array()) {
      detail::parse_fail("stochastic matrix must be a non-empty array of rows");
    }
    RealMatrix m(static_cast<Eigen::Index>(rows.size()),
                 static_cast<Eigen::Index>(rows[0].size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (!rows[r].is_array() || rows[r].size() != rows[0].size()) {
        detail::parse_fail("stochastic rows differ in length");
      }
      for (std::size_t c = 0; c < rows[r].size(); ++c) {
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            detail::real_of(rows[r][c]);
      }
    }
    return MarkovChannel::stochastic(m);
  }
  detail::parse_fail("channel must have a 'kraus' or 'stochastic' field");
}

inline NodeSpace space_from_json(const json &j) {
  if (j.is_object() && j.contains("quantum")) {
    return QuantumSpace{detail::count_of(j.at("quantum"), "quantum dimension")};
  }
  if (j.is_object() && j.contains("classical")) {
    return ClassicalSpace{detail::count_of(j.at("classical"), "classical size")};
  }
  detail::parse_fail("space must be {\"quantum\": d} or {\"classical\": m}");
}

inline CausalTree tree_from_json(const json &j) {
  const auto &nodes = detail::field(j, "nodes");
  if (!nodes.is_array()) {
    detail::parse_fail("'nodes' must be an array");
  }
  std::vector<TreeNode> tree_nodes;
  for (const auto &n : nodes) {
    const auto &id = detail::field(n, "id");
    if (!id.is_string()) {
      detail::parse_fail("node id must be a string");
    }
    auto space = space_from_json(detail::field(n, "space"));
    const auto &obs = detail::field(n, "observable");
    if (kind_of(space) == ChannelKind::quantum) {
      tree_nodes.push_back({id.get<std::string>(), space, observable_from_json(obs)});
    } else {
      tree_nodes.push_back({id.get<std::string>(), space, classical_observable_from_json(obs)});
    }
  }
  std::vector<TreeEdge> tree_edges;
  if (j.contains("edges")) {
    for (const auto &e : j.at("edges")) {
      const auto &parent = detail::field(e, "parent");
      const auto &child = detail::field(e, "child");
      if (!parent.is_string() || !child.is_string()) {
        detail::parse_fail("edge endpoints must be node id strings");
      }
      tree_edges.push_back({parent.get<std::string>(), child.get<std::string>(),
                            channel_from_json(detail::field(e, "channel"))});
    }
  }
  return {std::move(tree_nodes), std::move(tree_edges)};
}

inline json scenario_to_json(const JointScenario &scn) {
  return {{"A1", matrix_to_json(scn.a(1).matrix())},
          {"A2", matrix_to_json(scn.a(2).matrix())},
          {"Ahat1", matrix_to_json(scn.ahat(1).matrix())},
          {"Ahat2", matrix_to_json(scn.ahat(2).matrix())},
          {"s", vector_to_json(scn.ancilla())},
          {"hbar", scn.hbar()}};
}

inline JointScenario scenario_from_json(const json &j, double default_hbar = 1.0) {
  const double hbar = j.contains("hbar") ? detail::real_of(j.at("hbar")) : default_hbar;
  return JointScenario(HermitianOperator(matrix_from_json(detail::field(j, "A1"))),
                       HermitianOperator(matrix_from_json(detail::field(j, "A2"))),
                       vector_from_json(detail::field(j, "s")),
                       HermitianOperator(matrix_from_json(detail::field(j, "Ahat1"))),
                       HermitianOperator(matrix_from_json(detail::field(j, "Ahat2"))), hbar);
}

/// Zeno sweep: one configuration plus the list of subdivision counts.
struct ZenoSweep {
  ZenoConfig base;
  std::vector<std::size_t> n_values;
};

inline ZenoSweep zeno_sweep_from_json(const json &j, double default_hbar = 1.0) {
  ZenoSweep sweep;
  sweep.base.hamiltonian = HermitianOperator(matrix_from_json(detail::field(j, "hamiltonian")));
  sweep.base.psi = vector_from_json(detail::field(j, "psi"));
  sweep.base.hbar = j.contains("hbar") ? detail::real_of(j.at("hbar")) : default_hbar;
  if (j.contains("total_time")) {
    sweep.base.total_time = detail::real_of(j.at("total_time"));
  }
  const auto &ns = detail::field(j, "n_values");
  if (!ns.is_array() || ns.empty()) {
    detail::parse_fail("'n_values' must be a non-empty array");
  }
  for (const auto &n : ns) {
    const auto value = detail::count_of(n, "N");
    if (value == 0) {
      detail::parse_fail("N must be positive");
    }
    sweep.n_values.push_back(value);
  }
  return sweep;
}

inline json distribution_to_json(const OutcomeDistribution &d) {
  json rows = json::array();
  for (std::size_t k = 0; k < d.size(); ++k) {
    rows.push_back({{"outcome", to_json(d.outcomes()[k])},
                    {"probability", d.probabilities()[k]}});
  }
  return rows;
}

/// Parses JSON text, mapping syntax errors to ErrorKind::ParseError.
inline json parse(const std::string &text) {
  try {
    return json::parse(text);
  } catch (const json::exception &e) {
    detail::parse_fail(e.what());
  }
}

inline json load_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    detail::parse_fail("cannot open '" + path + "'");
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

} // namespace mt::io
