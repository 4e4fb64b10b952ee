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
 * Experiment runners behind the `mt` command line tool. Each runner renders
 * its whole report in memory and returns it with an exit code; the caller
 * writes it out only on exit codes 0 and 1, so failed runs leave no partial
 * files behind.
 *
 * Exit codes: 0 success, 1 a certified bound was violated, 2 configuration
 * could not be parsed, 3 the configuration parsed but is mathematically
 * invalid (non-commuting scenario, bad resolution, dimension mismatch).
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "mt/causality.hpp"
#include "mt/errors.hpp"
#include "mt/io.hpp"
#include "mt/measurement.hpp"
#include "mt/random.hpp"
#include "mt/uncertainty.hpp"
#include "mt/zeno.hpp"

namespace mt::cli {

inline constexpr const char *kVersion = "0.1.0";
inline constexpr double kMarginTol = 1e-10;

enum class Format { csv, json };

struct RunManifest {
  std::string subcommand;
  std::string config;
  std::uint64_t seed = 0;
  std::optional<std::size_t> samples;
  Format format = Format::csv;
  std::string out; // empty: stdout
  std::string version = kVersion;
  /// Default for hbar when a config does not set one (MT_HBAR).
  double default_hbar = 1.0;
};

struct RunResult {
  int exit_code = 0;
  std::string output;      // report body
  std::string diagnostics; // summary and error text for stderr
};

/// MT_HBAR if set to a positive number, otherwise 1.
inline double hbar_from_env() {
  if (const char *env = std::getenv("MT_HBAR")) {
    char *end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && *end == '\0' && v > 0.0 && std::isfinite(v)) {
      return v;
    }
  }
  return 1.0;
}

namespace detail {

/// Fixed six decimals; negative zero prints as zero.
inline std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string s(buf);
  if (s == "-0.000000") {
    s = "0.000000";
  }
  return s;
}

inline std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

inline std::string csv_quote(const std::string &s) {
  if (s.find_first_of(",\"\n") == std::string::npos) {
    return s;
  }
  std::string out = "\"";
  for (char c : s) {
    out += c == '"' ? std::string("\"\"") : std::string(1, c);
  }
  return out + "\"";
}

inline RunResult error_result(int code, const std::string &what) {
  return {code, {}, "error: " + what + "\n"};
}

/// Runs `body`, mapping library and parser failures onto exit codes 2 and 3.
template <class Body> RunResult guarded(Body &&body) {
  try {
    return body();
  } catch (const NonCommutingError &e) {
    return error_result(3, e.what());
  } catch (const Error &e) {
    if (e.kind() == ErrorKind::ParseError) {
      return error_result(2, e.what());
    }
    return error_result(3, std::string(e.what()) + " residual=" + sci(e.residual()));
  } catch (const io::json::exception &e) {
    return error_result(2, std::string("ParseError: ") + e.what());
  }
}

inline io::json load_config(const std::string &path) {
  if (path.empty()) {
    throw Error(ErrorKind::ParseError, "--config is required");
  }
  return io::load_file(path);
}

inline std::string resolve_relative(const std::string &base_file, const std::string &path) {
  const std::filesystem::path p(path);
  if (p.is_absolute() || base_file.empty()) {
    return path;
  }
  return (std::filesystem::path(base_file).parent_path() / p).string();
}

} // namespace detail

// ---------------------------------------------------------------------------
// uncertainty

struct UncertaintyPlan {
  std::string scenario_name;
  JointScenario scenario;
  std::vector<ComplexVector> fixed_states;
  std::optional<std::size_t> samples;
};

inline UncertaintyPlan plan_uncertainty(const RunManifest &m) {
  static constexpr const char *kBuiltin = "builtin:qubit-xz";
  if (m.config == kBuiltin) {
    return {kBuiltin, builtin_qubit_scenario(m.default_hbar), {}, std::nullopt};
  }
  if (m.config.rfind("builtin:", 0) == 0) {
    throw Error(ErrorKind::ParseError, "unknown builtin scenario '" + m.config + "'");
  }
  const auto cfg = detail::load_config(m.config);
  if (cfg.is_object() && cfg.contains("A1")) {
    return {m.config, io::scenario_from_json(cfg, m.default_hbar), {}, std::nullopt};
  }
  const auto &ref = io::detail::field(cfg, "scenario");
  UncertaintyPlan plan{"", builtin_qubit_scenario(m.default_hbar), {}, std::nullopt};
  if (ref.is_string()) {
    const auto name = ref.get<std::string>();
    if (name == kBuiltin) {
      plan.scenario_name = kBuiltin;
    } else if (name.rfind("builtin:", 0) == 0) {
      throw Error(ErrorKind::ParseError, "unknown builtin scenario '" + name + "'");
    } else {
      const auto path = detail::resolve_relative(m.config, name);
      plan.scenario_name = name;
      plan.scenario = io::scenario_from_json(io::load_file(path), m.default_hbar);
    }
  } else {
    plan.scenario_name = m.config;
    plan.scenario = io::scenario_from_json(ref, m.default_hbar);
  }
  if (cfg.contains("states")) {
    for (const auto &s : cfg.at("states")) {
      plan.fixed_states.push_back(io::vector_from_json(s));
    }
  }
  if (cfg.contains("samples")) {
    plan.samples = io::detail::count_of(cfg.at("samples"), "samples");
  }
  return plan;
}

inline RunResult run_uncertainty(const RunManifest &m) {
  return detail::guarded([&]() -> RunResult {
    auto plan = plan_uncertainty(m);
    const std::size_t samples =
        m.samples ? *m.samples
                  : plan.samples ? *plan.samples
                                 : (plan.fixed_states.empty() ? 100 : plan.fixed_states.size());
    if (samples == 0) {
      throw Error(ErrorKind::ParseError, "--samples must be at least 1");
    }
    const auto &scn = plan.scenario;

    std::vector<Certificate> certs;
    certs.reserve(samples);
    for (std::size_t i = 0; i < samples; ++i) {
      ComplexVector u;
      if (i < plan.fixed_states.size()) {
        u = plan.fixed_states[i];
      } else {
        Rng rng(derive_seed(m.seed, i));
        u = haar_state(scn.dim_h(), rng);
      }
      certs.push_back(certify(scn, u));
    }

    double min_rough = std::numeric_limits<double>::infinity();
    double min_robertson = std::numeric_limits<double>::infinity();
    double max_identity9 = 0.0;
    std::optional<double> min_same_average;
    for (const auto &c : certs) {
      min_rough = std::min(min_rough, c.margin_rough);
      min_robertson = std::min(min_robertson, c.margin_robertson);
      max_identity9 = std::max(max_identity9, c.report.identity9_residual);
      if (c.margin_same_average) {
        min_same_average = std::min(min_same_average.value_or(*c.margin_same_average), *c.margin_same_average);
      }
    }
    const bool pass =
        min_rough >= -kMarginTol && (!min_same_average || *min_same_average >= -kMarginTol);

    RunResult result;
    result.exit_code = pass ? 0 : 1;
    std::ostringstream diag;
    diag << "scenario=" << plan.scenario_name << " samples=" << samples
         << " min_margin_ishikawa="
         << (min_same_average ? detail::fixed6(*min_same_average) : std::string("undefined"))
         << " min_margin_rough=" << detail::fixed6(min_rough)
         << " min_margin_robertson=" << detail::fixed6(min_robertson)
         << " max_identity9_residual=" << detail::sci(max_identity9)
         << " status=" << (pass ? "ok" : "VIOLATED") << "\n";
    result.diagnostics = diag.str();

    if (m.format == Format::json) {
      io::json rows = io::json::array();
      for (std::size_t i = 0; i < certs.size(); ++i) {
        const auto &c = certs[i];
        const auto &r = c.report;
        rows.push_back({{"state_index", i},
                        {"delta1", r.delta[0]},
                        {"delta2", r.delta[1]},
                        {"delta_bar1", r.delta_bar[0]},
                        {"delta_bar2", r.delta_bar[1]},
                        {"sigma1", r.sigma[0]},
                        {"sigma2", r.sigma[1]},
                        {"bound", r.commutator_bound},
                        {"margin_robertson", c.margin_robertson},
                        {"margin_ishikawa", c.margin_same_average ? io::json(*c.margin_same_average)
                                                              : io::json(nullptr)},
                        {"margin_rough", c.margin_rough},
                        {"identity9_residual", r.identity9_residual},
                        {"same_average", r.same_average}});
      }
      io::json doc = {
          {"tool", "mt"},
          {"version", m.version},
          {"subcommand", "uncertainty"},
          {"scenario", plan.scenario_name},
          {"seed", m.seed},
          {"rows", std::move(rows)},
          {"summary",
           {{"samples", samples},
            {"min_margin_ishikawa", min_same_average ? io::json(*min_same_average) : io::json(nullptr)},
            {"min_margin_rough", min_rough},
            {"min_margin_robertson", min_robertson},
            {"max_identity9_residual", max_identity9},
            {"pass", pass}}}};
      result.output = doc.dump(2) + "\n";
      return result;
    }

    std::ostringstream csv;
    csv << "state_index,delta1,delta2,delta_bar1,delta_bar2,sigma1,sigma2,bound,"
           "margin_ishikawa,margin_rough,identity9_residual,same_average\n";
    for (std::size_t i = 0; i < certs.size(); ++i) {
      const auto &c = certs[i];
      const auto &r = c.report;
      csv << i << ',' << detail::fixed6(r.delta[0]) << ',' << detail::fixed6(r.delta[1]) << ','
          << detail::fixed6(r.delta_bar[0]) << ',' << detail::fixed6(r.delta_bar[1]) << ','
          << detail::fixed6(r.sigma[0]) << ',' << detail::fixed6(r.sigma[1]) << ','
          << detail::fixed6(r.commutator_bound) << ','
          << (c.margin_same_average ? detail::fixed6(*c.margin_same_average) : std::string()) << ','
          << detail::fixed6(c.margin_rough) << ',' << detail::sci(r.identity9_residual) << ','
          << (r.same_average ? "true" : "false") << '\n';
    }
    result.output = csv.str();
    return result;
  });
}

// ---------------------------------------------------------------------------
// zeno

inline io::ZenoSweep plan_zeno(const RunManifest &m) {
  if (m.config == "builtin:qubit-x") {
    io::ZenoSweep sweep;
    sweep.base.hamiltonian = HermitianOperator(pauli::x());
    sweep.base.hbar = m.default_hbar;
    sweep.base.psi = basis_vector(2, 0);
    sweep.n_values = {1, 10, 100, 1000};
    return sweep;
  }
  if (m.config.rfind("builtin:", 0) == 0) {
    throw Error(ErrorKind::ParseError, "unknown builtin Zeno config '" + m.config + "'");
  }
  return io::zeno_sweep_from_json(detail::load_config(m.config), m.default_hbar);
}

struct ZenoRow {
  std::size_t n;
  double survival;
  double lower_bound;
  bool bound_satisfied;
};

inline RunResult run_zeno(const RunManifest &m) {
  return detail::guarded([&]() -> RunResult {
    const auto sweep = plan_zeno(m);
    std::vector<ZenoRow> rows;
    bool all_ok = true;
    for (auto n : sweep.n_values) {
      ZenoConfig cfg = sweep.base;
      cfg.n = n;
      const double p = survival_probability(cfg);
      const double lb = zeno_lower_bound(cfg);
      const bool ok = p >= lb - kMarginTol;
      all_ok = all_ok && ok;
      rows.push_back({n, p, lb, ok});
    }

    RunResult result;
    result.exit_code = all_ok ? 0 : 1;
    result.diagnostics = std::string("rows=") + std::to_string(rows.size()) +
                         " status=" + (all_ok ? "ok" : "VIOLATED") + "\n";
    if (m.format == Format::json) {
      io::json arr = io::json::array();
      for (const auto &r : rows) {
        arr.push_back({{"N", r.n},
                       {"survival_probability", r.survival},
                       {"lower_bound", r.lower_bound},
                       {"bound_satisfied", r.bound_satisfied}});
      }
      io::json doc = {{"tool", "mt"},
                      {"version", m.version},
                      {"subcommand", "zeno"},
                      {"hbar", sweep.base.hbar},
                      {"rows", std::move(arr)}};
      result.output = doc.dump(2) + "\n";
      return result;
    }
    std::ostringstream csv;
    csv << "N,survival_probability,lower_bound,bound_satisfied\n";
    for (const auto &r : rows) {
      csv << r.n << ',' << detail::fixed6(r.survival) << ',' << detail::fixed6(r.lower_bound)
          << ',' << (r.bound_satisfied ? "true" : "false") << '\n';
    }
    result.output = csv.str();
    return result;
  });
}

// ---------------------------------------------------------------------------
// causal

/// Realizes the tree in the config file and measures it in the state given by
/// the optional top-level "state" field: {"omega": i} for classical roots,
/// {"vector": [...]} or {"density": matrix} for quantum roots. The default is
/// the first point or basis vector.
inline RunResult run_causal(const RunManifest &m) {
  return detail::guarded([&]() -> RunResult {
    const auto cfg = detail::load_config(m.config);
    const CausalTree tree = io::tree_from_json(cfg);
    const auto realized = realize(tree);

    const io::json state = cfg.contains("state") ? cfg.at("state") : io::json::object();
    std::optional<OutcomeDistribution> dist;
    if (const auto *c = std::get_if<ClassicalObservable>(&realized)) {
      const std::size_t omega =
          state.contains("omega") ? io::detail::count_of(state.at("omega"), "omega") : 0;
      dist = classical_born(*c, omega);
    } else {
      const auto &q = std::get<Observable>(realized);
      if (state.contains("vector")) {
        dist = born_distribution(q, State::pure(io::vector_from_json(state.at("vector"))));
      } else if (state.contains("density")) {
        dist = born_distribution(q, State::mixed(io::matrix_from_json(state.at("density"))));
      } else {
        dist = born_distribution(q, State::basis(q.dim(), 0));
      }
    }

    RunResult result;
    const auto order = tree.node_order();
    std::string joined;
    for (const auto &id : order) {
      joined += (joined.empty() ? "" : ",") + id;
    }
    result.diagnostics = "node_order=" + joined + " outcomes=" + std::to_string(dist->size()) + "\n";
    if (m.format == Format::json) {
      io::json doc = {{"tool", "mt"},
                      {"version", m.version},
                      {"subcommand", "causal"},
                      {"node_order", order},
                      {"distribution", io::distribution_to_json(*dist)}};
      result.output = doc.dump(2) + "\n";
      return result;
    }
    std::ostringstream csv;
    csv << "outcome,probability\n";
    for (std::size_t k = 0; k < dist->size(); ++k) {
      csv << detail::csv_quote(dist->outcomes()[k].str()) << ','
          << detail::fixed6(dist->probabilities()[k]) << '\n';
    }
    result.output = csv.str();
    return result;
  });
}

inline RunResult run(const RunManifest &m) {
  if (m.subcommand == "uncertainty") {
    return run_uncertainty(m);
  }
  if (m.subcommand == "zeno") {
    return run_zeno(m);
  }
  if (m.subcommand == "causal") {
    return run_causal(m);
  }
  return detail::error_result(2, "unknown subcommand '" + m.subcommand + "'");
}

} // namespace mt::cli
