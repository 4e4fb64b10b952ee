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

// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria (0 when everything passes).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "mt/mt.hpp"

namespace {

using namespace mt;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char *f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

int failures = 0;

void criterion(int id, const char *title, const std::function<Outcome()> &body,
               double time_limit_s = 0.0) {
  const auto start = Clock::now();
  Outcome out{false, ""};
  try {
    out = body();
  } catch (const std::exception &e) {
    out = {false, std::string("unexpected exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  if (time_limit_s > 0.0 && secs >= time_limit_s) {
    out.pass = false;
    out.detail += " (over time limit " + fmt("%.0f s", time_limit_s) + ")";
  }
  failures += out.pass ? 0 : 1;
  std::printf("[%s] criterion %d: %s: %s [%.3f s]\n", out.pass ? "PASS" : "FAIL", id, title,
              out.detail.c_str(), secs);
  std::fflush(stdout);
}

RealMatrix random_stochastic(std::size_t rows, std::size_t cols, Rng &rng) {
  RealMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    double total = 0.0;
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      m(r, c) = rng.uniform();
      total += m(r, c);
    }
    m.row(r) /= total;
  }
  return m;
}

ClassicalObservable random_classical(std::size_t omega, std::size_t k, Rng &rng) {
  const RealMatrix w = random_stochastic(omega, k, rng);
  std::vector<RealVector> effects;
  for (Eigen::Index j = 0; j < w.cols(); ++j) {
    effects.emplace_back(w.col(j));
  }
  return {omega, std::move(effects)};
}

CausalTree random_tree(const std::vector<std::size_t> &parent, const std::vector<std::size_t> &points,
                       const std::vector<std::size_t> &outcomes, Rng &rng) {
  std::vector<TreeNode> nodes;
  std::vector<TreeEdge> edges;
  for (std::size_t i = 0; i < points.size(); ++i) {
    nodes.push_back({"n" + std::to_string(i), ClassicalSpace{points[i]},
                     random_classical(points[i], outcomes[i], rng)});
    if (i > 0) {
      edges.push_back({"n" + std::to_string(parent[i]), "n" + std::to_string(i),
                       MarkovChannel::stochastic(random_stochastic(points[parent[i]], points[i], rng))});
    }
  }
  return {std::move(nodes), std::move(edges)};
}

// Largest |realize + Born - enumeration| over every root point.
double tree_discrepancy(const CausalTree &tree) {
  const auto realized = std::get<ClassicalObservable>(realize(tree));
  double worst = 0.0;
  for (std::size_t w = 0; w < realized.omega_size(); ++w) {
    const auto got = classical_born(realized, w);
    const auto want = brute_force_tree_distribution(tree, w);
    if (!(got.outcomes() == want.outcomes())) {
      return std::numeric_limits<double>::infinity();
    }
    for (std::size_t k = 0; k < got.size(); ++k) {
      worst = std::max(worst, std::abs(got.probabilities()[k] - want.probabilities()[k]));
    }
  }
  return worst;
}

// Every parent array with parent[i] < i: all rooted tree shapes on n nodes.
void for_each_shape(std::size_t n, const std::function<void(const std::vector<std::size_t> &)> &f) {
  std::vector<std::size_t> parent(n, 0);
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == n) {
      f(parent);
      return;
    }
    for (std::size_t p = 0; p < i; ++p) {
      parent[i] = p;
      rec(i + 1);
    }
  };
  rec(1);
}

void for_each_count(std::size_t n, const std::function<void(const std::vector<std::size_t> &)> &f) {
  std::vector<std::size_t> c(n, 1);
  for (;;) {
    f(c);
    std::size_t i = 0;
    while (i < n && ++c[i] > 3) {
      c[i++] = 1;
    }
    if (i == n) {
      return;
    }
  }
}

double survival_oracle(std::size_t n) {
  const double x = static_cast<double>(n);
  return 0.5 * (1.0 + std::pow(std::cos(2.0 / x), x));
}

ZenoConfig qubit_zeno(std::size_t n, const ComplexMatrix &h) {
  return ZenoConfig{HermitianOperator(h), 1.0, basis_vector(2, 0), 1.0, n};
}

double pair_scale(const JointScenario &scn) {
  return std::max(1.0, op_norm(scn.ahat(1).matrix()) * op_norm(scn.ahat(2).matrix()));
}

} // namespace

int main() {
  criterion(1, "same-average noise bound on the built-in qubit", [] {
    const auto scn = builtin_qubit_scenario();
    Rng rng(1);
    double worst = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 1000; ++k) {
      const auto c = certify(scn, haar_state(2, rng));
      if (!c.margin_same_average) {
        return Outcome{false, "same-average condition reported false"};
      }
      worst = std::min(worst, *c.margin_same_average);
    }
    ComplexVector y(2);
    y << 1.0 / std::numbers::sqrt2, kI / std::numbers::sqrt2;
    const double eq = certify(scn, y).margin_same_average.value();
    return Outcome{worst >= -1e-10 && std::abs(eq) <= 1e-10,
                   "min margin " + fmt("%.3e", worst) + ", sigma_y eigenstate margin " +
                       fmt("%.3e", eq)};
  }, 1.0);

  criterion(2, "noise magnitudes are state independent", [] {
    const auto scn = builtin_qubit_scenario();
    Rng rng(2);
    double dev = 0.0, gap = 0.0;
    for (int k = 0; k < 100; ++k) {
      const auto m = deltas(scn, haar_state(2, rng));
      for (int i = 0; i < 2; ++i) {
        dev = std::max(dev, std::abs(m.delta[i] - 1.0));
        gap = std::max(gap, std::abs(m.delta[i] - m.delta_bar[i]));
      }
    }
    return Outcome{dev <= 1e-12 && gap <= 1e-12,
                   "max |delta - 1| " + fmt("%.3e", dev) + ", max |delta - delta_bar| " +
                       fmt("%.3e", gap)};
  });

  criterion(3, "Robertson relation on random pairs", [] {
    Rng rng(3);
    double worst = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 1000; ++k) {
      const std::size_t d = 2 + static_cast<std::size_t>(k % 7);
      const HermitianOperator a(random_hermitian(d, rng)), b(random_hermitian(d, rng));
      worst = std::min(worst, robertson_margin(a, b, haar_state(d, rng)));
    }
    const HermitianOperator x(pauli::x()), y(pauli::y());
    const auto u = basis_vector(2, 0);
    const double lhs = 2.0 * sigma(x, u) * sigma(y, u);
    const double rhs = std::abs(inner(u, commutator(x, y), u));
    const bool eq = std::abs(lhs - 2.0) <= 1e-12 && std::abs(rhs - 2.0) <= 1e-12;
    return Outcome{worst >= -1e-10 && eq,
                   "min margin " + fmt("%.3e", worst) + ", equality case " + fmt("%.12f", lhs) +
                       " vs " + fmt("%.12f", rhs)};
  });

  criterion(4, "noise commutator identity", [] {
    Rng rng(4);
    double worst = certify(builtin_qubit_scenario(), basis_vector(2, 0)).report.identity9_residual;
    for (int k = 0; k < 100; ++k) {
      const std::size_t dh = 2 + static_cast<std::size_t>(k % 3);
      const std::size_t dk = 2 + static_cast<std::size_t>((k / 3) % 2);
      const auto scn = random_scenario(dh, dk, rng, k % 2 == 0);
      const auto c = certify(scn, haar_state(dh, rng));
      worst = std::max(worst, c.report.identity9_residual / pair_scale(scn));
    }
    return Outcome{worst <= 1e-12, "max residual / scale " + fmt("%.3e", worst)};
  });

  criterion(5, "cross terms vanish under the same-average condition", [] {
    Rng rng(5);
    double cross = 0.0, lift = 0.0;
    for (int k = 0; k < 100; ++k) {
      const std::size_t dh = 2 + static_cast<std::size_t>(k % 3);
      const auto scn = random_scenario(dh, 2 + static_cast<std::size_t>(k % 2), rng, true);
      const auto c = certify(scn, haar_state(dh, rng));
      cross = std::max({cross, c.cross_term[0], c.cross_term[1]});
      lift = std::max(lift, c.lift_residual);
    }
    return Outcome{cross <= 1e-10 && lift <= 1e-12,
                   "max cross term " + fmt("%.3e", cross) + ", lift residual " + fmt("%.3e", lift)};
  });

  criterion(6, "rough bound without the same-average condition", [] {
    Rng rng(6);
    double worst = std::numeric_limits<double>::infinity();
    int violated_avg = 0;
    for (int k = 0; k < 1000; ++k) {
      const std::size_t dh = 2 + static_cast<std::size_t>(k % 3);
      const auto scn = random_scenario(dh, 2 + static_cast<std::size_t>(k % 2), rng, false);
      const auto c = certify(scn, haar_state(dh, rng));
      worst = std::min(worst, c.margin_rough);
      violated_avg += c.report.same_average ? 0 : 1;
    }
    return Outcome{worst >= -1e-10,
                   "min margin " + fmt("%.3e", worst) + ", " + std::to_string(violated_avg) +
                       "/1000 scenarios break the same-average condition"};
  });

  criterion(7, "Zeno survival against the closed form", [] {
    const ComplexMatrix h = pauli::x();
    double dev = 0.0, slack = std::numeric_limits<double>::infinity();
    for (std::size_t n = 1; n <= 1000; ++n) {
      const auto cfg = qubit_zeno(n, h);
      const double p = survival_probability(cfg);
      dev = std::max(dev, std::abs(p - survival_oracle(n)));
      slack = std::min(slack, p - zeno_lower_bound(cfg));
    }
    const double p10 = survival_probability(qubit_zeno(10, h));
    const double b10 = zeno_lower_bound(qubit_zeno(10, h));
    const double p4 = survival_probability(qubit_zeno(10000, h));
    const bool pass = dev <= 1e-12 && std::abs(p10 - 0.908814) <= 1e-6 &&
                      std::abs(b10 - 0.904686) <= 1e-6 && slack >= 0.0 && p4 >= 0.9998;
    return Outcome{pass, "max |p - oracle| " + fmt("%.3e", dev) + ", p(10) " + fmt("%.6f", p10) +
                             ", bound(10) " + fmt("%.6f", b10) + ", min p - bound " +
                             fmt("%.3e", slack) + ", p(1e4) " + fmt("%.6f", p4)};
  }, 10.0);

  criterion(8, "sequential realization matches path enumeration", [] {
    Rng rng(8);
    double worst = 0.0;
    std::size_t trees = 0;
    for (std::size_t n = 1; n <= 4; ++n) {
      for_each_shape(n, [&](const std::vector<std::size_t> &parent) {
        for_each_count(n, [&](const std::vector<std::size_t> &points) {
          for_each_count(n, [&](const std::vector<std::size_t> &outcomes) {
            worst = std::max(worst, tree_discrepancy(random_tree(parent, points, outcomes, rng)));
            ++trees;
          });
        });
      });
    }
    for (int k = 0; k < 100; ++k) {
      const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * 4.0);
      std::vector<std::size_t> parent(n, 0), points(n), outcomes(n);
      for (std::size_t i = 0; i < n; ++i) {
        parent[i] = i ? static_cast<std::size_t>(rng.uniform() * static_cast<double>(i)) : 0;
        points[i] = 1 + static_cast<std::size_t>(rng.uniform() * 3.0);
        outcomes[i] = 1 + static_cast<std::size_t>(rng.uniform() * 3.0);
      }
      worst = std::max(worst, tree_discrepancy(random_tree(parent, points, outcomes, rng)));
      ++trees;
    }
    return Outcome{worst <= 1e-12,
                   std::to_string(trees) + " trees, max deviation " + fmt("%.3e", worst)};
  });

  criterion(9, "two-time Zeno sequence is not realizable", [] {
    const auto report = check_zeno_noncommutativity(qubit_zeno(10, pauli::x()));
    bool control = false;
    try {
      (void)check_zeno_noncommutativity(qubit_zeno(10, pauli::z()));
    } catch (const Error &e) {
      control = e.kind() == ErrorKind::UnexpectedCommutation;
    }
    const bool pass = report.realize_rejected && report.realize_residual >= 0.05 && control;
    return Outcome{pass, "residual " + fmt("%.6f", report.realize_residual) + " at node '" +
                             report.failing_node + "', sigma_z control " +
                             (control ? "UnexpectedCommutation" : "not reported")};
  });

  criterion(10, "sampling soundness", [] {
    const OutcomeDistribution d({"a", "b"}, {0.75, 0.25});
    Rng rng(10);
    const int n = 100000;
    int hits = 0;
    for (int k = 0; k < n; ++k) {
      hits += sample_index(d, rng) == 0 ? 1 : 0;
    }
    const double z = (hits - 0.75 * n) / std::sqrt(n * 0.75 * 0.25);
    Rng a(123), b(123);
    bool same = true;
    for (int k = 0; k < 1000; ++k) {
      same = same && sample_index(d, a) == sample_index(d, b);
    }
    return Outcome{std::abs(z) <= 3.0 && same,
                   std::to_string(hits) + " hits (z = " + fmt("%.3f", z) + "), seeded replay " +
                       (same ? "identical" : "differs")};
  });

  std::printf("%d criteria failed\n", failures);
  return failures;
}
