/*
 Copyright 2026 The steergame Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include "steergame/pipeline.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <sstream>

#include "steergame/errors.hpp"

namespace steergame {

namespace fs = std::filesystem;

Command parse_command(const std::string& name) {
  if (name == "solve-unconstrained") return Command::SolveUnconstrained;
  if (name == "solve-constrained") return Command::SolveConstrained;
  if (name == "simulate") return Command::Simulate;
  if (name == "all") return Command::All;
  throw ParseError("unknown command '" + name +
                   "' (expected solve-unconstrained, solve-constrained, simulate, all)");
}

std::string command_name(Command c) {
  switch (c) {
    case Command::SolveUnconstrained: return "solve-unconstrained";
    case Command::SolveConstrained: return "solve-constrained";
    case Command::Simulate: return "simulate";
    case Command::All: return "all";
  }
  return "all";
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xf];
  }
  return out;
}

std::string content_digest(const std::string& bytes) {
  std::string kept;
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    std::size_t end = bytes.find('\n', pos);
    end = end == std::string::npos ? bytes.size() : end + 1;
    if (bytes[pos] != '#') kept.append(bytes, pos, end - pos);
    pos = end;
  }
  return sha256_hex(kept);
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

class Csv {
 public:
  Csv(const std::string& scenario, const std::string& what) {
    os_ << "# steergame " << what << " scenario=" << scenario << " generated=" << utc_now()
        << "\n";
  }
  Csv& cell(const std::string& s) {
    if (!first_) os_ << ',';
    os_ << s;
    first_ = false;
    return *this;
  }
  Csv& cell(double v) { return cell(num(v)); }
  Csv& cell(int v) { return cell(std::to_string(v)); }
  void end() {
    os_ << '\n';
    first_ = true;
  }
  std::string str() const { return os_.str(); }

 private:
  std::ostringstream os_;
  bool first_ = true;
};

class Emitter {
 public:
  Emitter(std::string outdir, RunReport& rep) : dir_(std::move(outdir)), rep_(rep) {}

  void write(const std::string& name, const std::string& content) {
    const fs::path p = fs::path(dir_) / name;
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot write " + p.string());
    out << content;
    if (!out) throw Error("write failed: " + p.string());
    rep_.files.push_back({name, content_digest(content)});
  }

 private:
  std::string dir_;
  RunReport& rep_;
};

std::string mean_csv(const std::string& scenario, const LiftedSystem& sys, const Vector& mu0,
                     const Vector& Ubar, const Vector& Vbar) {
  const auto traj = mean_trajectory(sys, mu0, Ubar, Vbar);
  Csv csv(scenario, "mean");
  csv.cell("k");
  for (int j = 0; j < sys.n; ++j) csv.cell("x" + std::to_string(j));
  for (int j = 0; j < sys.m; ++j) csv.cell("u" + std::to_string(j));
  for (int j = 0; j < sys.l; ++j) csv.cell("v" + std::to_string(j));
  csv.end();
  for (int k = 0; k <= sys.N; ++k) {
    csv.cell(k);
    for (int j = 0; j < sys.n; ++j) csv.cell(traj.Xbar(k * sys.n + j));
    for (int j = 0; j < sys.m; ++j) csv.cell(k < sys.N ? num(Ubar(k * sys.m + j)) : "");
    for (int j = 0; j < sys.l; ++j) csv.cell(k < sys.N ? num(Vbar(k * sys.l + j)) : "");
    csv.end();
  }
  return csv.str();
}

std::string cov_csv(const std::string& scenario, const std::vector<Matrix>& covs) {
  Csv csv(scenario, "covariance");
  const auto n = covs.front().rows();
  csv.cell("k");
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) csv.cell("c" + std::to_string(i) + "_" + std::to_string(j));
  }
  csv.end();
  for (std::size_t k = 0; k < covs.size(); ++k) {
    csv.cell(static_cast<int>(k));
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) csv.cell(covs[k](i, j));
    }
    csv.end();
  }
  return csv.str();
}

std::string convergence_csv(const std::string& scenario, const JacobiTrace& tr,
                            const PriorCovariance& prior, const LiftedSystem& sys,
                            const Matrix& SigmaN) {
  Csv csv(scenario, "convergence");
  csv.cell("iteration").cell("eps_k").cell("eps_l").cell("J_sigma").cell("constraint_norm");
  csv.end();
  for (std::size_t i = 0; i < tr.eps_k.size(); ++i) {
    const auto& it = tr.iterates[i + 1];
    csv.cell(static_cast<int>(i + 1)).cell(tr.eps_k[i]).cell(tr.eps_l[i]).cell(it.J);
    csv.cell(constraint_norm(it.K, it.L, prior, SigmaN, sys));
    csv.end();
  }
  return csv.str();
}

std::string trajectories_csv(const std::string& scenario, const RolloutBatch& batch, int count) {
  Csv csv(scenario, "trajectories");
  csv.cell("sample").cell("k");
  for (int j = 0; j < batch.n; ++j) csv.cell("x" + std::to_string(j));
  for (int j = 0; j < batch.m; ++j) csv.cell("u" + std::to_string(j));
  for (int j = 0; j < batch.l; ++j) csv.cell("v" + std::to_string(j));
  csv.end();
  const int rows = std::min(count, batch.samples);
  for (int i = 0; i < rows; ++i) {
    for (int k = 0; k <= batch.N; ++k) {
      csv.cell(i).cell(k);
      for (int j = 0; j < batch.n; ++j) csv.cell(batch.states(i, k * batch.n + j));
      for (int j = 0; j < batch.m; ++j) {
        csv.cell(k < batch.N ? num(batch.controls_u(i, k * batch.m + j)) : "");
      }
      for (int j = 0; j < batch.l; ++j) {
        csv.cell(k < batch.N ? num(batch.controls_v(i, k * batch.l + j)) : "");
      }
      csv.end();
    }
  }
  return csv.str();
}

std::string ellipses_csv(const std::string& scenario, const std::vector<Vector>& means,
                         const std::vector<Matrix>& covs, const GaussianBoundary& b,
                         std::pair<int, int> dims) {
  constexpr int kPoints = 64;
  constexpr double kSigma = 3.0;
  Csv csv(scenario, "ellipses (3 sigma)");
  csv.cell("set").cell("k").cell("point").cell("x").cell("y");
  csv.end();
  auto emit = [&](const char* set, int k, const Vector& mean, const Matrix& cov) {
    const auto pts = ellipse_points(mean, cov, dims, kSigma, kPoints);
    for (int p = 0; p < kPoints; ++p) {
      csv.cell(set).cell(k).cell(p).cell(pts[p](0)).cell(pts[p](1));
      csv.end();
    }
  };
  const int N = static_cast<int>(covs.size()) - 1;
  emit("initial", 0, b.mu0, b.Sigma0);
  emit("target", N, b.muN, b.SigmaN);
  for (int k = 0; k <= N; ++k) emit("state", k, means[k], covs[k]);
  return csv.str();
}

std::string moments_csv(const std::string& scenario, const EmpiricalMoments& em,
                        const std::vector<Vector>& means, const std::vector<Matrix>& covs) {
  Csv csv(scenario, "empirical vs analytic moments");
  csv.cell("k").cell("quantity").cell("i").cell("j").cell("analytic").cell("empirical").cell(
      "stderr");
  csv.end();
  for (std::size_t k = 0; k < em.mean_k.size(); ++k) {
    const auto n = em.mean_k[k].size();
    for (Eigen::Index i = 0; i < n; ++i) {
      csv.cell(static_cast<int>(k)).cell("mean").cell(static_cast<int>(i)).cell("");
      csv.cell(means[k](i)).cell(em.mean_k[k](i)).cell(em.mean_stderr_k[k](i));
      csv.end();
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i; j < n; ++j) {
        csv.cell(static_cast<int>(k)).cell("cov").cell(static_cast<int>(i)).cell(static_cast<int>(j));
        csv.cell(covs[k](i, j)).cell(em.cov_k[k](i, j)).cell(em.cov_stderr_k[k](i, j));
        csv.end();
      }
    }
  }
  return csv.str();
}

std::vector<Vector> split_states(const Vector& X, int n) {
  std::vector<Vector> out;
  for (Eigen::Index k = 0; k < X.size() / n; ++k) out.push_back(X.segment(k * n, n));
  return out;
}

std::string plot_script(const Scenario& sc) {
  const double dt = sc.continuous ? sc.continuous->dt : 1.0;
  std::ostringstream os;
  os << R"PY(#!/usr/bin/env python3
# Renders the steergame CSV outputs found next to this script.
import csv
import os
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))
)PY";
  os << "SCENARIO = \"" << sc.name << "\"\n";
  os << "DIMS = (" << sc.plot.dims.first << ", " << sc.plot.dims.second << ")\n";
  os << "KIND = \"" << sc.plot.kind << "\"\n";
  os << "ASPECT = \"" << sc.plot.aspect << "\"\n";
  os << "DT = " << num(dt) << "\n";
  os << "CLOSING_SPEED = " << num(sc.plot.closing_speed) << "\n";
  os << "INITIAL_RANGE = " << num(sc.plot.initial_range) << "\n";
  os << R"PY(

def read(name):
    path = os.path.join(HERE, name)
    if not os.path.exists(path):
        return None
    with open(path) as f:
        rows = [r for r in csv.DictReader(line for line in f if not line.startswith("#"))]
    return rows


def column(rows, key, cast=float):
    return [cast(r[key]) for r in rows if r[key] != ""]


def by_sample(rows):
    out = {}
    for r in rows:
        out.setdefault(int(r["sample"]), []).append(r)
    return out


def apply_aspect(ax):
    if ASPECT == "equal":
        ax.set_aspect("equal", adjustable="datalim")
    else:
        ax.set_aspect("auto")


def phase_panel(ax, prefix, title):
    traj = read(prefix + "trajectories.csv")
    mean = read(prefix + "mean.csv")
    ell = read(prefix + "ellipses.csv")
    xi, yi = "x%d" % DIMS[0], "x%d" % DIMS[1]
    if traj:
        for rows in by_sample(traj).values():
            ax.plot(column(rows, xi), column(rows, yi), color="0.7", lw=0.6)
    if mean:
        ax.plot(column(mean, xi), column(mean, yi), color="tab:blue", lw=1.8, label="mean")
    if ell:
        groups = {}
        for r in ell:
            groups.setdefault((r["set"], int(r["k"])), []).append(r)
        for (kind, _), rows in sorted(groups.items()):
            xs = column(rows, "x") + [float(rows[0]["x"])]
            ys = column(rows, "y") + [float(rows[0]["y"])]
            color = "tab:red" if kind in ("initial", "target") else "tab:blue"
            ax.plot(xs, ys, color=color, lw=1.0)
    ax.set_xlabel(xi)
    ax.set_ylabel(yi)
    ax.set_title(title)
    apply_aspect(ax)


def convergence_panel(ax):
    conv = read("convergence.csv")
    if not conv:
        return False
    it = column(conv, "iteration", int)
    ax.semilogy(it, column(conv, "eps_k"), marker="o", label="eps_k")
    ax.semilogy(it, column(conv, "eps_l"), marker="s", label="eps_l")
    ax.set_xlabel("iteration")
    ax.legend()
    ax.set_title("Jacobi convergence")
    return True


def timeseries_panels():
    traj = read("trajectories.csv")
    mean = read("mean.csv")
    cov = read("covariance.csv")
    d = DIMS[0]
    key = "x%d" % d
    fig, ax = plt.subplots()
    if traj:
        for rows in by_sample(traj).values():
            ax.plot(column(rows, "k", int), column(rows, key), color="0.7", lw=0.6)
    if mean and cov:
        ks = column(mean, "k", int)
        mu = column(mean, key)
        sd = [3.0 * float(r["c%d_%d" % (d, d)]) ** 0.5 for r in cov]
        ax.plot(ks, mu, color="tab:blue", lw=1.8)
        ends = [0, len(ks) - 1]
        ax.errorbar([ks[i] for i in ends], [mu[i] for i in ends], yerr=[sd[i] for i in ends],
                    fmt="none", ecolor="tab:red", capsize=4)
    ax.set_xlabel("time step")
    ax.set_ylabel(key)
    ax.set_title(SCENARIO)
    fig.savefig(os.path.join(HERE, "fig_timeseries.png"), dpi=150)

    if traj and CLOSING_SPEED > 0:
        fig, ax = plt.subplots()
        for rows in list(by_sample(traj).values())[:1]:
            rng = [INITIAL_RANGE - CLOSING_SPEED * DT * k for k in column(rows, "k", int)]
            ax.plot(rng, column(rows, key), color="tab:blue")
        ax.plot([0.0], [0.0], "rx", markersize=10)
        apply_aspect(ax)
        ax.set_xlabel("range")
        ax.set_ylabel(key)
        fig.savefig(os.path.join(HERE, "fig_planar.png"), dpi=150)


def main():
    if KIND == "phase":
        if read("unconstrained_mean.csv"):
            fig, ax = plt.subplots()
            phase_panel(ax, "unconstrained_", "unconstrained game")
            fig.savefig(os.path.join(HERE, "fig_unconstrained.png"), dpi=150)
        fig, axes = plt.subplots(1, 2, figsize=(11, 4.5))
        phase_panel(axes[0], "", "constrained game")
        if not convergence_panel(axes[1]):
            axes[1].set_visible(False)
        fig.tight_layout()
        fig.savefig(os.path.join(HERE, "fig_constrained.png"), dpi=150)
    else:
        timeseries_panels()
    return 0


if __name__ == "__main__":
    sys.exit(main())
)PY";
  return os.str();
}

void record_error(RunReport& rep, const std::string& stage, const std::exception& e) {
  rep.solver_failure = true;
  rep.diagnostics.push_back(stage + ": " + e.what());
}

}  // namespace

RunReport run(const Scenario& sc, Command cmd, const std::string& outdir) {
  fs::create_directories(outdir);
  RunReport rep;
  rep.scenario = sc.name;
  rep.command = cmd;
  Emitter out(outdir, rep);

  const Tolerances& tol = sc.solver.tol;
  const GaussianBoundary& b = sc.boundary;
  const LiftedSystem sys = lift(sc.system);
  const CostWeights w = lift_weights(sc.weights, tol.eig_tol);
  const PriorCovariance prior = build_sigma_s(sys, b.Sigma0);
  const CovGame game(sys, w, prior, tol.eig_tol);
  rep.feasibility.mean_concavity = check_mean_concavity(sys, w, tol.eig_tol);
  rep.feasibility.cov_curvature = game.curvature();

  const bool want_unconstrained = cmd == Command::SolveUnconstrained || cmd == Command::All;
  const bool want_constrained = cmd != Command::SolveUnconstrained;
  const bool want_samples = cmd == Command::Simulate || cmd == Command::All;

  auto attempt = [&](const std::string& stage, const std::function<void()>& fn) {
    try {
      fn();
      return true;
    } catch (const Error& e) {
      record_error(rep, stage, e);
      return false;
    }
  };

  auto simulate = [&](const std::string& prefix, const Vector& Ubar, const Vector& Vbar,
                      const GainProfile& K, const GainProfile& L,
                      const std::vector<Vector>& means, const std::vector<Matrix>& covs,
                      bool keep_moments) {
    RolloutOptions ro;
    ro.threads = sc.solver.threads;
    const RolloutBatch batch =
        rollout(sc.system, b, Ubar, Vbar, K, L, sc.solver.samples, sc.solver.seed, ro);
    out.write(prefix + "trajectories.csv",
              trajectories_csv(sc.name, batch, sc.plot.trajectories));
    out.write(prefix + "ellipses.csv", ellipses_csv(sc.name, means, covs, b, sc.plot.dims));
    if (keep_moments && batch.samples >= 2) {
      rep.moments = empirical_moments(batch, &w);
      out.write("moments.csv", moments_csv(sc.name, *rep.moments, means, covs));
    }
  };

  if (want_unconstrained) {
    attempt("mean game (unconstrained)", [&] { rep.saddle = solve_umsg(sys, w, b.mu0, tol); });
    attempt("covariance game (unconstrained)", [&] { rep.ucsg = game.solve_ucsg_stationary(); });
    if (rep.saddle && rep.ucsg) {
      const Vector X = mean_trajectory(sys, b.mu0, rep.saddle->Ubar_star, rep.saddle->Vbar_star).Xbar;
      const auto covs = state_covariances(rep.ucsg->K, rep.ucsg->L, prior, sys);
      out.write("unconstrained_mean.csv",
                mean_csv(sc.name, sys, b.mu0, rep.saddle->Ubar_star, rep.saddle->Vbar_star));
      out.write("unconstrained_covariance.csv", cov_csv(sc.name, covs));
      if (cmd == Command::SolveUnconstrained) {
        rep.terminal_mean = X.tail(sys.n);
        rep.terminal_cov = covs.back();
      }
      if (want_samples) {
        attempt("simulation (unconstrained)", [&] {
          simulate("unconstrained_", rep.saddle->Ubar_star, rep.saddle->Vbar_star, rep.ucsg->K,
                   rep.ucsg->L, split_states(X, sys.n), covs, false);
        });
      }
    }
  }

  if (want_constrained) {
    attempt("relative controllability", [&] {
      rep.controllability = relative_controllability(sys, w, tol);
      rep.feasibility.rank_G = rep.controllability->rank;
      rep.feasibility.rank_condition =
          check_rank_condition(*rep.controllability, b.mu0, b.muN, tol.rank_tol);
    });

    std::optional<std::pair<Vector, Vector>> mean_inputs;
    try {
      rep.constrained = solve_cmsg_upper(sys, w, b.mu0, b.muN, tol);
      rep.feasibility.cmsg_feasible = true;
      mean_inputs = {rep.constrained->Ubar_c, rep.constrained->Vbar_c};
      rep.mean_source = "constrained";
      for (const auto& msg : rep.constrained->warnings) rep.diagnostics.push_back("mean game: " + msg);
    } catch (const InfeasibleMean& e) {
      rep.feasibility.cmsg_feasible = false;
      rep.infeasible = true;
      rep.diagnostics.push_back(std::string("mean game (constrained): ") + e.what());
      attempt("mean game (least squares)", [&] {
        rep.constrained = solve_cmsg_least_squares(sys, w, b.mu0, b.muN, tol);
        mean_inputs = {rep.constrained->Ubar_c, rep.constrained->Vbar_c};
        rep.mean_source = "least-squares constrained";
        for (const auto& msg : rep.constrained->warnings) rep.diagnostics.push_back("mean game: " + msg);
      });
    } catch (const Error& e) {
      record_error(rep, "mean game (constrained)", e);
    }

    JacobiOptions jo;
    jo.epsilon = sc.solver.epsilon;
    jo.max_iter = sc.solver.max_iter;
    jo.kstep.feas_tol = tol.feas_tol;
    jo.kstep.solver_tol = tol.solver_tol;
    std::optional<std::pair<GainProfile, GainProfile>> gains;
    attempt("covariance game (constrained)", [&] {
      rep.jacobi = jacobi_solve(sys, w, prior, b, jo);
      rep.feasibility.ccsg_feasible = rep.jacobi->feasible;
      if (rep.jacobi->fallback) {
        rep.infeasible = true;
        gains = *rep.jacobi->fallback;
        rep.gain_source = "fallback";
        rep.diagnostics.push_back("covariance game (constrained): " + rep.jacobi->message);
      } else {
        gains = {rep.jacobi->K(), rep.jacobi->L()};
        rep.gain_source = "jacobi";
        if (!rep.jacobi->converged) {
          rep.solver_failure = true;
          rep.diagnostics.push_back("covariance game (constrained): " + rep.jacobi->message);
        }
        if (!rep.jacobi->feasible) rep.infeasible = true;
      }
    });

    if (mean_inputs) {
      out.write("mean.csv", mean_csv(sc.name, sys, b.mu0, mean_inputs->first, mean_inputs->second));
    }
    if (gains) out.write("covariance.csv", cov_csv(sc.name, state_covariances(gains->first, gains->second, prior, sys)));
    if (rep.jacobi && !rep.jacobi->fallback) {
      out.write("convergence.csv", convergence_csv(sc.name, *rep.jacobi, prior, sys, b.SigmaN));
    }
    if (mean_inputs && gains) {
      const Vector X = mean_trajectory(sys, b.mu0, mean_inputs->first, mean_inputs->second).Xbar;
      const auto covs = state_covariances(gains->first, gains->second, prior, sys);
      rep.terminal_mean = X.tail(sys.n);
      rep.terminal_cov = covs.back();
      if (want_samples) {
        attempt("simulation", [&] {
          simulate("", mean_inputs->first, mean_inputs->second, gains->first, gains->second,
                   split_states(X, sys.n), covs, true);
        });
      }
    }
  }

  if (cmd == Command::All) out.write("plot.py", plot_script(sc));

  std::ofstream rj(fs::path(outdir) / "report.json");
  rj << report_json(rep);
  return rep;
}

std::string report_json(const RunReport& rep) {
  using nlohmann::json;
  auto vec = [](const Vector& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
  };
  auto mat = [&](const Matrix& m) {
    json a = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(vec(m.row(i).transpose()));
    return a;
  };

  json j;
  j["scenario"] = rep.scenario;
  j["command"] = command_name(rep.command);
  j["rng"] = "std::mt19937_64 per trajectory, seeded with seed XOR trajectory index; std::normal_distribution";

  json f;
  f["mean_concavity"] = {{"holds", rep.feasibility.mean_concavity.holds},
                         {"min_eig", rep.feasibility.mean_concavity.min_eig}};
  f["rank_G"] = rep.feasibility.rank_G ? json(*rep.feasibility.rank_G) : json();
  f["rank_condition"] =
      rep.feasibility.rank_condition ? json(*rep.feasibility.rank_condition) : json();
  if (rep.feasibility.cov_curvature) {
    const auto& c = *rep.feasibility.cov_curvature;
    f["cov_curvature"] = {{"convex_in_K", c.convex_in_K},
                          {"concave_in_L", c.concave_in_L},
                          {"structured_convex_in_K", c.structured_convex_in_K},
                          {"structured_concave_in_L", c.structured_concave_in_L},
                          {"prior_singular", c.prior_singular},
                          {"note", c.note}};
  }
  f["cmsg_feasible"] = rep.feasibility.cmsg_feasible ? json(*rep.feasibility.cmsg_feasible) : json();
  f["ccsg_feasible"] = rep.feasibility.ccsg_feasible ? json(*rep.feasibility.ccsg_feasible) : json();
  j["feasibility"] = f;

  json s;
  if (rep.saddle) {
    s["unconstrained_mean"] = {{"value", rep.saddle->value},
                               {"grad_norm_u", rep.saddle->grad_norm_u},
                               {"grad_norm_v", rep.saddle->grad_norm_v}};
  }
  if (rep.ucsg) s["unconstrained_cov"] = {{"stationarity_residual", rep.ucsg->stationarity_residual}};
  if (rep.controllability) s["relative_controllability_singular_values"] = vec(rep.controllability->singvals);
  if (rep.constrained) {
    s["constrained_mean"] = {{"terminal_residual", rep.constrained->terminal_residual},
                             {"gram_condition", rep.constrained->gram_condition}};
  }
  if (rep.jacobi) {
    const auto& t = *rep.jacobi;
    json jt = {{"iterations", t.iterations},
               {"converged", t.converged},
               {"feasible", t.feasible},
               {"constraint_norm", t.constraint_norm},
               {"steps_monotone", t.steps_monotone},
               {"message", t.message}};
    if (!t.eps_k.empty()) {
      jt["final_eps_k"] = t.eps_k.back();
      jt["final_eps_l"] = t.eps_l.back();
    }
    if (t.infeasible_min_norm) jt["min_constraint_norm"] = *t.infeasible_min_norm;
    s["jacobi"] = jt;
  }
  if (rep.moments && rep.moments->cost_estimate) {
    s["monte_carlo_cost"] = {{"estimate", *rep.moments->cost_estimate},
                             {"stderr", *rep.moments->cost_stderr}};
  }
  j["solutions"] = s;
  j["mean_source"] = rep.mean_source;
  j["gain_source"] = rep.gain_source;
  if (rep.terminal_mean) j["terminal_mean"] = vec(*rep.terminal_mean);
  if (rep.terminal_cov) j["terminal_cov"] = mat(*rep.terminal_cov);
  j["infeasible"] = rep.infeasible;
  j["solver_failure"] = rep.solver_failure;
  j["diagnostics"] = rep.diagnostics;
  json files = json::array();
  for (const auto& fr : rep.files) files.push_back({{"path", fr.path}, {"sha256", fr.sha256}});
  j["files"] = files;
  return j.dump(2) + "\n";
}

}  // namespace steergame
