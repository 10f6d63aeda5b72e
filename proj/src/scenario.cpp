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

#include "steergame/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <regex>
#include <set>
#include <sstream>
#include <unsupported/Eigen/MatrixFunctions>

#include "steergame/errors.hpp"

namespace steergame {

DiscreteStage discretize_continuous(const Matrix& Ac, const Matrix& Bc, const Matrix& Cc,
                                    double dt, double alpha, const Matrix& Gamma) {
  const Eigen::Index n = Ac.rows();
  if (Ac.cols() != n || Bc.rows() != n || Cc.rows() != n) {
    throw DimensionError("discretize_continuous: Ac must be n x n and Bc, Cc must have n rows");
  }
  if (!(dt > 0.0)) throw DimensionError("discretize_continuous: dt must be positive");
  const Matrix G = Gamma.size() == 0 ? Matrix::Identity(n, n) : Gamma;
  if (G.rows() != n) throw DimensionError("discretize_continuous: Gamma must have n rows");

  Matrix aug = Matrix::Zero(2 * n, 2 * n);
  aug.topLeftCorner(n, n) = Ac * dt;
  aug.topRightCorner(n, n) = Matrix::Identity(n, n) * dt;
  const Matrix E = aug.exp();
  const Matrix integral = E.topRightCorner(n, n);
  return {E.topLeftCorner(n, n), integral * Bc, integral * Cc, alpha * integral * G};
}

namespace {

class Reader {
 public:
  explicit Reader(std::string origin) : origin_(std::move(origin)) {}

  [[noreturn]] void fail(const YAML::Node& at, const std::string& field,
                         const std::string& msg) const {
    std::ostringstream os;
    os << origin_;
    if (at.IsDefined() && at.Mark().line >= 0) {
      os << ":" << at.Mark().line + 1 << ":" << at.Mark().column + 1;
    }
    os << ": " << field << ": " << msg;
    throw ParseError(os.str());
  }

  YAML::Node require(const YAML::Node& parent, const std::string& key,
                     const std::string& path) const {
    if (!parent.IsMap()) fail(parent, path, "expected a mapping");
    const YAML::Node child = parent[key];
    if (!child) fail(parent, path, "missing required key '" + key + "'");
    return child;
  }

  void check_keys(const YAML::Node& node, const std::set<std::string>& allowed,
                  const std::string& path) const {
    if (!node.IsMap()) fail(node, path, "expected a mapping");
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      if (!allowed.count(key)) fail(kv.first, path, "unknown key '" + key + "'");
    }
  }

  double scalar(const YAML::Node& node, const std::string& field) const {
    if (!node.IsScalar()) fail(node, field, "expected a number");
    try {
      return node.as<double>();
    } catch (const YAML::Exception&) {
      fail(node, field, "expected a number, got '" + node.Scalar() + "'");
    }
  }

  long long integer(const YAML::Node& node, const std::string& field) const {
    if (!node.IsScalar()) fail(node, field, "expected an integer");
    try {
      return node.as<long long>();
    } catch (const YAML::Exception&) {
      fail(node, field, "expected an integer, got '" + node.Scalar() + "'");
    }
  }

  std::string text(const YAML::Node& node, const std::string& field) const {
    if (!node.IsScalar()) fail(node, field, "expected a string");
    return node.Scalar();
  }

  Vector vector(const YAML::Node& node, const std::string& field, Eigen::Index n) const {
    if (!node.IsSequence()) fail(node, field, "expected a list of " + std::to_string(n) + " numbers");
    if (static_cast<Eigen::Index>(node.size()) != n) {
      fail(node, field, "expected " + std::to_string(n) + " entries, got " +
                            std::to_string(node.size()));
    }
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = scalar(node[i], field);
    return v;
  }

  // Accepts nested row lists, "a*I", "I", "zeros", a bare number (scalar times
  // identity), {diag: [...]}, or a flat list when one dimension is 1.
  Matrix matrix(const YAML::Node& node, const std::string& field, Eigen::Index rows,
                Eigen::Index cols) const {
    const auto shape = std::to_string(rows) + "x" + std::to_string(cols);
    if (node.IsScalar()) {
      static const std::regex ident(R"(^\s*(?:([-+]?[0-9.]+(?:[eE][-+]?[0-9]+)?)\s*\*\s*)?I\s*$)");
      const std::string s = node.Scalar();
      std::smatch mt;
      if (s == "zeros") return Matrix::Zero(rows, cols);
      if (rows != cols) fail(node, field, "scalar shorthand needs a square matrix, expected " + shape);
      if (std::regex_match(s, mt, ident)) {
        const double a = mt[1].matched ? std::stod(mt[1].str()) : 1.0;
        return a * Matrix::Identity(rows, cols);
      }
      return scalar(node, field) * Matrix::Identity(rows, cols);
    }
    if (node.IsMap()) {
      check_keys(node, {"diag"}, field);
      if (rows != cols) fail(node, field, "diag shorthand needs a square matrix, expected " + shape);
      return vector(require(node, "diag", field), field + ".diag", rows).asDiagonal();
    }
    if (!node.IsSequence()) fail(node, field, "expected a matrix");
    if (node.size() > 0 && node[0].IsScalar()) {
      if (cols == 1) return vector(node, field, rows);
      if (rows == 1) return vector(node, field, cols).transpose();
      fail(node, field, "expected nested row lists for a " + shape + " matrix");
    }
    if (static_cast<Eigen::Index>(node.size()) != rows) {
      fail(node, field, "expected " + std::to_string(rows) + " rows, got " +
                            std::to_string(node.size()));
    }
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      const YAML::Node row = node[i];
      const std::string rf = field + "[" + std::to_string(i) + "]";
      if (!row.IsSequence()) fail(row, rf, "expected a row list");
      if (static_cast<Eigen::Index>(row.size()) != cols) {
        fail(row, rf, "expected " + std::to_string(cols) + " columns, got " +
                          std::to_string(row.size()));
      }
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = scalar(row[j], rf);
    }
    return m;
  }

  static bool is_matrix_list(const YAML::Node& node) {
    if (!node.IsSequence() || node.size() == 0) return false;
    const YAML::Node first = node[0];
    if (first.IsMap()) return true;
    if (first.IsScalar()) return true;  // list of scalar shorthands
    return first.IsSequence() && first.size() > 0 && !first[0].IsScalar();
  }

  std::vector<Matrix> matrix_list(const YAML::Node& node, const std::string& field,
                                  Eigen::Index rows, Eigen::Index cols,
                                  std::size_t count) const {
    // Column or row matrices may be given as flat lists, one per stage.
    const bool flat_ok = (rows == 1 || cols == 1) && node.IsSequence() && node.size() > 0 &&
                         node[0].IsSequence();
    if (!is_matrix_list(node) && !flat_ok) {
      fail(node, field, "expected a list of " + std::to_string(count) + " matrices");
    }
    if (node.size() != count) {
      fail(node, field, "expected " + std::to_string(count) + " matrices, got " +
                            std::to_string(node.size()));
    }
    std::vector<Matrix> out;
    for (std::size_t k = 0; k < count; ++k) {
      out.push_back(matrix(node[k], field + "[" + std::to_string(k) + "]", rows, cols));
    }
    return out;
  }

  // A single matrix repeated over the horizon, or an explicit per-stage list.
  std::vector<Matrix> stage_matrices(const YAML::Node& node, const std::string& field,
                                     Eigen::Index rows, Eigen::Index cols,
                                     std::size_t count) const {
    if (is_matrix_list(node)) {
      return matrix_list(node, field, rows, cols, count);
    }
    return std::vector<Matrix>(count, matrix(node, field, rows, cols));
  }

 private:
  std::string origin_;
};

int positive(const Reader& rd, const YAML::Node& node, const std::string& field) {
  const long long v = rd.integer(node, field);
  if (v < 1) rd.fail(node, field, "must be at least 1");
  return static_cast<int>(v);
}

}  // namespace

Scenario parse_scenario_text(const std::string& text, const std::string& origin) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    std::ostringstream os;
    os << origin << ":" << e.mark.line + 1 << ":" << e.mark.column + 1 << ": " << e.msg;
    throw ParseError(os.str());
  }
  const Reader rd(origin);
  if (!root.IsMap()) rd.fail(root, "<root>", "expected a mapping with keys system, boundary, weights");
  rd.check_keys(root, {"name", "system", "boundary", "weights", "solver", "plot"}, "<root>");

  const std::string name = root["name"] ? rd.text(root["name"], "name") : "scenario";

  // system
  const YAML::Node sn = rd.require(root, "system", "<root>");
  rd.check_keys(sn, {"mode", "horizon", "state_dim", "controller_dim", "stopper_dim",
                     "noise_dim", "A", "B", "C", "D", "Ac", "Bc", "Cc", "Gamma", "dt", "alpha"},
                "system");
  const std::string mode_s = rd.text(rd.require(sn, "mode", "system"), "system.mode");
  const int N = positive(rd, rd.require(sn, "horizon", "system"), "system.horizon");
  const int n = positive(rd, rd.require(sn, "state_dim", "system"), "system.state_dim");
  const int m = positive(rd, rd.require(sn, "controller_dim", "system"), "system.controller_dim");
  const int l = positive(rd, rd.require(sn, "stopper_dim", "system"), "system.stopper_dim");
  const int r = positive(rd, rd.require(sn, "noise_dim", "system"), "system.noise_dim");
  const auto count = static_cast<std::size_t>(N);

  ScenarioMode mode;
  std::optional<ContinuousModel> cont;
  std::vector<Matrix> A, B, C, D;
  auto forbid = [&](std::initializer_list<const char*> keys) {
    for (const char* k : keys) {
      if (sn[k]) rd.fail(sn[k], std::string("system.") + k, "not allowed in mode '" + mode_s + "'");
    }
  };
  if (mode_s == "lti" || mode_s == "ltv") {
    mode = mode_s == "lti" ? ScenarioMode::Lti : ScenarioMode::Ltv;
    forbid({"Ac", "Bc", "Cc", "Gamma", "dt", "alpha"});
    auto get = [&](const char* key, int rows, int cols) {
      const YAML::Node node = rd.require(sn, key, "system");
      const std::string field = std::string("system.") + key;
      if (mode == ScenarioMode::Lti) {
        return std::vector<Matrix>(count, rd.matrix(node, field, rows, cols));
      }
      return rd.matrix_list(node, field, rows, cols, count);
    };
    A = get("A", n, n);
    B = get("B", n, m);
    C = get("C", n, l);
    D = get("D", n, r);
  } else if (mode_s == "continuous") {
    mode = ScenarioMode::Continuous;
    forbid({"A", "B", "C", "D"});
    ContinuousModel cm;
    cm.Ac = rd.matrix(rd.require(sn, "Ac", "system"), "system.Ac", n, n);
    cm.Bc = rd.matrix(rd.require(sn, "Bc", "system"), "system.Bc", n, m);
    cm.Cc = rd.matrix(rd.require(sn, "Cc", "system"), "system.Cc", n, l);
    cm.Gamma = sn["Gamma"] ? rd.matrix(sn["Gamma"], "system.Gamma", n, r)
                           : Matrix::Identity(n, r);
    if (!sn["Gamma"] && r != n) rd.fail(sn, "system.Gamma", "required when noise_dim != state_dim");
    cm.dt = rd.scalar(rd.require(sn, "dt", "system"), "system.dt");
    if (!(cm.dt > 0.0)) rd.fail(sn["dt"], "system.dt", "must be positive");
    cm.alpha = rd.scalar(rd.require(sn, "alpha", "system"), "system.alpha");
    const auto ds = discretize_continuous(cm.Ac, cm.Bc, cm.Cc, cm.dt, cm.alpha, cm.Gamma);
    A.assign(count, ds.A);
    B.assign(count, ds.B);
    C.assign(count, ds.C);
    D.assign(count, ds.D);
    cont = std::move(cm);
  } else {
    rd.fail(sn["mode"], "system.mode", "expected one of lti, ltv, continuous; got '" + mode_s + "'");
  }

  // boundary
  const YAML::Node bn = rd.require(root, "boundary", "<root>");
  rd.check_keys(bn, {"mu0", "Sigma0", "muN", "SigmaN"}, "boundary");
  const Vector mu0 = rd.vector(rd.require(bn, "mu0", "boundary"), "boundary.mu0", n);
  const Matrix S0 = rd.matrix(rd.require(bn, "Sigma0", "boundary"), "boundary.Sigma0", n, n);
  const Vector muN = rd.vector(rd.require(bn, "muN", "boundary"), "boundary.muN", n);
  const Matrix SN = rd.matrix(rd.require(bn, "SigmaN", "boundary"), "boundary.SigmaN", n, n);

  // weights
  const YAML::Node wn = rd.require(root, "weights", "<root>");
  rd.check_keys(wn, {"Q", "R", "S"}, "weights");
  StageWeights weights;
  {
    const YAML::Node qn = rd.require(wn, "Q", "weights");
    if (Reader::is_matrix_list(qn) && qn.size() == count) {
      weights.Q = rd.matrix_list(qn, "weights.Q", n, n, count);
      weights.Q.push_back(Matrix::Zero(n, n));
    } else {
      weights.Q = rd.stage_matrices(qn, "weights.Q", n, n, count + 1);
    }
    weights.R = rd.stage_matrices(rd.require(wn, "R", "weights"), "weights.R", m, m, count);
    weights.S = rd.stage_matrices(rd.require(wn, "S", "weights"), "weights.S", l, l, count);
  }

  // solver
  SolverSettings solver;
  if (const YAML::Node so = root["solver"]) {
    rd.check_keys(so, {"epsilon", "max_iter", "seed", "samples", "threads", "tolerances"}, "solver");
    if (so["epsilon"]) {
      solver.epsilon = rd.scalar(so["epsilon"], "solver.epsilon");
      if (!(solver.epsilon > 0.0)) rd.fail(so["epsilon"], "solver.epsilon", "must be positive");
    }
    if (so["max_iter"]) solver.max_iter = positive(rd, so["max_iter"], "solver.max_iter");
    if (so["seed"]) {
      try {
        solver.seed = so["seed"].as<std::uint64_t>();
      } catch (const YAML::Exception&) {
        rd.fail(so["seed"], "solver.seed", "expected a non-negative 64-bit integer");
      }
    }
    if (so["samples"]) solver.samples = positive(rd, so["samples"], "solver.samples");
    if (so["threads"]) solver.threads = static_cast<int>(rd.integer(so["threads"], "solver.threads"));
    if (const YAML::Node tn = so["tolerances"]) {
      rd.check_keys(tn, {"eig_tol", "rank_tol", "kkt_tol", "feas_tol", "solver_tol"},
                    "solver.tolerances");
      auto opt = [&](const char* key, double& dst) {
        if (tn[key]) dst = rd.scalar(tn[key], std::string("solver.tolerances.") + key);
      };
      opt("eig_tol", solver.tol.eig_tol);
      opt("rank_tol", solver.tol.rank_tol);
      opt("kkt_tol", solver.tol.kkt_tol);
      opt("feas_tol", solver.tol.feas_tol);
      opt("solver_tol", solver.tol.solver_tol);
    }
  }

  // plot
  PlotSettings plot;
  if (const YAML::Node pn = root["plot"]) {
    rd.check_keys(pn, {"dims", "aspect", "kind", "trajectories", "closing_speed", "initial_range"},
                  "plot");
    if (pn["dims"]) {
      const Vector d = rd.vector(pn["dims"], "plot.dims", 2);
      plot.dims = {static_cast<int>(d(0)), static_cast<int>(d(1))};
      for (int v : {plot.dims.first, plot.dims.second}) {
        if (v < 0 || v >= n) rd.fail(pn["dims"], "plot.dims", "index out of range");
      }
    }
    if (pn["aspect"]) {
      plot.aspect = rd.text(pn["aspect"], "plot.aspect");
      if (plot.aspect != "equal" && plot.aspect != "skewed") {
        rd.fail(pn["aspect"], "plot.aspect", "expected 'equal' or 'skewed'");
      }
    }
    if (pn["kind"]) {
      plot.kind = rd.text(pn["kind"], "plot.kind");
      if (plot.kind != "phase" && plot.kind != "timeseries") {
        rd.fail(pn["kind"], "plot.kind", "expected 'phase' or 'timeseries'");
      }
    }
    if (pn["trajectories"]) {
      plot.trajectories = static_cast<int>(rd.integer(pn["trajectories"], "plot.trajectories"));
      if (plot.trajectories < 0) rd.fail(pn["trajectories"], "plot.trajectories", "must be non-negative");
    }
    if (pn["closing_speed"]) plot.closing_speed = rd.scalar(pn["closing_speed"], "plot.closing_speed");
    if (pn["initial_range"]) plot.initial_range = rd.scalar(pn["initial_range"], "plot.initial_range");
  }

  auto wrap = [&](const YAML::Node& at, const std::string& field, auto&& make) {
    try {
      return make();
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      rd.fail(at, field, e.what());
    }
  };
  StageSystem system = wrap(sn, "system", [&] { return StageSystem(A, B, C, D); });
  GaussianBoundary boundary = wrap(bn, "boundary", [&] {
    return make_boundary(mu0, S0, muN, SN, solver.tol.eig_tol);
  });
  wrap(wn, "weights", [&] { return lift_weights(weights, solver.tol.eig_tol); });

  return Scenario{name,  mode,   std::move(system), std::move(cont), std::move(boundary),
                  std::move(weights), solver, plot};
}

Scenario parse_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open scenario file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario_text(ss.str(), path);
}

}  // namespace steergame
