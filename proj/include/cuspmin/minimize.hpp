#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "cuspmin/discrete_area.hpp"
#include "cuspmin/errors.hpp"
#include "cuspmin/periodic_mesh.hpp"

namespace cuspmin {

enum class DescentMethod { gradient, lbfgs };

struct SolveConfig {
  double grad_tol = 1e-8;
  int max_iter = 5000;
  double initial_step = 1.0;
  double backtrack = 0.5;
  double armijo = 1e-4;
  int max_backtracks = 40;
  DescentMethod method = DescentMethod::lbfgs;
  int lbfgs_memory = 10;
  /// Which coordinates of interior vertices may move (1 = free).
  Eigen::Vector3d mobility = Eigen::Vector3d::Ones();
  /// Heights are projected onto z <= z_ceiling when set.
  std::optional<double> z_ceiling;
  /// Largest first-step displacement as a fraction of the shortest coordinate edge.
  double first_step_fraction = 0.1;
  /// Relative area change treated as rounding noise by the line search.
  double value_noise = 1e-14;

  // Experiment constants. Inputs to the experiments, never derived.
  double epsilon0 = 0.1;
  double k0 = 1.0;
  double lambda0 = 1.0;
  double theta0 = 0.5;
  double t0 = 0.1;

  void validate() const {
    if (!(grad_tol > 0.0)) throw ArgumentError("grad_tol must be positive");
    if (max_iter < 0) throw ArgumentError("max_iter must be non-negative");
    if (!(backtrack > 0.0 && backtrack < 1.0)) throw ArgumentError("backtracking factor must lie in (0, 1)");
    if (!(armijo > 0.0 && armijo < 1.0)) throw ArgumentError("sufficient-decrease constant must lie in (0, 1)");
    if (!(initial_step > 0.0)) throw ArgumentError("initial step must be positive");
    if (max_backtracks < 1) throw ArgumentError("max_backtracks must be >= 1");
    if (!(value_noise >= 0.0)) throw ArgumentError("value_noise must be non-negative");
    if (lbfgs_memory < 1) throw ArgumentError("lbfgs_memory must be >= 1");
    if (!(epsilon0 > 0.0 && k0 > 0.0 && lambda0 > 0.0 && theta0 > 0.0 && t0 > 0.0)) {
      throw ArgumentError("experiment constants must be positive");
    }
  }
};

inline SolveConfig solve_config_from_json(const nlohmann::json& j) {
  SolveConfig c;
  c.grad_tol = j.value("grad_tol", c.grad_tol);
  c.max_iter = j.value("max_iter", c.max_iter);
  c.initial_step = j.value("initial_step", c.initial_step);
  c.backtrack = j.value("backtrack", c.backtrack);
  c.armijo = j.value("armijo", c.armijo);
  c.max_backtracks = j.value("max_backtracks", c.max_backtracks);
  const std::string method = j.value("method", std::string("lbfgs"));
  if (method == "lbfgs") {
    c.method = DescentMethod::lbfgs;
  } else if (method == "gradient") {
    c.method = DescentMethod::gradient;
  } else {
    throw ArgumentError("unknown descent method '" + method + "'");
  }
  c.lbfgs_memory = j.value("lbfgs_memory", c.lbfgs_memory);
  if (j.contains("mobility")) {
    const auto m = j.at("mobility").get<std::vector<double>>();
    if (m.size() != 3) throw ArgumentError("mobility must have three entries");
    c.mobility = {m[0], m[1], m[2]};
  }
  if (j.contains("z_ceiling") && !j.at("z_ceiling").is_null()) c.z_ceiling = j.at("z_ceiling").get<double>();
  c.first_step_fraction = j.value("first_step_fraction", c.first_step_fraction);
  c.value_noise = j.value("value_noise", c.value_noise);
  c.epsilon0 = j.value("epsilon0", c.epsilon0);
  c.k0 = j.value("k0", c.k0);
  c.lambda0 = j.value("lambda0", c.lambda0);
  c.theta0 = j.value("theta0", c.theta0);
  c.t0 = j.value("t0", c.t0);
  c.validate();
  return c;
}

struct SolveResult {
  PeriodicMesh mesh;
  int iterations = 0;
  double initial_area = 0.0;
  double final_area = 0.0;
  double residual = 0.0;
  bool converged = false;
  bool line_search_failed = false;
  /// Largest area increase over an accepted step (<= 0 when descent was monotone).
  double max_area_increase = -std::numeric_limits<double>::infinity();
  std::vector<double> area_history;
};

namespace detail {

struct DescentState {
  const PsiProfile& psi;
  const SolveConfig& cfg;
  PeriodicMesh mesh;
  std::vector<int> dof_vertex;  // flattened free coordinate -> vertex
  std::vector<int> dof_axis;

  DescentState(const PsiProfile& p, const SolveConfig& c, const PeriodicMesh& m) : psi(p), cfg(c), mesh(m) {
    for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
      if (mesh.boundary[v]) continue;
      for (int a = 0; a < 3; ++a) {
        if (cfg.mobility[a] != 0.0) {
          dof_vertex.push_back(static_cast<int>(v));
          dof_axis.push_back(a);
        }
      }
    }
  }

  Eigen::VectorXd get() const {
    Eigen::VectorXd x(dof_vertex.size());
    for (std::size_t k = 0; k < dof_vertex.size(); ++k) x[k] = mesh.vertices[dof_vertex[k]][dof_axis[k]];
    return x;
  }
  void set(const Eigen::VectorXd& x) {
    for (std::size_t k = 0; k < dof_vertex.size(); ++k) mesh.vertices[dof_vertex[k]][dof_axis[k]] = x[k];
  }
  Eigen::VectorXd gradient() const {
    const auto g = area_gradient(psi, mesh);
    Eigen::VectorXd out(dof_vertex.size());
    for (std::size_t k = 0; k < dof_vertex.size(); ++k) out[k] = g[dof_vertex[k]][dof_axis[k]];
    return out;
  }
  /// Coordinates pinned at the ceiling with the gradient pushing further up.
  std::vector<bool> active(const Eigen::VectorXd& x, const Eigen::VectorXd& g) const {
    std::vector<bool> act(dof_vertex.size(), false);
    if (!cfg.z_ceiling) return act;
    for (std::size_t k = 0; k < dof_vertex.size(); ++k) {
      act[k] = dof_axis[k] == 2 && x[k] >= *cfg.z_ceiling && g[k] < 0.0;
    }
    return act;
  }
  Eigen::VectorXd project(Eigen::VectorXd x) const {
    if (!cfg.z_ceiling) return x;
    for (std::size_t k = 0; k < dof_vertex.size(); ++k) {
      if (dof_axis[k] == 2) x[k] = std::min(x[k], *cfg.z_ceiling);
    }
    return x;
  }
  double residual(const Eigen::VectorXd& g, const std::vector<bool>& act) const {
    const auto dual = vertex_dual_areas(psi, mesh);
    double r = 0.0;
    for (std::size_t k = 0; k < dof_vertex.size(); ++k) {
      if (act[k]) continue;
      r = std::max(r, std::abs(g[k]) / dual[dof_vertex[k]]);
    }
    return r;
  }
  double shortest_edge() const {
    double s = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
      const auto c = mesh.corners(t);
      for (int k = 0; k < 3; ++k) s = std::min(s, (c[(k + 1) % 3] - c[k]).norm());
    }
    return s;
  }
  Eigen::VectorXd try_gradient(const Eigen::VectorXd& x) {
    const Eigen::VectorXd keep = get();
    set(x);
    Eigen::VectorXd out = gradient();
    set(keep);
    return out;
  }
  /// Area at x, or nothing if x leaves the chart or degenerates a triangle.
  std::optional<double> try_area(const Eigen::VectorXd& x) {
    const Eigen::VectorXd keep = get();
    set(x);
    std::optional<double> out;
    bool ok = true;
    for (std::size_t k = 0; k < dof_vertex.size(); ++k) {
      if (dof_axis[k] == 2 && !(x[k] >= kChartFloor)) ok = false;
    }
    if (ok) {
      try {
        out = mesh_area(psi, mesh);
      } catch (const MeshError&) {
        out.reset();
      }
    }
    set(keep);
    return out;
  }
};

}  // namespace detail

/// Projected descent (L-BFGS or steepest) with Armijo backtracking on the discrete area.
inline SolveResult minimize(const PsiProfile& psi, const PeriodicMesh& mesh, const SolveConfig& cfg) {
  cfg.validate();
  validate(mesh);
  detail::DescentState st(psi, cfg, mesh);
  SolveResult res;
  Eigen::VectorXd x = st.project(st.get());
  st.set(x);
  double f = mesh_area(psi, st.mesh);
  res.initial_area = f;
  res.area_history.push_back(f);
  Eigen::VectorXd g = st.gradient();
  std::vector<bool> act = st.active(x, g);
  res.residual = st.residual(g, act);

  std::deque<std::pair<Eigen::VectorXd, Eigen::VectorXd>> memory;
  double step_hint = cfg.initial_step;

  while (true) {
    if (res.residual < cfg.grad_tol) {
      res.converged = true;
      break;
    }
    if (res.iterations >= cfg.max_iter) break;

    Eigen::VectorXd gf = g;
    for (std::size_t k = 0; k < act.size(); ++k) {
      if (act[k]) gf[k] = 0.0;
    }
    Eigen::VectorXd d = -gf;
    bool scaled_first = true;
    if (cfg.method == DescentMethod::lbfgs && !memory.empty()) {
      // Two-loop recursion on the inactive coordinates.
      Eigen::VectorXd q = gf;
      std::vector<double> alpha(memory.size());
      for (int i = static_cast<int>(memory.size()) - 1; i >= 0; --i) {
        const auto& [s, y] = memory[static_cast<std::size_t>(i)];
        alpha[static_cast<std::size_t>(i)] = s.dot(q) / y.dot(s);
        q -= alpha[static_cast<std::size_t>(i)] * y;
      }
      const auto& [sl, yl] = memory.back();
      q *= sl.dot(yl) / yl.dot(yl);
      for (std::size_t i = 0; i < memory.size(); ++i) {
        const auto& [s, y] = memory[i];
        const double beta = y.dot(q) / y.dot(s);
        q += (alpha[i] - beta) * s;
      }
      for (std::size_t k = 0; k < act.size(); ++k) {
        if (act[k]) q[k] = 0.0;
      }
      if (q.dot(gf) > 0.0) {
        d = -q;
        scaled_first = false;
      } else {
        memory.clear();
      }
    }
    double alpha_step = 1.0;
    if (scaled_first) {
      const double dmax = d.cwiseAbs().maxCoeff();
      if (cfg.method == DescentMethod::gradient && res.iterations > 0) {
        alpha_step = step_hint;
      } else {
        alpha_step = cfg.initial_step * cfg.first_step_fraction * st.shortest_edge() / std::max(dmax, 1e-300);
      }
    }

    bool accepted = false;
    Eigen::VectorXd x_new;
    double f_new = f;
    for (int bt = 0; bt < cfg.max_backtracks; ++bt) {
      x_new = st.project(x + alpha_step * d);
      const auto trial = st.try_area(x_new);
      if (trial && *trial <= f + cfg.armijo * g.dot(x_new - x) && *trial < f) {
        f_new = *trial;
        accepted = true;
        break;
      }
      // Approximate Armijo (Hager-Zhang): once the decrease is lost in rounding, accept
      // on the slope at the trial point instead.
      if (trial && *trial <= f + cfg.value_noise * std::abs(f) && !(x_new - x).isZero(0.0)) {
        const Eigen::VectorXd s = x_new - x;
        const double slope0 = g.dot(s);
        const double slope1 = st.try_gradient(x_new).dot(s);
        if (slope0 < 0.0 && slope1 <= (2.0 * cfg.armijo - 1.0) * slope0) {
          f_new = *trial;
          accepted = true;
          break;
        }
      }
      alpha_step *= cfg.backtrack;
    }
    if (!accepted) {
      // A stale quasi-Newton direction gets one retry as steepest descent.
      if (!memory.empty()) {
        memory.clear();
        continue;
      }
      res.line_search_failed = true;
      break;
    }

    st.set(x_new);
    const Eigen::VectorXd g_new = st.gradient();
    res.max_area_increase = std::max(res.max_area_increase, f_new - f);
    const Eigen::VectorXd s = x_new - x;
    const Eigen::VectorXd y = g_new - g;
    if (cfg.method == DescentMethod::lbfgs && s.dot(y) > 1e-16 * s.norm() * y.norm()) {
      memory.emplace_back(s, y);
      if (static_cast<int>(memory.size()) > cfg.lbfgs_memory) memory.pop_front();
    }
    if (cfg.method == DescentMethod::gradient) step_hint = alpha_step / cfg.backtrack;
    x = x_new;
    f = f_new;
    g = g_new;
    act = st.active(x, g);
    res.residual = st.residual(g, act);
    res.area_history.push_back(f);
    ++res.iterations;
  }
  res.mesh = st.mesh;
  res.final_area = f;
  return res;
}

}  // namespace cuspmin
