#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cuspmin/cusp_experiments.hpp"
#include "cuspmin/cusp_geometry.hpp"
#include "cuspmin/gieseking.hpp"
#include "cuspmin/ideal_tetrahedron.hpp"
#include "cuspmin/metric_surgery.hpp"
#include "cuspmin/minimize.hpp"
#include "cuspmin/mobius.hpp"
#include "cuspmin/periodic_mesh.hpp"
#include "cuspmin/psi_profile.hpp"
#include "cuspmin/report.hpp"
#include "cuspmin/surface_analysis.hpp"
#include "cuspmin/verify/clausen.hpp"
#include "cuspmin/verify/first_variation.hpp"
#include "cuspmin/verify/riemann_fd.hpp"

namespace cuspmin {

/// Bad or incomplete experiment configuration; maps to the usage exit code.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
  std::string name;
  nlohmann::json parameters = nlohmann::json::object();
  nlohmann::json solve = nlohmann::json::object();
  std::optional<std::uint64_t> seed;
  std::filesystem::path base_dir;  ///< relative mesh paths resolve here
  nlohmann::json raw;

  std::uint64_t require_seed() const {
    if (!seed) throw ConfigError("experiment '" + name + "' needs an explicit seed");
    return *seed;
  }
};

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"curvature",    "minimal-solve",  "max-principle-1",
                                              "max-principle-2", "transversality", "three-puncture",
                                              "surgery",      "tetrahedron",    "slab-profile"};
  return names;
}

inline ExperimentConfig experiment_config_from_json(const nlohmann::json& j, std::filesystem::path base_dir = {}) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig c;
  c.raw = j;
  c.base_dir = std::move(base_dir);
  if (!j.contains("experiment") || !j.at("experiment").is_string()) throw ConfigError("config needs an experiment name");
  c.name = j.at("experiment").get<std::string>();
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), c.name) == names.end()) {
    throw ConfigError("unknown experiment '" + c.name + "'");
  }
  if (j.contains("parameters")) {
    if (!j.at("parameters").is_object()) throw ConfigError("parameters must be an object");
    c.parameters = j.at("parameters");
  }
  if (j.contains("solve")) {
    if (!j.at("solve").is_object()) throw ConfigError("solve must be an object");
    c.solve = j.at("solve");
  }
  if (j.contains("seed")) {
    const auto& s = j.at("seed");
    if (!s.is_number_integer() || (!s.is_number_unsigned() && s.get<std::int64_t>() < 0)) {
      throw ConfigError("seed must be a non-negative integer");
    }
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  return c;
}

namespace detail {

constexpr double kPi = std::numbers::pi;

inline PsiProfile profile_param(const nlohmann::json& p, const char* key, const PsiProfile& fallback) {
  return p.contains(key) ? psi_profile_from_json(p.at(key)) : fallback;
}

inline CuspEnd lattice_param(const nlohmann::json& p, const char* key, const CuspEnd& fallback) {
  return p.contains(key) ? cusp_end_from_json(p.at(key)) : fallback;
}

inline nlohmann::json profile_json(const PsiProfile& psi) {
  nlohmann::json j;
  to_json(j, psi);
  return j;
}

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

/// Random ramp profile with gain in the admissible range.
inline PsiProfile random_ramp(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double s = 1.0 + 0.5 * u(rng);
  const double c = s + 0.2 + 1.3 * u(rng);
  const double gain = 0.45 + 0.75 * u(rng);
  return PsiProfile::ramp(s, c, s + gain * (c - s));
}

inline bool near_knot(const PsiProfile& psi, double z, double margin) {
  for (double k : psi.knots()) {
    if (std::abs(z - k) < margin) return true;
  }
  return false;
}

inline verify::MetricField conformal_field(const PsiProfile& psi) {
  return [psi](const Eigen::Vector3d& x) {
    const double s = psi(x.z());
    return Eigen::Matrix3d(Eigen::Matrix3d::Identity() / (s * s));
  };
}

struct OutputSink {
  std::filesystem::path dir;
  RunReport* report;

  void csv(const std::string& file, const Series& s) const {
    if (dir.empty()) return;
    emit_csv(s, dir / file);
    report->artifacts.push_back(file);
  }
  void json(const std::string& file, const nlohmann::json& j) const {
    if (dir.empty()) return;
    std::ofstream out(dir / file, std::ios::binary);
    if (!out) throw IoError("cannot write " + (dir / file).string());
    out << j.dump(2) << '\n';
    report->artifacts.push_back(file);
  }
};

// ---------------------------------------------------------------------------

inline void run_curvature(const ExperimentConfig& cfg, RunReport& rep, const OutputSink& out) {
  const auto& p = cfg.parameters;
  const PsiProfile psi = profile_param(p, "profile", PsiProfile::identity());
  const int samples = p.value("samples", 100);
  const int random_ramps = p.value("random_ramps", 10);
  const int ramp_samples = p.value("ramp_samples", 10);
  const int heights = p.value("mean_curvature_heights", 20);
  const double z_hi = p.value("z_max", 6.0);
  std::mt19937_64 rng(cfg.require_seed());

  Series series{{"z", "K_horizontal", "K_vertical", "K_horizontal_fd", "K_vertical_fd"}, {}};
  auto sample_errors = [&](const PsiProfile& prof, int n, bool record) {
    std::uniform_real_distribution<double> uz(0.55, z_hi);
    const auto field = conformal_field(prof);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      double z = uz(rng);
      while (near_knot(prof, z, 0.01)) z = uz(rng);
      const auto k = sectional_curvature(prof, z);
      const Eigen::Vector3d x(0.0, 0.0, z);
      const double kh = verify::sectional_curvature_fd(field, x, 0, 1);
      const double kv = verify::sectional_curvature_fd(field, x, 0, 2);
      worst = std::max({worst, std::abs(k.horizontal - kh), std::abs(k.vertical - kv)});
      if (record) series.rows.push_back({z, k.horizontal, k.vertical, kh, kv});
    }
    return worst;
  };

  rep.add(check_at_most("sectional.oracle", sample_errors(psi, samples, true), 0.0, 1e-6, Provenance::oracle));
  if (psi.family() == PsiFamily::identity) {
    double worst = 0.0;
    std::uniform_real_distribution<double> uz(0.5, z_hi);
    for (int i = 0; i < samples; ++i) {
      const auto k = sectional_curvature(psi, uz(rng));
      worst = std::max({worst, std::abs(k.horizontal + 1.0), std::abs(k.vertical + 1.0)});
    }
    rep.add(check_at_most("sectional.hyperbolic", worst, 0.0, 1e-12, Provenance::formula));
  }
  if (random_ramps > 0) {
    double worst = 0.0;
    nlohmann::json ramps = nlohmann::json::array();
    for (int r = 0; r < random_ramps; ++r) {
      const PsiProfile ramp = random_ramp(rng);
      ramps.push_back(profile_json(ramp));
      worst = std::max(worst, sample_errors(ramp, ramp_samples, false));
    }
    rep.results["random_ramps"] = ramps;
    rep.add(check_at_most("sectional.random_ramps", worst, 0.0, 1e-6, Provenance::oracle));
  }

  // Torus mean curvature against the first variation of the level-torus area.
  const verify::LevelMetric level = [&](double c) {
    const double s = psi(c);
    return Eigen::Matrix3d(Eigen::Matrix3d::Identity() / (s * s));
  };
  double worst_h = 0.0;
  int taken = 0;
  for (int i = 0; taken < heights && i < 10 * heights; ++i) {
    const double z = 0.6 + (z_hi - 0.8) * i / (heights - 1.0 + 1e-300);
    if (near_knot(psi, z, 1e-3)) continue;
    ++taken;
    worst_h = std::max(worst_h, std::abs(torus_mean_curvature(psi, z) - verify::level_mean_curvature_fd(level, z, 1e-4)));
  }
  rep.add(check_at_most("torus_H.oracle", worst_h, 0.0, 1e-5, Provenance::oracle));
  rep.results["profile"] = profile_json(psi);
  rep.results["mean_curvature_heights"] = taken;
  out.csv("curvature.csv", series);
}

// ---------------------------------------------------------------------------

inline SurgeryMetric random_surgery_metric(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double len = 3.0 + 5.0 * u(rng), ang = 2.0 * kPi * u(rng);
  const double len2 = 0.5 + 7.5 * u(rng), ang2 = ang + 0.3 + 2.5 * u(rng);
  const CuspEnd end({len * std::cos(ang), len * std::sin(ang)}, {len2 * std::cos(ang2), len2 * std::sin(ang2)});
  const PsiProfile psi = random_ramp(rng);
  return SurgeryMetric::from_end(psi, end, 1.0 + 3.0 * u(rng));
}

inline void run_surgery(const ExperimentConfig& cfg, RunReport& rep, const OutputSink& out) {
  const auto& p = cfg.parameters;
  nlohmann::json mj = p.value("metric", nlohmann::json{{"psi", {{"family", "identity"}}},
                                                       {"L", 2.0},
                                                       {"lattice", {{4.0, 0.0}, {1.0, 3.0}}}});
  const SurgeryMetric sm = surgery_metric_from_json(mj);
  const int det_samples = p.value("determinant_samples", 10000);
  const int frame_samples = p.value("frame_samples", 100);
  const double core_r = p.value("core_radius", 1e-4);
  const int heights = p.value("mean_curvature_heights", 20);
  const double edge = p.value("edge_distance", 1e-3);
  std::mt19937_64 rng(cfg.require_seed());
  std::uniform_real_distribution<double> u(0.0, 1.0);

  // Determinant positivity over random metrics and heights.
  int bad = 0;
  double min_det = std::numeric_limits<double>::infinity();
  for (int i = 0; i < det_samples; ++i) {
    const SurgeryMetric m = i % 2 ? random_surgery_metric(rng) : sm;
    const double z = 0.5 + (m.L() + 1.0 - 1e-9 - 0.5) * u(rng);
    const MetricTensor g = surgery_metric_eval(m, 2 * kPi * u(rng), 2 * kPi * u(rng), z);
    if (!g.is_positive_definite()) ++bad;
    min_det = std::min(min_det, g.determinant());
  }
  rep.add(check_near("surgery.determinant_nonpositive_count", bad, 0.0, 0.0, Provenance::formula));
  rep.results["min_determinant"] = min_det;

  const CoreRatio core = core_smoothness_ratio(sm, core_r);
  rep.add(check_near("surgery.core_ratio", core.ratio, 2.0 * kPi, 1e-3, Provenance::formula));

  // Frame change: the closed-form pullback against J^T G J.
  Eigen::Matrix3d jac;
  jac << 0, 1, 0, 0, 0, 1, -1, 0, 0;
  double worst_frame = 0.0;
  for (int i = 0; i < frame_samples; ++i) {
    const SurgeryMetric m = i % 2 ? random_surgery_metric(rng) : sm;
    const double r = m.phi.linear_width() * (1e-6 + (1.0 - 1e-6) * u(rng));
    const Eigen::Matrix3d g = surgery_metric_eval(m, 0.0, 0.0, m.L() + 1.0 - r).g;
    const Eigen::Matrix3d pulled = solid_torus_pullback(m, r, 2 * kPi * u(rng), 2 * kPi * u(rng)).g;
    worst_frame = std::max(worst_frame, (pulled - jac.transpose() * g * jac).cwiseAbs().maxCoeff());
  }
  rep.add(check_at_most("surgery.frame_change", worst_frame, 0.0, 1e-10, Provenance::oracle));

  // Mean curvature of the level tori against the first-variation oracle.
  const verify::LevelMetric level = [&](double c) { return surgery_metric_eval(sm, 0.0, 0.0, c).g; };
  Series hs{{"z", "H", "H_fd"}, {}};
  double worst_h = 0.0;
  const double z_end = sm.L() + 1.0 - edge;
  for (int i = 0; i < heights; ++i) {
    const double z = sm.L() + (z_end - sm.L()) * i / (heights - 1.0);
    const double h = std::min(1e-4, 0.005 * (sm.L() + 1.0 - z));
    const double fd = verify::level_mean_curvature_fd(level, z, h);
    const double an = surgery_mean_curvature(sm, z);
    worst_h = std::max(worst_h, std::abs(an - fd));
    hs.rows.push_back({z, an, fd});
  }
  rep.add(check_at_most("surgery_H.oracle", worst_h, 0.0, 1e-5, Provenance::oracle));
  const double near_core = surgery_mean_curvature(sm, sm.L() + 1.0 - 0.1 * edge);
  rep.add(check_at_least("surgery_H.divergence", near_core, 1e3, 0.0, Provenance::formula));

  nlohmann::json mout;
  to_json(mout, sm);
  rep.results["metric"] = mout;
  rep.results["core"] = {{"r", core_r}, {"circumference", core.circumference}, {"radius", core.radius}};
  out.csv("surgery_mean_curvature.csv", hs);
}

// ---------------------------------------------------------------------------

inline void run_three_puncture(const ExperimentConfig& cfg, RunReport& rep, const OutputSink& out) {
  const auto& p = cfg.parameters;
  const int triples = p.value("triples", 50);
  const int circle_points = p.value("circle_points", 100);
  const int word_length = p.value("word_length", 8);
  std::mt19937_64 rng(cfg.require_seed());
  std::uniform_real_distribution<double> u(-2.0, 2.0);

  double worst_trace = 0.0, worst_fix = 0.0, worst_circle = 0.0;
  int decay_violations = 0;
  Series orbit{{"triple", "word_length", "median_distance", "max_distance"}, {}};
  for (int t = 0; t < triples; ++t) {
    cplx w;
    do {
      w = {u(rng), u(rng)};
    } while (std::abs(w) < 0.3);
    const cplx a(u(rng), u(rng));
    const ParabolicTriple tr = solve_triple(w, a);
    worst_trace = std::max(worst_trace, std::abs(compose(tr.alpha(), tr.beta).trace() + 2.0));
    const cplx xb = w * (tr.beta.d() - tr.beta.a()) / 8.0;
    const double scale = std::max(1.0, std::abs(xb) + std::abs(w));
    worst_fix = std::max(worst_fix, std::abs(fixed_point(tr.beta).value() - xb) / scale);
    worst_fix = std::max(worst_fix, std::abs(fixed_point(tr.gamma()).value() - (xb + w / 2.0)) / scale);

    const BoundaryCircle line = invariant_circle(tr);
    for (int s = 0; s < circle_points; ++s) {
      const cplx q = line.base + (3.0 * u(rng)) * line.direction;
      for (const auto& g : {tr.alpha(), tr.alpha().inverse(), tr.beta, tr.beta.inverse()}) {
        const ExtComplex img = g.apply(q);
        if (img.is_infinite()) continue;
        worst_circle = std::max(worst_circle, line.distance(img) / std::max(1.0, std::abs(img.value())));
      }
    }
    const std::vector<ExtComplex> seeds{line.base + (0.5 + 0.5 * u(rng)) * line.direction * cplx(0.3, 1.0),
                                        line.base + (0.5 + 0.5 * u(rng)) * line.direction * cplx(-0.4, -1.0)};
    const OrbitSample os = orbit_limit_sample(tr, word_length, seeds);
    for (std::size_t k = 0; k < os.levels.size(); ++k) {
      orbit.rows.push_back({static_cast<double>(t), static_cast<double>(os.levels[k].word_length),
                            os.levels[k].median_distance, os.levels[k].max_distance});
      if (k > 0 && os.levels[k].median_distance > os.levels[k - 1].median_distance * (1.0 + 1e-12)) {
        ++decay_violations;
      }
    }
  }
  rep.add(check_at_most("three_puncture.trace", worst_trace, 0.0, 1e-12, Provenance::formula));
  rep.add(check_at_most("three_puncture.fixed_points", worst_fix, 0.0, 1e-12, Provenance::formula));
  rep.add(check_at_most("three_puncture.circle_images", worst_circle, 0.0, 1e-9, Provenance::formula));
  rep.add(check_near("three_puncture.median_increases", decay_violations, 0.0, 0.0, Provenance::recorded));
  rep.results["triples"] = triples;
  out.csv("orbit.csv", orbit);
}

// ---------------------------------------------------------------------------

inline void run_tetrahedron(const ExperimentConfig&, RunReport& rep, const OutputSink& out) {
  const IdealTetrahedron tet = regular_ideal_tetrahedron();
  double worst_int = 0.0, worst_ext = 0.0;
  for (const auto& [i, j] : kTetraEdges) {
    worst_int = std::max(worst_int, std::abs(dihedral_angle(tet, i, j) - kPi / 3.0));
    worst_ext = std::max(worst_ext, std::abs(exterior_dihedral_angle(tet, i, j) - 2.0 * kPi / 3.0));
  }
  rep.add(check_at_most("tetra.exterior_dihedral", worst_ext, 0.0, 1e-9, Provenance::formula));
  rep.add(check_at_most("tetra.interior_dihedral", worst_int, 0.0, 1e-9, Provenance::formula));

  const double volume = tetra_volume(tet);
  const double series = 3.0 * verify::lobachevsky_series(kPi / 3.0);
  rep.add(check_near("tetra.volume", volume, series, 1e-6, Provenance::oracle));
  rep.add(check_near("tetra.volume_value", volume, 1.0149416, 1e-6, Provenance::formula));

  const Tessellation tess = barycentric_tessellation(tet);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& piece : tess.pieces) {
    lo = std::min(lo, piece.volume);
    hi = std::max(hi, piece.volume);
  }
  rep.add(check_near("tetra.tessellation_pieces", static_cast<double>(tess.pieces.size()), 24.0, 0.0, Provenance::exact));
  rep.add(check_at_most("tetra.tessellation_spread", (hi - lo) / hi, 0.0, 1e-6, Provenance::oracle));
  rep.add(check_near("tetra.tessellation_total", tess.total_volume, volume, 1e-6, Provenance::oracle));

  const GiesekingData g = gieseking_pairing();
  rep.add(check_at_most("gieseking.face_error", g.max_face_error, 0.0, 1e-10, Provenance::formula));
  rep.add(check_near("gieseking.edge_classes", static_cast<double>(g.quotient.edge_classes.size()), 1.0, 0.0,
                     Provenance::exact));
  rep.add(check_near("gieseking.edge_angle", g.quotient.edge_classes.at(0).angle_sum, 2.0 * kPi, 1e-9,
                     Provenance::formula));
  rep.add(check_true("gieseking.non_orientable", !g.quotient.orientable, Provenance::exact));
  rep.add(check_true("gieseking.link_klein_bottle", g.link_is_klein_bottle, Provenance::exact));
  rep.add(check_true("gieseking.double_cover_orientable", g.double_cover.orientable, Provenance::exact));
  rep.add(check_near("gieseking.double_cover_volume", g.double_cover_volume, 2.0 * series, 2e-6, Provenance::oracle));
  rep.add(check_near("gieseking.double_cover_value", g.double_cover_volume, 2.0298832, 2e-6, Provenance::formula));

  const SchwarzBookkeeping s = schwarz_surface_bookkeeping();
  rep.add(check_near("euler.punctured_sphere", s.in_tetrahedron.chi, -2.0, 0.0, Provenance::exact));
  rep.add(check_near("euler.punctured_sphere_boundary", s.in_tetrahedron.boundary_components, 4.0, 0.0,
                     Provenance::exact));
  rep.add(check_near("euler.klein_sum", s.quotient.chi, -2.0, 0.0, Provenance::exact));
  rep.add(check_near("euler.klein_sum_formula", s.klein_sum_formula.chi, s.quotient.chi, 0.0, Provenance::exact));
  rep.add(check_true("euler.klein_sum_non_orientable", !s.quotient.orientable, Provenance::exact));
  rep.add(check_near("euler.double_cover_genus", s.lift.genus, 3.0, 0.0, Provenance::exact));
  rep.add(check_true("euler.double_cover_orientable", s.lift.orientable, Provenance::exact));
  rep.add(check_near("euler.punctured_torus", s.punctured_torus.chi, -1.0, 0.0, Provenance::exact));

  rep.results["tetrahedron"] = tetra_json(tet);
  rep.results["volume"] = volume;
  rep.results["double_cover_volume"] = g.double_cover_volume;
  rep.results["surfaces"] = {surface_json(s.in_tetrahedron), surface_json(s.quotient), surface_json(s.lift),
                             surface_json(s.punctured_torus)};
  rep.results["punctured_torus_area_bound"] = s.punctured_torus_area_bound;
  Series pieces{{"piece", "volume"}, {}};
  for (std::size_t i = 0; i < tess.pieces.size(); ++i) pieces.rows.push_back({static_cast<double>(i), tess.pieces[i].volume});
  out.csv("tessellation.csv", pieces);
}

// ---------------------------------------------------------------------------

inline void run_slab_profile(const ExperimentConfig& cfg, RunReport& rep, const OutputSink& out) {
  const auto& p = cfg.parameters;
  const PsiProfile psi = profile_param(p, "profile", PsiProfile::ramp(1.0, 2.0, 1.5));
  const double width = p.value("width", 1.0);
  const SlabProfileRun run = slab_profile_experiment(psi, width, p.value("z_min", 1.0), p.value("z_max", 6.0),
                                                     p.value("nx", 8), p.value("nz", 40));
  rep.add(check_at_most("slab.far_limit_rel", run.rel_error, 0.0, 0.01, Provenance::formula));
  rep.add(check_near("slab.additivity", run.slab_sum, run.total_area, 1e-8, Provenance::exact));
  rep.add(check_at_least("slab.c0_positive", run.c0, 0.0, 0.0, Provenance::recorded));

  SurfaceReport dummy;
  const StabilityCheck g2 = stability_bound_check(dummy, 2);
  rep.add(check_near("window.lower_g2", g2.lower, 6.2832, 1e-4, Provenance::formula));
  rep.add(check_near("window.upper_g2", g2.upper, 12.5664, 1e-4, Provenance::formula));
  rep.add(check_true("window.g1_vacuous", stability_bound_check(dummy, 1).vacuous, Provenance::exact));

  rep.results["profile"] = profile_json(psi);
  rep.results["limit"] = run.limit;
  rep.results["far_slab_area"] = run.far_slab_area;
  rep.results["c0"] = run.c0;
  Series s{{"k", "area"}, {}};
  for (const auto& sl : run.slabs) s.rows.push_back({static_cast<double>(sl.k), sl.area});
  out.csv("slab.csv", s);
}

// ---------------------------------------------------------------------------

inline void run_max_principle_1(const ExperimentConfig& cfg, RunReport& rep, const OutputSink& out) {
  const auto& p = cfg.parameters;
  const PsiProfile psi = profile_param(p, "profile", PsiProfile::ramp(1.0, 4.0 / 3.0, 7.0 / 6.0));
  const CuspEnd end = lattice_param(p, "lattice", CuspEnd());
  const int grid = p.value("grid", 32);
  const double amplitude = p.value("amplitude", 0.2);
  const int runs = p.value("runs", 20);
  const double tol = p.value("tolerance", 1e-4);
  SolveConfig solve = solve_config_from_json(cfg.solve);
  const std::uint64_t seed = cfg.require_seed();
  if (amplitude > 0.2) throw ConfigError("initial amplitude above 0.2 is outside the experiment's range");

  const double z_star = critical_height_in(psi, kChartFloor, 1e6);
  double worst_dev = 0.0, worst_res = 0.0, worst_increase = -std::numeric_limits<double>::infinity();
  int converged = 0;
  Series s{{"seed", "iterations", "max_deviation", "residual", "final_area"}, {}};
  for (int r = 0; r < runs; ++r) {
    const std::uint64_t sd = seed + static_cast<std::uint64_t>(r);
    const MaxPrincipleIRun run = max_principle_I_experiment(psi, end, random_graph_around(z_star, grid, amplitude, sd), solve);
    worst_dev = std::max(worst_dev, run.max_deviation);
    worst_res = std::max(worst_res, run.residual);
    worst_increase = std::max(worst_increase, run.max_area_increase / std::max(1.0, run.initial_area));
    converged += run.converged;
    s.rows.push_back({static_cast<double>(sd), static_cast<double>(run.iterations), run.max_deviation, run.residual,
                      run.final_area});
  }
  rep.add(check_at_most("mp1.max_deviation", worst_dev, 0.0, tol, Provenance::formula));
  rep.add(check_at_most("mp1.residual", worst_res, 0.0, solve.grad_tol, Provenance::formula));
  rep.add(check_near("mp1.converged_runs", converged, runs, 0.0, Provenance::exact));
  rep.add(check_near("mp1.psi_d1_at_critical", psi.d1(z_star), 0.0, 1e-12, Provenance::formula));
  rep.add(check_at_most("mp1.area_increase", worst_increase, 0.0, solve.value_noise, Provenance::exact));

  // Without a critical height: fixed boundary in a horotorus, interior pushed down.
  if (p.value("boundary_example", true)) {
    const BoundaryGraphRun b = boundary_graph_experiment(CuspEnd(), 1.0, 0.3, 6, 0.1, seed, solve);
    rep.add(check_at_least("mp1.boundary_no_interior_min", b.z_min, b.z_boundary, 1e-9, Provenance::recorded));
    rep.results["boundary_example"] = {{"z_min", b.z_min}, {"z_max", b.z_max}, {"converged", b.converged}};
  }
  rep.results["z_star"] = z_star;
  rep.results["profile"] = profile_json(psi);
  out.csv("max_principle_1.csv", s);
}

// ---------------------------------------------------------------------------

inline void run_max_principle_2(const ExperimentConfig& cfg, RunReport& rep, const OutputSink& out) {
  const auto& p = cfg.parameters;
  const PsiProfile psi = profile_param(p, "profile", PsiProfile::ramp(1.0, 2.0, 1.5));
  const CuspEnd end = lattice_param(p, "lattice", CuspEnd({0.5, 0.0}, {0.0, 0.5}));
  const double t0 = p.value("t0", 0.1);
  const double radius = p.value("radius", 0.2);
  const int rings = p.value("rings", 8);
  const double lift = p.value("lift", 0.1);
  const int runs = p.value("runs", 10);
  const double bound = p.value("bound", 1.0);
  const double tol = p.value("tolerance", 0.01);
  const SolveConfig solve = solve_config_from_json(cfg.solve);
  const std::uint64_t seed = cfg.require_seed();

  double worst = 0.0;
  int within = 0;
  double worst_gauss = -std::numeric_limits<double>::infinity();
  Series s{{"seed", "z_max", "iterations", "residual"}, {}};
  for (int r = 0; r < runs; ++r) {
    const std::uint64_t sd = seed + static_cast<std::uint64_t>(r);
    const MaxPrincipleIIRun run =
        max_principle_II_experiment(psi, end, t0, seeded_spanning_disk(end, t0, radius, rings, lift, sd), solve, bound, tol);
    worst = std::max(worst, run.z_max);
    within += run.within;
    const double ratio = run.report.interior_gauss_curvature / run.report.interior_area;
    worst_gauss = std::max(worst_gauss, ratio);
    s.rows.push_back({static_cast<double>(sd), run.z_max, static_cast<double>(run.iterations), run.residual});
  }
  rep.add(check_at_most("mp2.z_max", worst, bound, tol, Provenance::formula));
  rep.add(check_near("mp2.runs_within", within, runs, 0.0, Provenance::exact));
  // K <= -1 in aggregate on the converged disks, which lie in the hyperbolic region.
  rep.add(check_at_most("mp2.gauss_relation", worst_gauss, -1.0, 0.02, Provenance::formula));

  if (p.value("low_example", true)) {
    const MaxPrincipleIIRun low = max_principle_II_experiment(
        psi, end, 0.45, seeded_spanning_disk(end, 0.45, 0.05, 4, 0.02, seed), solve, 0.7, 0.0);
    rep.add(check_at_most("mp2.low_example_z_max", low.z_max, 0.7, 0.0, Provenance::recorded));
    rep.results["low_example_z_max"] = low.z_max;
  }
  bool rejected = false;
  try {
    max_principle_II_experiment(psi, end, 0.5, hex_disk(end, Eigen::Vector2d::Zero(), radius, 0.5, 2), solve);
  } catch (const ArgumentError&) {
    rejected = true;
  }
  rep.add(check_true("mp2.rejects_t0_half", rejected, Provenance::exact));
  rep.results["profile"] = profile_json(psi);
  rep.results["worst_z_max"] = worst;
  out.csv("max_principle_2.csv", s);
}

// ---------------------------------------------------------------------------

inline PeriodicMesh mesh_param(const ExperimentConfig& cfg, std::uint64_t seed) {
  const nlohmann::json m = cfg.parameters.value("mesh", nlohmann::json{{"generator", "vertical_strip"}});
  if (m.contains("path")) {
    std::filesystem::path path = m.at("path").get<std::string>();
    if (path.is_relative()) path = cfg.base_dir / path;
    std::ifstream in(path);
    if (!in) throw ConfigError("mesh file " + path.string() + " does not exist");
    return mesh_from_json(nlohmann::json::parse(in));
  }
  const std::string gen = m.value("generator", std::string("vertical_strip"));
  if (gen == "vertical_strip") {
    return vertical_strip(m.value("width", 1.0), m.value("z_min", 0.6), m.value("z_max", 1.6), m.value("nx", 24),
                          m.value("nz", 24));
  }
  if (gen == "hex_disk") {
    const CuspEnd end = lattice_param(m, "lattice", CuspEnd({0.5, 0.0}, {0.0, 0.5}));
    return hex_disk(end, Eigen::Vector2d::Zero(), m.value("radius", 0.2), m.value("z", 0.9), m.value("rings", 8));
  }
  if (gen == "flat_torus") {
    return flat_torus(lattice_param(m, "lattice", CuspEnd()), m.value("z", 1.0), m.value("n", 8), m.value("m", 8));
  }
  if (gen == "random_graph") {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(m.value("z_lo", 1.0), m.value("z_hi", 1.5));
    PeriodicGraphFn g(m.value("n", 8), m.value("m", 8), 1.0);
    for (auto& h : g.heights) h = u(rng);
    return graph_mesh(lattice_param(m, "lattice", CuspEnd()), g);
  }
  throw ConfigError("unknown mesh generator '" + gen + "'");
}

inline void run_minimal_solve(const ExperimentConfig& cfg, RunReport& rep, const OutputSink& out) {
  const auto& p = cfg.parameters;
  const PsiProfile psi = profile_param(p, "profile", PsiProfile::identity());
  const std::uint64_t seed = cfg.require_seed();
  SolveConfig solve = solve_config_from_json(cfg.solve);
  const PeriodicMesh mesh = mesh_param(cfg, seed);
  const bool strip = p.value("mesh", nlohmann::json::object()).value("generator", std::string("vertical_strip")) ==
                         "vertical_strip" &&
                     !p.value("mesh", nlohmann::json::object()).contains("path");

  // A vertical plane is critical as given; compact normal bumps only add area.
  if (strip && p.value("plane_probe", true)) {
    const GeodesicPlaneCheck plane =
        geodesic_plane_check(psi, mesh, p.value("perturbations", 20), p.value("probe_amplitude", 0.02), seed, solve);
    rep.add(check_at_most("plane.residual", plane.residual, solve.grad_tol, 0.0, Provenance::formula));
    rep.add(check_near("plane.iterations", plane.critical ? 0.0 : 1.0, 0.0, 0.0, Provenance::exact));
    const double min_inc = plane.area_increase.empty()
                               ? 0.0
                               : *std::min_element(plane.area_increase.begin(), plane.area_increase.end());
    rep.add(check_at_least("plane.min_area_increase", min_inc, 0.0, 0.0, Provenance::formula));
    rep.add(check_true("plane.all_increase", plane.all_increase, Provenance::formula));
    rep.results["plane_area"] = plane.area;
    rep.results["plane_area_increase"] = plane.area_increase;
  }

  PeriodicMesh start = mesh;
  const double perturb = p.value("perturb", strip ? 0.05 : 0.0);
  if (perturb > 0.0) perturb_interior(start, p.value("perturb_axis", strip ? 1 : 2), perturb, seed);
  if (strip) solve.mobility = {0.0, 1.0, 0.0};
  const SolveResult res = minimize(psi, start, solve);
  const SurfaceReport sr = surface_report(psi, res.mesh);
  rep.add(check_true("solve.converged", res.converged, Provenance::recorded));
  rep.add(check_at_most("solve.final_area_le_initial", res.final_area, res.initial_area, 0.0, Provenance::exact));
  rep.add(check_at_most("solve.max_step_increase", res.iterations > 0 ? res.max_area_increase : 0.0, 0.0,
                        solve.value_noise * std::max(1.0, res.initial_area), Provenance::exact));

  // Angle-defect Gauss-Bonnet.
  if (p.value("gauss_bonnet", true)) {
    double worst_closed = 0.0;
    for (const auto& c : closed_gauss_bonnet(psi)) worst_closed = std::max(worst_closed, c.error);
    rep.add(check_at_most("gauss.closed_defect", worst_closed, 0.0, 1e-12, Provenance::exact));
    const auto levels = slab_defect_refinement(1.0, 1.0, 2.0, {{8, 8}, {16, 16}, {32, 32}});
    std::vector<double> hs, es;
    for (const auto& l : levels) {
      hs.push_back(l.h);
      es.push_back(l.rel_error);
    }
    rep.add(check_at_most("gauss.slab_rel_error", es.back(), 0.0, 0.02, Provenance::formula));
    rep.add(check_at_least("gauss.slab_order", observed_order(hs, es), 1.5, 0.0, Provenance::oracle));
    const double ratio = sr.interior_gauss_curvature / sr.interior_area;
    if (psi.family() == PsiFamily::identity) {
      rep.add(check_at_most("gauss.relation_converged", ratio, -1.0, 0.02, Provenance::formula));
    }
    rep.results["slab_defects"] = nlohmann::json::array();
    for (const auto& l : levels) {
      rep.results["slab_defects"].push_back({{"h", l.h}, {"defect", l.interior_defect}, {"area", l.interior_area}});
    }
  }

  rep.results["iterations"] = res.iterations;
  rep.results["initial_area"] = res.initial_area;
  rep.results["final_area"] = res.final_area;
  rep.results["residual"] = res.residual;
  rep.results["report"] = {{"area", sr.area},
                           {"max_abs_mean_curvature", sr.max_abs_mean_curvature},
                           {"total_gauss_curvature", sr.total_gauss_curvature},
                           {"interior_gauss_curvature", sr.interior_gauss_curvature},
                           {"euler_characteristic", sr.euler_characteristic},
                           {"z_range", {sr.z_min, sr.z_max}}};
  Series hist{{"iteration", "area"}, {}};
  for (std::size_t i = 0; i < res.area_history.size(); ++i) hist.rows.push_back({static_cast<double>(i), res.area_history[i]});
  out.csv("area_history.csv", hist);
  out.json("mesh.json", mesh_to_json(res.mesh));
}

// ---------------------------------------------------------------------------

inline void run_transversality(const ExperimentConfig& cfg, RunReport& rep, const OutputSink& out) {
  const auto& p = cfg.parameters;
  const PsiProfile psi = profile_param(p, "profile", PsiProfile::identity());
  const SolveConfig solve = solve_config_from_json(cfg.solve);
  const PeriodicMesh strip = vertical_strip(p.value("width", 1.0), p.value("z_min", 0.6), p.value("z_max", 1.6),
                                            p.value("nx", 24), p.value("nz", 24));
  const std::vector<double> levels = p.value("levels", std::vector<double>{0.8, 1.0, 1.2, 1.4});
  const TransversalityRun run =
      transversality_experiment(psi, strip, p.value("amplitude", 0.05), cfg.require_seed(), levels, solve);
  rep.add(check_true("transversality.converged", run.converged, Provenance::recorded));
  rep.add(check_at_least("transversality.min_angle", run.min_angle, solve.theta0, 0.0, Provenance::recorded));
  rep.add(check_at_most("transversality.final_area_le_initial", run.final_area, run.initial_area, 0.0, Provenance::exact));
  Series s{{"level", "min_angle", "median_angle"}, {}};
  for (const auto& l : run.levels) s.rows.push_back({l.level, l.min_angle, l.median_angle});
  rep.results["theta0_recorded"] = run.min_angle;
  rep.results["perturbed_vertices"] = nlohmann::json::array();
  for (const auto& l : run.levels) rep.results["perturbed_vertices"].push_back(l.perturbed_vertices);
  out.csv("transversality.csv", s);
}

}  // namespace detail

/// Dispatches one experiment. Writes report artifacts into `out_dir` when non-empty;
/// report.json itself is written by the caller.
inline RunReport run(const ExperimentConfig& cfg, const std::filesystem::path& out_dir = {}) {
  using Fn = void (*)(const ExperimentConfig&, RunReport&, const detail::OutputSink&);
  static const std::map<std::string, Fn> table{{"curvature", detail::run_curvature},
                                               {"minimal-solve", detail::run_minimal_solve},
                                               {"max-principle-1", detail::run_max_principle_1},
                                               {"max-principle-2", detail::run_max_principle_2},
                                               {"transversality", detail::run_transversality},
                                               {"three-puncture", detail::run_three_puncture},
                                               {"surgery", detail::run_surgery},
                                               {"tetrahedron", detail::run_tetrahedron},
                                               {"slab-profile", detail::run_slab_profile}};
  const auto it = table.find(cfg.name);
  if (it == table.end()) throw ConfigError("unknown experiment '" + cfg.name + "'");
  RunReport rep;
  rep.experiment = cfg.name;
  rep.config = cfg.raw;
  const auto t0 = std::chrono::steady_clock::now();
  it->second(cfg, rep, detail::OutputSink{out_dir, &rep});
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace cuspmin
