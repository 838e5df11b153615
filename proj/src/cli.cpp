#include "efk/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <future>
#include <iostream>
#include <json.hpp>

#include "efk/action1d.hpp"
#include "efk/energy2d.hpp"
#include "efk/errors.hpp"
#include "efk/families.hpp"
#include "efk/io.hpp"
#include "efk/minimize2d.hpp"

namespace efk {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

fs::path out_root(const RunConfig& cfg) {
  if (!cfg.out_resolved) {
    if (const char* env = std::getenv("EFKL_OUT")) {
      if (*env) return fs::path(env);
    }
  }
  return fs::path(cfg.out_dir);
}

json config_block(const RunConfig& cfg) {
  json j;
  j["potential"] = cfg.potential;
  j["eps"] = cfg.eps;
  j["beta"] = cfg.beta ? *cfg.beta : 0.0;
  j["variant"] = cfg.variant;
  j["seed"] = cfg.seed;
  j["residual_tol"] = cfg.residual_tol;
  j["weps_knots"] = cfg.weps_knots;
  j["probe_trials"] = cfg.probe_trials;
  return j;
}

SolverOptions solver_options(const RunConfig& cfg) {
  SolverOptions s;
  s.grad_tol_rel = cfg.tol_g;
  s.energy_tol = cfg.tol_e;
  s.max_iters = cfg.max_iters;
  return s;
}

PotentialPtr potential_from(const RunConfig& cfg) {
  const WepsArgMode mode =
      cfg.weps_knots == "squared" ? WepsArgMode::kSquared : WepsArgMode::kLiteral;
  return make_potential(cfg.potential, cfg.eps, cfg.beta.value_or(1.0), mode);
}

void emit_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

bool all_checks_pass(const json& checks) {
  for (const auto& [k, v] : checks.items()) {
    if (v.is_boolean() && !v.get<bool>()) return false;
  }
  return true;
}

struct HeteroDefaults {
  double L;
  Index n;
};

HeteroDefaults hetero_defaults(const RunConfig& cfg) {
  HeteroDefaults d{20.0, 2001};
  if (cfg.potential == "w_eps") {
    d.L = 4.5 / cfg.eps + 9.0;
    d.n = 4001;
  }
  if (cfg.half_length > 0.0) d.L = cfg.half_length;
  if (cfg.n > 0) d.n = cfg.n;
  return d;
}

json hetero_report(const RunConfig& cfg, const MinimalHeteroclinic& sol,
                   const std::optional<double>& min_segment, double bound) {
  json j;
  j["kind"] = "hetero";
  j["config_hash"] = cfg.hash();
  j["config"] = config_block(cfg);
  j["values"] = {{"j_min", sol.action},
                 {"residual", sol.residual},
                 {"k", sol.decay.k},
                 {"K", sol.decay.K},
                 {"k_lin", sol.decay.k_lin},
                 {"canonical_shift", sol.canonical_shift},
                 {"iterations", sol.iterations},
                 {"transition_bound", bound},
                 {"min_segment_action", min_segment ? *min_segment : -1.0}};
  j["flags"] = {{"oscillatory_tails", sol.decay.oscillatory},
                {"decay_resolved", sol.decay.resolved},
                {"domain_warning", sol.domain_warning}};
  json checks;
  checks["converged"] = sol.converged;
  checks["residual_below_tol"] = sol.residual <= cfg.residual_tol;
  checks["segment_action_above_bound"] = !min_segment || *min_segment >= bound;
  checks["decay_matches_linearization"] =
      !sol.decay.resolved || sol.decay.oscillatory ||
      std::abs(sol.decay.k - sol.decay.k_lin) <= 0.05 * sol.decay.k_lin;
  j["checks"] = checks;
  j["units"] = {{"j_min", "action"},
                {"residual", "force density (sup norm)"},
                {"k", "1/length"},
                {"K", "amplitude"},
                {"k_lin", "1/length"},
                {"canonical_shift", "length"},
                {"iterations", "count"},
                {"transition_bound", "action"},
                {"min_segment_action", "action"}};
  return j;
}

}  // namespace

int cmd_hetero(const RunConfig& cfg) {
  if (!cfg.beta) throw ConfigError("hetero: beta is required");
  PotentialPtr pot = potential_from(cfg);
  const VerificationReport rep = verify_double_well(*pot, 2.5, 128);
  if (!rep.admissible) {
    throw ConfigError("hetero: potential '" + cfg.potential + "' is not a double well (" +
                      rep.details + ")");
  }
  const HeteroDefaults d = hetero_defaults(cfg);
  const Grid1D grid = Grid1D::make(d.L, d.n);

  Profile1D init = pot->dim() == 2 ? arc_comparison_map(cfg.eps, grid, pot, *cfg.beta)
                                   : build_e0(pot, grid, *cfg.beta);
  MinimalHeteroclinic sol;
  try {
    sol = minimize_heteroclinic(pot, *cfg.beta, init, solver_options(cfg));
  } catch (const SolverFailure& e) {
    std::cerr << "hetero: " << e.what() << "\n";
    return kExitSolverFailure;
  }

  const double bound = transition_cost_bound(*pot, *cfg.beta);
  const double eps0 = 0.25 * pot->well_radius();
  const auto min_segment = min_transition_segment_action(sol.profile, eps0);

  const fs::path dir = out_root(cfg);
  fs::create_directories(dir);
  if (cfg.emit_binary) write_profile_binary(dir / "hetero_profile.efk1", sol.profile);
  if (cfg.emit_csv) write_profile_csv(dir / "hetero_profile.csv", sol.profile);
  const json j = hetero_report(cfg, sol, min_segment, bound);
  if (cfg.emit_json) emit_json(dir / "hetero.json", j);
  return all_checks_pass(j["checks"]) ? kExitOk : kExitCheckFailed;
}

namespace {

json certificate_json(const RunConfig& cfg, const SeparationCertificate& cert,
                      const std::vector<std::string>& member_files) {
  json j;
  j["kind"] = "separation_certificate";
  j["config_hash"] = cfg.hash();
  j["config"] = config_block(cfg);
  j["epsilon"] = cert.eps;
  j["beta"] = cert.beta;
  j["j_min"] = cert.j_min;
  j["d_min"] = cert.d_min;
  j["mu"] = cert.mu;
  j["lower_bound"] = cert.lower_bound;
  j["values"] = {{"wizz_bound", cert.wizz},
                 {"min_modulus", cert.min_modulus},
                 {"arc_action", cert.arc_action},
                 {"reflection_action_gap", cert.reflection_action_gap}};
  j["members"] = member_files;
  json checks;
  checks["families_nonempty"] = true;
  checks["d_min_positive"] = cert.d_min > 0.0;
  checks["d_min_above_lower_bound"] = cert.d_min >= cert.lower_bound;
  checks["min_modulus_above_half"] = cert.min_modulus >= 0.5;
  checks["wizz_certification"] = cert.full_action_path || cert.segment_form_ok;
  checks["reflection_closure"] = cert.reflection_closure;
  checks["j_min_below_arc_action"] = cert.j_min <= cert.arc_action;
  j["checks"] = checks;
  j["units"] = {{"epsilon", "dimensionless"},
                {"beta", "dimensionless"},
                {"j_min", "action"},
                {"d_min", "L2 distance"},
                {"mu", "slope x amplitude"},
                {"lower_bound", "L2 distance"},
                {"wizz_bound", "action"},
                {"min_modulus", "amplitude"},
                {"arc_action", "action"},
                {"reflection_action_gap", "action"}};
  // Winding convention used by the families (documented for reproducibility).
  j["winding_convention"] =
      "label '-' = orbit passes above the origin (u2 > 0 at the u1 crossing)";
  return j;
}

SeparationCertificate certificate_from_members(double eps, double beta,
                                               std::vector<MinimalHeteroclinic> minus,
                                               std::vector<MinimalHeteroclinic> plus,
                                               const Profile1D& arc) {
  HeteroclinicFamily fm, fp;
  fm.label = Winding::kMinus;
  fp.label = Winding::kPlus;
  fm.members = std::move(minus);
  fp.members = std::move(plus);

  SeparationCertificate cert;
  cert.eps = eps;
  cert.beta = beta;
  double j = std::numeric_limits<double>::infinity();
  for (const auto* fam : {&fm, &fp}) {
    for (const auto& e : fam->members) j = std::min(j, action_1d(e.profile));
  }
  cert.j_min = j;
  cert.d_min = family_distance(fm, fp);
  std::tie(cert.mu, cert.lower_bound) = mu_and_lower_bound(fm, fp);
  cert.wizz = wizz_bound(beta);
  cert.arc_action = action_1d(arc);
  cert.min_modulus = std::numeric_limits<double>::infinity();
  cert.segment_form_ok = true;
  for (const auto* fam : {&fm, &fp}) {
    for (const auto& e : fam->members) {
      for (Index i = 0; i < e.profile.n(); ++i) {
        cert.min_modulus = std::min(cert.min_modulus, e.profile.values.row(i).norm());
      }
      if (auto seg = min_wizz_segment_action(e.profile)) {
        if (*seg < cert.wizz) cert.segment_form_ok = false;
      }
    }
  }
  cert.full_action_path = cert.j_min < cert.wizz;
  cert.reflection_action_gap = 0.0;
  for (const auto& e : fm.members) {
    cert.reflection_action_gap =
        std::max(cert.reflection_action_gap,
                 std::abs(action_1d(e.profile) - action_1d(reflect(e.profile))));
  }
  cert.reflection_closure = cert.reflection_action_gap <= 1e-10;
  return cert;
}

}  // namespace

int cmd_separation(const RunConfig& cfg) {
  if (!cfg.beta) throw ConfigError("separation: beta is required");
  if (cfg.potential != "w_eps") {
    throw ConfigError("separation: requires the two-component w_eps potential");
  }
  const fs::path dir = out_root(cfg);
  fs::create_directories(dir);

  if (!cfg.resume.empty()) {
    // Re-derive the certificate from stored member profiles.
    PotentialPtr pot = potential_from(cfg);
    std::vector<MinimalHeteroclinic> minus, plus;
    try {
      const json stored = json::parse(read_text(fs::path(cfg.resume) / "certificate.json"));
      for (const auto& f : stored.at("members")) {
        const fs::path mp = fs::path(cfg.resume) / f.get<std::string>();
        Profile1D p = read_profile_binary(mp, pot);
        MinimalHeteroclinic e;
        e.profile = std::move(p);
        e.action = action_1d(e.profile);
        e.converged = true;
        const auto w = try_winding_sign(e.profile);
        if (!w) throw FormatError("resume member unclassifiable: " + mp.string());
        (*w == Winding::kMinus ? minus : plus).push_back(std::move(e));
      }
    } catch (const json::exception& e) {
      std::cerr << "separation: corrupt resume data: " << e.what() << "\n";
      return kExitNoInput;
    } catch (const FormatError& e) {
      std::cerr << "separation: corrupt resume data: " << e.what() << "\n";
      return kExitNoInput;
    } catch (const IoError& e) {
      std::cerr << "separation: " << e.what() << "\n";
      return kExitNoInput;
    }
    if (minus.empty() || plus.empty()) return kExitSeparationNotFound;
    const Grid1D grid = minus.front().profile.grid;
    const Profile1D arc = arc_comparison_map(cfg.eps, grid, pot, *cfg.beta);
    const SeparationCertificate cert = certificate_from_members(
        cfg.eps, *cfg.beta, std::move(minus), std::move(plus), arc);
    const json stored = json::parse(read_text(fs::path(cfg.resume) / "certificate.json"));
    std::vector<std::string> files = stored.at("members").get<std::vector<std::string>>();
    const json j = certificate_json(cfg, cert, files);
    emit_json(dir / "certificate.json", j);
    return all_checks_pass(j["checks"]) ? kExitOk : kExitCheckFailed;
  }

  FamilyConfig fc;
  fc.solver = solver_options(cfg);
  if (cfg.n > 0) fc.n = cfg.n;
  if (cfg.half_length > 0.0) fc.half_length = cfg.half_length;

  FindFamiliesResult fam;
  try {
    fam = find_families(cfg.eps, *cfg.beta, fc);
  } catch (const SeparationNotFound& e) {
    std::cerr << "separation: " << e.what() << "\n";
    return kExitSeparationNotFound;
  } catch (const SolverFailure& e) {
    std::cerr << "separation: " << e.what() << "\n";
    return kExitSolverFailure;
  }

  std::vector<std::string> files;
  auto dump_members = [&](const HeteroclinicFamily& f, const std::string& tag) {
    for (size_t i = 0; i < f.members.size(); ++i) {
      const std::string base = "member_" + tag + "_" + std::to_string(i);
      if (cfg.emit_binary) {
        write_profile_binary(dir / (base + ".efk1"), f.members[i].profile);
        files.push_back(base + ".efk1");
      }
      if (cfg.emit_csv) write_profile_csv(dir / (base + ".csv"), f.members[i].profile);
    }
  };
  dump_members(fam.f_minus, "minus");
  dump_members(fam.f_plus, "plus");

  const json j = certificate_json(cfg, fam.certificate, files);
  if (cfg.emit_json) emit_json(dir / "certificate.json", j);
  return all_checks_pass(j["checks"]) ? kExitOk : kExitCheckFailed;
}

namespace {

json doublelayer_report(const RunConfig& cfg, const DoubleLayerResult& sol,
                        const SeparationCertificate& cert, double res, double res_scale,
                        double split_defect_rel, const ProbeResult& probe,
                        double v0_probe_deficit, double holder_worst, double tail_sup,
                        double slab_margin, const SliceTrace& trace, double j0) {
  json j;
  j["kind"] = "doublelayer";
  j["config_hash"] = cfg.hash();
  j["config"] = config_block(cfg);
  j["values"] = {{"energy", sol.energy},
                 {"iterations", sol.iterations},
                 {"total_iterations", sol.total_iterations},
                 {"j_min", cert.j_min},
                 {"d_min", cert.d_min},
                 {"j0_budget", j0},
                 {"residual", res},
                 {"residual_scale", res_scale},
                 {"splitting_defect_rel", split_defect_rel},
                 {"probe_min_deficit", probe.min_deficit},
                 {"probe_scale", probe.scale},
                 {"v0_probe_deficit", v0_probe_deficit},
                 {"holder_worst_ratio", holder_worst},
                 {"tail_sup", tail_sup},
                 {"slab_bound_margin", slab_margin},
                 {"t_minus_exit", trace.t_minus_exit >= 0 ? trace.t(trace.t_minus_exit) : 0.0},
                 {"t_plus_entry",
                  trace.t_plus_entry < trace.t.size() ? trace.t(trace.t_plus_entry) : 0.0}};
  json checks;
  checks["converged"] = sol.converged;
  checks["residual_below_tol"] = res <= cfg.residual_tol * res_scale;
  checks["splitting_identity_1pct"] = split_defect_rel <= 0.01;
  checks["single_tube_crossing"] = trace.single_crossing;
  checks["ut_decays_to_ends"] = [&] {
    const Index nt = trace.ut_norm.size();
    const Index dec = std::max<Index>(1, nt / 10);
    const double peak = trace.ut_norm.maxCoeff();
    double end_max = 0.0;
    for (Index i = 0; i < dec; ++i) {
      end_max = std::max(end_max, trace.ut_norm(i));
      end_max = std::max(end_max, trace.ut_norm(nt - 1 - i));
    }
    Index arg = 0;
    trace.ut_norm.maxCoeff(&arg);
    return arg > dec && arg < nt - 1 - dec && end_max <= 0.25 * peak;
  }();
  checks["probe_deficit_nonnegative"] = probe.min_deficit >= -1e-8 * probe.scale;
  checks["v0_probe_finds_descent"] = v0_probe_deficit < 0.0;
  checks["holder_bound"] = holder_worst <= 1.01;
  checks["slab_bound_all_slices"] = slab_margin <= 0.0;
  checks["tail_below_1e3"] = tail_sup <= 1e-3;
  j["checks"] = checks;
  j["units"] = {{"energy", "energy"},
                {"iterations", "count"},
                {"total_iterations", "count"},
                {"j_min", "action"},
                {"d_min", "L2 distance"},
                {"j0_budget", "action"},
                {"residual", "force density (sup norm)"},
                {"residual_scale", "force density"},
                {"splitting_defect_rel", "relative"},
                {"probe_min_deficit", "energy"},
                {"probe_scale", "energy"},
                {"v0_probe_deficit", "energy"},
                {"holder_worst_ratio", "relative"},
                {"tail_sup", "amplitude"},
                {"slab_bound_margin", "energy density"},
                {"t_minus_exit", "length"},
                {"t_plus_entry", "length"}};
  return j;
}

}  // namespace

int cmd_doublelayer(const RunConfig& cfg) {
  if (!cfg.beta) throw ConfigError("doublelayer: beta is required");
  if (cfg.potential != "w_eps") {
    throw ConfigError("doublelayer: requires the two-component w_eps potential");
  }
  const double beta = *cfg.beta;
  PotentialPtr pot = potential_from(cfg);
  const double L = cfg.half_length > 0.0 ? cfg.half_length : 4.5 / cfg.eps + 9.0;
  const Grid2D grid = Grid2D::make(cfg.t_half_length, L, cfg.nt, cfg.nx);
  const OperatorVariant variant = variant_from_name(cfg.variant);

  if (!cfg.certificate.empty()) {
    // Presence + shape validation of the referenced certificate.
    try {
      const json stored = json::parse(read_text(cfg.certificate));
      if (!stored.contains("d_min") || !stored.contains("j_min")) {
        throw FormatError("certificate missing d_min/j_min: " + cfg.certificate);
      }
    } catch (const json::exception& e) {
      std::cerr << "doublelayer: bad certificate: " << e.what() << "\n";
      return kExitFormat;
    } catch (const IoError& e) {
      std::cerr << "doublelayer: " << e.what() << "\n";
      return kExitNoInput;
    }
  }

  // Families on the run's own x grid so tube distances are grid-consistent.
  FamilyConfig fc;
  fc.solver = solver_options(cfg);
  fc.n = cfg.nx;
  fc.half_length = L;
  FindFamiliesResult fam;
  try {
    fam = find_families(cfg.eps, beta, fc);
  } catch (const SeparationNotFound& e) {
    std::cerr << "doublelayer: " << e.what() << "\n";
    return kExitSeparationNotFound;
  } catch (const SolverFailure& e) {
    std::cerr << "doublelayer: " << e.what() << "\n";
    return kExitSolverFailure;
  }
  const Profile1D& e_minus = fam.f_minus.members.front().profile;
  const Profile1D& e_plus = fam.f_plus.members.front().profile;
  const double j_min = fam.certificate.j_min;

  const Field2D v0 = build_V0(e_minus, e_plus, grid, variant);
  const double j0 = action_functional_J(v0, j_min);

  DoubleLayerOptions opts;
  opts.solver = solver_options(cfg);
  opts.continuation = cfg.continuation;
  DoubleLayerResult sol;
  try {
    sol = minimize_double_layer(pot, beta, e_minus, e_plus, grid, variant, opts);
  } catch (const SolverFailure& e) {
    std::cerr << "doublelayer: " << e.what() << "\n";
    return kExitSolverFailure;
  }

  const SliceTrace trace =
      layer_asymptotics(sol.field, fam.f_minus, fam.f_plus, fam.certificate.d_min);
  // The clamped end rows always sit in their tubes, so "never enters" cannot
  // literally occur; the honest starvation signal is a crossing zone pushed
  // into the outer t-deciles.
  const Index dec = std::max<Index>(1, cfg.nt / 10);
  const bool tube_starved = trace.t_minus_exit < dec ||
                            trace.t_plus_entry > cfg.nt - 1 - dec ||
                            trace.t_plus_entry <= trace.t_minus_exit;
  const fs::path dir = out_root(cfg);
  fs::create_directories(dir);
  if (tube_starved) {
    std::cerr << "doublelayer: tube crossing zone touches the t boundary; raise T\n";
    if (cfg.emit_binary) write_field_binary(dir / "field.efk2", sol.field);
    return kExitTubeExit;
  }

  const double res = residual_pde(sol.field);
  const double res_scale = residual_scale(sol.field);
  const double e_total = energy_2d(sol.field);
  const double jj = action_functional_J(sol.field, j_min);
  const double split_defect_rel =
      std::abs(e_total - (jj + 2.0 * grid.t_half_length * j_min)) / std::max(1.0, e_total);
  const ProbeResult probe = minimality_probe(sol.field, cfg.seed, cfg.probe_trials);
  const ProbeResult v0_probe = minimality_probe(v0, cfg.seed, cfg.probe_trials);
  const double holder_worst = holder_bound_check(sol.field, j0);
  const double tail_sup = uniform_well_convergence(sol.field);
  const Profile1D e0 = build_e0(pot, grid.x_grid(), beta);
  const double slab_margin = slab_bound_worst_margin(sol.field, j_min, e0);

  if (cfg.emit_binary) write_field_binary(dir / "field.efk2", sol.field);
  if (cfg.emit_csv) {
    std::ostringstream os;
    os.precision(17);
    os << "t,d_minus,d_plus,ut_norm\n";
    for (Index i = 0; i < trace.t.size(); ++i) {
      os << trace.t(i) << "," << trace.d_minus(i) << "," << trace.d_plus(i) << ","
         << trace.ut_norm(i) << "\n";
    }
    write_text(dir / "slice_trace.csv", os.str());
  }
  const json j =
      doublelayer_report(cfg, sol, fam.certificate, res, res_scale, split_defect_rel,
                         probe, v0_probe.min_deficit, holder_worst, tail_sup,
                         slab_margin, trace, j0);
  if (cfg.emit_json) emit_json(dir / "verification.json", j);
  return all_checks_pass(j["checks"]) ? kExitOk : kExitCheckFailed;
}

namespace {

RunConfig config_from_report(const json& report) {
  RunConfig cfg;
  const json& c = report.at("config");
  cfg.potential = c.at("potential").get<std::string>();
  cfg.eps = c.at("eps").get<double>();
  cfg.beta = c.at("beta").get<double>();
  cfg.variant = c.at("variant").get<std::string>();
  cfg.seed = c.at("seed").get<std::uint64_t>();
  cfg.residual_tol = c.at("residual_tol").get<double>();
  cfg.weps_knots = c.at("weps_knots").get<std::string>();
  cfg.probe_trials = c.at("probe_trials").get<int>();
  return cfg;
}

// Recomputes the checks of a stored hetero run.
json reverify_hetero(const fs::path& dir, const json& report) {
  RunConfig cfg = config_from_report(report);
  PotentialPtr pot = make_potential(cfg.potential, cfg.eps, cfg.beta.value_or(1.0),
                                    cfg.weps_knots == "squared" ? WepsArgMode::kSquared
                                                                : WepsArgMode::kLiteral);
  Profile1D p = read_profile_binary(dir / "hetero_profile.efk1", pot);
  p.beta = *cfg.beta;
  const double res = residual_ode(p);
  const double bound = transition_cost_bound(*pot, *cfg.beta);
  const auto seg = min_transition_segment_action(p, 0.25 * pot->well_radius());
  const auto fit = try_fit_decay_rate(p);

  json checks;
  checks["converged"] = report.at("checks").at("converged");  // not recomputable
  checks["residual_below_tol"] = res <= cfg.residual_tol;
  checks["segment_action_above_bound"] = !seg || *seg >= bound;
  checks["decay_matches_linearization"] =
      !fit || !fit->resolved || fit->oscillatory ||
      std::abs(fit->k - fit->k_lin) <= 0.05 * fit->k_lin;
  return checks;
}

json reverify_certificate(const fs::path& dir, const json& report) {
  RunConfig cfg = config_from_report(report);
  PotentialPtr pot = make_potential(cfg.potential, cfg.eps, cfg.beta.value_or(1.0));
  std::vector<MinimalHeteroclinic> minus, plus;
  for (const auto& f : report.at("members")) {
    Profile1D p = read_profile_binary(dir / f.get<std::string>(), pot);
    p.beta = *cfg.beta;
    MinimalHeteroclinic e;
    e.profile = std::move(p);
    e.action = action_1d(e.profile);
    e.converged = true;
    const auto w = try_winding_sign(e.profile);
    if (!w) throw FormatError("stored member unclassifiable");
    (*w == Winding::kMinus ? minus : plus).push_back(std::move(e));
  }
  json checks;
  checks["families_nonempty"] = !minus.empty() && !plus.empty();
  if (minus.empty() || plus.empty()) return checks;
  const Grid1D grid = minus.front().profile.grid;
  const Profile1D arc = arc_comparison_map(cfg.eps, grid, pot, *cfg.beta);
  const SeparationCertificate cert = certificate_from_members(
      cfg.eps, *cfg.beta, std::move(minus), std::move(plus), arc);
  checks["d_min_positive"] = cert.d_min > 0.0;
  checks["d_min_above_lower_bound"] = cert.d_min >= cert.lower_bound;
  checks["min_modulus_above_half"] = cert.min_modulus >= 0.5;
  checks["wizz_certification"] = cert.full_action_path || cert.segment_form_ok;
  checks["reflection_closure"] = cert.reflection_closure;
  checks["j_min_below_arc_action"] = cert.j_min <= cert.arc_action;
  return checks;
}

json reverify_doublelayer(const fs::path& dir, const json& report) {
  RunConfig cfg = config_from_report(report);
  PotentialPtr pot = make_potential(cfg.potential, cfg.eps, cfg.beta.value_or(1.0),
                                    cfg.weps_knots == "squared" ? WepsArgMode::kSquared
                                                                : WepsArgMode::kLiteral);
  const OperatorVariant variant = variant_from_name(cfg.variant);
  Field2D f = read_field_binary(dir / "field.efk2", pot, variant);
  f.beta = *cfg.beta;
  f.coeffs = OperatorCoeffs::for_variant(variant, *cfg.beta);

  const double res = residual_pde(f);
  const double res_scale = residual_scale(f);
  const double tail = uniform_well_convergence(f);
  const double j_min = report.at("values").at("j_min").get<double>();
  const double e_total = energy_2d(f);
  const double jj = action_functional_J(f, j_min);
  const double split = std::abs(e_total - (jj + 2.0 * f.grid.t_half_length * j_min)) /
                       std::max(1.0, e_total);
  const ProbeResult probe = minimality_probe(f, cfg.seed, cfg.probe_trials);

  json checks;
  checks["converged"] = report.at("checks").at("converged");
  checks["residual_below_tol"] = res <= cfg.residual_tol * res_scale;
  checks["splitting_identity_1pct"] = split <= 0.01;
  checks["single_tube_crossing"] = report.at("checks").at("single_tube_crossing");
  checks["ut_decays_to_ends"] = report.at("checks").at("ut_decays_to_ends");
  checks["probe_deficit_nonnegative"] = probe.min_deficit >= -1e-8 * probe.scale;
  checks["v0_probe_finds_descent"] = report.at("checks").at("v0_probe_finds_descent");
  checks["holder_bound"] = report.at("checks").at("holder_bound");
  checks["slab_bound_all_slices"] = report.at("checks").at("slab_bound_all_slices");
  checks["tail_below_1e3"] = tail <= 1e-3;
  return checks;
}

}  // namespace

int cmd_verify(const RunConfig& cfg, const std::vector<std::string>& paths) {
  (void)cfg;
  if (paths.empty()) throw ConfigError("verify: needs at least one artifact directory");
  bool any = false;
  bool all_match = true;
  for (const std::string& p : paths) {
    const fs::path dir(p);
    if (!fs::exists(dir)) {
      std::cerr << "verify: no such path: " << p << "\n";
      return kExitNoInput;
    }
    for (const auto& name : {"hetero.json", "certificate.json", "verification.json"}) {
      const fs::path jp = dir / name;
      if (!fs::exists(jp)) continue;
      any = true;
      json report;
      try {
        report = json::parse(read_text(jp));
      } catch (const json::exception& e) {
        std::cerr << "verify: bad JSON in " << jp << ": " << e.what() << "\n";
        return kExitFormat;
      }
      json recomputed;
      try {
        const std::string kind = report.value("kind", "");
        if (kind == "hetero") {
          recomputed = reverify_hetero(dir, report);
        } else if (kind == "separation_certificate") {
          recomputed = reverify_certificate(dir, report);
        } else if (kind == "doublelayer") {
          recomputed = reverify_doublelayer(dir, report);
        } else {
          std::cerr << "verify: unknown report kind in " << jp << "\n";
          return kExitFormat;
        }
      } catch (const FormatError& e) {
        std::cerr << "verify: " << e.what() << "\n";
        return kExitFormat;
      } catch (const IoError& e) {
        std::cerr << "verify: " << e.what() << "\n";
        return kExitNoInput;
      }
      const json& stored = report.at("checks");
      for (const auto& [key, val] : recomputed.items()) {
        const bool stored_pass = stored.contains(key) && stored.at(key).get<bool>();
        if (val.get<bool>() != stored_pass) {
          std::cerr << "verify: check '" << key << "' differs in " << jp << " (stored "
                    << stored_pass << ", recomputed " << val.get<bool>() << ")\n";
          all_match = false;
        }
      }
    }
  }
  if (!any) {
    std::cerr << "verify: no artifacts found\n";
    return kExitNoInput;
  }
  return all_match ? kExitOk : kExitCheckFailed;
}

namespace {

void flatten_json(const std::string& prefix, const json& j,
                  std::vector<std::pair<std::string, double>>& out) {
  if (j.is_number()) {
    out.emplace_back(prefix, j.get<double>());
  } else if (j.is_boolean()) {
    out.emplace_back(prefix, j.get<bool>() ? 1.0 : 0.0);
  } else if (j.is_object()) {
    for (const auto& [k, v] : j.items()) {
      flatten_json(prefix.empty() ? k : prefix + "." + k, v, out);
    }
  }
}

}  // namespace

int cmd_report(const RunConfig& cfg, const std::vector<std::string>& paths) {
  std::vector<std::string> roots = paths;
  if (roots.empty()) roots.push_back(out_root(cfg).string());
  std::vector<std::pair<std::string, std::vector<std::pair<std::string, double>>>> rows;
  for (const std::string& r : roots) {
    if (!fs::exists(r)) {
      std::cerr << "report: no such path: " << r << "\n";
      return kExitNoInput;
    }
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(r)) {
      if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      json j;
      try {
        j = json::parse(read_text(f));
      } catch (const json::exception&) {
        continue;  // not a report
      }
      std::vector<std::pair<std::string, double>> flat;
      flatten_json("", j, flat);
      rows.emplace_back(f.string(), std::move(flat));
    }
  }
  if (rows.empty()) {
    std::cerr << "report: no JSON reports found\n";
    return kExitNoInput;
  }
  std::ostringstream os;
  os.precision(17);
  os << "file,key,value\n";
  for (const auto& [file, flat] : rows) {
    for (const auto& [k, v] : flat) os << file << "," << k << "," << v << "\n";
  }
  const fs::path out = out_root(cfg) / "report.csv";
  write_text(out, os.str());
  std::cout << out.string() << "\n";
  return kExitOk;
}

std::string usage_text() {
  return "usage: efkl <hetero|separation|doublelayer|verify|report> [--config file]\n"
         "            [--key value ...] [paths...]\n"
         "\n"
         "commands:\n"
         "  hetero       minimize the 1D action; writes profile + decay report\n"
         "  separation   build the F-/F+ families and the separation certificate\n"
         "  doublelayer  minimize the 2D energy; writes field + verification report\n"
         "  verify       re-run the stored checks on saved artifacts\n"
         "  report       merge JSON reports under a directory into report.csv\n"
         "\n"
         "common keys: potential eps beta L n T nt nx tol_g tol_e residual_tol\n"
         "             max_iters seed variant a11 a12 a22 b1 b2 out emit_csv\n"
         "             emit_json emit_binary weps_knots probe_trials certificate\n"
         "             resume sweep continuation\n"
         "environment: EFKL_OUT overrides the output root\n";
}

namespace {

int dispatch(const std::string& command, const RunConfig& cfg,
             const std::vector<std::string>& positional) {
  if (command == "hetero") return cmd_hetero(cfg);
  if (command == "separation") return cmd_separation(cfg);
  if (command == "doublelayer") return cmd_doublelayer(cfg);
  if (command == "verify") return cmd_verify(cfg, positional);
  if (command == "report") return cmd_report(cfg, positional);
  throw ConfigError("unknown command: " + command);
}

std::vector<double> parse_sweep_values(const std::string& spec, std::string* key) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos) throw ConfigError("sweep: expected key=lo:hi:step");
  *key = spec.substr(0, eq);
  if (*key != "eps" && *key != "beta") throw ConfigError("sweep: key must be eps or beta");
  const std::string range = spec.substr(eq + 1);
  const auto c1 = range.find(':');
  const auto c2 = range.find(':', c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos) {
    throw ConfigError("sweep: expected key=lo:hi:step");
  }
  const double lo = std::stod(range.substr(0, c1));
  const double hi = std::stod(range.substr(c1 + 1, c2 - c1 - 1));
  const double step = std::stod(range.substr(c2 + 1));
  if (!(step > 0.0) || hi < lo) throw ConfigError("sweep: bad range");
  std::vector<double> vals;
  for (double v = lo; v <= hi + 1e-12; v += step) vals.push_back(v);
  return vals;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  try {
    if (args.empty()) {
      std::cerr << usage_text();
      return kExitUsage;
    }
    const std::string command = args[0];
    if (command == "help" || command == "--help" || command == "-h") {
      std::cout << usage_text();
      return kExitOk;
    }

    std::map<std::string, std::string> kv;
    std::vector<std::string> rest(args.begin() + 1, args.end());
    // --config is consumed first so explicit flags override file values.
    std::vector<std::string> filtered;
    for (size_t i = 0; i < rest.size(); ++i) {
      if (rest[i] == "--config") {
        if (i + 1 >= rest.size()) throw ConfigError("missing value for --config");
        for (const auto& [k, v] : read_config_file(rest[++i])) kv[k] = v;
      } else {
        filtered.push_back(rest[i]);
      }
    }
    const std::vector<std::string> positional = apply_cli_overrides(kv, filtered);
    RunConfig cfg = parse_config(kv);
    validate(cfg);

    if (!cfg.sweep.empty() && (command == "hetero" || command == "separation")) {
      std::string key;
      const std::vector<double> vals = parse_sweep_values(cfg.sweep, &key);
      std::vector<std::future<int>> jobs;
      for (double v : vals) {
        RunConfig job_cfg = cfg;
        job_cfg.sweep.clear();
        if (key == "eps") {
          job_cfg.eps = v;
        } else {
          job_cfg.beta = v;
        }
        std::ostringstream sub;
        sub.precision(6);
        sub << out_root(cfg).string() << "/sweep_" << key << "_" << v;
        job_cfg.out_dir = sub.str();
        job_cfg.out_resolved = true;
        jobs.push_back(std::async(std::launch::async, [job_cfg, command] {
          return dispatch(command, job_cfg, {});
        }));
      }
      int worst = kExitOk;
      for (auto& jb : jobs) worst = std::max(worst, jb.get());
      return worst;
    }

    return dispatch(command, cfg, positional);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n" << usage_text();
    return kExitUsage;
  } catch (const InvalidParameter& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFormat;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNoInput;
  } catch (const SolverFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolverFailure;
  } catch (const SeparationNotFound& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSeparationNotFound;
  }
}

}  // namespace efk
