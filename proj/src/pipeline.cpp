#include "nilheat/pipeline.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "nilheat/errors.hpp"

namespace nilheat {

using ordered_json = nlohmann::ordered_json;

std::string mode_str(Mode m) {
  switch (m) {
    case Mode::Analyze:
      return "analyze";
    case Mode::Simulate:
      return "simulate";
    default:
      return "full";
  }
}

namespace {

std::string rat_list(const std::vector<Rational>& v) {
  std::string s = "(";
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += rat_str(v[i]);
  }
  return s + ")";
}

std::string int_list(const std::vector<int>& v) {
  std::string s = "(";
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(v[i]);
  }
  return s + ")";
}

ordered_json field_json(const VectorField& f) {
  ordered_json a = ordered_json::array();
  for (const auto& p : f.comp) a.push_back(p.str());
  return a;
}

ordered_json tests_json(const std::vector<TestResult>& tests) {
  ordered_json a = ordered_json::array();
  for (const auto& t : tests) {
    ordered_json o;
    o["name"] = t.name;
    o["verdict"] = verdict_str(t.verdict);
    o["detail"] = t.detail;
    a.push_back(o);
  }
  return a;
}

// Endpoint moment agreement between the two integration schemes: max over
// component means and covariance entries of |difference| / combined stderr.
PipelineReport::SchemeConsistency scheme_consistency_check(const VectorField& drift,
                                                           const std::vector<VectorField>& diff,
                                                           const std::vector<double>& x0,
                                                           const EnsembleConfig& base) {
  EnsembleConfig ce = base;
  ce.scheme = Scheme::ItoEuler;
  EnsembleConfig ch = base;
  ch.scheme = Scheme::StratHeun;
  ch.seed = base.seed ^ 0xC2B2AE3D27D4EB4Full;
  Ensemble a = simulate_endpoints(drift, diff, x0, ce);
  Ensemble b = simulate_endpoints(drift, diff, x0, ch);

  const int n = a.n;
  auto moments = [n](const Ensemble& e, std::vector<double>& mean, std::vector<double>& mean_se,
                     std::vector<double>& cov, std::vector<double>& cov_se) {
    const double N = static_cast<double>(e.kept);
    mean.assign(n, 0.0);
    for (long long i = 0; i < e.kept; ++i)
      for (int j = 0; j < n; ++j) mean[j] += e.row(i)[j];
    for (int j = 0; j < n; ++j) mean[j] /= N;
    cov.assign(n * n, 0.0);
    std::vector<double> m22(n * n, 0.0);
    for (long long i = 0; i < e.kept; ++i) {
      const double* r = e.row(i);
      for (int j = 0; j < n; ++j)
        for (int l = j; l < n; ++l) {
          double p = (r[j] - mean[j]) * (r[l] - mean[l]);
          cov[j * n + l] += p;
          m22[j * n + l] += p * p;
        }
    }
    mean_se.assign(n, 0.0);
    cov_se.assign(n * n, 0.0);
    for (int j = 0; j < n; ++j)
      for (int l = j; l < n; ++l) {
        cov[j * n + l] /= N;
        m22[j * n + l] /= N;
        double var_of_cov = (m22[j * n + l] - cov[j * n + l] * cov[j * n + l]) / N;
        cov_se[j * n + l] = std::sqrt(std::max(var_of_cov, 0.0));
      }
    for (int j = 0; j < n; ++j) mean_se[j] = std::sqrt(cov[j * n + j] / N);
  };

  std::vector<double> ma, sa, ca, csa, mb, sb, cb, csb;
  moments(a, ma, sa, ca, csa);
  moments(b, mb, sb, cb, csb);

  PipelineReport::SchemeConsistency out;
  out.n_paths = base.n_paths;
  for (int j = 0; j < n; ++j) {
    double se = std::sqrt(sa[j] * sa[j] + sb[j] * sb[j]);
    if (se > 0) out.max_mean_sigma = std::max(out.max_mean_sigma, std::fabs(ma[j] - mb[j]) / se);
  }
  for (int j = 0; j < n; ++j)
    for (int l = j; l < n; ++l) {
      double se = std::sqrt(csa[j * n + l] * csa[j * n + l] + csb[j * n + l] * csb[j * n + l]);
      if (se > 0)
        out.max_cov_sigma =
            std::max(out.max_cov_sigma, std::fabs(ca[j * n + l] - cb[j * n + l]) / se);
    }
  out.pass = out.max_mean_sigma < 4.0 && out.max_cov_sigma < 4.0;
  return out;
}

}  // namespace

PipelineReport run_pipeline(const ProblemSpec& spec, Mode mode, const std::string& out_dir) {
  PipelineReport rep;
  rep.mode = mode;
  const int n = spec.dim;

  // --- symbolic stages -----------------------------------------------------
  rep.filtration = compute_filtration(spec.fields, spec.x0, spec.weight_cap, spec.rank_tol,
                                      RankMode::Float, spec.taylor_degree);
  if (!rep.filtration.full_rank()) {
    throw HormanderUndecided(
        "bracket span at the base point has dimension " +
        std::to_string(rep.filtration.dims.empty() ? 0 : rep.filtration.dims.back()) + " < " +
        std::to_string(n) + " at weight cap " + std::to_string(spec.weight_cap) +
        "; raise weight_cap if the system is expected to satisfy the full-rank condition");
  }
  rep.chart = build_adapted_chart(spec.fields, rep.filtration);
  rep.chart_check = verify_adapted(rep.filtration, rep.chart);
  rep.nilpotent = nilpotent_approximation(spec.fields, rep.chart, rep.filtration);
  rep.homogeneity_ok = check_homogeneity(rep.nilpotent, Rational(1, 2)) &&
                       check_homogeneity(rep.nilpotent, Rational(1, 3)) &&
                       check_homogeneity(rep.nilpotent, Rational(2));
  rep.nilpotency_ok = check_nilpotency(rep.nilpotent);
  std::vector<VectorField> transformed;
  for (const auto& f : spec.fields) transformed.push_back(transform_field(f, rep.chart));
  rep.lie_equality = lie_algebra_equality_check(transformed, rep.nilpotent, rep.filtration.step,
                                            std::max(rep.chart.trunc_deg, rep.filtration.step));

  PolySystem original_centered;
  original_centered.drift = spec.fields[0].shifted(spec.x0);
  for (int i = 1; i <= spec.k; ++i)
    original_centered.controlled.push_back(spec.fields[i].shifted(spec.x0));
  rep.classification =
      classify(original_centered, rep.nilpotent, true, spec.weight_cap, spec.rank_tol);

  // --- Monte-Carlo stages --------------------------------------------------
  Ensemble diagonal_ensemble;
  if (mode != Mode::Analyze) {
    PolySystem napprox{rep.nilpotent.drift, rep.nilpotent.controlled};
    McConfig mc;
    mc.seed = spec.seed;
    mc.rollouts = spec.control_rollouts;
    mc.bound = spec.control_bound;
    mc.switches = spec.control_switches;
    mc.horizon = 1.0;
    rep.reachability = mc_reachability(napprox, rep.nilpotent.weights, mc);

    EnsembleConfig ec;
    ec.seed = spec.seed;
    ec.n_paths = spec.paths;
    ec.steps = spec.steps;
    ec.t_final = 1.0;
    std::vector<double> origin(n, 0.0);
    diagonal_ensemble =
        simulate_endpoints(rep.nilpotent.drift, rep.nilpotent.controlled, origin, ec);
    DiagonalDensity dd;
    dd.kept = diagonal_ensemble.kept;
    dd.discarded = diagonal_ensemble.discarded;
    dd.density = density_at_point(diagonal_ensemble, origin, rep.nilpotent.weights,
                                  spec.h_schedule);
    dd.advisory = rep.classification.nilpotent != Verdict::Controllable;
    rep.q0 = dd;

    CompiledField chart_map = compile_field(VectorField(rep.chart.forward));
    rep.scaling = scaling_exponent_fit(original_centered.drift, original_centered.controlled,
                                       rep.nilpotent.weights, spec.t_grid, ec, &chart_map);

    if (mode == Mode::Full) {
      rep.identity_check =
          verify_scaling_identity(rep.nilpotent, spec.scaling_eps, 1.0, origin, ec);
      rep.scheme_consistency = scheme_consistency_check(
          original_centered.drift, original_centered.controlled, origin, ec);
    }
  }

  // --- render --------------------------------------------------------------
  const Filtration& filt = rep.filtration;
  std::string t;
  auto line = [&t](const std::string& s) {
    t += s;
    t += '\n';
  };

  line("system analysis report");
  line("======================");
  line("");
  line("[input]");
  line("mode: " + mode_str(mode));
  line("dim: " + std::to_string(n));
  line("k: " + std::to_string(spec.k));
  {
    std::string s = "f0 =";
    for (size_t j = 0; j < spec.f0_exprs.size(); ++j)
      s += (j ? ", " : " ") + spec.f0_exprs[j];
    line(s);
    for (int i = 0; i < spec.k; ++i) {
      s = "f" + std::to_string(i + 1) + " =";
      for (size_t j = 0; j < spec.f_exprs[i].size(); ++j)
        s += (j ? ", " : " ") + spec.f_exprs[i][j];
      line(s);
    }
  }
  line("x0: " + rat_list(spec.x0));
  line("weight_cap: " + std::to_string(spec.weight_cap));
  line("taylor_degree: " + std::to_string(spec.taylor_degree));
  line("rank_tol: " + format_g17(spec.rank_tol));
  line("adjust_divergence: " + std::string(spec.adjust_divergence ? "true" : "false"));
  line("");

  line("[filtration]");
  {
    std::string s = "layer dims:";
    for (size_t i = 0; i < filt.dims.size(); ++i)
      s += " d_" + std::to_string(i + 1) + "=" + std::to_string(filt.dims[i]);
    line(s);
  }
  line("full-rank bracket condition: satisfied");
  line("step m: " + std::to_string(filt.step));
  line("coordinate weights: " + int_list(filt.weights));
  line("homogeneity order N: " + std::to_string(filt.homogeneity_order));
  for (int j = 0; j < n; ++j)
    line("basis y" + std::to_string(j + 1) + " <- " + bracket_str(filt.basis[j].tree) +
         " (weight " + std::to_string(filt.basis[j].weight) + ")");
  line("");

  line("[chart]");
  {
    bool linear = true;
    for (const auto& p : rep.chart.forward)
      if (p.degree() > 1) linear = false;
    line(std::string("shape: ") + (linear ? "linear" : "polynomial with corrections"));
    line("truncation degree: " + std::to_string(rep.chart.trunc_deg));
    for (int j = 0; j < n; ++j)
      line("y" + std::to_string(j + 1) + " = " + rep.chart.forward[j].str() +
           "   (in u = x - x0)");
    line(std::string("adaptedness: span=") + (rep.chart_check.span_ok ? "pass" : "FAIL") +
         " derivative=" + (rep.chart_check.derivative_ok ? "pass" : "FAIL") +
         " roundtrip=" + (rep.chart_check.roundtrip_ok ? "pass" : "FAIL"));
    for (const auto& w : rep.chart_check.failures) line("  failure: " + w.description);
  }
  line("");

  line("[nilpotent approximation]");
  line("(coordinates below are the chart coordinates; x_j denotes y_j)");
  line("fhat0 = " + rep.nilpotent.drift.str());
  for (int i = 0; i < spec.k; ++i)
    line("fhat" + std::to_string(i + 1) + " = " + rep.nilpotent.controlled[i].str());
  line(std::string("dilation homogeneity (eps = 1/2, 1/3, 2): ") +
       (rep.homogeneity_ok ? "pass (exact)" : "FAIL"));
  line(std::string("nilpotency of the generated algebra: ") +
       (rep.nilpotency_ok ? "pass (exact)" : "FAIL"));
  line(std::string("lie-layer dimensions against original: ") +
       (rep.lie_equality.ok ? "pass" : "FAIL") + " (" + rep.lie_equality.detail + ")");
  line("");

  line("[controllability]");
  auto print_tests = [&](const std::vector<TestResult>& tests) {
    for (const auto& tr : tests)
      line("  " + tr.name + ": " + verdict_str(tr.verdict) + " -- " + tr.detail);
  };
  line("original system: " + verdict_str(rep.classification.original));
  print_tests(rep.classification.original_tests);
  line("nilpotent approximation: " + verdict_str(rep.classification.nilpotent));
  print_tests(rep.classification.nilpotent_tests);
  line("classification: " + case_label_str(rep.classification.label));
  line("rationale: " + rep.classification.rationale);
  line("");

  if (mode == Mode::Analyze) {
    line("[simulation]");
    line("skipped (analyze mode runs the symbolic stages only)");
    line("rng: unused");
    line("");
  } else {
    line("[simulation]");
    line("seed: " + std::to_string(spec.seed));
    line("paths: " + std::to_string(spec.paths));
    line("steps per unit time at t=1: " + std::to_string(spec.steps) + " (dt = t/" +
         std::to_string(spec.steps) + ")");
    {
      const CoverageReport& cr = *rep.reachability;
      line("reachability probe (nilpotent system, horizon 1, seed " + std::to_string(spec.seed) +
           "):");
      line("  rollouts: " + std::to_string(cr.sample_count) + ", kept " +
           std::to_string(cr.kept) + ", discarded " + std::to_string(cr.discarded));
      line("  orthants hit: " + std::to_string(cr.orthants_hit) + "/" +
           std::to_string(cr.orthants_total) + " (coverage " + format_g17(cr.direction_coverage) +
           ")");
      line("  sectors hit: " + std::to_string(cr.sectors_hit) + "/" +
           std::to_string(cr.sectors_total) + " (coverage " + format_g17(cr.sector_coverage) +
           ")");
      line("  scaled endpoint radius: min " + format_g17(cr.min_scaled_radius) + ", q10 " +
           format_g17(cr.radius_q10) + ", median " + format_g17(cr.radius_q50) + ", q90 " +
           format_g17(cr.radius_q90));
    }
    {
      const DiagonalDensity& dd = *rep.q0;
      line("q0(1, 0, 0) estimate (nilpotent system, seed " + std::to_string(spec.seed) + "):");
      line("  paths kept: " + std::to_string(dd.kept) + ", discarded " +
           std::to_string(dd.discarded));
      line("  value: " + format_g17(dd.density.value) + " +- " + format_g17(dd.density.stderr_) +
           " (1 stderr)");
      line("  smallest usable box scale: " + format_g17(dd.density.h_used) + " with " +
           std::to_string(dd.density.n_in) + " hits");
      line(std::string("  usable: ") + (dd.density.ok ? "yes" : "no") +
           (dd.density.note.empty() ? "" : " -- " + dd.density.note));
      line(std::string("  boundary signature: ") + (dd.density.boundary ? "yes" : "no"));
      {
        std::string s = "  one-sided counts (below/above per coordinate):";
        for (int j = 0; j < n; ++j)
          s += " y" + std::to_string(j + 1) + "=" + std::to_string(dd.density.below[j]) + "/" +
               std::to_string(dd.density.above[j]);
        line(s);
      }
      line(std::string("  advisory: ") +
           (dd.advisory ? "yes (nilpotent controllability not established)" : "no"));
    }
    {
      const ScalingFit& sf = *rep.scaling;
      line("scaling fit (original system in chart coordinates, seeds " +
           std::to_string(spec.seed) + "+i*golden):");
      for (const auto& pt : sf.points)
        line("  t=" + format_g17(pt.t) + "  p_hat=" + format_g17(pt.p_hat) + " +- " +
             format_g17(pt.stderr_) + (pt.usable ? "" : "  (unusable)"));
      if (sf.ok) {
        line("  slope: " + format_g17(sf.slope) + " +- " + format_g17(sf.slope_stderr) +
             " (1 stderr)");
        line("  intercept: " + format_g17(sf.intercept));
        line("  r_squared: " + format_g17(sf.r_squared));
        line("  expected exponent -N/2: " + format_g17(-0.5 * static_cast<double>(
                                                 filt.homogeneity_order)));
      } else {
        line("  no exponent fit: " + sf.note);
      }
      if (!sf.note.empty() && sf.ok) line("  note: " + sf.note);
    }
    line("");
    if (mode == Mode::Full) {
      line("[verification]");
      {
        const ScalingIdentityCheck& ic = *rep.identity_check;
        line("scaling identity q0(t,0,x) = eps^N q0(eps^2 t, 0, delta_eps x) at eps=" +
             format_g17(ic.eps) + ", t=" + format_g17(ic.t) + ", x=0:");
        line("  lhs: " + format_g17(ic.lhs) + " +- " + format_g17(ic.lhs_stderr));
        line("  rhs: " + format_g17(ic.rhs) + " +- " + format_g17(ic.rhs_stderr));
        line(std::string("  3-stderr overlap: ") + (ic.pass ? "pass" : "FAIL") +
             (ic.note.empty() ? "" : " -- " + ic.note));
      }
      {
        const PipelineReport::SchemeConsistency& sc = *rep.scheme_consistency;
        line("scheme consistency (ito-euler vs stratonovich-heun, n=" +
             std::to_string(sc.n_paths) + ", t=1):");
        line("  max |mean difference| / stderr: " + format_g17(sc.max_mean_sigma));
        line("  max |covariance difference| / stderr: " + format_g17(sc.max_cov_sigma));
        line(std::string("  within 4 stderr: ") + (sc.pass ? "pass" : "FAIL"));
      }
      line("");
    }
  }

  line("[artifacts]");
  if (out_dir.empty()) {
    line("none (no output directory)");
  } else {
    line("report.txt");
    line("summary.json");
    if (mode != Mode::Analyze) {
      line("scaling_fit.csv");
      line("endpoints.csv (nilpotent-system endpoints at t=1, " +
           std::to_string(diagonal_ensemble.kept) + " rows)");
    }
  }
  rep.text = t;

  // --- JSON summary (same key set as the text report) ----------------------
  ordered_json j;
  j["mode"] = mode_str(mode);
  {
    ordered_json in;
    in["dim"] = n;
    in["k"] = spec.k;
    in["f0"] = spec.f0_exprs;
    in["f"] = spec.f_exprs;
    ordered_json x0 = ordered_json::array();
    for (const auto& c : spec.x0) x0.push_back(rat_str(c));
    in["x0"] = x0;
    in["weight_cap"] = spec.weight_cap;
    in["taylor_degree"] = spec.taylor_degree;
    in["rank_tol"] = spec.rank_tol;
    in["adjust_divergence"] = spec.adjust_divergence;
    in["seed"] = spec.seed;
    in["paths"] = spec.paths;
    in["steps"] = spec.steps;
    in["t_grid"] = spec.t_grid;
    in["h_schedule"] = spec.h_schedule;
    ordered_json ctl;
    ctl["bound"] = spec.control_bound;
    ctl["switches"] = spec.control_switches;
    ctl["rollouts"] = spec.control_rollouts;
    in["control"] = ctl;
    in["scaling_eps"] = spec.scaling_eps;
    j["input"] = in;
  }
  {
    ordered_json f;
    f["dims"] = filt.dims;
    f["step"] = filt.step;
    f["weights"] = filt.weights;
    f["homogeneity_order"] = filt.homogeneity_order;
    ordered_json basis = ordered_json::array();
    for (const auto& b : filt.basis) basis.push_back(bracket_str(b.tree));
    f["basis"] = basis;
    f["hormander"] = true;
    j["filtration"] = f;
  }
  {
    ordered_json c;
    ordered_json fwd = ordered_json::array();
    for (const auto& p : rep.chart.forward) fwd.push_back(p.str());
    c["forward"] = fwd;
    c["trunc_deg"] = rep.chart.trunc_deg;
    ordered_json v;
    v["span"] = rep.chart_check.span_ok;
    v["derivative"] = rep.chart_check.derivative_ok;
    v["roundtrip"] = rep.chart_check.roundtrip_ok;
    ordered_json fails = ordered_json::array();
    for (const auto& w : rep.chart_check.failures) fails.push_back(w.description);
    v["failures"] = fails;
    c["verification"] = v;
    j["chart"] = c;
  }
  {
    ordered_json ns;
    ns["drift"] = field_json(rep.nilpotent.drift);
    ordered_json ctl = ordered_json::array();
    for (const auto& f : rep.nilpotent.controlled) ctl.push_back(field_json(f));
    ns["controlled"] = ctl;
    ns["homogeneity_ok"] = rep.homogeneity_ok;
    ns["nilpotency_ok"] = rep.nilpotency_ok;
    ordered_json le;
    le["ok"] = rep.lie_equality.ok;
    le["detail"] = rep.lie_equality.detail;
    ns["lie_equality"] = le;
    j["nilpotent"] = ns;
  }
  {
    ordered_json c;
    ordered_json orig;
    orig["verdict"] = verdict_str(rep.classification.original);
    orig["tests"] = tests_json(rep.classification.original_tests);
    c["original"] = orig;
    ordered_json nil;
    nil["verdict"] = verdict_str(rep.classification.nilpotent);
    nil["tests"] = tests_json(rep.classification.nilpotent_tests);
    c["nilpotent"] = nil;
    c["hormander"] = rep.classification.hormander;
    c["classification"] = case_label_str(rep.classification.label);
    c["rationale"] = rep.classification.rationale;
    j["controllability"] = c;
  }
  if (mode == Mode::Analyze) {
    ordered_json s;
    s["rng"] = "unused";
    s["skipped"] = "analyze mode runs the symbolic stages only";
    j["simulation"] = s;
  } else {
    ordered_json s;
    s["seed"] = spec.seed;
    s["paths"] = spec.paths;
    s["steps"] = spec.steps;
    {
      const CoverageReport& cr = *rep.reachability;
      ordered_json r;
      r["time_horizon"] = cr.time_horizon;
      r["sample_count"] = cr.sample_count;
      r["kept"] = cr.kept;
      r["discarded"] = cr.discarded;
      r["orthants_hit"] = cr.orthants_hit;
      r["orthants_total"] = cr.orthants_total;
      r["direction_coverage"] = cr.direction_coverage;
      r["sectors_hit"] = cr.sectors_hit;
      r["sectors_total"] = cr.sectors_total;
      r["sector_coverage"] = cr.sector_coverage;
      r["min_scaled_radius"] = cr.min_scaled_radius;
      r["radius_q10"] = cr.radius_q10;
      r["radius_q50"] = cr.radius_q50;
      r["radius_q90"] = cr.radius_q90;
      s["reachability"] = r;
    }
    {
      const DiagonalDensity& dd = *rep.q0;
      ordered_json q;
      q["kept"] = dd.kept;
      q["discarded"] = dd.discarded;
      q["value"] = dd.density.value;
      q["stderr"] = dd.density.stderr_;
      q["h_used"] = dd.density.h_used;
      q["n_in"] = dd.density.n_in;
      q["usable"] = dd.density.ok;
      q["boundary"] = dd.density.boundary;
      q["below"] = dd.density.below;
      q["above"] = dd.density.above;
      q["note"] = dd.density.note;
      q["advisory"] = dd.advisory;
      s["q0"] = q;
    }
    {
      const ScalingFit& sf = *rep.scaling;
      ordered_json f;
      ordered_json pts = ordered_json::array();
      for (const auto& pt : sf.points) {
        ordered_json p;
        p["t"] = pt.t;
        p["p_hat"] = pt.p_hat;
        p["stderr"] = pt.stderr_;
        p["usable"] = pt.usable;
        pts.push_back(p);
      }
      f["points"] = pts;
      f["ok"] = sf.ok;
      f["slope"] = sf.slope;
      f["slope_stderr"] = sf.slope_stderr;
      f["intercept"] = sf.intercept;
      f["r_squared"] = sf.r_squared;
      f["expected_exponent"] = -0.5 * static_cast<double>(filt.homogeneity_order);
      f["note"] = sf.note;
      s["scaling"] = f;
    }
    j["simulation"] = s;
    if (mode == Mode::Full) {
      ordered_json v;
      {
        const ScalingIdentityCheck& ic = *rep.identity_check;
        ordered_json i;
        i["eps"] = ic.eps;
        i["t"] = ic.t;
        i["lhs"] = ic.lhs;
        i["lhs_stderr"] = ic.lhs_stderr;
        i["rhs"] = ic.rhs;
        i["rhs_stderr"] = ic.rhs_stderr;
        i["pass"] = ic.pass;
        i["note"] = ic.note;
        v["scaling_identity"] = i;
      }
      {
        const PipelineReport::SchemeConsistency& sc = *rep.scheme_consistency;
        ordered_json c;
        c["n_paths"] = sc.n_paths;
        c["max_mean_sigma"] = sc.max_mean_sigma;
        c["max_cov_sigma"] = sc.max_cov_sigma;
        c["pass"] = sc.pass;
        v["scheme_consistency"] = c;
      }
      j["verification"] = v;
    }
  }
  rep.json = j.dump(2);
  rep.json += '\n';

  // --- artifacts -----------------------------------------------------------
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    auto write_file = [&](const std::string& name, const std::string& content) {
      std::ofstream out(std::filesystem::path(out_dir) / name, std::ios::binary);
      if (!out) throw ValidationError("cannot write artifact: " + name);
      out << content;
    };
    write_file("report.txt", rep.text);
    write_file("summary.json", rep.json);
    if (mode != Mode::Analyze) {
      write_scaling_csv((std::filesystem::path(out_dir) / "scaling_fit.csv").string(),
                        *rep.scaling);
      write_endpoints_csv((std::filesystem::path(out_dir) / "endpoints.csv").string(),
                          diagonal_ensemble);
    }
  }
  // The slope is the headline statistical deliverable; its absence is a
  // quality-gate failure (artifacts above are still written for inspection).
  if (mode != Mode::Analyze && !rep.scaling->ok)
    throw SimulationQuality("scaling exponent fit unusable: " + rep.scaling->note);
  return rep;
}

}  // namespace nilheat
