#include "nilheat/sde.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>

#include "nilheat/errors.hpp"
#include "nilheat/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace nilheat {

ItoSystem stratonovich_to_ito(const VectorField& drift,
                              const std::vector<VectorField>& diffusions) {
  ItoSystem sys;
  sys.diffusions = diffusions;
  const int n = drift.n();
  std::vector<Polynomial> corrected(drift.comp);
  for (const auto& f : diffusions) {
    for (int j = 0; j < n; ++j) {
      // 1/2 * sum_l f^(l) d f^(j) / dx_l == 1/2 * (f applied to f^(j))
      corrected[j] += f.apply(f.comp[j]).scaled(Rational(1, 2));
    }
  }
  sys.drift = VectorField(std::move(corrected));
  return sys;
}

double CompiledPoly::evaluate(const double* x) const {
  double acc = 0.0;
  for (const auto& t : terms) {
    double v = t.coeff;
    for (uint32_t p = 0; p < t.nexp; ++p) {
      double base = x[t.var[p]];
      uint32_t e = t.exp[p];
      while (e--) v *= base;
    }
    acc += v;
  }
  return acc;
}

void CompiledField::evaluate(const double* x, double* out) const {
  for (int j = 0; j < n; ++j) out[j] = comp[j].evaluate(x);
}

CompiledField compile_field(const VectorField& v) {
  CompiledField cf;
  cf.n = v.n();
  cf.comp.resize(cf.n);
  for (int j = 0; j < cf.n; ++j) {
    for (const auto& t : v.comp[j].terms()) {
      CompiledTerm ct{};
      ct.coeff = to_double(t.coeff);
      ct.nexp = 0;
      for (size_t l = 0; l < t.mono.size(); ++l) {
        if (t.mono[l] == 0) continue;
        if (ct.nexp >= 8) throw DomainError("compile_field: more than 8 distinct variables in a monomial");
        ct.var[ct.nexp] = static_cast<uint32_t>(l);
        ct.exp[ct.nexp] = t.mono[l];
        ++ct.nexp;
      }
      cf.comp[j].terms.push_back(ct);
    }
  }
  return cf;
}

namespace {

struct PathWorkspace {
  std::vector<double> x, xp, b, z;
  std::vector<std::vector<double>> g0, g1;
};

// One path of Euler-Maruyama on the Ito form. Draw order per step: all k
// normals first, then the update, so ItoEuler and StratHeun consume identical
// noise for the same (seed, path).
void run_path_euler(const CompiledField& drift, const std::vector<CompiledField>& diff,
                    const std::vector<double>& x0, const EnsembleConfig& cfg, uint64_t index,
                    PathWorkspace& ws, double* out, char* ok) {
  const int n = drift.n;
  const int k = static_cast<int>(diff.size());
  const double dt = cfg.dt();
  const double sq = std::sqrt(dt);
  RngStream rng(cfg.seed, index);
  ws.x = x0;
  double* x = ws.x.data();
  double* b = ws.b.data();
  double* z = ws.z.data();
  double* incr = ws.xp.data();
  for (int s = 0; s < cfg.steps; ++s) {
    for (int i = 0; i < k; ++i) z[i] = rng.next_normal();
    drift.evaluate(x, b);
    for (int j = 0; j < n; ++j) incr[j] = b[j] * dt;
    for (int i = 0; i < k; ++i) {
      diff[i].evaluate(x, ws.g0[i].data());
      const double w = sq * z[i];
      const double* gi = ws.g0[i].data();
      for (int j = 0; j < n; ++j) incr[j] += gi[j] * w;
    }
    for (int j = 0; j < n; ++j) x[j] += incr[j];
  }
  bool finite = true;
  for (int j = 0; j < n; ++j) {
    out[j] = x[j];
    if (!std::isfinite(x[j])) finite = false;
  }
  *ok = finite ? 1 : 0;
}

// One path of Euler-Heun (predictor-corrector) on the Stratonovich form.
void run_path_heun(const CompiledField& drift, const std::vector<CompiledField>& diff,
                   const std::vector<double>& x0, const EnsembleConfig& cfg, uint64_t index,
                   PathWorkspace& ws, double* out, char* ok) {
  const int n = drift.n;
  const int k = static_cast<int>(diff.size());
  const double dt = cfg.dt();
  const double sq = std::sqrt(dt);
  RngStream rng(cfg.seed, index);
  ws.x = x0;
  double* x = ws.x.data();
  double* xp = ws.xp.data();
  double* b = ws.b.data();
  double* z = ws.z.data();
  for (int s = 0; s < cfg.steps; ++s) {
    for (int i = 0; i < k; ++i) z[i] = rng.next_normal();
    drift.evaluate(x, b);
    for (int j = 0; j < n; ++j) xp[j] = x[j] + b[j] * dt;
    for (int i = 0; i < k; ++i) {
      diff[i].evaluate(x, ws.g0[i].data());
      const double w = sq * z[i];
      const double* gi = ws.g0[i].data();
      for (int j = 0; j < n; ++j) xp[j] += gi[j] * w;
    }
    for (int j = 0; j < n; ++j) x[j] += b[j] * dt;
    for (int i = 0; i < k; ++i) {
      diff[i].evaluate(xp, ws.g1[i].data());
      const double w = 0.5 * sq * z[i];
      const double* g0 = ws.g0[i].data();
      const double* g1 = ws.g1[i].data();
      for (int j = 0; j < n; ++j) x[j] += (g0[j] + g1[j]) * w;
    }
  }
  bool finite = true;
  for (int j = 0; j < n; ++j) {
    out[j] = x[j];
    if (!std::isfinite(x[j])) finite = false;
  }
  *ok = finite ? 1 : 0;
}

}  // namespace

Ensemble simulate_endpoints(const VectorField& drift, const std::vector<VectorField>& diffusions,
                            const std::vector<double>& x0, const EnsembleConfig& cfg) {
  const int n = drift.n();
  if (static_cast<int>(x0.size()) != n)
    throw DomainError("simulate_endpoints: start point dimension mismatch");
  if (cfg.n_paths < 1 || cfg.steps < 1 || cfg.t_final <= 0)
    throw ValidationError("simulate_endpoints: invalid ensemble configuration");

  CompiledField cdrift;
  std::vector<CompiledField> cdiff;
  for (const auto& f : diffusions) cdiff.push_back(compile_field(f));
  const bool heun = cfg.scheme == Scheme::StratHeun;
  if (heun) {
    cdrift = compile_field(drift);
  } else {
    cdrift = compile_field(stratonovich_to_ito(drift, diffusions).drift);
  }

  const long long P = cfg.n_paths;
  std::vector<double> raw(static_cast<size_t>(P) * n);
  std::vector<char> ok(P, 0);
  const int k = static_cast<int>(diffusions.size());

  auto body = [&](long long p) {
    PathWorkspace ws;
    ws.x.resize(n);
    ws.xp.resize(n);
    ws.b.resize(n);
    ws.z.resize(std::max(k, 1));
    ws.g0.assign(k, std::vector<double>(n));
    ws.g1.assign(k, std::vector<double>(n));
    if (heun)
      run_path_heun(cdrift, cdiff, x0, cfg, static_cast<uint64_t>(p), ws,
                    raw.data() + static_cast<size_t>(p) * n, &ok[p]);
    else
      run_path_euler(cdrift, cdiff, x0, cfg, static_cast<uint64_t>(p), ws,
                     raw.data() + static_cast<size_t>(p) * n, &ok[p]);
  };

#ifdef _OPENMP
  if (cfg.parallel) {
#pragma omp parallel for schedule(static)
    for (long long p = 0; p < P; ++p) body(p);
  } else
#endif
  {
    for (long long p = 0; p < P; ++p) body(p);
  }

  Ensemble ens;
  ens.n = n;
  ens.requested = P;
  ens.t_final = cfg.t_final;
  for (long long p = 0; p < P; ++p) {
    if (!ok[p]) continue;
    ens.path_index.push_back(p);
    const double* src = raw.data() + static_cast<size_t>(p) * n;
    ens.endpoints.insert(ens.endpoints.end(), src, src + n);
  }
  ens.kept = static_cast<long long>(ens.path_index.size());
  ens.discarded = P - ens.kept;
  if (static_cast<double>(ens.discarded) > cfg.max_discard_fraction * static_cast<double>(P)) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "simulate_endpoints: %lld of %lld paths diverged (> %.2f%% allowed)",
                  ens.discarded, P, 100.0 * cfg.max_discard_fraction);
    throw SimulationQuality(buf);
  }
  return ens;
}

// ---------------------------------------------------------------------------

std::vector<double> default_h_schedule() { return {0.8, 0.6, 0.45, 0.34, 0.25}; }

namespace {

double column_median_abs_dev(const Ensemble& ens, int j, double center) {
  std::vector<double> col(ens.kept);
  for (long long i = 0; i < ens.kept; ++i) col[i] = std::fabs(ens.row(i)[j] - center);
  size_t mid = col.size() / 2;
  std::nth_element(col.begin(), col.begin() + mid, col.end());
  return col[mid];
}

}  // namespace

DensityEstimate density_at_point(const Ensemble& ens, const std::vector<double>& point,
                                 const std::vector<int>& weights,
                                 const std::vector<double>& h_schedule) {
  DensityEstimate de;
  const int n = ens.n;
  if (static_cast<int>(point.size()) != n || static_cast<int>(weights.size()) != n)
    throw DomainError("density_at_point: dimension mismatch");
  if (ens.kept == 0) {
    de.note = "empty ensemble";
    return de;
  }

  de.below.assign(n, 0);
  de.above.assign(n, 0);
  for (long long i = 0; i < ens.kept; ++i) {
    const double* r = ens.row(i);
    for (int j = 0; j < n; ++j) {
      if (r[j] < point[j]) ++de.below[j];
      if (r[j] > point[j]) ++de.above[j];
    }
  }
  for (int j = 0; j < n; ++j) {
    bool lo = de.below[j] == 0, hi = de.above[j] == 0;
    if (lo != hi) de.boundary = true;
  }

  // Data-driven scale: per coordinate, median |x_j - p_j| read back through
  // the dilation (spread^(1/w_j)); combine across coordinates by the median.
  std::vector<double> base(n);
  for (int j = 0; j < n; ++j)
    base[j] = std::pow(column_median_abs_dev(ens, j, point[j]), 1.0 / weights[j]);
  std::vector<double> sorted = base;
  std::sort(sorted.begin(), sorted.end());
  double scale = sorted[n / 2];
  if (scale == 0.0) scale = sorted.back();
  if (scale == 0.0) {
    de.note = "degenerate ensemble: zero spread in every coordinate";
    return de;
  }

  for (double rel : h_schedule) {
    DensityRow row;
    row.h = rel * scale;
    std::vector<double> hw(n);
    double volume = 1.0;
    for (int j = 0; j < n; ++j) {
      hw[j] = std::pow(row.h, weights[j]);
      volume *= 2.0 * hw[j];
    }
    long long hits = 0;
    for (long long i = 0; i < ens.kept; ++i) {
      const double* r = ens.row(i);
      bool in = true;
      for (int j = 0; j < n; ++j) {
        if (std::fabs(r[j] - point[j]) > hw[j]) {
          in = false;
          break;
        }
      }
      if (in) ++hits;
    }
    row.n_in = hits;
    double p = static_cast<double>(hits) / static_cast<double>(ens.kept);
    row.estimate = p / volume;
    row.stderr_ = std::sqrt(p * (1.0 - p) / static_cast<double>(ens.kept)) / volume;
    row.usable = hits >= 30;
    de.rows.push_back(row);
  }

  std::vector<const DensityRow*> usable;
  for (const auto& r : de.rows)
    if (r.usable) usable.push_back(&r);
  if (usable.empty()) {
    de.note = "insufficient hits at every box scale";
    return de;
  }
  const DensityRow* smallest = usable.back();
  for (const auto* r : usable)
    if (r->h < smallest->h) smallest = r;
  de.h_used = smallest->h;
  de.n_in = smallest->n_in;
  if (usable.size() == 1) {
    de.value = smallest->estimate;
    de.stderr_ = smallest->stderr_;
    de.note = "only one usable box scale; no h->0 extrapolation";
    return de;
  }

  // Weighted fit estimate(h) = a + b h^2; report a with its fit error.
  double S0 = 0, S1 = 0, S2 = 0, T0 = 0, T1 = 0;
  for (const auto* r : usable) {
    double se = r->stderr_;
    if (se <= 0) se = std::max(r->estimate * 1e-8, 1e-300);
    double w = 1.0 / (se * se);
    double h2 = r->h * r->h;
    S0 += w;
    S1 += w * h2;
    S2 += w * h2 * h2;
    T0 += w * r->estimate;
    T1 += w * r->estimate * h2;
  }
  double det = S0 * S2 - S1 * S1;
  if (det <= 0) {
    de.value = smallest->estimate;
    de.stderr_ = smallest->stderr_;
    de.note = "degenerate extrapolation fit; reporting smallest usable scale";
    return de;
  }
  double a = (S2 * T0 - S1 * T1) / det;
  de.stderr_ = std::sqrt(S2 / det);
  if (a < 0) {
    de.note = "extrapolated value clamped to 0";
    a = 0.0;
  }
  de.value = a;
  de.ok = true;
  return de;
}

DiagonalDensity estimate_q0_diagonal(const NilpotentSystem& ns, const EnsembleConfig& cfg,
                                     bool verdict_controllable) {
  EnsembleConfig c = cfg;
  c.t_final = 1.0;
  std::vector<double> origin(ns.n, 0.0);
  Ensemble ens = simulate_endpoints(ns.drift, ns.controlled, origin, c);
  DiagonalDensity out;
  out.kept = ens.kept;
  out.discarded = ens.discarded;
  out.density = density_at_point(ens, origin, ns.weights);
  out.advisory = !verdict_controllable;
  return out;
}

ScalingIdentityCheck verify_scaling_identity(const NilpotentSystem& ns, double eps, double t,
                                             const std::vector<double>& x,
                                             const EnsembleConfig& cfg) {
  if (eps <= 0) throw DomainError("verify_scaling_identity: eps must be positive");
  ScalingIdentityCheck chk;
  chk.eps = eps;
  chk.t = t;
  std::vector<double> origin(ns.n, 0.0);

  EnsembleConfig cl = cfg;
  cl.t_final = t;
  Ensemble el = simulate_endpoints(ns.drift, ns.controlled, origin, cl);
  DensityEstimate dl = density_at_point(el, x, ns.weights);

  EnsembleConfig cr = cfg;
  cr.seed = cfg.seed ^ 0x9E3779B97F4A7C15ull;
  cr.t_final = eps * eps * t;
  std::vector<double> xs(ns.n);
  for (int j = 0; j < ns.n; ++j) xs[j] = std::pow(eps, ns.weights[j]) * x[j];
  Ensemble er = simulate_endpoints(ns.drift, ns.controlled, origin, cr);
  DensityEstimate dr = density_at_point(er, xs, ns.weights);

  double factor = std::pow(eps, static_cast<double>(ns.homogeneity_order));
  chk.lhs = dl.value;
  chk.lhs_stderr = dl.stderr_;
  chk.rhs = factor * dr.value;
  chk.rhs_stderr = factor * dr.stderr_;
  if (!dl.ok || !dr.ok) {
    chk.pass = false;
    chk.note = "density estimate unusable: " + (dl.ok ? dr.note : dl.note);
    return chk;
  }
  chk.pass = std::fabs(chk.lhs - chk.rhs) <= 3.0 * (chk.lhs_stderr + chk.rhs_stderr);
  return chk;
}

std::vector<double> default_t_grid() { return {0.05, 0.08, 0.125, 0.2, 0.32, 0.5}; }

Ensemble map_endpoints(const Ensemble& ens, const CompiledField& map) {
  if (map.n != ens.n) throw DomainError("map_endpoints: dimension mismatch");
  Ensemble out = ens;
  for (long long i = 0; i < ens.kept; ++i)
    map.evaluate(ens.row(i), out.endpoints.data() + i * ens.n);
  return out;
}

ScalingFit scaling_exponent_fit(const VectorField& drift,
                                const std::vector<VectorField>& diffusions,
                                const std::vector<int>& weights,
                                const std::vector<double>& t_grid, const EnsembleConfig& cfg,
                                const CompiledField* endpoint_map) {
  ScalingFit fit;
  const int n = drift.n();
  std::vector<double> origin(n, 0.0);
  for (size_t i = 0; i < t_grid.size(); ++i) {
    EnsembleConfig c = cfg;
    c.t_final = t_grid[i];
    c.seed = cfg.seed + (i + 1) * 0x9E3779B97F4A7C15ull;
    Ensemble ens = simulate_endpoints(drift, diffusions, origin, c);
    if (endpoint_map) ens = map_endpoints(ens, *endpoint_map);
    DensityEstimate de = density_at_point(ens, origin, weights);
    ScalingFitPoint pt;
    pt.t = t_grid[i];
    pt.p_hat = de.value;
    pt.stderr_ = de.stderr_;
    pt.usable = de.ok && de.value > 0 && de.value > 2.0 * de.stderr_;
    if (!pt.usable) {
      if (!fit.note.empty()) fit.note += "; ";
      char buf[96];
      std::snprintf(buf, sizeof(buf), "p_hat at t=%g statistically indistinguishable from 0",
                    t_grid[i]);
      fit.note += de.ok ? buf : ("density at t=" + std::to_string(t_grid[i]) + ": " + de.note);
    }
    fit.points.push_back(pt);
  }

  double S0 = 0, S1 = 0, S2 = 0, T0 = 0, T1 = 0;
  int used = 0;
  for (const auto& pt : fit.points) {
    if (!pt.usable) continue;
    ++used;
    double y = std::log(pt.p_hat);
    double sy = pt.stderr_ / pt.p_hat;
    double w = 1.0 / (sy * sy);
    double u = std::log(pt.t);
    S0 += w;
    S1 += w * u;
    S2 += w * u * u;
    T0 += w * y;
    T1 += w * u * y;
  }
  if (used < 2) {
    if (!fit.note.empty()) fit.note += "; ";
    fit.note += "fewer than two usable densities; no exponent fit";
    return fit;
  }
  double det = S0 * S2 - S1 * S1;
  fit.slope = (S0 * T1 - S1 * T0) / det;
  fit.intercept = (S2 * T0 - S1 * T1) / det;
  fit.slope_stderr = std::sqrt(S0 / det);
  double ybar = T0 / S0, ss_res = 0, ss_tot = 0;
  for (const auto& pt : fit.points) {
    if (!pt.usable) continue;
    double y = std::log(pt.p_hat);
    double sy = pt.stderr_ / pt.p_hat;
    double w = 1.0 / (sy * sy);
    double yhat = fit.intercept + fit.slope * std::log(pt.t);
    ss_res += w * (y - yhat) * (y - yhat);
    ss_tot += w * (y - ybar) * (y - ybar);
  }
  fit.r_squared = ss_tot > 0 ? std::max(0.0, std::min(1.0, 1.0 - ss_res / ss_tot)) : 1.0;
  fit.ok = true;
  return fit;
}

// ---------------------------------------------------------------------------

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_endpoints_csv(const std::string& path, const Ensemble& ens) {
  FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw ValidationError("cannot open for writing: " + path);
  std::fputs("path_index", f);
  for (int j = 1; j <= ens.n; ++j) std::fprintf(f, ",x%d", j);
  std::fputc('\n', f);
  for (long long i = 0; i < ens.kept; ++i) {
    std::fprintf(f, "%lld", ens.path_index[i]);
    const double* r = ens.row(i);
    for (int j = 0; j < ens.n; ++j) std::fprintf(f, ",%.17g", r[j]);
    std::fputc('\n', f);
  }
  std::fclose(f);
}

void write_scaling_csv(const std::string& path, const ScalingFit& fit) {
  FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw ValidationError("cannot open for writing: " + path);
  std::fputs("t,p_hat,stderr\n", f);
  for (const auto& pt : fit.points)
    std::fprintf(f, "%.17g,%.17g,%.17g\n", pt.t, pt.p_hat, pt.stderr_);
  std::fclose(f);
}

}  // namespace nilheat
