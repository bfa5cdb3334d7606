#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include "nlsw/config.hpp"
#include "nlsw/experiments.hpp"
#include "nlsw/io.hpp"

using namespace nlsw;
namespace fs = std::filesystem;

namespace {

struct Context {
  Config cfg;
  fs::path out;
  std::uint64_t seed = 0;
  int threads = 1;
};

void emit(const Context& ctx, const std::string& file, const Json& j) {
  const std::string text = to_json_text(j);
  write_text((ctx.out / file).string(), text);
  std::cout << text;
}

ProfileOptions grid_options(const Config& c) {
  ProfileOptions o;
  o.h = c.opt("grid", "h");
  o.L = c.opt("grid", "L");
  if (c.has("grid", "N")) o.N = c.integer("grid", "N");
  o.stitch = c.num("grid", "stitch", 1e-8);
  return o;
}

Json tail_json(const Tail& t) {
  Json j;
  j["algebraic"] = t.algebraic;
  j["rate"] = t.rate;
  j["amplitude"] = t.amplitude;
  return j;
}

void cmd_profile(const Context& ctx) {
  const Model m(ctx.cfg.model_spec());
  auto o = grid_options(ctx.cfg);
  o.allow_infinite_energy = ctx.cfg.flag("profile", "allow_infinite_energy");
  const double c = ctx.cfg.num("profile", "c");
  const auto P = solve_profile(m, c, o);
  Csv csv("profile", 1, {"x", "eta", "A", "u", "phi", "re_U", "im_U"});
  const auto U = P.sample_complex();
  for (std::size_t i = 0; i < P.x.size(); ++i)
    csv.row({P.x[i], P.eta[i], P.A[i], P.u[i], P.phi[i], U[i].real(), U[i].imag()});
  csv.write((ctx.out / "profile.csv").string());
  Json j;
  j["c"] = P.c;
  j["status"] = existence_name(P.status);
  j["xi_c"] = P.xi_c;
  j["L"] = P.grid.L;
  j["N"] = P.grid.N;
  j["h"] = P.grid.h;
  j["theta_c"] = P.theta_c;
  j["tail"] = tail_json(P.tail);
  const auto fit = decay_fit(P);
  j["decay_fit"] = {{"algebraic", fit.algebraic}, {"rate", fit.rate}, {"amplitude", fit.amplitude}};
  if (!(P.status == Existence::sonic && m.m_index().value_or(99) > 2)) {
    j["E"] = energy(m, P);
    if (!P.kink()) j["P"] = momentum_grid(P);
  }
  emit(ctx, "profile.json", j);
}

void cmd_diagram(const Context& ctx) {
  const Model m(ctx.cfg.model_spec());
  const auto D = diagram(m, ctx.cfg.num("diagram", "c_min"), ctx.cfg.num("diagram", "c_max"),
                         ctx.cfg.integer("diagram", "n"), ctx.threads);
  Csv csv("diagram", 1, {"c", "status", "E", "P", "dPdc", "d2Pdc2", "hamilton_residual", "verdict"});
  for (const auto& p : D.points)
    csv.row_text({fmt17(p.c), existence_name(p.status), fmt17(p.E), fmt17(p.P), fmt17(p.dPdc), fmt17(p.d2Pdc2),
                  fmt17(p.hamilton_residual), p.exists ? stability_name(p.verdict) : "none"});
  csv.write((ctx.out / "diagram.csv").string());
  Json j;
  j["points"] = D.points.size();
  j["cusps"] = Json::array();
  for (const auto& c : D.cusps) j["cusps"].push_back({{"c", c.c}, {"P", c.P}, {"d2Pdc2", c.d2Pdc2}});
  if (D.kink)
    j["kink"] = {{"E_kink", D.kink->E_kink},
                 {"P_limit", D.kink->P_limit},
                 {"dPdc0", D.kink->dPdc_at_0},
                 {"dPdc0_extrapolated", D.kink->dPdc_extrapolated}};
  emit(ctx, "diagram.json", j);
}

void cmd_kink(const Context& ctx) {
  const Model m(ctx.cfg.model_spec());
  const auto k = kink_dPdc(m);
  Json j;
  j["E_kink"] = kink_energy(m);
  j["dPdc0"] = k.dPdc0;
  j["VK0"] = k.VK0;
  j["verdict"] = k.dPdc0 < 0 ? "stable" : "unstable";
  emit(ctx, "kink.json", j);
}

void cmd_classify(const Context& ctx) {
  const Model m(ctx.cfg.model_spec());
  const double c = ctx.cfg.num("classify", "c");
  const auto v = find_xi_c(m, c);
  const auto b = branch_point(m, c);
  Json j;
  j["c"] = c;
  j["cs"] = m.cs();
  j["status"] = existence_name(v.status);
  j["xi_c"] = v.xi_c ? *v.xi_c : NAN;
  j["further_roots"] = v.further_roots;
  j["diagnostic"] = v.diagnostic;
  j["E"] = b.E;
  j["P"] = b.P;
  j["dPdc"] = b.dPdc;
  j["d2Pdc2"] = b.d2Pdc2;
  j["one_sided"] = b.one_sided;
  j["verdict"] = b.exists ? stability_name(b.verdict) : "none";
  if (auto mi = m.m_index()) {
    j["sonic_m"] = *mi;
    j["lambda_m"] = m.lambda_m();
  }
  emit(ctx, "classify.json", j);
}

void cmd_spectrum(const Context& ctx) {
  const Config& c = ctx.cfg;
  const Model m(c.model_spec());
  ProfileOptions o;
  o.N = c.integer("spectrum", "N", 1024);
  o.L = c.opt("spectrum", "L");
  const auto P = solve_profile(m, c.num("spectrum", "c"), o);
  auto O = build_operators(m, P);
  O.d_order = c.integer("spectrum", "d_order", 4);
  if (O.d_order != 4 && O.d_order != 8) throw Error("config", "d_order must be 4 or 8");
  const auto counts = count_negative(O);
  const auto R = unstable_eigen(O);
  Json j;
  j["c"] = P.c;
  j["N"] = P.grid.N;
  j["L"] = P.grid.L;
  j["n_neg_L"] = counts.n_neg_L;
  j["n_neg_Mdag"] = counts.n_neg_Mdag;
  j["lowest_Mdag"] = counts.lowest_Mdag;
  j["zero_mode_Mdag"] = counts.second_Mdag;
  j["continuum_edge"] = continuum_edge(O);
  j["max_real"] = R.max_real;
  j["threshold"] = R.threshold;
  j["symmetry_defect"] = R.symmetry_defect;
  j["candidates"] = Json::array();
  for (const auto& e : R.candidates)
    j["candidates"].push_back({{"re", e.lambda.real()},
                               {"im", e.lambda.imag()},
                               {"residual", e.residual},
                               {"mass", e.mass},
                               {"translation_overlap", e.translation},
                               {"translation_artifact", e.translation_artifact},
                               {"accepted", e.accepted}});
  j["gamma0"] = R.unstable ? R.unstable->gamma0 : NAN;
  if (R.unstable && c.flag("spectrum", "mode")) {
    // the mode is rebuilt on a grid long enough for its tails
    ProfileOptions mo;
    mo.h = c.num("spectrum", "mode_h", 0.05);
    mo.L = c.num("spectrum", "mode_L", 2 * P.grid.L);
    const auto Pm = solve_profile(m, P.c, mo);
    auto Om = build_operators(m, Pm, 0);
    Om.d_order = 8;
    const auto U = refine_eigen(Om, R.unstable->gamma0);
    const auto w = to_nls_mode(Pm, U.zeta, U.upsilon);
    Csv csv("mode", 1, {"x", "zeta", "upsilon", "re_w", "im_w"});
    for (std::size_t i = 0; i < Pm.x.size(); ++i) csv.row({Pm.x[i], U.zeta[i], U.upsilon[i], w[i].real(), w[i].imag()});
    csv.write((ctx.out / "mode.csv").string());
    j["gamma0_refined"] = U.gamma0;
    j["refined_residual"] = U.residual;
  }
  emit(ctx, "spectrum.json", j);
}

void cmd_evolve(const Context& ctx) {
  const Config& c = ctx.cfg;
  const Model m(c.model_spec());
  const auto P = solve_profile(m, c.num("evolve", "c"), grid_options(c));
  const std::string kind = c.ident("evolve", "initial", std::string("exact"));
  FieldState st{P.sample_complex(), 0.0, P.c};
  EvolveOptions o;
  o.T = c.num("evolve", "T", 10);
  o.dt = c.num("evolve", "dt", 0.01);
  o.out_dt = c.num("evolve", "out_dt", 0.1);
  o.clamp_frac = c.num("evolve", "clamp_frac", 0.02);
  o.distances = c.flag("evolve", "distances");
  const int stride = c.integer("evolve", "snapshot_stride", 0);
  o.keep_snapshots = stride > 0;
  Json j;
  if (kind == "mode") {
    const double delta = c.num("evolve", "delta", 1e-3);
    const auto s = seed_unstable_mode(m, P, c.integer("evolve", "spectrum_N", 768), c.opt("evolve", "spectrum_L"));
    for (int i = 0; i < P.grid.N; ++i) st.psi[i] += delta * s.w[i];
    o.mode = s.w;
    o.delta = delta;
    o.gamma = s.mode.gamma0;
    j["gamma0"] = s.mode.gamma0;
  } else if (kind == "random") {
    CounterRng rng(ctx.seed);
    const auto p = random_perturbation(P.grid, rng, c.num("evolve", "amplitude", 0.01), c.num("evolve", "support", 0.5));
    for (int i = 0; i < P.grid.N; ++i) st.psi[i] += p[i];
  } else if (kind != "exact") {
    throw Error("config", "initial must be exact, mode or random");
  }
  const auto R = evolve(m, P, st, o);
  Csv csv("evolve", 1, {"t", "E", "H", "P_untwisted", "d_hy", "d_Z", "mode_amp", "track_err"});
  for (const auto& s : R.samples) csv.row({s.t, s.E, s.H, s.Pu, s.d_hy, s.d_Z, s.amp, s.track});
  csv.write((ctx.out / "evolve.csv").string());
  if (stride > 0) {
    Csv snap("snapshots", 1, {"t", "x", "re_psi", "im_psi"});
    for (std::size_t k = 0; k < R.snapshots.size(); k += stride)
      for (int i = 0; i < P.grid.N; ++i)
        snap.row({R.samples[k].t, P.x[i], R.snapshots[k][i].real(), R.snapshots[k][i].imag()});
    snap.write((ctx.out / "snapshots.csv").string());
  }
  double dE = 0, dP = 0;
  const auto& s0 = R.samples.front();
  for (const auto& s : R.samples) {
    dE = std::fmax(dE, std::fabs(s.E - s0.E));
    dP = std::fmax(dP, std::fabs(reduce_momentum(s.Pu - s0.Pu, m.r02())));
  }
  j["samples"] = R.samples.size();
  j["E_drift_rel"] = dE / std::fabs(s0.E);
  j["P_untwisted_drift"] = dP;
  j["max_fixed_point_iterations"] = R.max_fp_iters;
  j["boundary_defect"] = R.boundary_defect;
  j["radiation_guard"] = R.radiation_guard;
  j["warnings"] = R.warnings;
  if (kind == "mode") {
    try {
      const auto f = growth_rate(R, 0.0, INFINITY, m.r0());
      j["gamma_fit"] = f.gamma;
      j["gamma_fit_half_width"] = f.half_width;
    } catch (const Error& e) {
      j["gamma_fit_error"] = e.what();
    }
  }
  emit(ctx, "evolve.json", j);
}

void cmd_distances(const Context& ctx) {
  const Config& c = ctx.cfg;
  const std::string test = c.ident("distances", "test", std::string("cestfaux"));
  Json j;
  j["test"] = test;
  if (test == "cestfaux") {
    Csv csv("cestfaux", 1, {"n", "d_hy", "d_hy_exact", "d_Z", "ratio"});
    for (double n : c.list("distances", "n", {100, 1000})) {
      const auto p = cestfaux_pair(n, c.num("distances", "h", 0.1));
      const double hy = distance_hy_raw(p.grid, p.base, p.bent), z = distance_Z_raw(p.grid, p.base, p.bent);
      csv.row({n, hy, std::sqrt(2 * std::numbers::pi / n), z, z / hy});
      j["rows"].push_back({{"n", n}, {"d_hy", hy}, {"d_Z", z}});
    }
    csv.write((ctx.out / "cestfaux.csv").string());
  } else {
    const Model m(c.model_spec());
    const int samples = c.integer("distances", "samples", 100);
    const double amp = c.num("distances", "amplitude", 0.02);
    const double M = c.num("distances", "M", 1.0);
    if (test == "kink") {
      const auto K = solve_profile(m, 0.0, grid_options(c));
      const auto k = kink_probe(m, K, samples, amp, M, ctx.seed);
      j["E_kink"] = kink_energy(m);
      j["min_K_gap"] = k.min_gap;
      j["min_lower_bound_gap"] = k.min_bound_gap;
      const auto g = mu_gap_scaling(m, c.list("distances", "mu", {0.01, 0.02, 0.04}), M);
      j["mu"] = g.mu;
      j["mu_gap"] = g.gap;
      j["mu_gap_exponent"] = g.exponent;
    } else if (test == "equivalence" || test == "liapounov") {
      const auto P = solve_profile(m, c.num("distances", "c"), grid_options(c));
      if (test == "equivalence") {
        const auto r = distance_ratio_probe(P, samples, amp, ctx.seed);
        j["min_ratio"] = r.min_ratio;
        j["max_ratio"] = r.max_ratio;
      } else {
        j["min_L_gap"] = liapounov_probe(m, P, samples, amp, M, ctx.seed);
      }
    } else {
      throw Error("config", "test must be cestfaux, kink, equivalence or liapounov");
    }
  }
  emit(ctx, "distances.json", j);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Travelling waves of defocusing NLS with nonzero conditions at infinity"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand
  std::string config_path, out = ".";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;
  app.add_option("--config", config_path, "configuration file")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out, "output directory");
  app.add_option_function<std::uint64_t>(
      "--seed", [&](std::uint64_t s) { seed = s, seed_set = true; }, "random seed (overrides [run] seed)");
  app.add_option("--threads", threads, "worker threads (overrides [run] threads)")->check(CLI::PositiveNumber);
  struct Cmd {
    const char* name;
    const char* help;
    void (*fn)(const Context&);
  };
  const Cmd cmds[] = {
      {"profile", "sample one travelling wave", cmd_profile},
      {"diagram", "energy-momentum diagram over a speed range", cmd_diagram},
      {"kink", "kink energy and dP/dc at c = 0", cmd_kink},
      {"classify", "existence and stability verdict at one speed", cmd_classify},
      {"spectrum", "negative directions and unstable eigenvalue", cmd_spectrum},
      {"evolve", "time integration in the co-moving frame", cmd_evolve},
      {"distances", "distance and functional probes", cmd_distances},
  };
  for (const auto& c : cmds) app.add_subcommand(c.name, c.help);
  CLI11_PARSE(app, argc, argv);

  const std::string sub = app.get_subcommands().front()->get_name();
  try {
    Context ctx;
    ctx.cfg = load_config(config_path);
    ctx.out = out;
    fs::create_directories(ctx.out);
    ctx.seed = seed_set ? seed : std::uint64_t(ctx.cfg.num("run", "seed", 0));
    ctx.threads = threads > 0 ? threads : ctx.cfg.integer("run", "threads", 1);
    for (const auto& c : cmds)
      if (sub == c.name) c.fn(ctx);
  } catch (const Error& e) {
    Json j;
    j["error"] = e.code();
    j["message"] = e.what();
    std::cerr << to_json_text(j);
    return e.code() == "config" ? 2 : 3;
  } catch (const std::exception& e) {
    Json j;
    j["error"] = "internal";
    j["message"] = e.what();
    std::cerr << to_json_text(j);
    return 4;
  }
  return 0;
}
