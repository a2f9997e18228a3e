#include "commands.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include "fsos/certify.hpp"
#include "fsos/error.hpp"
#include "fsos/io.hpp"
#include "fsos/optimizer.hpp"
#include "fsos/oracles.hpp"
#include "fsos/sampling.hpp"

namespace fsos::cli {

namespace {

// Scalar options keep the last value so that flags placed after config-file
// values win.
struct GenArgs {
  int dim = 1;
  int bandwidth = 15;
  std::uint64_t seed = 0;
  int grid = 0;
  std::string out;
};

struct SolveArgs {
  std::string config;
  std::string function;
  int gen_dim = 0;
  int gen_bandwidth = -1;
  std::string map = "kernel";
  int t = 1;
  int n = 25;
  double rho = 0.5;
  std::optional<std::uint64_t> map_seed;
  std::string solver = "bm";
  long iters = -1;
  std::optional<double> step;
  double radius = 0.0;
  double alpha = 0.0;
  int rank = 0;
  int batch = -1;
  double momentum = -1.0;
  double precondition = -1.0;
  double init_scale = 1e-2;
  bool clip = false;
  bool average = true;
  double average_from = 0.0;
  int support_radius = -1;
  double tail_target = 0.0;
  int det_radius = -1;
  bool prob = false;
  long samples = 1000;
  double delta = 0.05;
  long upper_points = 0;
  bool upper_grid = false;
  bool gap_from_prob = false;
  std::optional<std::uint64_t> seed;
  std::optional<double> tolerance;
  int threads = 1;
  std::string model_out;
  std::string report_out;
  std::string trace_out;
  std::string plot_out;
  std::vector<double> tune_alpha;
  std::vector<double> tune_rho;
  std::string sweep_out;
  bool wall_clock = false;
};

struct CertifyArgs {
  std::string model;
  std::string function;
  int det_radius = -1;
  bool prob = false;
  long samples = 1000;
  double delta = 0.05;
  int support_radius = -1;
  double tail_target = 0.0;
  long upper_points = 0;
  bool upper_grid = false;
  bool gap_from_prob = false;
  std::uint64_t seed = 0;
  std::optional<double> tolerance;
  int threads = 1;
  std::string report_out;
};

struct OracleArgs {
  std::string file;
  int points = 0;
  double offset = 0.0;
  std::string map;
  std::vector<int> k;
  std::string model;
  int radius = -1;
};

// Values from a flat JSON config fill options not given on the command line.
void apply_config(CLI::App& app, const Json& config) {
  if (!config.is_object()) throw MalformedInput("config file must hold a JSON object");
  for (const auto& [key, value] : config.items()) {
    if (key == "config") continue;
    CLI::Option* opt = nullptr;
    try {
      opt = app.get_option("--" + key);
    } catch (const CLI::OptionNotFound&) {
      throw MalformedInput("config key '" + key + "' is not a solve option");
    }
    if (opt->count() > 0) continue;
    std::vector<std::string> items;
    auto to_text = [&](const Json& v) -> std::string {
      if (v.is_string()) return v.get<std::string>();
      if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
      if (v.is_number()) return v.dump();
      throw MalformedInput("config key '" + key + "' has an unsupported value " + v.dump());
    };
    if (value.is_array())
      for (const auto& v : value) items.push_back(to_text(v));
    else if (!value.is_null())
      items.push_back(to_text(value));
    if (items.empty()) continue;
    for (auto& s : items) opt->add_result(s);
    opt->run_callback();
  }
}

std::shared_ptr<FeatureMap> make_map(const SolveArgs& a, int dim, double rho) {
  if (a.map == "bandlimited") return std::make_shared<BandLimitedMap>(dim, a.t);
  if (a.map == "kernel") return KernelMap::sample(dim, a.n, rho, a.map_seed.value_or(*a.seed));
  throw PreconditionError("unknown feature map '" + a.map + "' (bandlimited or kernel)");
}

SolverConfig solver_config(const SolveArgs& a, double alpha) {
  SolverConfig c;
  const bool bm = a.solver == "bm";
  c.radius = a.radius;
  c.iterations = a.iters >= 0 ? a.iters : (bm ? 2000 : 20000);
  c.step = a.step;
  c.smoothing = alpha;
  c.rank = a.rank;
  c.seed = *a.seed;
  c.average = a.average;
  c.average_from = a.average_from;
  c.batch = a.batch >= 0 ? a.batch : (bm ? 0 : 1);
  c.momentum = a.momentum >= 0.0 ? a.momentum : (bm ? 0.9 : 0.0);
  c.precondition = a.precondition >= 0.0 ? a.precondition : (bm ? 1e-6 : 0.0);
  c.init_scale = a.init_scale;
  c.clip = a.clip;
  c.trace_every = std::max(1L, c.iterations / 1000);
  return c;
}

Json solver_json(const SolverConfig& c) {
  Json j;
  j["radius"] = c.radius;
  j["iterations"] = c.iterations;
  j["step"] = c.step ? Json(*c.step) : Json("auto");
  j["smoothing"] = c.smoothing;
  j["rank"] = c.rank;
  j["average"] = c.average;
  j["average_from"] = c.average_from;
  j["batch"] = c.batch;
  j["momentum"] = c.momentum;
  j["precondition"] = c.precondition;
  j["init_scale"] = c.init_scale;
  j["clip"] = c.clip;
  return j;
}

// Resolved run configuration; its hash identifies every output of a run.
Json resolved_config(const SolveArgs& a, const Json& function_json) {
  Json j;
  j["function"] = a.function.empty() ? Json(nullptr) : Json(a.function);
  j["function_hash"] = config_hash(function_json);
  j["map"] = a.map;
  if (a.map == "bandlimited")
    j["t"] = a.t;
  else {
    j["n"] = a.n;
    j["rho"] = a.tune_rho.empty() ? Json(a.rho) : Json(a.tune_rho);
    j["map_seed"] = a.map_seed.value_or(*a.seed);
  }
  j["solver"] = a.solver;
  SolverConfig c = solver_config(a, a.alpha);
  j["solver_config"] = solver_json(c);
  if (!a.tune_alpha.empty()) j["tune_alpha"] = a.tune_alpha;
  j["support_radius"] = a.support_radius;
  j["tail_target"] = a.tail_target;
  j["det_radius"] = a.det_radius;
  j["prob"] = a.prob;
  j["samples"] = a.samples;
  j["delta"] = a.delta;
  j["upper_points"] = a.upper_points;
  j["upper_grid"] = a.upper_grid;
  j["gap_from_prob"] = a.gap_from_prob;
  j["seed"] = *a.seed;
  j["tolerance"] = a.tolerance ? Json(*a.tolerance) : Json(nullptr);
  return j;
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

int finish(const Certificate& cert, const std::optional<double>& tolerance, std::ostream& out) {
  out << "lower_det " << format_double(cert.det.value) << "\n";
  if (cert.prob) out << "lower_prob " << format_double(cert.prob->value) << "\n";
  out << "upper " << format_double(cert.upper.value) << "\n";
  out << "gap " << format_double(cert.gap) << "\n";
  if (tolerance && !(cert.gap <= *tolerance)) {
    out << "tolerance " << format_double(*tolerance) << " not met\n";
    return kExitNoCert;
  }
  return kExitCertified;
}

Json with_stamp(Json j, const std::string& hash, std::uint64_t seed) {
  j["tool_version"] = kToolVersion;
  j["config_hash"] = hash;
  j["seed"] = seed;
  return j;
}

int cmd_gen(const GenArgs& a, std::ostream& out) {
  const int grid = a.grid > 0 ? a.grid : default_objective_grid(a.dim);
  if (a.dim < 1 || a.dim > kMaxDim) throw PreconditionError("dimension must be in [1, " + std::to_string(kMaxDim) + "]");
  if (a.bandwidth < 0) throw PreconditionError("bandwidth must be >= 0");
  Rng rng = make_rng(a.seed, 0);
  const TrigPoly f = random_objective(a.dim, a.bandwidth, grid, rng);
  Json gen{{"dim", a.dim}, {"bandwidth", a.bandwidth}, {"seed", a.seed}, {"grid", grid}};
  Json j = to_json(f);
  j["generator"] = gen;
  write_json_file(a.out, with_stamp(j, config_hash(gen), a.seed));
  const auto values = grid_values_direct(f, grid);
  out << "grid_min " << format_double(*std::min_element(values.begin(), values.end())) << "\n";
  out << "grid_max " << format_double(*std::max_element(values.begin(), values.end())) << "\n";
  out << "f_norm " << format_double(f_norm(f)) << "\n";
  return kExitCertified;
}

struct RunResult {
  double rho = 0.0;
  double alpha = 0.0;
  std::shared_ptr<FeatureMap> map;
  std::optional<PiDistribution> pi;
  std::optional<SolveResult> solve;
  Certificate cert;
};

RunResult run_once(const SolveArgs& a, const TrigPoly& f, double rho, double alpha) {
  RunResult r;
  r.rho = rho;
  r.alpha = alpha;
  r.map = make_map(a, f.dim(), rho);
  r.pi.emplace(build_pi(*r.map, f, a.support_radius, a.tail_target));
  const SolverConfig config = solver_config(a, alpha);
  Rng rng = make_rng(*a.seed, 1);
  if (a.solver == "sga")
    r.solve.emplace(sga_solve(f, r.map, *r.pi, config, rng));
  else if (a.solver == "bm")
    r.solve.emplace(bm_solve(f, r.map, *r.pi, config, rng));
  else
    throw PreconditionError("unknown solver '" + a.solver + "' (sga or bm)");
  CertificateOptions opts;
  opts.det_radius = a.det_radius;
  opts.probabilistic = a.prob;
  opts.samples = a.samples;
  opts.delta = a.delta;
  opts.upper_points = a.upper_points;
  opts.upper_grid = a.upper_grid;
  opts.gap_from_prob = a.gap_from_prob;
  opts.seed = *a.seed;
  opts.threads = a.threads;
  r.cert = certificate(f, r.solve->model, &*r.pi, opts);
  return r;
}

int cmd_solve(const SolveArgs& a, std::ostream& out) {
  if (!a.seed) throw PreconditionError("--seed is required");
  const auto start = std::chrono::steady_clock::now();

  Json function_json;
  if (!a.function.empty()) {
    function_json = read_json_file(a.function);
  } else if (a.gen_dim > 0 && a.gen_bandwidth >= 0) {
    Rng rng = make_rng(*a.seed, 0);
    function_json = to_json(random_objective(a.gen_dim, a.gen_bandwidth, default_objective_grid(a.gen_dim), rng));
  } else {
    throw PreconditionError("give --function or both --gen-dim and --gen-bandwidth");
  }
  const TrigPoly f = trig_poly_from_json(function_json);
  const Json config = resolved_config(a, function_json);
  const std::string hash = config_hash(config);

  std::vector<double> rhos = a.tune_rho.empty() ? std::vector<double>{a.rho} : a.tune_rho;
  std::vector<double> alphas = a.tune_alpha.empty() ? std::vector<double>{a.alpha} : a.tune_alpha;
  if (a.map != "kernel") rhos = {a.rho};
  const bool tuning = rhos.size() * alphas.size() > 1;

  std::optional<RunResult> best;
  Json sweep = Json::array();
  std::ostringstream sweep_csv;
  sweep_csv << "rho,alpha,lower_det,upper,gap\n";
  for (double rho : rhos)
    for (double alpha : alphas) {
      RunResult r;
      try {
        r = run_once(a, f, rho, alpha);
      } catch (const NumericalError& e) {
        if (!tuning) throw;
        sweep.push_back(Json{{"rho", rho}, {"alpha", alpha}, {"error", e.what()}});
        sweep_csv << std::setprecision(17) << rho << "," << alpha << ",nan,nan,nan\n";
        continue;
      }
      sweep.push_back(Json{{"rho", rho},
                           {"alpha", r.solve->smoothing},
                           {"lower_det", r.cert.det.value},
                           {"upper", r.cert.upper.value},
                           {"gap", r.cert.gap}});
      sweep_csv << std::setprecision(17) << rho << "," << r.solve->smoothing << "," << r.cert.det.value << ","
                << r.cert.upper.value << "," << r.cert.gap << "\n";
      if (!best || r.cert.gap < best->cert.gap) best = std::move(r);
    }
  if (!best) throw NumericalError("every tuning run diverged");
  if (tuning && !a.sweep_out.empty()) {
    std::ofstream s(a.sweep_out);
    if (!s) throw IoError("cannot open '" + a.sweep_out + "' for writing");
    s << sweep_csv.str();
  }

  const PsdModel& model = best->solve->model;
  if (!a.model_out.empty()) write_json_file(a.model_out, with_stamp(to_json(model), hash, *a.seed));
  if (!a.trace_out.empty()) write_trace_csv(a.trace_out, best->solve->trace);
  if (!a.plot_out.empty()) write_plot_csv(a.plot_out, f, model, best->cert.det.radius);
  if (!a.report_out.empty()) {
    Json report = with_stamp(to_json(best->cert), hash, *a.seed);
    report["config"] = config;
    Json solver = solver_json(solver_config(a, best->solve->smoothing));
    solver["radius"] = best->solve->radius;
    solver["step"] = best->solve->step;
    solver["smoothing"] = best->solve->smoothing;
    report["solver"] = solver;
    report["map"] = Json{{"type", best->map->type()}, {"size", best->map->size()}};
    if (best->map->type() == "kernel") report["map"]["rho"] = best->rho;
    report["sampling"] = Json{{"K_supp", best->pi->support_radius()},
                              {"support_size", best->pi->support().size()},
                              {"Z", best->pi->normalizer()},
                              {"eps_tail", best->pi->mu_tail()},
                              {"moment_tail", best->pi->moment_tail()}};
    if (tuning) report["sweep"] = sweep;
    if (a.wall_clock)
      report["wall_clock_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_json_file(a.report_out, report);
  }
  if (tuning) out << "selected rho " << format_double(best->rho) << " alpha " << format_double(best->solve->smoothing) << "\n";
  return finish(best->cert, a.tolerance, out);
}

int cmd_certify(const CertifyArgs& a, std::ostream& out) {
  const Json model_json = read_json_file(a.model);
  const PsdModel model = psd_model_from_json(model_json);
  const Json function_json = read_json_file(a.function);
  const TrigPoly f = trig_poly_from_json(function_json);

  CertificateOptions opts;
  opts.det_radius = a.det_radius;
  opts.probabilistic = a.prob;
  opts.samples = a.samples;
  opts.delta = a.delta;
  opts.upper_points = a.upper_points;
  opts.upper_grid = a.upper_grid;
  opts.gap_from_prob = a.gap_from_prob;
  opts.seed = a.seed;
  opts.threads = a.threads;
  std::optional<PiDistribution> pi;
  if (a.prob) pi.emplace(build_pi(model.map(), f, a.support_radius, a.tail_target));
  const Certificate cert = certificate(f, model, pi ? &*pi : nullptr, opts);

  Json config{{"model_hash", config_hash(model_json)},
              {"function_hash", config_hash(function_json)},
              {"det_radius", a.det_radius},
              {"prob", a.prob},
              {"samples", a.samples},
              {"delta", a.delta},
              {"support_radius", a.support_radius},
              {"tail_target", a.tail_target},
              {"upper_points", a.upper_points},
              {"upper_grid", a.upper_grid},
              {"gap_from_prob", a.gap_from_prob},
              {"seed", a.seed}};
  if (!a.report_out.empty()) {
    Json report = with_stamp(to_json(cert), config_hash(config), a.seed);
    report["config"] = config;
    write_json_file(a.report_out, report);
  }
  return finish(cert, a.tolerance, out);
}

Json map_json_of(const Json& j) { return j.contains("kind") && j["kind"] == "psd_model" ? j.at("map") : j; }

int cmd_grid_min(const OracleArgs& a, std::ostream& out) {
  const TrigPoly f = trig_poly_from_json(read_json_file(a.file));
  GridSpec grid{f.dim(), a.points > 0 ? a.points : (f.dim() == 1 ? 4096 : 512), a.offset};
  const GridMin g = grid_min(f, grid);
  out << Json{{"value", g.value}, {"x", g.x}, {"slack", g.slack}, {"points", grid.points}}.dump(2) << "\n";
  return kExitCertified;
}

int cmd_mk(const OracleArgs& a, std::ostream& out) {
  const auto map = feature_map_from_json(map_json_of(read_json_file(a.map)));
  if (static_cast<int>(a.k.size()) != map->dim())
    throw PreconditionError("--k needs " + std::to_string(map->dim()) + " entries");
  const MultiIndex k{std::span<const int>(a.k)};
  GridSpec grid{map->dim(), a.points > 0 ? a.points : (map->dim() == 1 ? 4096 : 128)};
  const Matrix closed = map->compute_moment(k);
  const Matrix quad = m_matrix_quadrature(*map, k, grid);
  out << Json{{"k", a.k},
              {"points", grid.points},
              {"frob_closed_form", closed.norm()},
              {"max_abs_diff", (closed - quad).cwiseAbs().maxCoeff()},
              {"frob_diff", (closed - quad).norm()}}
             .dump(2)
      << "\n";
  return kExitCertified;
}

int cmd_coeffs(const OracleArgs& a, std::ostream& out) {
  const PsdModel model = psd_model_from_json(read_json_file(a.model));
  const int dim = model.map().dim();
  GridSpec grid{dim, a.points > 0 ? a.points : (dim == 1 ? 1024 : 128)};
  const auto fft = fft_coeffs([&](std::span<const double> x) { return model.eval(x); }, grid);
  const int radius = a.radius >= 0 ? a.radius : std::min(grid.points / 4, 16);
  double diff = 0.0;
  for (const auto& k : ball(dim, radius)) {
    const auto it = fft.table.find(k);
    const Complex from_fft = it == fft.table.end() ? Complex(0.0) : it->second;
    diff = std::max(diff, std::abs(from_fft - model.coeff(k)));
  }
  out << Json{{"points", grid.points}, {"radius", radius}, {"max_abs_diff", diff}, {"aliasing_warning", fft.aliased}}
             .dump(2)
      << "\n";
  return kExitCertified;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Certified lower bounds for periodic functions via Fourier sums of squares", "fsos"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "generate a random objective");
  g->add_option("--dim", gen.dim, "dimension")->required();
  g->add_option("--bandwidth", gen.bandwidth, "largest |k| of the coefficients")->required();
  g->add_option("--seed", gen.seed, "random seed")->required();
  g->add_option("--grid", gen.grid, "grid points per axis used to rescale the range");
  g->add_option("--out", gen.out, "output file")->required();

  SolveArgs sol;
  auto* s = app.add_subcommand("solve", "fit a PSD model and certify a lower bound");
  s->add_option("--config", sol.config, "JSON config; flags override its values");
  s->add_option("--function", sol.function, "objective file");
  s->add_option("--gen-dim", sol.gen_dim, "generate the objective with this dimension");
  s->add_option("--gen-bandwidth", sol.gen_bandwidth, "generate the objective with this bandwidth");
  s->add_option("--map", sol.map, "feature map: bandlimited or kernel");
  s->add_option("--t", sol.t, "band-limited map degree");
  s->add_option("--n", sol.n, "kernel map size");
  s->add_option("--rho", sol.rho, "kernel map decay");
  s->add_option("--map-seed", sol.map_seed, "seed for the kernel nodes (default: --seed)");
  s->add_option("--solver", sol.solver, "sga or bm");
  s->add_option("--iters", sol.iters, "iterations T");
  s->add_option("--step", sol.step, "step size (default: automatic)");
  s->add_option("--radius", sol.radius, "Frobenius bound R (default: automatic)");
  s->add_option("--alpha", sol.alpha, "smoothing (default: automatic)");
  s->add_option("--rank", sol.rank, "factor rank (default: n)");
  s->add_option("--batch", sol.batch, "samples per step; 0 uses the exact expectation (bm)");
  s->add_option("--momentum", sol.momentum, "heavy-ball coefficient (bm)");
  s->add_option("--precondition", sol.precondition, "relative shift of the M^(0) preconditioner; 0 disables (bm)");
  s->add_option("--init-scale", sol.init_scale, "||U_0 U_0^*|| scale (bm)");
  s->add_option("--clip", sol.clip, "keep ||U U^*||_F <= R (bm)");
  s->add_option("--average", sol.average, "average iterates (sga)");
  s->add_option("--average-from", sol.average_from, "fraction of iterations skipped before averaging (sga)");
  s->add_option("--support-radius", sol.support_radius, "sampling support radius");
  s->add_option("--tail-target", sol.tail_target, "moment tail target of the sampling law");
  s->add_option("--det-radius", sol.det_radius, "truncation radius of the deterministic bound");
  s->add_option("--prob", sol.prob, "also compute the sampled bound");
  s->add_option("--samples", sol.samples, "samples for the sampled bound");
  s->add_option("--delta", sol.delta, "failure probability of the sampled bound");
  s->add_option("--upper-points", sol.upper_points, "points for the upper bound");
  s->add_option("--upper-grid", sol.upper_grid, "evaluate the upper bound on a regular grid");
  s->add_option("--gap-from-prob", sol.gap_from_prob, "measure the gap against the sampled bound");
  s->add_option("--seed", sol.seed, "random seed (required)");
  s->add_option("--tolerance", sol.tolerance, "exit 0 only if the gap is at most this");
  s->add_option("--threads", sol.threads, "worker threads for certificates");
  s->add_option("--model", sol.model_out, "model output file");
  s->add_option("--report", sol.report_out, "certificate report file");
  s->add_option("--trace", sol.trace_out, "trace CSV");
  s->add_option("--plot", sol.plot_out, "plot-data CSV");
  s->add_option("--tune-alpha", sol.tune_alpha, "smoothing values to sweep")->delimiter(',')->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  s->add_option("--tune-rho", sol.tune_rho, "kernel decays to sweep")->delimiter(',')->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  s->add_option("--sweep", sol.sweep_out, "sweep table CSV");
  s->add_option("--wall-clock", sol.wall_clock, "record wall-clock time in the report");

  CertifyArgs cer;
  auto* c = app.add_subcommand("certify", "recompute certificates for a saved model");
  c->add_option("--model", cer.model, "model file")->required();
  c->add_option("--function", cer.function, "objective file")->required();
  c->add_option("--det-radius", cer.det_radius, "truncation radius of the deterministic bound");
  c->add_option("--prob", cer.prob, "also compute the sampled bound");
  c->add_option("--samples", cer.samples, "samples for the sampled bound");
  c->add_option("--delta", cer.delta, "failure probability of the sampled bound");
  c->add_option("--support-radius", cer.support_radius, "sampling support radius");
  c->add_option("--tail-target", cer.tail_target, "moment tail target of the sampling law");
  c->add_option("--upper-points", cer.upper_points, "points for the upper bound");
  c->add_option("--upper-grid", cer.upper_grid, "evaluate the upper bound on a regular grid");
  c->add_option("--gap-from-prob", cer.gap_from_prob, "measure the gap against the sampled bound");
  c->add_option("--seed", cer.seed, "random seed");
  c->add_option("--tolerance", cer.tolerance, "exit 0 only if the gap is at most this");
  c->add_option("--threads", cer.threads, "worker threads");
  c->add_option("--report", cer.report_out, "certificate report file");

  OracleArgs orc;
  auto* o = app.add_subcommand("oracle", "brute-force reference computations");
  o->require_subcommand(1);
  auto* gm = o->add_subcommand("grid-min", "dense-grid minimum with certified slack");
  gm->add_option("--file", orc.file, "objective file")->required();
  gm->add_option("--points", orc.points, "points per axis");
  gm->add_option("--offset", orc.offset, "grid offset in units of the spacing");
  auto* mk = o->add_subcommand("mk", "closed-form moment matrix against quadrature");
  mk->add_option("--map", orc.map, "feature map or model file")->required();
  mk->add_option("--k", orc.k, "frequency, comma separated")->required()->delimiter(',')->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  mk->add_option("--points", orc.points, "quadrature points per axis");
  auto* co = o->add_subcommand("coeffs", "model coefficients against FFT extraction");
  co->add_option("--model", orc.model, "model file")->required();
  co->add_option("--points", orc.points, "grid points per axis");
  co->add_option("--radius", orc.radius, "compare |k| up to this radius");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    if (s->parsed() && !sol.config.empty()) apply_config(*s, read_json_file(sol.config));
    if (g->parsed()) return cmd_gen(gen, out);
    if (s->parsed()) return cmd_solve(sol, out);
    if (c->parsed()) return cmd_certify(cer, out);
    if (gm->parsed()) return cmd_grid_min(orc, out);
    if (mk->parsed()) return cmd_mk(orc, out);
    if (co->parsed()) return cmd_coeffs(orc, out);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitCertified;
    }
    err << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    const char* module = dynamic_cast<const MalformedInput*>(&e)      ? "input"
                         : dynamic_cast<const NumericalError*>(&e)    ? "numerics"
                         : dynamic_cast<const PreconditionError*>(&e) ? "precondition"
                         : dynamic_cast<const IoError*>(&e)           ? "io"
                                                                      : "internal";
    err << "error (" << module << "): " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace fsos::cli
