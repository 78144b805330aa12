// orbit: command-line front end for the nilpotent-orbit toolkit.

#include <complex>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "orbit/algebra.hpp"
#include "orbit/expansion.hpp"
#include "orbit/inequality.hpp"
#include "orbit/instanton.hpp"
#include "orbit/moment.hpp"
#include "orbit/sekiguchi.hpp"
#include "orbit/sl2.hpp"
#include "orbit/version.hpp"

using nlohmann::json;
using namespace orbit;

namespace {

const std::complex<double> kI(0.0, 1.0);

double default_tol() {
  if (const char* env = std::getenv("ORBIT_TOL")) {
    try {
      return std::stod(env);
    } catch (...) {
      throw InvalidParameterError("ORBIT_TOL is not a number");
    }
  }
  return 1e-9;
}

struct CorePipeline {
  AlgebraPtr alg;       // normalized for the seed's orbit
  GVector seed;         // rebound to alg
  Sl2Triple triple;     // strictly normal triple at the descent endpoint
  SlHom phi0;           // the core morphism
  DescentResult descent;
};

/// Shared preprocessing: embed the seed in an sl2-triple, normalize the
/// Killing form for its orbit, flow to the core and read off the morphism.
CorePipeline run_core_pipeline(const AlgebraPtr& alg_in, const GVector& seed_in,
                               bool record = false) {
  const Sl2Triple raw = jacobson_morozov(seed_in);
  AlgebraPtr alg = normalize_for_orbit(raw);
  GVector seed = seed_in.rebind(alg);
  DescentOptions opt;
  opt.record_trajectory = record;
  DescentResult descent = descend_to_core(seed, opt);
  Sl2Triple triple = strictly_normal_from_critical(descent.core);
  SlHom phi0 = SlHom::from_triple(triple);
  return {alg, seed, triple, phi0, std::move(descent)};
}

void emit_error(const char* kind, const std::exception& e) {
  json j;
  j["error"] = kind;
  j["message"] = e.what();
  std::cerr << j.dump() << std::endl;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << text << "\n";
}

json base_report(std::uint64_t rng_seed) {
  json j;
  j["tool_version"] = kVersion;
  j["rng_seed"] = rng_seed;
  return j;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"orbit: moment-map flows, sl2 machinery, instanton expansions and "
               "the Kostant-Sekiguchi correspondence at desk scale"};
  app.set_version_flag("--version", std::string("orbit ") + kVersion);
  app.require_subcommand(1);

  std::uint64_t rng_seed = 20240101;
  int jobs = 1;
  app.add_option("--seed-rng", rng_seed, "RNG seed for randomized commands");
  app.add_option("--jobs", jobs, "worker threads for sweeps");

  // ---- algebra ----
  auto* alg_cmd = app.add_subcommand("algebra", "create, inspect and check algebras");
  alg_cmd->require_subcommand(1);

  std::string family = "sl";
  int n = 2, p = 1, q = 1;
  std::string out_path, alg_path;
  double tol = default_tol();

  auto* alg_init = alg_cmd->add_subcommand("init", "write a built-in algebra as JSON");
  alg_init->add_option("--family", family, "sl | su | so")->required();
  alg_init->add_option("--n", n, "n for sl(n,R)");
  alg_init->add_option("--p", p, "p for su(p,q)/so(p,q)");
  alg_init->add_option("--q", q, "q for su(p,q)/so(p,q)");
  alg_init->add_option("--out", out_path, "output path")->required();

  auto* alg_inspect = alg_cmd->add_subcommand("inspect", "print dimensions and signatures");
  alg_inspect->add_option("--algebra", alg_path, "algebra JSON")->required();

  auto* alg_check = alg_cmd->add_subcommand("check", "run all structural invariants");
  alg_check->add_option("--algebra", alg_path, "algebra JSON")->required();
  alg_check->add_option("--tol", tol, "invariant tolerance");

  // ---- core ----
  auto* core_cmd = app.add_subcommand("core", "gradient descent to the orbit core");
  std::string seed_path, traj_path;
  core_cmd->add_option("--algebra", alg_path)->required();
  core_cmd->add_option("--seed", seed_path, "nilpotent seed element JSON")->required();
  core_cmd->add_option("--out", out_path, "core element output JSON");
  core_cmd->add_option("--traj", traj_path, "trajectory CSV");

  // ---- flow ----
  auto* flow_cmd = app.add_subcommand("flow", "instanton, gradient, or deformation flow");
  flow_cmd->require_subcommand(1);
  double t0 = 0.0, t1 = 10.0;
  int steps = 40;
  std::string hom_path, elem_path, manifest_path;

  auto* flow_inst = flow_cmd->add_subcommand("instanton", "dPhi/dt = -Q(Phi,Phi)");
  flow_inst->add_option("--algebra", alg_path)->required();
  flow_inst->add_option("--hom", hom_path, "initial SlHom JSON (already normalized)");
  flow_inst->add_option("--seed", seed_path, "nilpotent seed; flows its core morphism");
  flow_inst->add_option("--t0", t0);
  flow_inst->add_option("--t1", t1);
  flow_inst->add_option("--out", out_path, "trajectory CSV")->required();
  flow_inst->add_option("--manifest", manifest_path, "integrator manifest JSON");

  auto* flow_grad = flow_cmd->add_subcommand("gradient", "norm-square descent trajectory");
  flow_grad->add_option("--algebra", alg_path)->required();
  flow_grad->add_option("--seed", seed_path)->required();
  flow_grad->add_option("--out", out_path, "trajectory CSV")->required();

  auto* flow_def = flow_cmd->add_subcommand("deform", "f_t = Ad(exp(t Re zeta))");
  flow_def->add_option("--algebra", alg_path)->required();
  flow_def->add_option("--element", elem_path, "element JSON")->required();
  flow_def->add_option("--t0", t0);
  flow_def->add_option("--t1", t1);
  flow_def->add_option("--steps", steps);
  flow_def->add_option("--out", out_path, "CSV")->required();

  // ---- expand ----
  auto* expand_cmd = app.add_subcommand("expand", "series at infinity and residual slopes");
  int order = 8;
  double epsilon = 0.05;
  expand_cmd->add_option("--algebra", alg_path)->required();
  expand_cmd->add_option("--seed", seed_path, "nilpotent seed")->required();
  expand_cmd->add_option("--order", order, "truncation order K");
  expand_cmd->add_option("--epsilon", epsilon, "free-data magnitude");
  expand_cmd->add_option("--out", out_path, "report JSON (stdout if omitted)");

  // ---- sekiguchi ----
  auto* sek_cmd = app.add_subcommand("sekiguchi", "correspondence and deformation probes");
  sek_cmd->require_subcommand(1);
  std::string direction = "gr_to_p";

  auto* sek_partner = sek_cmd->add_subcommand("partner", "core representative of the partner");
  sek_partner->add_option("--algebra", alg_path)->required();
  sek_partner->add_option("--element", elem_path)->required();
  sek_partner->add_option("--direction", direction, "p_to_gr | gr_to_p");
  sek_partner->add_option("--out", out_path, "partner element JSON");

  auto* sek_probe = sek_cmd->add_subcommand("probe", "deformation-flow convergence table");
  sek_probe->add_option("--algebra", alg_path)->required();
  sek_probe->add_option("--seed", seed_path, "real nilpotent seed")->required();
  sek_probe->add_option("--t1", t1, "largest probe time");
  sek_probe->add_option("--steps", steps);
  sek_probe->add_option("--out", out_path, "probe CSV")->required();

  // ---- verify ----
  auto* verify_cmd = app.add_subcommand("verify", "randomized checks of the inequalities");
  verify_cmd->require_subcommand(1);
  int samples = 1000, lmax = 6;
  double tmax = 50.0;

  auto* verify_l85 = verify_cmd->add_subcommand("lemma85", "moment-component inequality sweep");
  verify_l85->add_option("--algebra", alg_path)->required();
  verify_l85->add_option("--seed", seed_path, "nilpotent seed fixing the orbit")->required();
  verify_l85->add_option("--samples", samples);
  verify_l85->add_option("--tmax", tmax);
  verify_l85->add_option("--out", out_path, "report JSON (stdout if omitted)");

  auto* verify_cheb = verify_cmd->add_subcommand("chebyshev", "power-mean step sweep");
  verify_cheb->add_option("--samples", samples);
  verify_cheb->add_option("--lmax", lmax);
  verify_cheb->add_option("--out", out_path, "report JSON (stdout if omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*alg_init) {
      AlgebraPtr alg;
      if (family == "sl")
        alg = RealSemisimpleAlgebra::sl(n);
      else if (family == "su")
        alg = RealSemisimpleAlgebra::su(p, q);
      else if (family == "so")
        alg = RealSemisimpleAlgebra::so(p, q);
      else
        throw InvalidParameterError("unknown family " + family);
      alg->check_invariants();
      alg->save_json(out_path);
      std::cout << "wrote " << alg->name() << " (dim " << alg->dim() << ") to "
                << out_path << "\n";
    } else if (*alg_inspect) {
      AlgebraPtr alg = RealSemisimpleAlgebra::load_json(alg_path);
      const auto sig = alg->killing_signature();
      json j = base_report(rng_seed);
      j["name"] = alg->name();
      j["dim"] = alg->dim();
      j["dim_k"] = alg->k_basis().cols();
      j["dim_p"] = alg->p_basis().cols();
      j["killing_scale"] = alg->killing_scale();
      j["killing_signature"] = {{"k_negative", sig.k_negative},
                                {"k_positive", sig.k_positive},
                                {"p_negative", sig.p_negative},
                                {"p_positive", sig.p_positive}};
      std::cout << j.dump(2) << "\n";
    } else if (*alg_check) {
      AlgebraPtr alg = RealSemisimpleAlgebra::load_json(alg_path);
      alg->check_invariants(tol);
      std::cout << "ok: all invariants pass at tol " << tol << "\n";
    } else if (*core_cmd) {
      AlgebraPtr alg = RealSemisimpleAlgebra::load_json(alg_path);
      GVector seed = load_element_json(alg, seed_path);
      CorePipeline pipe = run_core_pipeline(alg, seed, !traj_path.empty());
      if (!out_path.empty()) save_element_json(pipe.descent.core, out_path);
      if (!traj_path.empty()) write_descent_csv(pipe.descent, traj_path);
      json j = base_report(rng_seed);
      j["m_norm_sq"] = pipe.descent.m_norm_sq;
      j["a"] = pipe.descent.a;
      j["steps"] = pipe.descent.steps;
      j["killing_scale"] = pipe.alg->killing_scale();
      std::cout << j.dump(2) << "\n";
    } else if (*flow_inst) {
      AlgebraPtr alg = RealSemisimpleAlgebra::load_json(alg_path);
      std::optional<SlHom> start;
      if (!hom_path.empty()) {
        start = load_hom_json(alg, hom_path);
      } else if (!seed_path.empty()) {
        CorePipeline pipe = run_core_pipeline(alg, load_element_json(alg, seed_path));
        start = pipe.phi0;
      } else {
        throw InvalidParameterError("flow instanton needs --hom or --seed");
      }
      Trajectory traj = integrate(*start, t0, t1);
      write_trajectory_csv(traj, out_path);
      if (!manifest_path.empty()) write_text(manifest_path, trajectory_manifest_json(traj));
      std::cout << "integrated " << traj.t.size() << " samples to " << out_path << "\n";
    } else if (*flow_grad) {
      AlgebraPtr alg = RealSemisimpleAlgebra::load_json(alg_path);
      CorePipeline pipe = run_core_pipeline(alg, load_element_json(alg, seed_path), true);
      write_descent_csv(pipe.descent, out_path);
      std::cout << "descent finished with |m|^2 = " << pipe.descent.m_norm_sq << " in "
                << pipe.descent.steps << " steps\n";
    } else if (*flow_def) {
      AlgebraPtr alg = RealSemisimpleAlgebra::load_json(alg_path);
      GVector zeta = load_element_json(alg, elem_path);
      std::ofstream out(out_path);
      if (!out) throw IoError("cannot open " + out_path);
      out.precision(17);
      out << "t";
      for (int i = 0; i < alg->dim(); ++i) out << ",re" << i << ",im" << i;
      out << "\n";
      for (int s = 0; s <= steps; ++s) {
        const double t = t0 + (t1 - t0) * s / std::max(1, steps);
        const GVector moved = deformation_flow(zeta, t);
        out << t;
        for (int i = 0; i < alg->dim(); ++i)
          out << "," << moved.coeffs()[i].real() << "," << moved.coeffs()[i].imag();
        out << "\n";
      }
      std::cout << "wrote deformation samples to " << out_path << "\n";
    } else if (*expand_cmd) {
      AlgebraPtr alg = RealSemisimpleAlgebra::load_json(alg_path);
      CorePipeline pipe = run_core_pipeline(alg, load_element_json(alg, seed_path));
      ExpansionWorkspace ws(pipe.phi0);
      std::map<int, SlHom> free;
      for (const auto& [k, dirs] : ws.normal_basis_by_k())
        if (!dirs.empty()) free.emplace(k, epsilon * dirs.front());
      const ExpansionSeries series = ws.build_series(free, order);
      // Log-log slope of the flow residual over the far grid.
      std::vector<double> ts, rs;
      for (double t = 1e2; t <= 1e4 + 1; t *= std::pow(100.0, 1.0 / 8))
        ts.push_back(t);
      for (double t : ts) rs.push_back(series_ode_residual(series, t));
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      for (size_t i = 0; i < ts.size(); ++i) {
        const double x = std::log(ts[i]), y = std::log(std::max(rs[i], 1e-300));
        sx += x; sy += y; sxx += x * x; sxy += x * y;
      }
      const double m = static_cast<double>(ts.size());
      const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
      json j = base_report(rng_seed);
      j["order"] = order;
      j["epsilon"] = epsilon;
      j["free_isotypes"] = ws.free_isotypes();
      j["residual_slope"] = slope;
      const auto spec = ws.l_spectrum();
      j["l_eigenvalues"] = spec.eigenvalues;
      j["l_max_rational_distance"] = spec.max_rational_distance;
      if (out_path.empty())
        std::cout << j.dump(2) << "\n";
      else
        write_text(out_path, j.dump(2));
    } else if (*sek_partner) {
      AlgebraPtr alg = RealSemisimpleAlgebra::load_json(alg_path);
      GVector x = load_element_json(alg, elem_path);
      // Normalize the Killing form against this orbit before descending.
      AlgebraPtr normed = normalize_for_element_orbit(x);
      x = x.rebind(normed);
      const PartnerDirection dir = direction == "p_to_gr" ? PartnerDirection::p_to_gr
                                                          : PartnerDirection::gr_to_p;
      const GVector partner = sekiguchi_partner(x, dir);
      if (!out_path.empty()) save_element_json(partner, out_path);
      json j = base_report(rng_seed);
      j["direction"] = direction;
      j["partner_norm"] = norm(partner);
      j["partner_m_norm_sq"] = moment_norm_sq(partner);
      std::cout << j.dump(2) << "\n";
    } else if (*sek_probe) {
      AlgebraPtr alg = RealSemisimpleAlgebra::load_json(alg_path);
      CorePipeline pipe = run_core_pipeline(alg, load_element_json(alg, seed_path));
      std::vector<double> grid;
      for (int s = 0; s <= steps; ++s) grid.push_back(t1 * s / std::max(1, steps));
      const auto rows = convergence_probe(pipe.phi0, grid);
      write_probe_csv(rows, out_path);
      std::cout << "wrote probe table to " << out_path << "\n";
    } else if (*verify_l85) {
      AlgebraPtr alg = RealSemisimpleAlgebra::load_json(alg_path);
      CorePipeline pipe = run_core_pipeline(alg, load_element_json(alg, seed_path));
      const SweepReport rep = lemma85_sweep(pipe.phi0, samples, tmax, rng_seed, jobs);
      json j = base_report(rng_seed);
      j.update(json::parse(sweep_report_json(rep)));
      const bool ok = rep.min_margin >= -1e-10 && rep.disagreements == 0 &&
                      rep.max_equality_gap <= 1e-12;
      j["all_hold"] = ok;
      if (out_path.empty())
        std::cout << j.dump(2) << "\n";
      else
        write_text(out_path, j.dump(2));
      if (!ok) return 2;
    } else if (*verify_cheb) {
      const ChebyshevSweepReport rep = chebyshev_sweep(samples, lmax, rng_seed);
      json j = base_report(rng_seed);
      j.update(json::parse(chebyshev_report_json(rep)));
      const bool ok = rep.min_margin >= -1e-12 && rep.equality_single_pair_ok;
      j["all_hold"] = ok;
      if (out_path.empty())
        std::cout << j.dump(2) << "\n";
      else
        write_text(out_path, j.dump(2));
      if (!ok) return 2;
    }
  } catch (const IoError& e) {
    emit_error("io", e);
    return 1;
  } catch (const ValidationError& e) {
    emit_error("validation", e);
    return 2;
  } catch (const NumericalError& e) {
    emit_error("numerical", e);
    return 3;
  } catch (const std::exception& e) {
    emit_error("internal", e);
    return 3;
  }
  return 0;
}
