// dyadlab: batch experiment runner for dyadic rearrangement analysis.
//
// Every subcommand echoes its effective configuration into the output
// document, so a run is reproducible from the file alone. Seeds default to
// the DYADLAB_SEED environment variable (then 1). Check-style subcommands
// exit nonzero on failure and embed the counterexample in the result.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "dyadlab/extrapolation.hpp"
#include "dyadlab/operators.hpp"
#include "dyadlab/rearrangement.hpp"
#include "dyadlab/serialization.hpp"

using namespace dyadlab;

namespace {

std::uint64_t default_seed() {
  if (const char* env = std::getenv("DYADLAB_SEED")) return std::strtoull(env, nullptr, 10);
  return 1;
}

std::string timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&now));
  return buf;
}

void write_document(const std::string& out_path, const Json& doc) {
  if (out_path.empty()) {
    std::cout << doc.dump(2) << "\n";
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot open output file: " + out_path);
  out << doc.dump(2) << "\n";
}

int emit(const std::string& command, const Json& config, const Json& result, const std::string& out_path,
         bool pass = true) {
  Json doc{{"command", command}, {"config", config}, {"timestamp", timestamp()}, {"result", result}, {"pass", pass}};
  write_document(out_path, doc);
  return pass ? 0 : 1;
}

/// Shared permutation source: a named builder or a permutation file.
struct MapOptions {
  std::string builder = "parity";
  std::string blocks;     // "2:0,2:1,2:2" for the blocks builder
  std::string perm_file;  // overrides the builder
  int depth = 3;

  void attach(CLI::App* cmd) {
    cmd->add_option("--builder", builder, "identity | parity | glued | blocks")->capture_default_str();
    cmd->add_option("--blocks", blocks, "comma-separated block intervals for --builder blocks");
    cmd->add_option("--perm-file", perm_file, "permutation JSON file (overrides --builder)");
    cmd->add_option("--depth", depth, "truncation depth N")->capture_default_str();
  }

  RearrangementMap build() const {
    if (!perm_file.empty()) {
      std::ifstream in(perm_file);
      if (!in) throw std::runtime_error("cannot open permutation file: " + perm_file);
      Json j;
      in >> j;
      return rearrangement_from_json(j);
    }
    if (builder == "identity") return build_identity(depth);
    if (builder == "parity") return build_parity_shift(depth);
    if (builder == "glued") return build_glued_blocks(depth);
    if (builder == "blocks") {
      std::vector<DyadicInterval> ivs;
      std::string token;
      std::istringstream stream(blocks);
      while (std::getline(stream, token, ',')) ivs.push_back(DyadicInterval::parse(token));
      return build_block_perm(ivs, depth);
    }
    throw CLI::ValidationError("--builder", "unknown builder \"" + builder + "\"");
  }

  Json config() const {
    Json j{{"depth", depth}};
    if (!perm_file.empty())
      j["perm_file"] = perm_file;
    else {
      j["builder"] = builder;
      if (!blocks.empty()) j["blocks"] = blocks;
    }
    return j;
  }
};

HomogeneousOp make_homogeneous(const std::string& name, const RearrangementMap& tau, int depth,
                               std::uint64_t seed) {
  if (name == "square") return square_function_op(tau, depth);
  if (name == "rademacher") return rademacher_op(tau, depth, depth + 1 <= 12, 256, seed);
  throw CLI::ValidationError("--operator", "unknown operator \"" + name + "\"");
}

AdaptedSequence random_adapted(int depth, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::vector<double>> levels;
  for (int k = 0; k <= depth; ++k) {
    std::vector<double> z(std::size_t{1} << k);
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = (k == 0 ? 0.0 : levels[k - 1][i / 2]) + unif(rng);
    levels.push_back(std::move(z));
  }
  return AdaptedSequence(std::move(levels));
}

Json levels_to_json(const AdaptedSequence& z) {
  Json out = Json::array();
  for (const auto& level : z.levels) out.push_back(level);
  return out;
}

std::vector<double> load_gamma(const std::string& path, int depth) {
  std::vector<double> gamma(interval_count(depth), 1.0);
  if (path.empty()) return gamma;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open gamma file: " + path);
  Json j;
  in >> j;
  for (const auto& [key, value] : j.items()) gamma[heap_index(DyadicInterval::parse(key))] = value.get<double>();
  return gamma;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dyadic rearrangement analysis toolkit"};
  app.require_subcommand(1);

  std::string out_path;
  app.add_option("--out", out_path, "output file (default: stdout)");

  // ---- norm ---------------------------------------------------------------
  auto* norm_cmd = app.add_subcommand("norm", "operator norm of Id_X (x) T_{p,tau}");
  MapOptions norm_map;
  norm_map.attach(norm_cmd);
  double norm_p = 2.0;
  std::string norm_space = "scalar", norm_mode = "search";
  int norm_restarts = 64, norm_iters = 300;
  std::uint64_t norm_seed = default_seed();
  norm_cmd->add_option("--p", norm_p, "exponent")->capture_default_str();
  norm_cmd->add_option("--space", norm_space, "scalar | lp:<r>:<d>")->capture_default_str();
  norm_cmd->add_option("--mode", norm_mode, "search | exact")->capture_default_str();
  norm_cmd->add_option("--restarts", norm_restarts)->capture_default_str();
  norm_cmd->add_option("--iters", norm_iters)->capture_default_str();
  norm_cmd->add_option("--seed", norm_seed)->capture_default_str();

  // ---- semenov ------------------------------------------------------------
  auto* sem_cmd = app.add_subcommand("semenov", "Semenov constant of a rearrangement");
  MapOptions sem_map;
  sem_map.attach(sem_cmd);
  std::string sem_mode = "auto";
  std::size_t sem_cap = 15;
  int sem_restarts = 8;
  std::size_t sem_steps = 20000;
  std::uint64_t sem_seed = default_seed();
  sem_cmd->add_option("--mode", sem_mode, "auto | exact | heuristic | shadow")->capture_default_str();
  sem_cmd->add_option("--cap", sem_cap, "max interval count for the exact search")->capture_default_str();
  sem_cmd->add_option("--restarts", sem_restarts, "annealing restarts")->capture_default_str();
  sem_cmd->add_option("--anneal-steps", sem_steps)->capture_default_str();
  sem_cmd->add_option("--seed", sem_seed)->capture_default_str();

  // ---- carleson -----------------------------------------------------------
  auto* car_cmd = app.add_subcommand("carleson", "Carleson constant of a collection");
  std::string car_inline, car_file;
  car_cmd->add_option("--collection", car_inline, "inline JSON array of \"k:i\" strings");
  car_cmd->add_option("--collection-file", car_file, "JSON file with the collection");

  // ---- distortion ---------------------------------------------------------
  auto* dis_cmd = app.add_subcommand("distortion", "two-sided Carleson distortion of a bijection");
  MapOptions dis_map;
  dis_map.attach(dis_cmd);
  std::string dis_mode = "exact";
  int dis_samples = 64;
  std::size_t dis_cap = 15;
  std::uint64_t dis_seed = default_seed();
  dis_cmd->add_option("--mode", dis_mode, "exact | sampled")->capture_default_str();
  dis_cmd->add_option("--samples", dis_samples, "samples per density (sampled mode)")->capture_default_str();
  dis_cmd->add_option("--cap", dis_cap)->capture_default_str();
  dis_cmd->add_option("--seed", dis_seed)->capture_default_str();

  // ---- umd ----------------------------------------------------------------
  auto* umd_cmd = app.add_subcommand("umd", "depth-truncated UMD_p constant");
  std::string umd_space = "scalar", umd_mode = "exact";
  double umd_p = 2.0;
  int umd_depth = 2, umd_restarts = 12, umd_samples = 64;
  std::uint64_t umd_seed = default_seed();
  umd_cmd->add_option("--space", umd_space)->capture_default_str();
  umd_cmd->add_option("--p", umd_p)->capture_default_str();
  umd_cmd->add_option("--depth", umd_depth)->capture_default_str();
  umd_cmd->add_option("--mode", umd_mode, "exact | random")->capture_default_str();
  umd_cmd->add_option("--restarts", umd_restarts, "search restarts per pattern")->capture_default_str();
  umd_cmd->add_option("--samples", umd_samples, "patterns in random mode")->capture_default_str();
  umd_cmd->add_option("--seed", umd_seed)->capture_default_str();

  // ---- type ---------------------------------------------------------------
  auto* type_cmd = app.add_subcommand("type", "type-p constant restricted to n vectors");
  std::string type_space = "lp:1.2:8", type_mode = "exact";
  double type_p = 1.2, type_q = 0.0;
  int type_n = 4, type_restarts = 32, type_signs = 4096;
  std::uint64_t type_seed = default_seed();
  type_cmd->add_option("--space", type_space)->capture_default_str();
  type_cmd->add_option("--p", type_p)->capture_default_str();
  type_cmd->add_option("--q", type_q, "normalization exponent (0 = p)")->capture_default_str();
  type_cmd->add_option("--n", type_n)->capture_default_str();
  type_cmd->add_option("--mode", type_mode, "exact | sampled")->capture_default_str();
  type_cmd->add_option("--restarts", type_restarts)->capture_default_str();
  type_cmd->add_option("--sign-samples", type_signs)->capture_default_str();
  type_cmd->add_option("--seed", type_seed)->capture_default_str();

  // ---- verify-maximal -------------------------------------------------------
  auto* vmax_cmd = app.add_subcommand("verify-maximal", "maximal inequality on random adapted sequences");
  MapOptions vmax_map;
  vmax_map.attach(vmax_cmd);
  double vmax_kappa = 2.0;
  int vmax_samples = 1000;
  std::uint64_t vmax_seed = default_seed();
  vmax_cmd->add_option("--kappa", vmax_kappa, "certified Semenov constant")->capture_default_str();
  vmax_cmd->add_option("--samples", vmax_samples)->capture_default_str();
  vmax_cmd->add_option("--seed", vmax_seed)->capture_default_str();

  // ---- verify-monotone ------------------------------------------------------
  auto* vmon_cmd = app.add_subcommand("verify-monotone", "tau-monotonicity of a homogeneous operator");
  MapOptions vmon_map;
  vmon_map.attach(vmon_cmd);
  std::string vmon_op = "square", vmon_space = "scalar";
  double vmon_c = 1.0, vmon_tol = 1e-10;
  int vmon_samples = 500;
  std::uint64_t vmon_seed = default_seed();
  vmon_cmd->add_option("--operator", vmon_op, "square | rademacher")->capture_default_str();
  vmon_cmd->add_option("--space", vmon_space)->capture_default_str();
  vmon_cmd->add_option("--c", vmon_c)->capture_default_str();
  vmon_cmd->add_option("--tol", vmon_tol)->capture_default_str();
  vmon_cmd->add_option("--samples", vmon_samples)->capture_default_str();
  vmon_cmd->add_option("--seed", vmon_seed)->capture_default_str();

  // ---- verify-42 ------------------------------------------------------------
  auto* v42_cmd = app.add_subcommand("verify-42", "extrapolation constant check");
  MapOptions v42_map;
  v42_map.attach(v42_cmd);
  std::string v42_op = "square", v42_space = "scalar";
  double v42_p = 2.0, v42_q = 1.5, v42_kappa = 1.0, v42_c = 1.0, v42_tol = 0.05;
  int v42_restarts = 24;
  std::uint64_t v42_seed = default_seed();
  v42_cmd->add_option("--operator", v42_op)->capture_default_str();
  v42_cmd->add_option("--space", v42_space)->capture_default_str();
  v42_cmd->add_option("--p", v42_p)->capture_default_str();
  v42_cmd->add_option("--q", v42_q)->capture_default_str();
  v42_cmd->add_option("--kappa", v42_kappa)->capture_default_str();
  v42_cmd->add_option("--c", v42_c)->capture_default_str();
  v42_cmd->add_option("--tolerance", v42_tol)->capture_default_str();
  v42_cmd->add_option("--restarts", v42_restarts)->capture_default_str();
  v42_cmd->add_option("--seed", v42_seed)->capture_default_str();

  // ---- verify-52 ------------------------------------------------------------
  auto* v52_cmd = app.add_subcommand("verify-52", "H^1 extrapolation bound check");
  MapOptions v52_map;
  v52_map.attach(v52_cmd);
  double v52_p = 2.0, v52_kappa = 2.0, v52_pstar = 2.0, v52_tol = 0.05;
  int v52_h1 = 200, v52_atoms = 200, v52_c3 = 32;
  std::string v52_dec_file, v52_space = "scalar";
  std::uint64_t v52_seed = default_seed();
  v52_cmd->add_option("--space", v52_space)->capture_default_str();
  v52_cmd->add_option("--p", v52_p)->capture_default_str();
  v52_cmd->add_option("--kappa", v52_kappa)->capture_default_str();
  v52_cmd->add_option("--p-star", v52_pstar)->capture_default_str();
  v52_cmd->add_option("--tolerance", v52_tol)->capture_default_str();
  v52_cmd->add_option("--h1-samples", v52_h1)->capture_default_str();
  v52_cmd->add_option("--atom-samples", v52_atoms)->capture_default_str();
  v52_cmd->add_option("--c3-samples", v52_c3)->capture_default_str();
  v52_cmd->add_option("--dec-file", v52_dec_file, "JSON array of decompositions (default: single-part)");
  v52_cmd->add_option("--seed", v52_seed)->capture_default_str();

  // ---- condition-c ----------------------------------------------------------
  auto* cc_cmd = app.add_subcommand("condition-c", "check condition C for one decomposition");
  MapOptions cc_map;
  cc_map.attach(cc_cmd);
  std::string cc_dec_file, cc_space = "scalar", cc_gamma_file;
  int cc_c3 = 64;
  std::uint64_t cc_seed = default_seed();
  cc_cmd->add_option("--dec-file", cc_dec_file, "decomposition JSON file")->required();
  cc_cmd->add_option("--space", cc_space)->capture_default_str();
  cc_cmd->add_option("--gamma-file", cc_gamma_file, "JSON object {\"k:i\": weight}; default all 1");
  cc_cmd->add_option("--c3-samples", cc_c3)->capture_default_str();
  cc_cmd->add_option("--seed", cc_seed)->capture_default_str();

  // ---- example --------------------------------------------------------------
  auto* ex_cmd = app.add_subcommand("example", "emit a builder permutation as a JSON file");
  MapOptions ex_map;
  ex_map.attach(ex_cmd);

  // ---- sweep ----------------------------------------------------------------
  auto* sweep_cmd = app.add_subcommand("sweep", "divergence table over block families");
  std::string sweep_space = "lp:1.2:16", sweep_n = "1..5";
  double sweep_q = 2.0;
  sweep_cmd->add_option("--space", sweep_space)->capture_default_str();
  sweep_cmd->add_option("--q", sweep_q)->capture_default_str();
  sweep_cmd->add_option("--n", sweep_n, "single value or lo..hi")->capture_default_str();

  for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; })) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    if (norm_cmd->parsed()) {
      const auto tau = norm_map.build();
      const SpaceSpec space = parse_space_spec(norm_space);
      RearrangementOp op(tau, norm_p);
      SearchOptions so;
      so.restarts = norm_restarts;
      so.max_iterations = norm_iters;
      so.seed = norm_seed;
      const NormEstimate est = norm_mode == "exact"
                                   ? operator_norm_exact_small(op, norm_p, space, tau.source_depth(), so)
                                   : operator_norm_search(op, norm_p, space, tau.source_depth(), so);
      Json config = norm_map.config();
      config["p"] = norm_p;
      config["space"] = norm_space;
      config["mode"] = norm_mode;
      config["restarts"] = norm_restarts;
      config["seed"] = norm_seed;
      return emit("norm", config, estimate_to_json(est), out_path);
    }

    if (sem_cmd->parsed()) {
      const auto tau = sem_map.build();
      Json config = sem_map.config();
      config["mode"] = sem_mode;
      config["cap"] = sem_cap;
      config["seed"] = sem_seed;
      Json result;
      if (sem_mode == "exact" || (sem_mode == "auto" && interval_count(tau.source_depth()) <= sem_cap)) {
        result = semenov_to_json(semenov_exact(tau, sem_cap));
        result["mode"] = "exact";
      } else if (sem_mode == "shadow") {
        result = semenov_to_json(shadow_semenov(tau));
        result["mode"] = "shadow";
      } else {
        SemenovSearchOptions opts;
        opts.anneal_restarts = sem_restarts;
        opts.anneal_steps = sem_steps;
        opts.seed = sem_seed;
        result = semenov_to_json(semenov_heuristic(tau, opts));
        result["mode"] = "heuristic";
        result["shadow_bound"] = semenov_to_json(shadow_semenov(tau));
      }
      return emit("semenov", config, result, out_path);
    }

    if (car_cmd->parsed()) {
      Json j;
      if (!car_file.empty()) {
        std::ifstream in(car_file);
        if (!in) throw std::runtime_error("cannot open collection file: " + car_file);
        in >> j;
      } else {
        j = Json::parse(car_inline);
      }
      const IntervalCollection e = collection_from_json(j);
      Json config{{"collection", j}};
      return emit("carleson", config, dyadrat_to_json(carleson_constant(e)), out_path);
    }

    if (dis_cmd->parsed()) {
      const auto tau = dis_map.build();
      Json config = dis_map.config();
      config["mode"] = dis_mode;
      config["seed"] = dis_seed;
      DistortionResult result;
      if (dis_mode == "exact") {
        result = carleson_distortion_exact(tau, dis_cap);
      } else {
        DistortionSampleOptions opts;
        opts.samples_per_density = dis_samples;
        opts.seed = dis_seed;
        result = carleson_distortion_sampled(tau, opts);
      }
      return emit("distortion", config, distortion_to_json(result), out_path);
    }

    if (umd_cmd->parsed()) {
      const SpaceSpec space = parse_space_spec(umd_space);
      UmdOptions opts;
      opts.search.restarts = umd_restarts;
      opts.search.seed = umd_seed;
      opts.pattern_samples = umd_samples;
      const UmdEstimate est = umd_constant(space, umd_p, umd_depth, umd_mode == "exact", opts);
      Json config{{"space", umd_space}, {"p", umd_p},       {"depth", umd_depth},
                  {"mode", umd_mode},   {"seed", umd_seed}, {"restarts", umd_restarts}};
      Json result = estimate_to_json(est.norm);
      result["theta"] = est.theta.values;
      return emit("umd", config, result, out_path);
    }

    if (type_cmd->parsed()) {
      const SpaceSpec space = parse_space_spec(type_space);
      TypeOptions opts;
      opts.restarts = type_restarts;
      opts.seed = type_seed;
      opts.sign_samples = type_signs;
      opts.q = type_q;
      const NormEstimate est = type_constant(space, type_p, type_n, type_mode == "exact", opts);
      Json config{{"space", type_space}, {"p", type_p},       {"q", type_q},
                  {"n", type_n},         {"mode", type_mode}, {"seed", type_seed}};
      return emit("type", config, estimate_to_json(est), out_path);
    }

    if (vmax_cmd->parsed()) {
      const auto tau = vmax_map.build();
      Json config = vmax_map.config();
      config["kappa"] = vmax_kappa;
      config["samples"] = vmax_samples;
      config["seed"] = vmax_seed;
      int violations = 0;
      double worst = 0.0;
      Json counterexample;
      for (int t = 0; t < vmax_samples; ++t) {
        std::mt19937_64 rng(vmax_seed + t);
        const auto z = random_adapted(tau.source_depth(), rng);
        const auto report = check_maximal_inequality(tau, z, vmax_kappa);
        worst = std::max(worst, report.lhs - vmax_kappa * report.rhs);
        if (!report.pass) {
          ++violations;
          if (counterexample.is_null())
            counterexample =
                Json{{"sample", t}, {"report", maximal_report_to_json(report)}, {"levels", levels_to_json(z)}};
        }
      }
      Json result{{"samples", vmax_samples}, {"violations", violations}, {"worst_excess", worst}};
      if (!counterexample.is_null()) result["counterexample"] = counterexample;
      return emit("verify-maximal", config, result, out_path, violations == 0);
    }

    if (vmon_cmd->parsed()) {
      const auto tau = vmon_map.build();
      const SpaceSpec space = parse_space_spec(vmon_space);
      const int levels = std::max(0, tau.source_depth() - 1);
      const auto op = make_homogeneous(vmon_op, tau, levels, vmon_seed);
      const auto report = check_tau_monotone(op, tau, space, vmon_c, vmon_samples, vmon_seed, vmon_tol);
      Json config = vmon_map.config();
      config["operator"] = vmon_op;
      config["space"] = vmon_space;
      config["c"] = vmon_c;
      config["samples"] = vmon_samples;
      config["seed"] = vmon_seed;
      return emit("verify-monotone", config, monotone_report_to_json(report), out_path, report.pass);
    }

    if (v42_cmd->parsed()) {
      const auto tau = v42_map.build();
      const SpaceSpec space = parse_space_spec(v42_space);
      const int levels = std::max(0, tau.source_depth() - 1);
      const auto op = make_homogeneous(v42_op, tau, levels, v42_seed);
      RatioSearchOptions opts;
      opts.restarts = v42_restarts;
      opts.seed = v42_seed;
      const auto report = check_extrapolation_bound(op, space, v42_kappa, v42_c, v42_p, v42_q, opts, v42_tol);
      Json config = v42_map.config();
      config["operator"] = v42_op;
      config["space"] = v42_space;
      config["p"] = v42_p;
      config["q"] = v42_q;
      config["kappa"] = v42_kappa;
      config["c"] = v42_c;
      config["seed"] = v42_seed;
      return emit("verify-42", config, extrapolation_bound_report_to_json(report), out_path, report.pass);
    }

    if (v52_cmd->parsed()) {
      const auto tau = v52_map.build();
      std::vector<CDecomposition> decs;
      if (!v52_dec_file.empty()) {
        std::ifstream in(v52_dec_file);
        if (!in) throw std::runtime_error("cannot open decomposition file: " + v52_dec_file);
        Json j;
        in >> j;
        for (const auto& item : j) decs.push_back(decomposition_from_json(item));
      }
      H1ExtrapolationOptions opts;
      opts.h1_samples = v52_h1;
      opts.atom_samples = v52_atoms;
      opts.c3_samples = v52_c3;
      opts.seed = v52_seed;
      opts.tolerance = v52_tol;
      const SpaceSpec space = parse_space_spec(v52_space);
      Matrix identity(space.dim, std::vector<double>(space.dim, 0.0));
      for (int j = 0; j < space.dim; ++j) identity[j][j] = 1.0;
      const std::vector<double> gamma(interval_count(tau.source_depth()), 1.0);
      const auto report =
          check_h1_extrapolation(identity, space, space, tau, gamma, v52_p, v52_kappa, v52_pstar, decs, opts);
      Json config = v52_map.config();
      config["space"] = v52_space;
      config["p"] = v52_p;
      config["kappa"] = v52_kappa;
      config["p_star"] = v52_pstar;
      config["seed"] = v52_seed;
      return emit("verify-52", config, h1_extrapolation_report_to_json(report), out_path, report.pass);
    }

    if (cc_cmd->parsed()) {
      const auto tau = cc_map.build();
      std::ifstream in(cc_dec_file);
      if (!in) throw std::runtime_error("cannot open decomposition file: " + cc_dec_file);
      Json j;
      in >> j;
      const CDecomposition dec = decomposition_from_json(j);
      const SpaceSpec space = parse_space_spec(cc_space);
      const auto gamma = load_gamma(cc_gamma_file, tau.source_depth());
      SearchOptions beta_search;
      beta_search.seed = cc_seed;
      const auto report = check_condition_C(dec, tau, gamma, space, cc_c3, beta_search);
      Json config = cc_map.config();
      config["dec_file"] = cc_dec_file;
      config["space"] = cc_space;
      config["seed"] = cc_seed;
      return emit("condition-c", config, condition_c_report_to_json(report), out_path, report.pass);
    }

    if (ex_cmd->parsed()) {
      // Emit the raw permutation format so the file round-trips through
      // --perm-file.
      write_document(out_path, rearrangement_to_json(ex_map.build()));
      return 0;
    }

    if (sweep_cmd->parsed()) {
      const SpaceSpec space = parse_space_spec(sweep_space);
      std::ostringstream csv;
      csv << "n,lower_bound,witness_ratio,seconds\n";
      for (int n : parse_range(sweep_n)) {
        const auto start = std::chrono::steady_clock::now();
        const auto row = block_witness_ratio(n, space, sweep_q);
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        csv << row.n << "," << row.lower_bound << "," << row.witness_ratio << "," << seconds << "\n";
      }
      if (out_path.empty()) {
        std::cout << csv.str();
      } else {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot open output file: " + out_path);
        out << csv.str();
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
