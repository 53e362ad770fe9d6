// Command-line pipeline driver: simulate, extract, em-init, fit, predict,
// select, summarize. Every run is a pure function of (inputs, config, seed).
#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "simplexdir/chain_io.hpp"
#include "simplexdir/dirext.hpp"
#include "simplexdir/em.hpp"
#include "simplexdir/evalsel.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace simplexdir;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitConvergence = 2;
constexpr int kExitNumeric = 3;

struct SpecOptions {
  std::string model = "svm";
  int k = 0;  // 0 = model default
  double omega = -1.0, gp_sigma = -1.0, jitter = -2.0;
  double varsigma = -1.0, tau = -1.0;
  double gamma_a = -1.0, gamma_b = -1.0;
  double mean_u = -1.0, mean_c = -1.0;
  std::string gp_means, mix_gp_means;  // "a,b;a,b" and "c;c"
};

void add_spec_options(CLI::App* cmd, SpecOptions* o) {
  cmd->add_option("--model", o->model, "iv | ivm | svm | svmc | svmp")->required();
  cmd->add_option("--k", o->k, "component count (mixtures)");
  cmd->add_option("--omega", o->omega, "kernel length scale");
  cmd->add_option("--gp-sigma", o->gp_sigma, "kernel marginal scale");
  cmd->add_option("--jitter", o->jitter, "covariance jitter (-1 = default policy)");
  cmd->add_option("--varsigma", o->varsigma, "hierarchical concentration sd");
  cmd->add_option("--tau", o->tau, "hyperprior sd on nu");
  cmd->add_option("--gamma-a", o->gamma_a, "Gamma prior shape on rho (iv/ivm)");
  cmd->add_option("--gamma-b", o->gamma_b, "Gamma prior rate on rho (iv/ivm)");
  cmd->add_option("--mean-u", o->mean_u, "vM mean-prior location (iv/ivm)");
  cmd->add_option("--mean-c", o->mean_c, "vM mean-prior concentration (iv/ivm)");
  cmd->add_option("--gp-means", o->gp_means, "per-component GP means, e.g. '0,1;0,-1'");
  cmd->add_option("--mix-gp-means", o->mix_gp_means, "mixing-GP means, e.g. '0;0'");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string f;
  while (std::getline(ss, f, sep)) out.push_back(f);
  return out;
}

ModelSpec build_spec(const SpecOptions& o) {
  ModelSpec spec = default_paper_spec(model_from_name(o.model));
  if (o.k > 0) spec.K = o.k;
  if (o.omega > 0.0) spec.gp.omega = o.omega;
  if (o.gp_sigma > 0.0) spec.gp.sigma = o.gp_sigma;
  if (o.jitter > -2.0 + 1e-12) spec.gp.jitter = o.jitter;
  if (o.varsigma > 0.0) spec.conc_prior.varsigma = o.varsigma;
  if (o.tau > 0.0) spec.conc_prior.tau = o.tau;
  if (o.gamma_a > 0.0) spec.conc_prior.a = o.gamma_a;
  if (o.gamma_b >= 0.0) spec.conc_prior.b = o.gamma_b;
  if (o.mean_u >= 0.0) spec.mean_prior.u = o.mean_u;
  if (o.mean_c >= 0.0) spec.mean_prior.c = o.mean_c;
  if (!o.gp_means.empty()) {
    spec.gp_means.clear();
    for (const auto& comp : split(o.gp_means, ';')) {
      const auto ab = split(comp, ',');
      if (ab.size() != 2) throw std::domain_error("--gp-means: expected 'a,b;a,b'");
      spec.gp_means.emplace_back(Eigen::VectorXd::Constant(1, std::stod(ab[0])),
                                 Eigen::VectorXd::Constant(1, std::stod(ab[1])));
    }
  }
  if (!o.mix_gp_means.empty()) {
    spec.mix_gp_means.clear();
    for (const auto& c : split(o.mix_gp_means, ';'))
      spec.mix_gp_means.push_back(Eigen::VectorXd::Constant(1, std::stod(c)));
  }
  if (spec.kind == ModelKind::SVMC && static_cast<int>(spec.gp_means.size()) < spec.K)
    spec.gp_means.resize(spec.K,
                         {Eigen::VectorXd::Constant(1, 0.0), Eigen::VectorXd::Constant(1, 0.0)});
  return spec;
}

json truth_to_json(const SimTruth& t) {
  json j;
  auto vec = [](const Eigen::VectorXd& v) {
    json a = json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
  };
  if (!t.m_surface.empty()) {
    json arr = json::array();
    for (const auto& m : t.m_surface) arr.push_back(vec(m));
    j["m_surface"] = arr;
  }
  if (t.rho_surface.size()) j["rho_surface"] = vec(t.rho_surface);
  if (!t.comp_means.empty()) j["comp_means"] = t.comp_means;
  if (!t.comp_rhos.empty()) j["comp_rhos"] = t.comp_rhos;
  if (t.lambda.size()) j["lambda"] = vec(t.lambda);
  if (!t.zeta.empty()) j["zeta"] = t.zeta;
  return j;
}

SamplerSettings settings_for(const ModelSpec& spec, int chains, int iters, int warmup, int thin,
                             int threads, std::uint64_t seed) {
  SamplerSettings s;
  const bool short_run = spec.kind == ModelKind::SVMP || !spec.is_spatial();
  s.n_iter = iters > 0 ? iters : (short_run ? 2000 : 10000);
  s.n_warmup = warmup > 0 ? warmup : s.n_iter / 2;
  s.thin = thin > 0 ? thin : (short_run ? 1 : 5);
  s.n_chains = chains;
  s.threads = threads;
  s.seed = seed;
  if (s.n_warmup >= s.n_iter)
    throw std::domain_error("fit: warmup must be smaller than total iterations");
  return s;
}

ParamState load_init(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::domain_error("cannot open init file " + path);
  json j;
  in >> j;
  return state_from_json(j.contains("state") ? j["state"] : j);
}

int cmd_fit_run(const std::string& data_path, const SpecOptions& so, const std::string& init_path,
                int chains, int iters, int warmup, int thin, int threads, std::uint64_t seed,
                int ess_sweeps, const std::string& out_dir) {
  const Dataset data = load_dataset(data_path);
  ModelSpec spec = build_spec(so);
  SamplerSettings s = settings_for(spec, chains, iters, warmup, thin, threads, seed);
  if (ess_sweeps > 0) s.ess_sweeps = ess_sweeps;
  if (!init_path.empty()) s.init = load_init(init_path);
  const auto chains_out = run_chains(data, spec, s);
  fs::create_directories(out_dir);
  write_chains_jsonl(out_dir + "/chains.jsonl", spec, chains_out, seed);
  const json summary = summarize(spec, chains_out);
  std::ofstream(out_dir + "/summary.json") << summary.dump(2) << '\n';
  std::cout << summary.dump(2) << '\n';
  const double max_rhat = summary["diagnostics"]["max_rhat"].get<double>();
  if (max_rhat > 1.2) {
    std::cerr << "warning: max split-Rhat " << max_rhat << " exceeds 1.2\n";
    return kExitConvergence;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian models for random directions on the 2-simplex"};
  app.require_subcommand(1);
  app.set_config("--config", "", "flat key=value config file; flags override");

  // ---- simulate ----
  auto* sim = app.add_subcommand("simulate", "generate a simulation-study dataset");
  std::string sim_scenario = "svm", sim_out = ".";
  int sim_n = 500;
  std::uint64_t sim_seed = 0;
  sim->add_option("--scenario", sim_scenario, "iv | ivm | svm | svmc | svmp | svm-zero")
      ->required();
  sim->add_option("--n", sim_n, "number of locations");
  sim->add_option("--seed", sim_seed, "rng seed");
  sim->add_option("--out", sim_out, "output directory")->required();

  // ---- extract ----
  auto* ext = app.add_subcommand("extract", "directions from composition pairs");
  std::string ext_pairs, ext_out = ".";
  double ext_tol = 0.0;
  ext->add_option("--pairs", ext_pairs, "CSV with x1a,x2a,x3a,x1b,x2b,x3b")->required();
  ext->add_option("--tol", ext_tol, "duplicate-location tolerance (max-norm)");
  ext->add_option("--out", ext_out, "output directory")->required();

  // ---- em-init ----
  auto* emi = app.add_subcommand("em-init", "regularized EM starting state");
  std::string emi_data, emi_out = "init.json";
  SpecOptions emi_spec;
  std::uint64_t emi_seed = 0;
  int emi_restarts = 1;
  emi->add_option("--data", emi_data, "dataset CSV")->required();
  add_spec_options(emi, &emi_spec);
  emi->add_option("--seed", emi_seed, "rng seed");
  emi->add_option("--restarts", emi_restarts, "EM restarts, best objective wins");
  emi->add_option("--out", emi_out, "init JSON path");

  // ---- fit ----
  auto* fit = app.add_subcommand("fit", "MCMC fit");
  std::string fit_data, fit_out = "fit", fit_init;
  SpecOptions fit_spec;
  int fit_chains = 4, fit_iters = 0, fit_warmup = 0, fit_thin = 0, fit_threads = 1;
  int fit_ess_sweeps = 0;
  std::uint64_t fit_seed = 0;
  fit->add_option("--data", fit_data, "dataset CSV")->required();
  add_spec_options(fit, &fit_spec);
  fit->add_option("--init", fit_init, "starting state JSON (from em-init)");
  fit->add_option("--chains", fit_chains, "number of chains");
  fit->add_option("--iters", fit_iters, "iterations per chain (0 = model default)");
  fit->add_option("--warmup", fit_warmup, "warmup iterations (0 = half)");
  fit->add_option("--thin", fit_thin, "keep every thin-th draw (0 = model default)");
  fit->add_option("--ess-sweeps", fit_ess_sweeps, "slice-sampling updates per iteration");
  fit->add_option("--threads", fit_threads, "chain-level parallelism");
  fit->add_option("--seed", fit_seed, "rng seed");
  fit->add_option("--out", fit_out, "output directory");

  // ---- predict ----
  auto* pred = app.add_subcommand("predict", "held-out posterior predictive score");
  std::string pred_chains, pred_train, pred_test, pred_out;
  int pred_draws = 100;
  std::uint64_t pred_seed = 0;
  pred->add_option("--chains", pred_chains, "chains.jsonl from fit")->required();
  pred->add_option("--train", pred_train, "training dataset CSV")->required();
  pred->add_option("--test", pred_test, "withheld dataset CSV")->required();
  pred->add_option("--pred-draws", pred_draws, "predictive draws per posterior draw");
  pred->add_option("--seed", pred_seed, "rng seed");
  pred->add_option("--out", pred_out, "scores CSV (append)");

  // ---- select ----
  auto* sel = app.add_subcommand("select", "fit several models and pick by held-out score");
  std::string sel_data, sel_models = "svm,svmc,svmp", sel_out = "select";
  int sel_ntest = 0, sel_chains = 2, sel_iters = 0, sel_threads = 1, sel_pred_draws = 100;
  std::uint64_t sel_seed = 0;
  sel->add_option("--data", sel_data, "dataset CSV")->required();
  sel->add_option("--models", sel_models, "comma-separated model list");
  sel->add_option("--n-test", sel_ntest, "withheld points (0 = n/5)");
  sel->add_option("--chains", sel_chains, "chains per fit");
  sel->add_option("--iters", sel_iters, "iterations per chain (0 = defaults)");
  sel->add_option("--pred-draws", sel_pred_draws, "predictive draws");
  sel->add_option("--threads", sel_threads, "chain-level parallelism");
  sel->add_option("--seed", sel_seed, "rng seed");
  sel->add_option("--out", sel_out, "output directory");

  // ---- summarize ----
  auto* summ = app.add_subcommand("summarize", "posterior summary from saved chains");
  std::string summ_chains, summ_out;
  summ->add_option("--chains", summ_chains, "chains.jsonl")->required();
  summ->add_option("--out", summ_out, "summary JSON path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      Scenario sc;
      sc.kind = scenario_from_name(sim_scenario);
      sc.n_locations = sim_n;
      sc.seed = sim_seed;
      Rng rng(sim_seed);
      const SimResult res = simulate_scenario(sc, rng);
      fs::create_directories(sim_out);
      write_dataset(sim_out + "/data.csv", res.data);
      json truth = truth_to_json(res.truth);
      truth["scenario"] = sim_scenario;
      truth["seed"] = sim_seed;
      truth["n"] = sim_n;
      std::ofstream(sim_out + "/truth.json") << truth.dump(2) << '\n';
      std::cout << "wrote " << sim_out << "/data.csv (" << res.data.n() << " rows)\n";
      return kExitOk;
    }

    if (ext->parsed()) {
      const auto pairs = load_pairs(ext_pairs);
      std::vector<DirectionObservation> obs;
      int skipped = 0;
      for (const auto& [a, b] : pairs) {
        try {
          obs.push_back(extract_direction(a, b));
        } catch (const std::domain_error&) {
          ++skipped;
        }
      }
      const auto [kept, removed] = dedup(obs, ext_tol);
      fs::create_directories(ext_out);
      write_directions(ext_out + "/directions.csv", kept);
      json report{{"pairs", pairs.size()},
                  {"skipped_degenerate", skipped},
                  {"removed_duplicates", removed},
                  {"kept", kept.size()}};
      std::ofstream(ext_out + "/extract_report.json") << report.dump(2) << '\n';
      std::cout << report.dump(2) << '\n';
      return kExitOk;
    }

    if (emi->parsed()) {
      const Dataset data = load_dataset(emi_data);
      const ModelSpec spec = build_spec(emi_spec);
      EmConfig cfg;
      json out;
      out["model"] = emi_spec.model;
      Rng root(emi_seed);
      auto best_of = [&](auto runner) {
        double best = -std::numeric_limits<double>::infinity();
        json best_state, best_trace;
        for (int r = 0; r < std::max(1, emi_restarts); ++r) {
          Rng rng = root.substream(r + 1);
          auto [state, objective, trace] = runner(rng);
          if (objective > best) {
            best = objective;
            best_state = state;
            best_trace = trace;
          }
        }
        out["state"] = best_state;
        out["objective"] = best;
        out["trace"] = best_trace;
      };
      if (spec.kind == ModelKind::IVM) {
        best_of([&](Rng& rng) {
          const auto em = em_ivm(data, spec.K, cfg, rng);
          return std::tuple(state_to_json(initial_state_ivm(spec, em)), em.trace.back(),
                            json(em.trace));
        });
      } else if (spec.kind == ModelKind::SVMC) {
        const ModelContext ctx = prepare_context(spec, data);
        best_of([&](Rng& rng) {
          const auto em = em_svmc(data, spec, cfg, rng);
          return std::tuple(state_to_json(initial_state_svmc(spec, ctx, em)), em.trace.back(),
                            json(em.trace));
        });
      } else if (spec.kind == ModelKind::SVMP) {
        const ModelContext ctx = prepare_context(spec, data);
        best_of([&](Rng& rng) {
          const auto em = em_svmp(data, spec, cfg, rng);
          return std::tuple(state_to_json(initial_state_svmp(spec, ctx, em)), em.trace.back(),
                            json(em.trace));
        });
      } else {
        throw std::domain_error("em-init supports ivm, svmc, svmp");
      }
      std::ofstream(emi_out) << out.dump(2) << '\n';
      std::cout << "wrote " << emi_out << '\n';
      return kExitOk;
    }

    if (fit->parsed()) {
      return cmd_fit_run(fit_data, fit_spec, fit_init, fit_chains, fit_iters, fit_warmup,
                         fit_thin, fit_threads, fit_seed, fit_ess_sweeps, fit_out);
    }

    if (pred->parsed()) {
      const LoadedChains lc = read_chains_jsonl(pred_chains);
      const Dataset train = load_dataset(pred_train);
      const Dataset test = load_dataset(pred_test);
      Rng rng(pred_seed);
      const PpScore score =
          log_posterior_predictive(lc.spec, lc.chains, train, test, pred_draws, rng);
      std::cout << "model=" << model_name(lc.spec.kind) << " log_pp=" << score.log_pp
                << " se=" << score.se << " n_test=" << score.n_test << '\n';
      if (!pred_out.empty()) {
        const bool fresh = !fs::exists(pred_out);
        std::ofstream out(pred_out, std::ios::app);
        if (fresh) out << "model,log_pp,se,n_test,seed\n";
        out << model_name(lc.spec.kind) << ',' << score.log_pp << ',' << score.se << ','
            << score.n_test << ',' << pred_seed << '\n';
      }
      return kExitOk;
    }

    if (sel->parsed()) {
      const auto model_list = split(sel_models, ',');
      if (model_list.size() < 2) throw std::domain_error("select: need at least two models");
      const Dataset all = load_dataset(sel_data);
      const int n_test = sel_ntest > 0 ? sel_ntest : std::max(1, all.n() / 5);
      if (n_test >= all.n()) throw std::domain_error("select: withheld set too large");
      Rng rng(sel_seed);
      std::vector<int> idx(all.n());
      std::iota(idx.begin(), idx.end(), 0);
      for (int i = all.n() - 1; i > 0; --i)
        std::swap(idx[i], idx[static_cast<int>(rng.uniform() * (i + 1)) % (i + 1)]);
      Dataset train, test;
      train.directions.resize(all.n() - n_test);
      test.directions.resize(n_test);
      for (int i = 0; i < n_test; ++i) {
        test.locations.push_back(all.locations[idx[i]]);
        test.directions[i] = all.directions[idx[i]];
      }
      for (int i = n_test; i < all.n(); ++i) {
        train.locations.push_back(all.locations[idx[i]]);
        train.directions[i - n_test] = all.directions[idx[i]];
      }

      std::vector<PpScore> scores;
      std::vector<std::string> failures;
      fs::create_directories(sel_out);
      for (const auto& name : model_list) {
        try {
          SpecOptions so;
          so.model = name;
          const ModelSpec spec = build_spec(so);
          SamplerSettings s =
              settings_for(spec, sel_chains, sel_iters, 0, 0, sel_threads, sel_seed);
          const auto chains = run_chains(train, spec, s);
          Rng prng = rng.substream(spec_hash(spec));
          scores.push_back(
              log_posterior_predictive(spec, chains, train, test, sel_pred_draws, prng));
        } catch (const std::exception& e) {
          failures.push_back(name + std::string(": ") + e.what());
        }
      }
      std::ofstream csv(sel_out + "/scores.csv");
      csv << "model,log_pp,se,n_test,seed\n";
      for (const auto& sc : scores)
        csv << sc.model << ',' << sc.log_pp << ',' << sc.se << ',' << sc.n_test << ','
            << sel_seed << '\n';
      for (const auto& f : failures) std::cerr << "model failed: " << f << '\n';
      if (scores.empty()) throw std::runtime_error("select: every model failed");
      const Selection choice = select_model(scores);
      std::cout << "selected " << scores[choice.best].model
                << (choice.tie ? " (tied within MC error)" : "") << '\n';
      return failures.empty() ? kExitOk : kExitNumeric;
    }

    if (summ->parsed()) {
      const LoadedChains lc = read_chains_jsonl(summ_chains);
      const json summary = summarize(lc.spec, lc.chains);
      if (!summ_out.empty()) std::ofstream(summ_out) << summary.dump(2) << '\n';
      else std::cout << summary.dump(2) << '\n';
      return kExitOk;
    }
  } catch (const std::domain_error& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitOk;
}
