#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "simplexdir/bessel.hpp"
#include "simplexdir/chain_io.hpp"
#include "simplexdir/dirext.hpp"
#include "simplexdir/em.hpp"
#include "simplexdir/evalsel.hpp"
#include "simplexdir/theory.hpp"

namespace py = pybind11;
using namespace simplexdir;

namespace {

std::vector<SimplexPoint> to_points(const Eigen::MatrixXd& locs) {
  if (locs.cols() != 3) throw std::domain_error("locations must be an (n, 3) array");
  std::vector<SimplexPoint> out;
  out.reserve(locs.rows());
  for (int i = 0; i < locs.rows(); ++i)
    out.emplace_back(Eigen::Vector3d(locs.row(i).transpose()), 1e-6);
  return out;
}

Eigen::MatrixXd from_points(const std::vector<SimplexPoint>& pts) {
  Eigen::MatrixXd out(pts.size(), 3);
  for (std::size_t i = 0; i < pts.size(); ++i) out.row(i) = pts[i].coords().transpose();
  return out;
}

Dataset make_dataset(const Eigen::MatrixXd& locs, const Eigen::VectorXd& directions) {
  Dataset d;
  d.locations = to_points(locs);
  d.directions = directions.unaryExpr([](double y) { return wrap_angle(y); });
  d.check();
  return d;
}

py::object json_to_py(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

SamplerSettings make_settings(int chains, int iters, int warmup, int thin, int threads,
                              std::uint64_t seed) {
  SamplerSettings s;
  s.n_chains = chains;
  s.n_iter = iters;
  s.n_warmup = warmup > 0 ? warmup : iters / 2;
  s.thin = thin;
  s.threads = threads;
  s.seed = seed;
  return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bayesian models for random directions on the 2-simplex";

  // circular building blocks
  m.def("arctan_star", &arctan_star, py::arg("z1"), py::arg("z2"));
  m.def("wrap_angle", &wrap_angle, py::arg("radians"));
  m.def("bessel_i_ratio", &bessel_i_ratio, py::arg("n"), py::arg("rho"));
  m.def(
      "vm_log_density",
      [](double y, double mean, double concentration) {
        return vm_log_density(y, {Angle(mean), concentration});
      },
      py::arg("y"), py::arg("mean"), py::arg("concentration"));
  m.def(
      "vm_sample",
      [](double mean, double concentration, int n, std::uint64_t seed) {
        Rng rng(seed);
        Eigen::VectorXd out(n);
        for (int i = 0; i < n; ++i) out[i] = vm_sample({Angle(mean), concentration}, rng);
        return out;
      },
      py::arg("mean"), py::arg("concentration"), py::arg("n") = 1, py::arg("seed") = 0);
  m.def(
      "pn2_density",
      [](double y, const Eigen::Vector2d& mu, double sigma) {
        Pn2Params p;
        p.mu = mu;
        p.sigma = sigma;
        return pn2_density(y, p);
      },
      py::arg("y"), py::arg("mu"), py::arg("sigma") = 1.0);
  m.def(
      "pn2_circular_variance",
      [](const Eigen::Vector2d& mu, double sigma) {
        Pn2Params p;
        p.mu = mu;
        p.sigma = sigma;
        return pn2_circular_variance(p);
      },
      py::arg("mu"), py::arg("sigma") = 1.0);
  m.def(
      "circular_summary",
      [](const Eigen::VectorXd& angles) {
        const CircularSummary s = circular_summary(angles);
        py::dict out;
        out["mean"] = s.mean.value();
        out["variance"] = s.variance;
        out["resultant_length"] = s.resultant_length;
        out["degenerate"] = s.degenerate;
        return out;
      },
      py::arg("angles"));
  m.def(
      "circular_correlation",
      [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        return circular_correlation(std::span<const double>(a.data(), a.size()),
                                    std::span<const double>(b.data(), b.size()));
      },
      py::arg("a"), py::arg("b"));
  m.def("generalized_inverse_logit", &generalized_inverse_logit, py::arg("z"));

  // gaussian-process pieces
  m.def(
      "sqexp_kernel",
      [](const Eigen::Vector3d& x, const Eigen::Vector3d& x2, double omega, double sigma) {
        GpSpec spec;
        spec.omega = omega;
        spec.sigma = sigma;
        return sqexp_kernel(SimplexPoint(x, 1e-6), SimplexPoint(x2, 1e-6), spec);
      },
      py::arg("x"), py::arg("x2"), py::arg("omega") = 0.1, py::arg("sigma") = 1.0);
  m.def(
      "build_cov",
      [](const Eigen::MatrixXd& locs, double omega, double sigma, double jitter) {
        GpSpec spec;
        spec.omega = omega;
        spec.sigma = sigma;
        spec.jitter = jitter;
        const CovMatrix cov = build_cov(to_points(locs), spec);
        return py::make_tuple(cov.k, cov.chol, cov.jitter_used);
      },
      py::arg("locations"), py::arg("omega") = 0.1, py::arg("sigma") = 1.0,
      py::arg("jitter") = -1.0);
  m.def(
      "gp_conditional",
      [](const Eigen::MatrixXd& train, const Eigen::MatrixXd& test,
         const Eigen::VectorXd& values, double omega, double sigma, double jitter, double mean) {
        GpSpec spec;
        spec.omega = omega;
        spec.sigma = sigma;
        spec.jitter = jitter;
        spec.mean1 = Eigen::VectorXd::Constant(1, mean);
        const GpConditional c = gp_conditional(to_points(train), to_points(test), values, spec);
        return py::make_tuple(c.mean, c.cov);
      },
      py::arg("train_locations"), py::arg("test_locations"), py::arg("train_values"),
      py::arg("omega") = 0.1, py::arg("sigma") = 1.0, py::arg("jitter") = -1.0,
      py::arg("mean") = 0.0);
  m.def(
      "projected_gp_sample",
      [](const Eigen::MatrixXd& locs, double omega, double sigma, const Eigen::Vector2d& mean,
         std::uint64_t seed) {
        GpSpec spec;
        spec.omega = omega;
        spec.sigma = sigma;
        spec.mean1 = Eigen::VectorXd::Constant(1, mean[0]);
        spec.mean2 = Eigen::VectorXd::Constant(1, mean[1]);
        Rng rng(seed);
        const auto s = projected_gp_sample(spec, to_points(locs), rng);
        return py::make_tuple(s.angles, s.z1, s.z2);
      },
      py::arg("locations"), py::arg("omega") = 0.1, py::arg("sigma") = 1.0,
      py::arg("mean") = Eigen::Vector2d::Zero().eval(), py::arg("seed") = 0);

  // prior-moment calculators
  m.def(
      "svm_prior_moments",
      [](double mu0, double alpha_mu, double sigma, double rho) {
        const PriorMoments p = svm_prior_moments(mu0, alpha_mu, sigma, rho);
        return py::make_tuple(p.mean.value(), p.variance);
      },
      py::arg("mu0"), py::arg("alpha_mu"), py::arg("sigma"), py::arg("rho"));
  m.def(
      "svmp_prior_moments",
      [](const std::vector<double>& ms, const std::vector<double>& rhos,
         const std::vector<double>& probs) {
        const PriorMoments p = svmp_prior_moments(ms, rhos, probs);
        return py::make_tuple(p.mean.value(), p.variance);
      },
      py::arg("ms"), py::arg("rhos"), py::arg("probs"));
  m.def(
      "svmp_prior_correlation",
      [](const std::vector<double>& ms, const std::vector<double>& rhos,
         const Eigen::MatrixXd& joint) {
        return svmp_prior_correlation(ms, rhos, joint).value;
      },
      py::arg("ms"), py::arg("rhos"), py::arg("joint"));
  m.def(
      "svmp2_prior_moments",
      [](double m1, double m2, double rho1, double rho2) {
        const PriorMoments p = svmp2_prior_moments(m1, m2, rho1, rho2);
        return py::make_tuple(p.mean.value(), p.variance);
      },
      py::arg("m1"), py::arg("m2"), py::arg("rho1"), py::arg("rho2"));
  m.def("logistic_expectation", &logistic_expectation);
  m.def(
      "logistic_product_bounds",
      [](double s, double z_eps) {
        const auto b = logistic_product_bounds({s, z_eps});
        return py::make_tuple(b.lower, b.upper, b.f_product_expectation);
      },
      py::arg("s"), py::arg("z_eps") = 2.0);
  m.def(
      "truncated_bivariate_terms",
      [](double s, double z_eps) {
        const auto t = truncated_bivariate_terms({s, z_eps});
        return py::make_tuple(t.e_one, t.e_two);
      },
      py::arg("s"), py::arg("z_eps") = 2.0);

  // direction extraction
  m.def(
      "rotation_matrix",
      [](const Eigen::Vector3d& x) { return rotation_matrix(SimplexPoint(x, 1e-6)).o; },
      py::arg("x"));
  m.def(
      "extract_direction",
      [](const Eigen::Vector3d& x1, const Eigen::Vector3d& x2) {
        const auto obs = extract_direction(SimplexPoint(x1, 1e-6), SimplexPoint(x2, 1e-6));
        return py::make_tuple(obs.direction, obs.magnitude);
      },
      py::arg("x1"), py::arg("x2"));
  m.def(
      "apply_direction",
      [](const Eigen::Vector3d& x1, double direction, double magnitude) {
        return apply_direction(SimplexPoint(x1, 1e-6), direction, magnitude).coords();
      },
      py::arg("x1"), py::arg("direction"), py::arg("magnitude"));

  // simulation, fitting, scoring
  m.def(
      "simulate_scenario",
      [](const std::string& scenario, int n, std::uint64_t seed) {
        Scenario sc{scenario_from_name(scenario), n, seed};
        Rng rng(seed);
        const SimResult res = simulate_scenario(sc, rng);
        py::dict out;
        out["locations"] = from_points(res.data.locations);
        out["directions"] = res.data.directions;
        if (!res.truth.zeta.empty()) out["zeta"] = res.truth.zeta;
        if (res.truth.lambda.size()) out["lambda"] = res.truth.lambda;
        return out;
      },
      py::arg("scenario"), py::arg("n") = 500, py::arg("seed") = 0);
  m.def(
      "em_init",
      [](const std::string& model, const Eigen::MatrixXd& locs, const Eigen::VectorXd& dirs,
         int k, std::uint64_t seed) {
        const Dataset d = make_dataset(locs, dirs);
        ModelSpec spec = default_paper_spec(model_from_name(model));
        if (k > 0) spec.K = k;
        Rng rng(seed);
        nlohmann::json state;
        if (spec.kind == ModelKind::IVM) {
          state = state_to_json(initial_state_ivm(spec, em_ivm(d, spec.K, EmConfig{}, rng)));
        } else if (spec.kind == ModelKind::SVMC) {
          const ModelContext ctx = prepare_context(spec, d);
          state = state_to_json(initial_state_svmc(spec, ctx, em_svmc(d, spec, EmConfig{}, rng)));
        } else if (spec.kind == ModelKind::SVMP) {
          const ModelContext ctx = prepare_context(spec, d);
          state = state_to_json(initial_state_svmp(spec, ctx, em_svmp(d, spec, EmConfig{}, rng)));
        } else {
          throw std::domain_error("em_init supports ivm, svmc, svmp");
        }
        return json_to_py(state);
      },
      py::arg("model"), py::arg("locations"), py::arg("directions"), py::arg("k") = 0,
      py::arg("seed") = 0);
  m.def(
      "fit",
      [](const std::string& model, const Eigen::MatrixXd& locs, const Eigen::VectorXd& dirs,
         int chains, int iters, int warmup, int thin, int threads, std::uint64_t seed) {
        const Dataset d = make_dataset(locs, dirs);
        const ModelSpec spec = default_paper_spec(model_from_name(model));
        const SamplerSettings s = make_settings(chains, iters, warmup, thin, threads, seed);
        const auto out = run_chains(d, spec, s);
        return json_to_py(summarize(spec, out));
      },
      py::arg("model"), py::arg("locations"), py::arg("directions"), py::arg("chains") = 2,
      py::arg("iters") = 2000, py::arg("warmup") = 0, py::arg("thin") = 1,
      py::arg("threads") = 1, py::arg("seed") = 0);
  m.def(
      "log_posterior_predictive",
      [](const std::string& model, const Eigen::MatrixXd& train_locs,
         const Eigen::VectorXd& train_dirs, const Eigen::MatrixXd& test_locs,
         const Eigen::VectorXd& test_dirs, int chains, int iters, int n_pred_draws,
         std::uint64_t seed) {
        const Dataset train = make_dataset(train_locs, train_dirs);
        const Dataset test = make_dataset(test_locs, test_dirs);
        const ModelSpec spec = default_paper_spec(model_from_name(model));
        const SamplerSettings s = make_settings(chains, iters, 0, 1, 1, seed);
        const auto fitted = run_chains(train, spec, s);
        Rng rng(seed + 1);
        const PpScore score =
            log_posterior_predictive(spec, fitted, train, test, n_pred_draws, rng);
        py::dict out;
        out["model"] = score.model.empty() ? model : score.model;
        out["log_pp"] = score.log_pp;
        out["se"] = score.se;
        out["n_test"] = score.n_test;
        return out;
      },
      py::arg("model"), py::arg("train_locations"), py::arg("train_directions"),
      py::arg("test_locations"), py::arg("test_directions"), py::arg("chains") = 2,
      py::arg("iters") = 2000, py::arg("n_pred_draws") = 100, py::arg("seed") = 0);
}
