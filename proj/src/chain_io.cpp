#include "simplexdir/chain_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

namespace simplexdir {

namespace {

using nlohmann::json;

json vec_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Eigen::VectorXd vec_from_json(const json& a) {
  Eigen::VectorXd v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<int>(i)] = a[i].get<double>();
  return v;
}

// FNV-1a over the canonical spec serialization.
std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

struct CircStats {
  double mean, lo, hi;
};

// circular mean and central 95% interval of a draw sequence
CircStats circular_stats(const std::vector<double>& draws) {
  double c = 0.0, s = 0.0;
  for (double y : draws) {
    c += std::cos(y);
    s += std::sin(y);
  }
  CircStats out;
  out.mean = (c == 0.0 && s == 0.0) ? std::numbers::pi : arctan_star(c, s);
  std::vector<double> dev(draws.size());
  for (std::size_t i = 0; i < draws.size(); ++i) {
    double d = wrap_angle(draws[i] - out.mean);
    if (d > std::numbers::pi) d -= kTwoPi;
    dev[i] = d;
  }
  std::sort(dev.begin(), dev.end());
  auto quant = [&](double q) {
    const double pos = q * (dev.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, dev.size() - 1);
    const double w = pos - lo;
    return dev[lo] * (1.0 - w) + dev[hi] * w;
  };
  out.lo = wrap_angle(out.mean + quant(0.025));
  out.hi = wrap_angle(out.mean + quant(0.975));
  return out;
}

struct LinStats {
  double mean, lo, hi;
};

LinStats linear_stats(std::vector<double> draws) {
  std::sort(draws.begin(), draws.end());
  auto quant = [&](double q) {
    const double pos = q * (draws.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, draws.size() - 1);
    const double w = pos - lo;
    return draws[lo] * (1.0 - w) + draws[hi] * w;
  };
  LinStats out;
  out.mean = std::accumulate(draws.begin(), draws.end(), 0.0) / draws.size();
  out.lo = quant(0.025);
  out.hi = quant(0.975);
  return out;
}

double circ_mean_of(const std::vector<double>& angles) {
  double c = 0.0, s = 0.0;
  for (double a : angles) {
    c += std::cos(a);
    s += std::sin(a);
  }
  return (c == 0.0 && s == 0.0) ? std::numbers::pi : arctan_star(c, s);
}

json param_entry(const std::string& name, double mean, double lo, double hi) {
  return json{{"name", name}, {"mean", mean}, {"ci_low", lo}, {"ci_high", hi}};
}

}  // namespace

json spec_to_json(const ModelSpec& spec) {
  json j;
  j["kind"] = model_name(spec.kind);
  j["K"] = spec.K;
  j["gp"] = {{"omega", spec.gp.omega}, {"sigma", spec.gp.sigma}, {"jitter", spec.gp.jitter}};
  json means = json::array();
  for (const auto& [m1, m2] : spec.gp_means)
    means.push_back(json{{"mu1", vec_to_json(m1)}, {"mu2", vec_to_json(m2)}});
  j["gp_means"] = means;
  json mix = json::array();
  for (const auto& m : spec.mix_gp_means) mix.push_back(vec_to_json(m));
  j["mix_gp_means"] = mix;
  j["conc_prior"] = {
      {"type", spec.conc_prior.type == ConcPrior::Type::Hierarchical ? "hierarchical" : "gamma"},
      {"varsigma", spec.conc_prior.varsigma},
      {"tau", spec.conc_prior.tau},
      {"a", spec.conc_prior.a},
      {"b", spec.conc_prior.b}};
  j["mean_prior"] = {{"u", spec.mean_prior.u}, {"c", spec.mean_prior.c}};
  return j;
}

ModelSpec spec_from_json(const json& j) {
  ModelSpec spec;
  spec.kind = model_from_name(j.at("kind").get<std::string>());
  spec.K = j.at("K").get<int>();
  spec.gp.omega = j.at("gp").at("omega").get<double>();
  spec.gp.sigma = j.at("gp").at("sigma").get<double>();
  spec.gp.jitter = j.at("gp").at("jitter").get<double>();
  for (const auto& gm : j.at("gp_means"))
    spec.gp_means.emplace_back(vec_from_json(gm.at("mu1")), vec_from_json(gm.at("mu2")));
  for (const auto& mm : j.at("mix_gp_means")) spec.mix_gp_means.push_back(vec_from_json(mm));
  const auto& cp = j.at("conc_prior");
  spec.conc_prior.type = cp.at("type").get<std::string>() == "hierarchical"
                             ? ConcPrior::Type::Hierarchical
                             : ConcPrior::Type::Gamma;
  spec.conc_prior.varsigma = cp.at("varsigma").get<double>();
  spec.conc_prior.tau = cp.at("tau").get<double>();
  spec.conc_prior.a = cp.at("a").get<double>();
  spec.conc_prior.b = cp.at("b").get<double>();
  spec.mean_prior.u = j.at("mean_prior").at("u").get<double>();
  spec.mean_prior.c = j.at("mean_prior").at("c").get<double>();
  return spec;
}

std::uint64_t spec_hash(const ModelSpec& spec) { return fnv1a(spec_to_json(spec).dump()); }

json state_to_json(const ParamState& st) {
  json j;
  auto vecs = [](const std::vector<Eigen::VectorXd>& vs) {
    json a = json::array();
    for (const auto& v : vs) a.push_back(vec_to_json(v));
    return a;
  };
  if (!st.z1.empty()) j["z1"] = vecs(st.z1);
  if (!st.z2.empty()) j["z2"] = vecs(st.z2);
  if (!st.zmix.empty()) j["zmix"] = vecs(st.zmix);
  if (!st.phi.empty()) j["phi"] = vecs(st.phi);
  if (!st.nu.empty()) j["nu"] = st.nu;
  if (!st.mean_angle.empty()) j["m"] = st.mean_angle;
  if (st.lambda.size()) j["lambda"] = vec_to_json(st.lambda);
  if (!st.zeta.empty()) j["zeta"] = st.zeta;
  return j;
}

ParamState state_from_json(const json& j) {
  ParamState st;
  auto vecs = [](const json& a) {
    std::vector<Eigen::VectorXd> vs;
    for (const auto& v : a) vs.push_back(vec_from_json(v));
    return vs;
  };
  if (j.contains("z1")) st.z1 = vecs(j["z1"]);
  if (j.contains("z2")) st.z2 = vecs(j["z2"]);
  if (j.contains("zmix")) st.zmix = vecs(j["zmix"]);
  if (j.contains("phi")) st.phi = vecs(j["phi"]);
  if (j.contains("nu")) st.nu = j["nu"].get<std::vector<double>>();
  if (j.contains("m")) st.mean_angle = j["m"].get<std::vector<double>>();
  if (j.contains("lambda")) st.lambda = vec_from_json(j["lambda"]);
  if (j.contains("zeta")) st.zeta = j["zeta"].get<std::vector<int>>();
  return st;
}

void write_chains_jsonl(const std::string& path, const ModelSpec& spec,
                        const std::vector<Chain>& chains, std::uint64_t root_seed) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_chains_jsonl: cannot open " + path);
  json header;
  header["type"] = "header";
  header["model"] = model_name(spec.kind);
  header["spec"] = spec_to_json(spec);
  header["spec_hash"] = spec_hash(spec);
  header["seed"] = root_seed;
  header["n_chains"] = chains.size();
  if (!chains.empty()) {
    header["n_warmup"] = chains[0].n_warmup;
    header["thin"] = chains[0].thin;
  }
  out << header.dump() << '\n';
  for (std::size_t c = 0; c < chains.size(); ++c) {
    for (std::size_t i = 0; i < chains[c].draws.size(); ++i) {
      json rec = state_to_json(chains[c].draws[i]);
      rec["type"] = "draw";
      rec["chain"] = c;
      rec["idx"] = i;
      if (i < chains[c].loglik.size()) rec["loglik"] = chains[c].loglik[i];
      out << rec.dump() << '\n';
    }
  }
}

LoadedChains read_chains_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_chains_jsonl: cannot open " + path);
  LoadedChains out;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json rec = json::parse(line);
    const std::string type = rec.at("type").get<std::string>();
    if (type == "header") {
      out.header = rec;
      out.spec = spec_from_json(rec.at("spec"));
      have_header = true;
      continue;
    }
    if (!have_header) throw std::runtime_error("read_chains_jsonl: draw before header");
    const std::size_t c = rec.at("chain").get<std::size_t>();
    if (out.chains.size() <= c) out.chains.resize(c + 1);
    out.chains[c].draws.push_back(state_from_json(rec));
    if (rec.contains("loglik")) out.chains[c].loglik.push_back(rec["loglik"].get<double>());
  }
  for (auto& c : out.chains) c.n_keep = static_cast<int>(c.draws.size());
  return out;
}

// ---------------------------------------------------------------------

json summarize(const ModelSpec& spec, const std::vector<Chain>& chains) {
  json out;
  out["model"] = model_name(spec.kind);
  json params = json::array();

  std::vector<const ParamState*> draws;
  for (const auto& c : chains)
    for (const auto& st : c.draws) draws.push_back(&st);
  if (draws.empty()) throw std::domain_error("summarize: no draws");
  const int nd = static_cast<int>(draws.size());
  const int K = spec.K;

  // component order for reporting: sorted by circular mean of the mean field
  std::vector<int> order(K);
  std::iota(order.begin(), order.end(), 0);
  if (spec.is_mixture()) {
    std::vector<double> key(K);
    for (int k = 0; k < K; ++k) {
      std::vector<double> ms;
      ms.reserve(nd);
      for (const auto* st : draws) {
        if (spec.kind == ModelKind::SVMC) {
          const Eigen::VectorXd m = latent_mean_angles(st->z1[k], st->z2[k]);
          ms.push_back(circ_mean_of(std::vector<double>(m.data(), m.data() + m.size())));
        } else {
          ms.push_back(st->mean_angle[k]);
        }
      }
      key[k] = circ_mean_of(ms);
    }
    std::sort(order.begin(), order.end(), [&](int a, int b) { return key[a] < key[b]; });
  }

  auto add_circular = [&](const std::string& name, const std::vector<double>& ds) {
    const CircStats st = circular_stats(ds);
    params.push_back(param_entry(name, st.mean, st.lo, st.hi));
  };
  auto add_linear = [&](const std::string& name, const std::vector<double>& ds) {
    const LinStats st = linear_stats(ds);
    params.push_back(param_entry(name, st.mean, st.lo, st.hi));
  };

  switch (spec.kind) {
    case ModelKind::IV: {
      std::vector<double> ms(nd), rhos(nd);
      for (int i = 0; i < nd; ++i) {
        ms[i] = draws[i]->mean_angle[0];
        rhos[i] = draws[i]->rho(0, 0);
      }
      add_circular("m", ms);
      add_linear("rho", rhos);
      break;
    }
    case ModelKind::IVM: {
      for (int kk = 0; kk < K; ++kk) {
        const int k = order[kk];
        const std::string suf = "_" + std::to_string(kk + 1);
        std::vector<double> ms(nd), rhos(nd), lams(nd);
        for (int i = 0; i < nd; ++i) {
          ms[i] = draws[i]->mean_angle[k];
          rhos[i] = draws[i]->rho(k, 0);
          lams[i] = draws[i]->lambda[k];
        }
        add_circular("m" + suf, ms);
        add_linear("rho" + suf, rhos);
        add_linear("lambda" + suf, lams);
      }
      break;
    }
    case ModelKind::SVM:
    case ModelKind::SVMC: {
      const int ncomp = (spec.kind == ModelKind::SVM) ? 1 : K;
      const int n = static_cast<int>(draws[0]->z1[0].size());
      for (int kk = 0; kk < ncomp; ++kk) {
        const int k = (spec.kind == ModelKind::SVM) ? 0 : order[kk];
        const std::string suf = (spec.kind == ModelKind::SVM) ? "" : "_" + std::to_string(kk + 1);
        // per-location stats, then averaged across locations
        std::vector<double> mean_l, lo_l, hi_l, rmean_l, rlo_l, rhi_l;
        std::vector<double> md(nd), rd(nd);
        for (int ell = 0; ell < n; ++ell) {
          for (int i = 0; i < nd; ++i) {
            md[i] = arctan_star(draws[i]->z1[k][ell], draws[i]->z2[k][ell]);
            rd[i] = draws[i]->rho(k, ell);
          }
          const CircStats cs = circular_stats(md);
          mean_l.push_back(cs.mean);
          lo_l.push_back(cs.lo);
          hi_l.push_back(cs.hi);
          const LinStats ls = linear_stats(rd);
          rmean_l.push_back(ls.mean);
          rlo_l.push_back(ls.lo);
          rhi_l.push_back(ls.hi);
        }
        params.push_back(param_entry("m_bar" + suf, circ_mean_of(mean_l), circ_mean_of(lo_l),
                                     circ_mean_of(hi_l)));
        auto avg = [](const std::vector<double>& v) {
          return std::accumulate(v.begin(), v.end(), 0.0) / v.size();
        };
        params.push_back(param_entry("rho_bar" + suf, avg(rmean_l), avg(rlo_l), avg(rhi_l)));
        std::vector<double> nus(nd);
        for (int i = 0; i < nd; ++i) nus[i] = draws[i]->nu[k];
        add_linear("nu" + suf, nus);
        if (spec.kind == ModelKind::SVMC) {
          std::vector<double> lams(nd);
          for (int i = 0; i < nd; ++i) lams[i] = draws[i]->lambda[k];
          add_linear("lambda" + suf, lams);
        }
      }
      break;
    }
    case ModelKind::SVMP: {
      const int n = static_cast<int>(draws[0]->zmix[0].size());
      for (int kk = 0; kk < K; ++kk) {
        const int k = order[kk];
        const std::string suf = "_" + std::to_string(kk + 1);
        std::vector<double> ms(nd), rhos(nd);
        for (int i = 0; i < nd; ++i) {
          ms[i] = draws[i]->mean_angle[k];
          rhos[i] = draws[i]->rho(k, 0);
        }
        add_circular("m" + suf, ms);
        add_linear("rho" + suf, rhos);
        // location-averaged mixing probability
        std::vector<double> mean_l, lo_l, hi_l;
        std::vector<double> ld(nd);
        Eigen::VectorXd zl(K - 1);
        for (int ell = 0; ell < n; ++ell) {
          for (int i = 0; i < nd; ++i) {
            for (int q = 0; q + 1 < K; ++q) zl[q] = draws[i]->zmix[q][ell];
            ld[i] = generalized_inverse_logit(zl)[k];
          }
          const LinStats ls = linear_stats(ld);
          mean_l.push_back(ls.mean);
          lo_l.push_back(ls.lo);
          hi_l.push_back(ls.hi);
        }
        auto avg = [](const std::vector<double>& v) {
          return std::accumulate(v.begin(), v.end(), 0.0) / v.size();
        };
        params.push_back(
            param_entry("lambda_bar" + suf, avg(mean_l), avg(lo_l), avg(hi_l)));
      }
      break;
    }
  }
  out["params"] = params;

  json diag;
  double max_rhat = 1.0;
  if (chains.size() >= 2 || (chains.size() == 1 && chains[0].draws.size() >= 8)) {
    const auto d = chain_diagnostics(spec, chains);
    json rhat, ess;
    for (const auto& [k, v] : d) {
      rhat[k] = v.rhat;
      ess[k] = v.ess;
      max_rhat = std::max(max_rhat, v.rhat);
    }
    diag["rhat"] = rhat;
    diag["ess"] = ess;
  }
  diag["max_rhat"] = max_rhat;
  double acc = 0.0;
  int exhausted = 0;
  for (const auto& c : chains) {
    acc += c.hmc_accept_rate;
    exhausted += c.ess_exhausted;
  }
  diag["hmc_accept"] = chains.empty() ? 1.0 : acc / chains.size();
  diag["ess_shrink_exhausted"] = exhausted;
  out["diagnostics"] = diag;
  return out;
}

}  // namespace simplexdir
