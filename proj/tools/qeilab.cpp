// Command-line front end: every module exposed as a reproducible experiment
// with JSON/CSV artifacts.  Exit codes: 0 pass, 1 numerical or verification
// failure, 2 usage error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qeilab/fock_models.hpp"
#include "qeilab/qei_bounds.hpp"
#include "qeilab/quantum_interest.hpp"
#include "qeilab/sampling.hpp"
#include "qeilab/scaling_limits.hpp"
#include "qeilab/version.hpp"
#include "qeilab/weyl_wigner.hpp"

namespace {

using nlohmann::json;

struct GlobalOpts {
  std::string out = ".";
  std::uint64_t seed = 12345;
  std::string format = "both";
  std::vector<std::string> tol;

  std::map<std::string, double> tolerances() const {
    std::map<std::string, double> m;
    for (const auto& s : tol) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw CLI::ValidationError("--tol", "expected NAME=VALUE");
      m[s.substr(0, eq)] = std::stod(s.substr(eq + 1));
    }
    for (const auto& [k, v] : m)
      if (k != "verify.budget")
        throw CLI::ValidationError("--tol", "unknown tolerance name '" + k + "'");
    return m;
  }

  bool want_json() const { return format == "json" || format == "both"; }
  bool want_csv() const { return format == "csv" || format == "both"; }

  std::string path(const std::string& name) const {
    std::filesystem::create_directories(out);
    return (std::filesystem::path(out) / name).string();
  }
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

qeilab::sampling::SamplingFunction parse_sampler(const std::string& spec) {
  using namespace qeilab::sampling;
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "gaussian" || kind == "lorentzian-sqrt") {
    if (rest.empty()) throw std::invalid_argument("sampler spec needs a width: " + kind + ":TAU");
    SamplerSpec s;
    s.kind = kind_from_name(kind);
    s.tau = std::stod(rest);
    return make_sampler(s);
  }
  if (kind == "bump") {
    const auto parts = split(rest, ',');
    if (parts.size() != 2) throw std::invalid_argument("sampler spec: bump:A,B");
    return make_bump(std::stod(parts[0]), std::stod(parts[1]));
  }
  if (kind == "csv") return load_sampler_csv(rest);
  throw std::invalid_argument("unknown sampler spec '" + spec + "'");
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << j.dump(2) << "\n";
}

json base_config(const GlobalOpts& g, json extra) {
  extra["seed"] = g.seed;
  extra["format"] = g.format;
  return extra;
}

json finish(const GlobalOpts& g, const json& config, json payload) {
  payload["config"] = config;
  payload["version"] = QEILAB_VERSION;
  return payload;
}

// ---------------------------------------------------------------------------

struct BoundsArgs {
  std::string kind;
  std::string g_spec = "gaussian:1";
  double tau = 1.0;
  double mass = 0.0;
  std::string q_csv;
  std::string kernel_csv;
  std::string scan;  // start,stop,count over tau
};

qeilab::bounds::TwoPointKernel load_kernel_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open kernel file '" + path + "'");
  std::string line;
  std::getline(in, line);  // header omega,mu
  std::vector<qeilab::bounds::TwoPointKernel::Line> lines;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto parts = split(line, ',');
    if (parts.size() != 2) throw std::runtime_error("malformed kernel row '" + line + "'");
    lines.push_back({std::stod(parts[0]), std::stod(parts[1])});
  }
  return qeilab::bounds::TwoPointKernel(std::move(lines));
}

int run_bounds(const GlobalOpts& g, const BoundsArgs& a) {
  using namespace qeilab::bounds;
  json config = base_config(g, {{"kind", a.kind}});

  auto evaluate = [&](double tau_override) -> BoundResult {
    if (a.kind == "ford-roman") return ford_roman_rhs(tau_override > 0 ? tau_override : a.tau);
    qeilab::sampling::SamplingFunction gs = parse_sampler(a.g_spec);
    if (tau_override > 0 && gs.has_closed_form() && gs.kind() != qeilab::sampling::SamplerKind::bump) {
      qeilab::sampling::SamplerSpec s;
      s.kind = gs.kind();
      s.tau = tau_override;
      gs = qeilab::sampling::make_sampler(s);
    }
    if (a.kind == "fewster-eveson") return fewster_eveson_4d(gs, a.mass);
    if (a.kind == "flanagan") return flanagan_2d(gs);
    if (a.kind == "fe-2d") return fe_2d_massless(gs);
    if (a.kind == "static") {
      if (a.q_csv.empty()) throw std::invalid_argument("static kind needs --q Q.csv");
      return static_qei(gs, QWeight::load_csv(a.q_csv));
    }
    if (a.kind == "kernel") {
      if (a.kernel_csv.empty()) throw std::invalid_argument("kernel kind needs --kernel FILE.csv");
      auto [r, q] = worldline_bound_from_kernel(load_kernel_csv(a.kernel_csv), gs);
      if (g.want_csv()) q.write_csv(g.path("q_induced.csv"));
      return r;
    }
    throw std::invalid_argument("unknown bounds kind '" + a.kind + "'");
  };

  if (a.kind != "ford-roman") config["g"] = a.g_spec;
  if (a.kind == "ford-roman") config["tau"] = a.tau;
  if (a.kind == "fewster-eveson") config["mass"] = a.mass;

  if (!a.scan.empty()) {
    const auto parts = split(a.scan, ',');
    if (parts.size() != 3) throw std::invalid_argument("--scan start,stop,count");
    const double lo = std::stod(parts[0]), hi = std::stod(parts[1]);
    const auto count = static_cast<std::size_t>(std::stoul(parts[2]));
    if (!(lo > 0) || !(hi > lo) || count < 2) throw std::invalid_argument("bad scan range");
    config["scan"] = a.scan;
    std::ofstream csv(g.path("bounds_scan.csv"));
    csv << "tau,value,error_estimate\n";
    char buf[120];
    for (std::size_t i = 0; i < count; ++i) {
      const double tau = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
      const BoundResult r = evaluate(tau);
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", tau, r.value, r.error_estimate);
      csv << buf;
    }
  }

  const BoundResult r = evaluate(0.0);
  if (g.want_json()) write_json_file(g.path("bounds.json"), finish(g, config, r.to_json()));
  std::cout << r.to_json().dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct VerifyArgs {
  std::string model;
  std::string g_spec = "gaussian:5";
  std::string states = "random:200";
  double x0 = 0.0;
};

int run_verify(const GlobalOpts& g, const VerifyArgs& a) {
  using namespace qeilab;
  if (a.model.empty()) throw std::invalid_argument("verify needs --model FILE.json");
  const auto [basis, nmax] = fock::load_model_json(a.model);
  const fock::TruncatedFockSpace space = fock::build_space(basis, nmax);
  const sampling::SamplingFunction gs = parse_sampler(a.g_spec);

  const auto parts = split(a.states, ':');
  if (parts.size() != 2 || parts[0] != "random")
    throw std::invalid_argument("states spec: random:COUNT");
  fock::StateSampleSpec spec;
  spec.count = std::stoul(parts[1]);
  spec.seed = g.seed;

  auto [bound, qw] = bounds::worldline_bound_from_kernel(fock::vacuum_kernel(space), gs);
  const auto tols = g.tolerances();
  fock::VerifyReport rep = fock::verify_qei(space, gs, bound, spec, a.x0);
  if (auto it = tols.find("verify.budget"); it != tols.end()) {
    rep.tolerance = it->second;
    rep.violations = 0;
    for (double e : rep.expectations)
      if (e < rep.bound_value - rep.tolerance) ++rep.violations;
    rep.pass = rep.violations == 0;
  }

  json config = base_config(g, {{"model", a.model},
                                {"g", a.g_spec},
                                {"states", a.states},
                                {"x0", a.x0},
                                {"dimension", space.dimension()}});
  if (g.want_json()) write_json_file(g.path("verify.json"), finish(g, config, rep.to_json()));
  if (g.want_csv()) rep.write_csv(g.path("verify_states.csv"));
  std::cout << rep.to_json().dump(2) << "\n";
  return rep.pass ? 0 : 1;
}

// ---------------------------------------------------------------------------

struct InterestArgs {
  double a = 0.1;
  double t = 0.2;
  std::optional<double> eps;
  double sigma = 0.0;  // 0 -> 1e-3/(6 pi A)
  std::string profile;
  bool check = false;
};

int run_interest(const GlobalOpts& g, const InterestArgs& a) {
  using namespace qeilab::interest;
  json payload, config;

  if (!a.profile.empty()) {
    const EnergyProfile p = EnergyProfile::from_json_file(a.profile);
    config = base_config(g, {{"profile", a.profile}});
    const Admissibility adm = admissible(p);
    const TestFunctionReport tf = test_function_constraint(p);
    payload = {{"admissible", adm.admissible},
               {"margin", adm.margin},
               {"tolerance", adm.tolerance},
               {"variational", tf.to_json()}};
    write_json_file(g.path("interest.json"), finish(g, config, payload));
    std::cout << payload.dump(2) << "\n";
    return 0;
  }

  const DeltaPairConstraints c = delta_pair_constraints(a.a, a.t);
  config = base_config(g, {{"A", a.a}, {"T", a.t}});
  payload["T_max"] = c.t_max;
  if (c.eps_min)
    payload["eps_min"] = *c.eps_min;
  else
    payload["eps_min"] = nullptr;

  if (a.eps || a.check) {
    const double eps = a.eps.value_or(c.eps_min ? 2.0 * *c.eps_min : 1.0);
    const double sigma = a.sigma > 0 ? a.sigma : 1e-3 / (6.0 * 3.14159265358979323846 * a.a);
    config["eps"] = eps;
    config["sigma"] = sigma;
    const EnergyProfile p = make_delta_pair(a.a, a.t, eps, sigma);
    const Admissibility adm = admissible(p);
    const TestFunctionReport tf = test_function_constraint(p);
    payload["admissible"] = adm.admissible;
    payload["margin"] = adm.margin;
    payload["tolerance"] = adm.tolerance;
    payload["variational"] = tf.to_json();
  }

  if (g.want_json()) write_json_file(g.path("interest.json"), finish(g, config, payload));
  std::cout << payload.dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct WignerArgs {
  std::string state = "ground";
  std::string symbol = "harmonic";
  std::string hbars = "1";
  double x_max = 8.0;
  int nx = 256;
};

int run_wigner(const GlobalOpts& g, const WignerArgs& a) {
  using namespace qeilab::phase;

  auto make_state = [&](const PhaseGrid& grid) {
    if (a.state == "ground") return harmonic_eigenstate(0, grid);
    const auto parts = split(a.state, ':');
    if (parts.size() == 2 && parts[0] == "excited") return harmonic_eigenstate(std::stoi(parts[1]), grid);
    throw std::invalid_argument("state spec: ground | excited:N");
  };
  auto make_symbol = [&](const PhaseGrid& grid) {
    if (a.symbol == "harmonic")
      return PhaseSpaceSymbol::from_function(
          [](double x, double p) { return 0.5 * (x * x + p * p); }, grid);
    const auto parts = split(a.symbol, ':');
    if (parts.size() == 2 && parts[0] == "bump") {
      const auto ps = split(parts[1], ',');
      if (ps.size() != 4) throw std::invalid_argument("symbol spec: bump:x0,p0,wx,wp");
      const double x0 = std::stod(ps[0]), p0 = std::stod(ps[1]);
      const double wx = std::stod(ps[2]), wp = std::stod(ps[3]);
      auto profile = [](double s) { return s * s < 1.0 ? std::exp(-1.0 / (1.0 - s * s)) : 0.0; };
      return PhaseSpaceSymbol::from_function(
          [=](double x, double p) { return profile((x - x0) / wx) * profile((p - p0) / wp); }, grid);
    }
    throw std::invalid_argument("symbol spec: harmonic | bump:x0,p0,wx,wp");
  };

  std::vector<double> hbars;
  for (const auto& s : split(a.hbars, ',')) hbars.push_back(std::stod(s));
  if (hbars.empty()) throw std::invalid_argument("--hbar needs at least one value");

  json config = base_config(g, {{"state", a.state},
                                {"symbol", a.symbol},
                                {"hbar", hbars},
                                {"x_max", a.x_max},
                                {"nx", a.nx}});

  json ctable = json::array();
  json payload;
  for (std::size_t i = 0; i < hbars.size(); ++i) {
    const PhaseGrid grid{a.x_max, a.nx, hbars[i]};
    const PhaseSpaceSymbol f = make_symbol(grid);
    const WaveFunction psi = make_state(grid);
    const WignerFunction w = wigner(psi);
    double c = -1.0;
    if (f.min_value() >= 0.0) c = garding_constant(f);
    ctable.push_back({{"hbar", hbars[i]}, {"C", c}});
    if (i == 0) {
      payload["min_W"] = w.min_value();
      payload["normalization"] = w.normalization();
      payload["max_imag"] = w.max_imag;
      payload["expectation_wigner"] = expectation_via_wigner(f, psi);
      payload["expectation_operator"] = expectation_via_operator(f, psi);
      if (g.want_csv()) {
        w.write_csv(g.path("wigner.csv"));
        f.write_csv(g.path("symbol.csv"));
      }
    }
  }
  payload["C_hbar_table"] = ctable;
  if (g.want_json()) write_json_file(g.path("wigner.json"), finish(g, config, payload));
  std::cout << payload.dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct ScalingArgs {
  std::string model = "homogeneous:h=2,C=1";
  std::string lambda = "geometric:1,0.001,25";
  double radius = 1.0;
};

int run_scaling(const GlobalOpts& g, const ScalingArgs& a) {
  using namespace qeilab::scaling;

  std::unique_ptr<ScalingModel> model;
  const auto colon = a.model.find(':');
  const std::string mkind = a.model.substr(0, colon);
  const std::string mrest = colon == std::string::npos ? "" : a.model.substr(colon + 1);
  if (mkind == "homogeneous") {
    double h = 2.0, c = 1.0;
    for (const auto& kv : split(mrest, ',')) {
      const auto parts = split(kv, '=');
      if (parts.size() != 2) throw std::invalid_argument("model spec: homogeneous:h=2,C=1");
      if (parts[0] == "h") h = std::stod(parts[1]);
      else if (parts[0] == "C") c = std::stod(parts[1]);
      else throw std::invalid_argument("unknown homogeneous parameter '" + parts[0] + "'");
    }
    model = std::make_unique<HomogeneousModel>(h, c);
  } else if (mkind == "fock") {
    const auto [basis, nmax] = qeilab::fock::load_model_json(mrest);
    auto space = std::make_shared<qeilab::fock::TruncatedFockSpace>(basis, nmax);
    model = std::make_unique<FockAdapterModel>(space);
  } else {
    throw std::invalid_argument("model spec: homogeneous:h=..,C=.. | fock:FILE.json");
  }

  const auto lparts = split(a.lambda, ':');
  if (lparts.size() != 2 || lparts[0] != "geometric")
    throw std::invalid_argument("lambda spec: geometric:start,stop,count");
  const auto lp = split(lparts[1], ',');
  if (lp.size() != 3) throw std::invalid_argument("lambda spec: geometric:start,stop,count");
  const LambdaGrid grid = LambdaGrid::geometric(std::stod(lp[0]), std::stod(lp[1]), std::stoul(lp[2]));

  const ChartTestFunction f = ChartTestFunction::bump(a.radius);
  const ScalingFit fit = fit_n_alpha(*model, f, grid);
  const VanishingReport van = check_vanishing(fit);
  const auto traj = zeta_eta_trajectory(*model, f, grid);

  json config = base_config(g, {{"model", a.model}, {"lambda", a.lambda}, {"radius", a.radius}});
  json payload = fit.to_json();
  payload["model"] = model->tag();
  payload["vanishing"] = van.to_json();
  // resolved-regime window: the lambda range the model reports as unsaturated
  std::size_t inside = 0;
  double win_lo = 0.0, win_hi = 0.0;
  for (const auto& p : traj) {
    if (!p.in_window) continue;
    if (inside == 0) win_hi = p.lambda;
    win_lo = p.lambda;
    ++inside;
  }
  payload["window"] = {{"points", inside},
                       {"lambda_min", inside ? win_lo : 0.0},
                       {"lambda_max", inside ? win_hi : 0.0}};
  if (g.want_csv()) write_trajectory_csv(traj, fit, g.path("scaling.csv"));
  if (g.want_json()) write_json_file(g.path("scaling_fit.json"), finish(g, config, payload));
  std::cout << payload.dump(2) << "\n";
  return van.decreasing_final_decade ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qeilab: a numerical laboratory for worldline energy bounds"};
  app.fallthrough();
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--out", g.out, "output directory for artifacts")->capture_default_str();
  app.add_option("--seed", g.seed, "seed for random states")->capture_default_str();
  app.add_option("--format", g.format, "json|csv|both")->capture_default_str()
      ->check(CLI::IsMember({"json", "csv", "both"}));
  app.add_option("--tol", g.tol, "tolerance override NAME=VALUE (may repeat)");

  BoundsArgs ba;
  auto* bounds_cmd = app.add_subcommand("bounds", "evaluate a lower bound");
  bounds_cmd->add_option("--kind", ba.kind, "ford-roman|fewster-eveson|flanagan|fe-2d|static|kernel")
      ->required();
  bounds_cmd->add_option("--tau", ba.tau, "lorentzian timescale (ford-roman)");
  bounds_cmd->add_option("--g", ba.g_spec, "sampler spec, e.g. gaussian:1");
  bounds_cmd->add_option("--mass", ba.mass, "field mass (fewster-eveson)");
  bounds_cmd->add_option("--q", ba.q_csv, "QWeight CSV (static)");
  bounds_cmd->add_option("--kernel", ba.kernel_csv, "kernel lines CSV omega,mu (kernel)");
  bounds_cmd->add_option("--scan", ba.scan, "tau scan start,stop,count -> bounds_scan.csv");

  VerifyArgs va;
  auto* verify_cmd = app.add_subcommand("verify", "state-by-state bound verification");
  verify_cmd->add_option("--model", va.model, "box model JSON")->required();
  verify_cmd->add_option("--g", va.g_spec, "sampler spec");
  verify_cmd->add_option("--states", va.states, "random:COUNT");
  verify_cmd->add_option("--x0", va.x0, "worldline position");

  InterestArgs ia;
  auto* interest_cmd = app.add_subcommand("interest", "loan-term and interest constraints");
  interest_cmd->add_option("--A", ia.a, "debt magnitude");
  interest_cmd->add_option("--T", ia.t, "loan term");
  double eps_tmp = -1.0;
  auto* eps_opt = interest_cmd->add_option("--eps", eps_tmp, "interest rate (enables the numeric check)");
  interest_cmd->add_option("--sigma", ia.sigma, "regularisation width");
  interest_cmd->add_option("--profile", ia.profile, "profile JSON (overrides A/T)");
  interest_cmd->add_flag("--check", ia.check, "run the operator positivity check");

  WignerArgs wa;
  auto* wigner_cmd = app.add_subcommand("wigner", "phase-space quantisation checks");
  wigner_cmd->add_option("--state", wa.state, "ground | excited:N");
  wigner_cmd->add_option("--symbol", wa.symbol, "harmonic | bump:x0,p0,wx,wp");
  wigner_cmd->add_option("--hbar", wa.hbars, "comma list of hbar values");
  wigner_cmd->add_option("--xmax", wa.x_max, "half-width of the position grid");
  wigner_cmd->add_option("--nx", wa.nx, "position grid points");

  ScalingArgs sa;
  auto* scaling_cmd = app.add_subcommand("scaling", "short-distance scaling analysis");
  scaling_cmd->add_option("--model", sa.model, "homogeneous:h=..,C=.. | fock:FILE.json");
  scaling_cmd->add_option("--lambda", sa.lambda, "geometric:start,stop,count");
  scaling_cmd->add_option("--radius", sa.radius, "test-function support radius");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    g.tolerances();  // reject unknown tolerance names up front
    if (eps_opt->count() > 0) ia.eps = eps_tmp;
    if (bounds_cmd->parsed()) return run_bounds(g, ba);
    if (verify_cmd->parsed()) return run_verify(g, va);
    if (interest_cmd->parsed()) return run_interest(g, ia);
    if (wigner_cmd->parsed()) return run_wigner(g, wa);
    if (scaling_cmd->parsed()) return run_scaling(g, sa);
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const CLI::Error& e) {
    std::cerr << "usage error: " << e.get_name() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
