#include "vrabi/commands.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include "vrabi/acceptance.hpp"
#include "vrabi/config.hpp"
#include "vrabi/curves.hpp"
#include "vrabi/davies.hpp"
#include "vrabi/entangle.hpp"
#include "vrabi/errors.hpp"
#include "vrabi/series_io.hpp"

namespace vrabi {

namespace {

constexpr double kUs = 1e-6;

struct Overrides {
  std::string config;
  std::optional<std::string> model, profile, convention, output, input, sweep;
  std::optional<double> gamma, gamma_up, gamma1, gamma2, gamma3, eps;
  std::optional<double> omega0, g, temperature, waist_mm, diameter_mm, velocity;
  std::optional<double> delta_t_us, t_start_us, t_end_us, t_step_us;
  std::optional<std::size_t> n_steps;
  std::optional<std::vector<std::string>> free;
  std::optional<bool> tie_gamma12;
  std::optional<double> alpha, beta;
  std::optional<int> n_max;
};

void add_options(CLI::App* app, Overrides& o) {
  app->add_option("-c,--config", o.config, "JSON run configuration");
  app->add_option("--model", o.model, "phenom-t0 | phenom-t | microscopic | open-cavity");
  app->add_option("--gamma", o.gamma, "phenomenological decay rate (1/s)");
  app->add_option("--gamma-up", o.gamma_up, "phenomenological excitation rate (1/s)");
  app->add_option("--gamma1", o.gamma1, "rate |+> -> |0> (1/s)");
  app->add_option("--gamma2", o.gamma2, "rate |-> -> |0> (1/s)");
  app->add_option("--gamma3", o.gamma3, "rate |+> -> |-> (1/s)");
  app->add_option("--eps", o.eps, "KMS ratio used for upward rates");
  app->add_option("--omega0", o.omega0, "atomic frequency (rad/s)");
  app->add_option("--g", o.g, "coupling (rad/s)");
  app->add_option("--temperature", o.temperature, "temperature (K)");
  app->add_option("--waist-mm", o.waist_mm, "mode waist (mm)");
  app->add_option("--diameter-mm", o.diameter_mm, "cavity diameter (mm)");
  app->add_option("--velocity", o.velocity, "atomic velocity (m/s)");
  app->add_option("--profile", o.profile, "gaussian | constant");
  app->add_option("--delta-t-us", o.delta_t_us, "interaction-time uncertainty (us)");
  app->add_option("--time-convention", o.convention, "true | effective");
  app->add_option("--t-start-us", o.t_start_us, "grid start (us)");
  app->add_option("--t-end-us", o.t_end_us, "grid end (us)");
  app->add_option("--t-step-us", o.t_step_us, "grid step (us)");
  app->add_option("--n-steps", o.n_steps, "n-step Gaussian propagation instead of closed forms");
  app->add_option("-o,--output", o.output, "output CSV, - for stdout");
  app->add_option("-i,--input", o.input, "input CSV t_us,p_g[,sigma]");
  app->add_option("--free", o.free, "fitted parameters: gamma1 gamma2 gamma12 gamma3 delta_t");
  app->add_option("--tie-gamma12", o.tie_gamma12, "fit gamma1 = gamma2");
  app->add_option("--alpha", o.alpha, "coefficient of a + a^dagger");
  app->add_option("--beta", o.beta, "coefficient of a^dagger a");
  app->add_option("--n-max", o.n_max, "highest manifold for davies-check");
  app->add_option("--sweep", o.sweep, "key=from:to:count");
}

RunConfig resolve(const Overrides& o) {
  RunConfig c = o.config.empty() ? RunConfig{} : load_config(o.config);
  auto set = [](auto& field, const auto& value) {
    if (value) field = *value;
  };
  set(c.model, o.model);
  set(c.profile, o.profile);
  if (o.convention) c.convention = parse_convention(*o.convention);
  set(c.output, o.output);
  set(c.input, o.input);
  if (o.sweep) c.sweep = Sweep::parse(*o.sweep);
  set(c.gamma, o.gamma);
  if (o.gamma_up) c.gamma_up = *o.gamma_up;
  set(c.gamma1, o.gamma1);
  set(c.gamma2, o.gamma2);
  if (o.gamma3) c.gamma3 = *o.gamma3;
  if (o.eps) c.eps = *o.eps;
  set(c.params.omega0, o.omega0);
  set(c.params.g, o.g);
  set(c.params.temperature, o.temperature);
  set(c.waist_mm, o.waist_mm);
  set(c.diameter_mm, o.diameter_mm);
  if (o.velocity) c.velocity = *o.velocity;
  set(c.delta_t_us, o.delta_t_us);
  set(c.t_start_us, o.t_start_us);
  set(c.t_end_us, o.t_end_us);
  set(c.t_step_us, o.t_step_us);
  set(c.n_steps, o.n_steps);
  set(c.free, o.free);
  set(c.tie_gamma12, o.tie_gamma12);
  set(c.alpha, o.alpha);
  set(c.beta, o.beta);
  set(c.n_max, o.n_max);
  c.validate();
  return c;
}

// --- point evaluators ---------------------------------------------------------

bool closed_open_cavity(const RunConfig& c) { return c.model == "open-cavity" && c.n_steps == 0; }

double true_seconds(const RunConfig& c, double t_us) {
  const double t = t_us * kUs;
  return c.convention == TimeConvention::Effective ? true_time(t, c.geometry()) : t;
}

/// Bare-basis state at true time t.
std::function<DensityMatrix(double)> state_at(const RunConfig& c) {
  const ModelKind kind = c.model_kind();
  const PhysicalParams p = c.params;
  const CouplingProfile profile = c.coupling_profile();
  const bool gaussian = std::holds_alternative<GaussianProfile>(profile);
  auto bare = [](const DensityMatrix& rho) {
    return rho.basis() == Basis::Bare ? rho : dressed_transform(rho, Basis::Bare);
  };
  if (closed_open_cavity(c)) {
    const OpenCavityParams oc = c.open_cavity();
    return [=](double t) { return bare(opencavity_rho(oc, p, t, profile).value); };
  }
  if (gaussian) {
    // Without a closed form for a moving atom, propagate in n frozen steps.
    const std::size_t n = c.n_steps > 0 ? c.n_steps : 2001;
    const DensityMatrix rho0 = excited_state(native_basis(kind));
    return [=](double t) { return bare(nstep_propagate(kind, p, profile, rho0, t, n)); };
  }
  if (c.model == "phenom-t0") return [=](double t) { return phenom_t0_rho(p.g, c.gamma, t).rho; };
  if (c.model == "microscopic") return [=](double t) { return bare(scala_rho(p.g, c.gamma1, c.gamma2, t)); };
  const Liouvillian l = build_liouvillian(kind, p);
  const DensityMatrix rho0 = excited_state(l.basis());
  return [=](double t) {
    SuperVector v = vectorize(rho0.matrix());
    expm_action(l.matrix(), t, v);
    return bare(DensityMatrix::unchecked(unvectorize(v), l.basis()));
  };
}

// --- commands -------------------------------------------------------------------

using RowWriter = std::function<void(const RunConfig&, CsvWriter&, const std::vector<std::string>& labels)>;

void write_simulate(const RunConfig& c, CsvWriter& w, const std::vector<std::string>& labels) {
  const auto state = state_at(c);
  const double dt = c.delta_t_us * kUs;
  const auto pg = [&](double t) { return ground_probability(state(t)); };
  for (double t_us : c.grid_us()) {
    const double t = true_seconds(c, t_us);
    const DensityMatrix rho = state(t);
    const double p = ground_probability(rho);
    double conv = p;
    if (dt > 0.0) {
      conv = closed_open_cavity(c) ? convolve_pg(c.open_cavity(), c.params, c.coupling_profile(), dt, t).value
                                   : convolve_numeric(pg, t, dt);
    }
    const cplx coh = coherence_e0_g1(rho);
    w.row(labels, {t_us, p, conv, rho(0, 0).real(), rho(1, 1).real(), rho(2, 2).real(), coh.real(), coh.imag()});
  }
}

void write_energy(const RunConfig& c, CsvWriter& w, const std::vector<std::string>& labels) {
  const auto state = state_at(c);
  const double dt = c.delta_t_us * kUs;
  const bool closed = closed_open_cavity(c);
  const auto energy = [&](double t) {
    return closed ? energy_mean(c.open_cavity(), c.params, t).value : mean_energy(state(t), c.params);
  };
  for (double t_us : c.grid_us()) {
    const double t = true_seconds(c, t_us);
    const double e = energy(t);
    double conv = e;
    if (dt > 0.0) conv = closed ? convolve_energy(c.open_cavity(), c.params, dt, t).value : convolve_numeric(energy, t, dt);
    w.row(labels, {t_us, e, conv});
  }
}

void write_entangle(const RunConfig& c, CsvWriter& w, const std::vector<std::string>& labels) {
  const auto state = state_at(c);
  const bool oc = c.model == "open-cavity";
  const OpenCavityParams ocp = oc ? c.open_cavity() : OpenCavityParams{};
  const double g_phase = phase_coupling(c.params.g, c.coupling_profile());
  for (double t_us : c.grid_us()) {
    const double t = true_seconds(c, t_us);
    const DensityMatrix rho = state(t);
    const PptSpectrum s = ppt_spectrum(embed4(rho));
    const cplx coh = coherence_e0_g1(rho);
    const cplx printed = oc ? printed_coherence_formula(ocp.gamma1, ocp.gamma2, ocp.gamma3, g_phase, t)
                            : cplx(std::nan(""), std::nan(""));
    w.row(labels, {t_us, s.lambda[0], s.lambda[1], s.lambda[2], s.lambda[3], coh.real(), coh.imag(), printed.real(),
                   printed.imag()});
  }
}

std::vector<std::string> with_sweep(const RunConfig& c, std::vector<std::string> header) {
  if (c.sweep) header.insert(header.begin(), c.sweep->key);
  return header;
}

std::string tabulated(const RunConfig& c, const std::vector<std::string>& header, const RowWriter& rows) {
  std::ostringstream out;
  CsvWriter head(out, with_sweep(c, header));
  if (!c.sweep) {
    rows(c, head, {});
    return out.str();
  }
  // Each sweep point is independent; blocks are joined in sweep order.
  const std::vector<double> values = c.sweep->values();
  const auto blocks = tabulate(values, [&](double v) {
    const RunConfig point = c.with(c.sweep->key, v);
    point.validate();
    std::ostringstream block;
    CsvWriter w(block, with_sweep(c, header));
    rows(point, w, {format_number(v)});
    std::string s = block.str();
    return s.substr(s.find('\n') + 1);
  });
  for (const auto& b : blocks) out << b;
  return out.str();
}

void emit(const RunConfig& c, const std::string& text, std::ostream& out) {
  if (c.output == "-") {
    out << text;
    return;
  }
  std::ofstream f(c.output, std::ios::binary);
  if (!f) throw ValidationError("cannot write " + c.output);
  f << text;
}

int cmd_fit_rabi(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.sweep) throw ConfigError("fit-rabi does not take --sweep");
  if (c.model != "open-cavity") throw ConfigError("fit-rabi fits the open-cavity model only");
  if (c.input.empty()) throw ConfigError("fit-rabi needs --input with columns t_us,p_g[,sigma]");
  const ExperimentSeries series = ingest_series(c.input, c.convention);
  LmOptions opt;
  const FitResult r = fit_rabi(series, c.rabi_model(), {c.free, c.tie_gamma12}, opt);
  std::ostringstream csv;
  CsvWriter w(csv, {"parameter", "value", "std_error"});
  for (std::size_t j = 0; j < r.names.size(); ++j) {
    // delta_t is reported at the boundary in microseconds.
    const double s = r.names[j] == "delta_t" ? 1e6 : 1.0;
    w.row({r.names[j] == "delta_t" ? "delta_t_us" : r.names[j]}, {r.values[j] * s, r.std_errors[j] * s});
  }
  emit(c, csv.str(), out);
  err << "fit-rabi: cost " << format_number(r.cost) << ", " << r.iterations << " iterations, stop: " << r.stop_reason
      << '\n';
  if (!r.converged) {
    err << "fit-rabi: did not converge\n";
    return kExitFit;
  }
  return kExitOk;
}

int cmd_fit_q(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.sweep) throw ConfigError("fit-q does not take --sweep");
  if (c.model != "open-cavity") throw ConfigError("fit-q uses the open-cavity energy curve");
  const OpenCavityParams oc = c.open_cavity();
  EnergySeries es;
  es.convention = c.convention;
  for (double t_us : c.grid_us()) {
    const double t = true_seconds(c, t_us);
    es.t.push_back(t_us * kUs);
    es.omega.push_back(c.delta_t_us > 0.0 ? convolve_energy(oc, c.params, c.delta_t_us * kUs, t).value
                                          : energy_mean(oc, c.params, t).value);
  }
  const QFit q = fit_q(es, oc.eps, c.params.omega0);
  std::ostringstream csv;
  CsvWriter w(csv, {"quantity", "value"});
  w.row({"q_fit"}, {q.q});
  w.row({"q_identity"}, {q_from_rate(0.5 * (oc.gamma1 + oc.gamma2), oc.eps, c.params.omega0, c.convention, c.geometry())});
  w.row({"gamma_from_q_fit"}, {rate_from_q(q.q, oc.eps, c.params.omega0, c.convention, c.geometry())});
  emit(c, csv.str(), out);
  if (oc.gamma1 != oc.gamma2) err << "fit-q: q_identity assumes gamma1 = gamma2; using their mean\n";
  if (!q.fit.converged) {
    err << "fit-q: did not converge\n";
    return kExitFit;
  }
  return kExitOk;
}

int cmd_davies(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.sweep) throw ConfigError("davies-check does not take --sweep");
  const PhysicalParams& p = c.params;
  const auto ops = davies_decompose(c.alpha, c.beta, c.n_max, p);
  std::ostringstream csv;
  CsvWriter w(csv, {"transitions", "bohr_frequency", "rotating_frequency", "excitation_change",
                    "commutation_defect_rotating", "commutation_defect_lab_relative"});
  double worst = 0.0;
  for (const auto& op : ops) {
    std::string label;
    for (const auto& [to, from] : op.transitions)
      label += (label.empty() ? "" : ";") + level_name(from) + "->" + level_name(to);
    const double rot = commutation_defect(op, p, Frame::Rotating);
    const double lab = commutation_defect(op, p, Frame::Lab) / (p.omega0 * std::max(op.op.max_abs(), 1e-300));
    worst = std::max({worst, rot, lab});
    w.row({label}, {op.bohr_frequency, op.rotating_frequency, static_cast<double>(op.excitation_change), rot, lab});
  }
  emit(c, csv.str(), out);

  const SpectralWeights weights = weights_for_rates(c.gamma1, c.gamma2, c.gamma3_value(), c.alpha, c.beta, p);
  const Liouvillian assembled = assemble_generator(ops, weights, p);
  const Liouvillian postulated = build_liouvillian(OpenCavity{davies_rates(c.alpha, c.beta, weights, p)}, p);
  const double scale = std::max(postulated.matrix().max_abs(), 1.0);
  const double gap = max_abs_diff(assembled.matrix(), postulated.matrix()) / scale;
  err << "davies-check: generator gap " << format_number(gap) << " x max|L|, worst commutation defect "
      << format_number(worst) << '\n';
  if (gap > tol::kGeneratorMatch || worst > tol::kEigenDefect) {
    err << "davies-check: equivalence violated\n";
    return kExitValidation;
  }
  return kExitOk;
}

int cmd_verify(std::ostream& out) {
  bool all = true;
  for (const auto& r : run_acceptance()) {
    out << format_result(r) << '\n';
    all = all && r.passed;
  }
  out << (all ? "all criteria passed\n" : "some criteria failed\n");
  return all ? kExitOk : kExitVerifyFailed;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Damped vacuum Rabi oscillations: simulation, fitting and checks", "vrabi"};
  app.require_subcommand(1);
  Overrides o;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"simulate", "p_g(t), kernel-averaged p_g and density-matrix elements"},
      {"energy", "mean energy Tr(Omega rho) and its kernel average"},
      {"entangle", "partial-transpose spectrum and the e0/g1 coherence"},
      {"fit-rabi", "Levenberg-Marquardt fit of open-cavity rates to a p_g series"},
      {"fit-q", "quality factor from the energy decay"},
      {"davies-check", "Davies operators, commutation defects and generator equivalence"},
      {"verify", "run the acceptance checks"}};
  for (const auto& [name, help] : commands) add_options(app.add_subcommand(name, help), o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    if (command == "verify") return cmd_verify(out);
    const RunConfig c = resolve(o);
    if (command == "simulate") {
      emit(c, tabulated(c, {"t_us", "p_g", "p_g_convolved", "rho_e0e0", "rho_g1g1", "rho_g0g0", "rho_e0g1_re", "rho_e0g1_im"},
                        write_simulate),
           out);
    } else if (command == "energy") {
      emit(c, tabulated(c, {"t_us", "energy", "energy_convolved"}, write_energy), out);
    } else if (command == "entangle") {
      emit(c, tabulated(c, {"t_us", "lambda1", "lambda2", "lambda3", "lambda4", "coherence_re", "coherence_im",
                            "coherence_printed_re", "coherence_printed_im"},
                        write_entangle),
           out);
    } else if (command == "fit-rabi") {
      return cmd_fit_rabi(c, out, err);
    } else if (command == "fit-q") {
      return cmd_fit_q(c, out, err);
    } else if (command == "davies-check") {
      return cmd_davies(c, out, err);
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const RankDeficientError& e) {
    err << "error: " << e.what() << '\n';
    return kExitFit;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const IntegrationError& e) {
    err << "error: " << e.what() << " at t = " << format_number(e.failing_time()) << " s\n";
    return kExitValidation;
  }
}

}  // namespace vrabi
