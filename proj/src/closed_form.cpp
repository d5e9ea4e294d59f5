#include "vrabi/closed_form.hpp"

#include <cmath>
#include <limits>

#include "vrabi/errors.hpp"

namespace vrabi {

namespace {

constexpr double kDegenerateRel = 1e-6;

void require_time(double t) {
  if (!(t >= 0.0)) throw ValidationError("time must be >= 0");
}

// E * sinh(sqrt(u))/sqrt(u) with E = exp(-a); u may be negative. Written so
// that large overdamped arguments do not overflow.
double scaled_sinhc(double u, double a) {
  if (std::abs(u) < 1e-3) return std::exp(-a) * (1.0 + u / 6.0 + u * u / 120.0 + u * u * u / 5040.0);
  if (u < 0.0) {
    const double r = std::sqrt(-u);
    return std::exp(-a) * std::sin(r) / r;
  }
  const double r = std::sqrt(u);
  return 0.5 * (std::exp(r - a) - std::exp(-r - a)) / r;
}

// E * (sinh(sqrt(u)/2) / (sqrt(u)/2))^2
double scaled_sinhc_half_sq(double u, double a) {
  const double q = u / 4.0;
  if (std::abs(q) < 1e-3) {
    const double s = 1.0 + q / 6.0 + q * q / 120.0 + q * q * q / 5040.0;
    return std::exp(-a) * s * s;
  }
  if (u < 0.0) {
    const double r = std::sqrt(-q);
    const double s = std::sin(r) / r;
    return std::exp(-a) * s * s;
  }
  // sinh^2(r) = (cosh(2r) - 1)/2
  const double r = std::sqrt(q);
  return (0.25 * (std::exp(2.0 * r - a) + std::exp(-2.0 * r - a)) - 0.5 * std::exp(-a)) / (r * r);
}

DensityMatrix dressed_from_diag(cplx pp, cplx mm, cplx zz, cplx pm) {
  ComplexMatrix m(3);
  m(0, 0) = pp;
  m(1, 1) = mm;
  m(2, 2) = zz;
  m(0, 1) = pm;
  m(1, 0) = std::conj(pm);
  return DensityMatrix::unchecked(std::move(m), Basis::Dressed);
}

// Population block of the open-cavity generator acting on (x, y, z).
std::array<std::array<double, 3>, 3> population_block(const DecayRates& r) {
  return {{{-0.5 * (r.gamma1 + r.gamma3), 0.5 * r.gamma_c, 0.5 * r.gamma_a},
           {0.5 * r.gamma3, -0.5 * (r.gamma2 + r.gamma_c), 0.5 * r.gamma_b},
           {0.5 * r.gamma1, 0.5 * r.gamma2, -0.5 * (r.gamma_a + r.gamma_b)}}};
}

std::array<cplx, 3> null_vector(const DecayRates& r, cplx lambda) {
  auto m = population_block(r);
  std::array<std::array<cplx, 3>, 3> b;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) b[i][j] = m[i][j] - (i == j ? lambda : cplx{});
  std::array<cplx, 3> best{};
  double best_norm = -1.0;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      const auto& u = b[i];
      const auto& v = b[j];
      std::array<cplx, 3> c{u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
      const double n = std::abs(c[0]) + std::abs(c[1]) + std::abs(c[2]);
      if (n > best_norm) {
        best_norm = n;
        best = c;
      }
    }
  if (best_norm <= 0.0) {
    // B has rank <= 1: any vector orthogonal to its largest row works.
    int k = 0;
    double rn = -1.0;
    for (int i = 0; i < 3; ++i) {
      const double n = std::abs(b[i][0]) + std::abs(b[i][1]) + std::abs(b[i][2]);
      if (n > rn) {
        rn = n;
        k = i;
      }
    }
    if (rn <= 0.0) return {1.0, 0.0, 0.0};
    const auto& u = b[k];
    best = std::abs(u[0]) >= std::abs(u[1]) ? std::array<cplx, 3>{-u[2], 0.0, u[0]}
                                            : std::array<cplx, 3>{0.0, u[2], -u[1]};
    if (std::abs(best[0]) + std::abs(best[1]) + std::abs(best[2]) == 0.0) best = {-u[1], u[0], 0.0};
  }
  return best;
}

}  // namespace

PhenomT0Solution phenom_t0_rho(double g, double gamma, double t) {
  if (!(g > 0.0)) throw ValidationError("phenom_t0_rho: g must be > 0");
  if (!(gamma >= 0.0)) throw ValidationError("phenom_t0_rho: gamma must be >= 0");
  require_time(t);

  const double d = gamma * gamma - 16.0 * g * g;
  Regime regime = Regime::Oscillatory;
  if (std::abs(d) <= 1e-12 * (gamma * gamma + 16.0 * g * g))
    regime = Regime::Critical;
  else if (d > 0.0)
    regime = Regime::Overdamped;

  const double u = d * t * t / 4.0;
  const double a = gamma * t / 2.0;
  const double sc = 0.5 * t * scaled_sinhc(u, a);
  const double cm = t * t / 8.0 * scaled_sinhc_half_sq(u, a);
  const double e = std::exp(-a);

  const double p11 = e + (gamma * gamma - 8.0 * g * g) * cm + gamma * sc;
  const double p22 = 8.0 * g * g * cm;
  const cplx p12(0.0, 2.0 * g * (sc + gamma * cm));

  ComplexMatrix m(3);
  m(0, 0) = p11;
  m(1, 1) = p22;
  m(2, 2) = 1.0 - p11 - p22;
  m(0, 1) = p12;
  m(1, 0) = std::conj(p12);
  return {DensityMatrix::unchecked(std::move(m), Basis::Bare), regime};
}

BareProbabilities phenom_t0_probs(double g, double gamma, double t) {
  return bare_probabilities(phenom_t0_rho(g, gamma, t).rho);
}

DensityMatrix scala_rho(double g, double gamma1, double gamma2, double t) {
  if (!(gamma1 >= 0.0) || !(gamma2 >= 0.0)) throw ValidationError("scala_rho: rates must be >= 0");
  require_time(t);
  const double e1 = std::exp(-0.5 * gamma1 * t);
  const double e2 = std::exp(-0.5 * gamma2 * t);
  const cplx pm = -0.5 * std::exp(-0.25 * (gamma1 + gamma2) * t) * std::polar(1.0, -2.0 * g * t);
  return dressed_from_diag(0.5 * e1, 0.5 * e2, 1.0 - 0.5 * e1 - 0.5 * e2, pm);
}

double scala_pg(double g, double gamma1, double gamma2, double t) {
  if (!(gamma1 >= 0.0) || !(gamma2 >= 0.0)) throw ValidationError("scala_pg: rates must be >= 0");
  require_time(t);
  // The symmetric pair is summed in a fixed order so that swapping the rates
  // gives a bit-identical result.
  const double a = std::exp(-0.5 * gamma1 * t), b = std::exp(-0.5 * gamma2 * t);
  const double pair = std::min(a, b) + std::max(a, b);
  return 1.0 - 0.25 * pair - 0.5 * std::exp(-0.25 * (gamma1 + gamma2) * t) * std::cos(2.0 * g * t);
}

DampingBasis damping_basis(const DecayRates& r, const PhysicalParams& p, Frame frame) {
  r.validate();
  p.validate();
  const double g1 = r.gamma1, g2 = r.gamma2, g3 = r.gamma3, ga = r.gamma_a, gb = r.gamma_b, gc = r.gamma_c;
  DampingBasis out;
  const double lin = g1 - g2 + g3 - ga - gb + gc;
  out.S = std::sqrt(cplx(lin * lin + 4.0 * (g1 - g2) * (ga - gc)));
  const cplx S = out.S;
  const double total = r.total();
  out.degenerate = std::abs(S) <= 1e-12 * total;

  out.x = {gb * gc + ga * (g2 + gc), (g1 - g3) * (gc - ga) - (g1 + g3) * (g1 - g2 + g3 - gb + S),
           (g1 - g3) * (gc - ga) - (g1 + g3) * (g1 - g2 + g3 - gb - S)};
  out.y = {g3 * ga + gb * (g1 + g3), (g1 + g3) * (g3 - gb) + g3 * (g2 - ga + gc + S) - g1 * gb,
           (g1 + g3) * (g3 - gb) + g3 * (g2 - ga + gc - S) - g1 * gb};
  out.z = {g2 * g3 + g1 * (g2 + gc), -2.0 * g2 * g3 + g1 * (g1 - g2 + g3 + ga + gb - gc + S),
           -2.0 * g2 * g3 + g1 * (g1 - g2 + g3 + ga + gb - gc - S)};

  out.eigenvalues[0] = 0.0;
  out.eigenvalues[1] = -0.25 * (total + S);
  out.eigenvalues[2] = -0.25 * (total - S);

  const double scale = std::max(total, std::numeric_limits<double>::min());
  for (int i = 0; i < 3; ++i) {
    const double n = std::abs(out.x[i]) + std::abs(out.y[i]) + std::abs(out.z[i]);
    if (n <= 1e-12 * scale * scale) {
      const auto v = null_vector(r, out.eigenvalues[i]);
      out.x[i] = v[0];
      out.y[i] = v[1];
      out.z[i] = v[2];
      out.from_formula[i] = false;
    }
    ComplexMatrix m(3);
    m(0, 0) = out.x[i];
    m(1, 1) = out.y[i];
    m(2, 2) = out.z[i];
    out.operators[i] = std::move(m);
  }

  const ComplexMatrix h = system_hamiltonian(Basis::Dressed, p, frame);
  const double ep = h(0, 0).real(), em = h(1, 1).real(), e0 = h(2, 2).real();
  const cplx i1(0.0, 1.0);
  const cplx l_pm = -i1 * (ep - em) - 0.25 * (g1 + g2 + g3 + gc);
  const cplx l_p0 = -i1 * (ep - e0) - 0.25 * (g1 + g3 + ga + gb);
  const cplx l_m0 = -i1 * (em - e0) - 0.25 * (g2 + ga + gb + gc);
  out.eigenvalues[3] = l_pm;
  out.eigenvalues[4] = l_p0;
  out.eigenvalues[5] = l_m0;
  out.eigenvalues[6] = std::conj(l_pm);
  out.eigenvalues[7] = std::conj(l_p0);
  out.eigenvalues[8] = std::conj(l_m0);
  out.operators[3] = ComplexMatrix::unit(3, 0, 1);
  out.operators[4] = ComplexMatrix::unit(3, 0, 2);
  out.operators[5] = ComplexMatrix::unit(3, 1, 2);
  out.operators[6] = ComplexMatrix::unit(3, 1, 0);
  out.operators[7] = ComplexMatrix::unit(3, 2, 0);
  out.operators[8] = ComplexMatrix::unit(3, 2, 1);
  return out;
}

void OpenCavityParams::validate() const {
  if (!(gamma1 >= 0.0) || !(gamma2 >= 0.0) || !(gamma3 >= 0.0))
    throw ValidationError("open-cavity rates must be >= 0");
  if (!(eps >= 0.0) || !(eps <= 1.0)) throw ValidationError("eps must lie in [0, 1]");
}

bool OpenCavityParams::degenerate() const {
  const double sum = gamma1 + gamma2 + gamma3;
  if (sum == 0.0) return true;
  const auto r = rates();
  const double lin = r.gamma1 - r.gamma2 + r.gamma3 - r.gamma_a - r.gamma_b + r.gamma_c;
  const double s = std::sqrt(std::abs(lin * lin + 4.0 * (r.gamma1 - r.gamma2) * (r.gamma_a - r.gamma_c)));
  const double k = gamma2 * gamma3 + gamma1 * (gamma2 + gamma3);
  return s <= kDegenerateRel * r.total() || std::abs(eps * gamma1 - gamma3) <= kDegenerateRel * (eps * gamma1 + gamma3) ||
         k <= kDegenerateRel * sum * sum;
}

InitialDecomposition initial_decomposition(const OpenCavityParams& oc) {
  oc.validate();
  if (oc.degenerate()) throw ValidationError("initial_decomposition: degenerate rates have no closed form");
  const double g1 = oc.gamma1, g2 = oc.gamma2, g3 = oc.gamma3, e = oc.eps;
  const auto r = oc.rates();
  const double lin = r.gamma1 - r.gamma2 + r.gamma3 - r.gamma_a - r.gamma_b + r.gamma_c;
  const cplx S = std::sqrt(cplx(lin * lin + 4.0 * (r.gamma1 - r.gamma2) * (r.gamma_a - r.gamma_c)));
  const double k = g2 * g3 + g1 * (g2 + g3);
  const double num = g1 * g1 * (1.0 + e) - g1 * g2 * (1.0 + 3.0 * e) + 2.0 * g1 * g3 * (1.0 - e) +
                     2.0 * g3 * (2.0 * g3 - g2 * e);
  const cplx den = 4.0 * S * k * (e * g1 - g3);
  const double pre = 0.5 / (2.0 * e + 1.0);
  InitialDecomposition d;
  d.a1 = 1.0 / ((2.0 * e + 1.0) * k);
  d.a2 = pre * (num - S * (g1 + 2.0 * g3)) / den;
  d.a3 = -pre * (num + S * (g1 + 2.0 * g3)) / den;
  d.a4 = -0.5;
  d.a7 = -0.5;
  return d;
}

double opencavity_pg_limit(double eps) { return (1.0 + eps) / (1.0 + 2.0 * eps); }

DensityMatrix opencavity_rho_numeric(const OpenCavityParams& oc, const PhysicalParams& p, double t,
                                     const CouplingProfile& profile) {
  oc.validate();
  require_time(t);
  const auto family = coupling_family(OpenCavity{oc.rates()});
  SuperVector v = vectorize(excited_state(Basis::Dressed).matrix());
  expm_action(family.at(phase_coupling(p.g, profile)), t, v);
  return DensityMatrix::unchecked(unvectorize(v), Basis::Dressed);
}

Evaluation<DensityMatrix> opencavity_rho(const OpenCavityParams& oc, const PhysicalParams& p, double t,
                                         const CouplingProfile& profile) {
  oc.validate();
  p.validate();
  require_time(t);
  // The expansion reproduces |e,0> only up to cancellation at t = 0.
  if (t == 0.0) return {excited_state(Basis::Dressed), oc.degenerate()};
  if (oc.degenerate()) return {opencavity_rho_numeric(oc, p, t, profile), true};

  PhysicalParams pe = p;
  pe.g = phase_coupling(p.g, profile);
  const DampingBasis basis = damping_basis(oc.rates(), pe);
  const InitialDecomposition a = initial_decomposition(oc);
  const std::array<std::pair<int, cplx>, 5> terms{
      {{0, a.a1}, {1, a.a2}, {2, a.a3}, {3, a.a4}, {6, a.a7}}};
  ComplexMatrix m(3);
  for (const auto& [i, coeff] : terms) {
    const cplx w = std::isinf(t) ? (i == 0 ? coeff : cplx{}) : coeff * std::exp(basis.eigenvalues[i] * t);
    m += basis.operators[i] * w;
  }
  return {DensityMatrix::unchecked(std::move(m), Basis::Dressed), false};
}

double ExpSum::at(double t) const {
  cplx v = constant;
  if (std::isinf(t)) return constant;
  for (const auto& term : terms) v += term.amplitude * std::exp(-term.rate * t);
  return v.real();
}

namespace {
cplx simplified_S(const OpenCavityParams& oc) {
  const auto r = oc.rates();
  const double lin = r.gamma1 - r.gamma2 + r.gamma3 - r.gamma_a - r.gamma_b + r.gamma_c;
  return std::sqrt(cplx(lin * lin + 4.0 * (r.gamma1 - r.gamma2) * (r.gamma_a - r.gamma_c)));
}
}  // namespace

ExpSum opencavity_pg_terms(const OpenCavityParams& oc, const PhysicalParams& p, const CouplingProfile& profile) {
  oc.validate();
  if (oc.degenerate()) throw ValidationError("opencavity_pg_terms: degenerate rates have no closed form");
  const cplx S = simplified_S(oc);
  const double c = 2.0 * oc.gamma3 - oc.eps * (oc.gamma1 + oc.gamma2);
  const double s = oc.gamma1 + oc.gamma2 + 2.0 * oc.gamma3 + oc.eps * (oc.gamma1 + oc.gamma2);
  const cplx den = 4.0 * S * (2.0 * oc.eps + 1.0);
  const double kappa = 0.25 * (oc.gamma1 + oc.gamma2 + 2.0 * oc.gamma3);
  ExpSum out;
  out.constant = opencavity_pg_limit(oc.eps);
  out.terms = {{(c - S) / den, (s + S) / 4.0},
               {-(c + S) / den, (s - S) / 4.0},
               {-0.5, cplx(kappa, 2.0 * phase_coupling(p.g, profile))}};
  return out;
}

ExpSum energy_terms(const OpenCavityParams& oc, const PhysicalParams& p) {
  oc.validate();
  if (oc.degenerate()) throw ValidationError("energy_terms: degenerate rates have no closed form");
  const double w0 = p.omega0, g = p.g, e = oc.eps, g1 = oc.gamma1, g2 = oc.gamma2, g3 = oc.gamma3;
  const cplx S = simplified_S(oc);
  const double s = g1 + g2 + 2.0 * g3 + e * (g1 + g2);
  const double x = g1 * e * (w0 + 2.0 * g) + g2 * e * (w0 - 2.0 * g) + g * (g1 - g2) - 2.0 * w0 * g3;
  const cplx den = 2.0 * S * (2.0 * e + 1.0);
  ExpSum out;
  out.constant = 0.5 * w0 * (2.0 * e - 1.0) / (2.0 * e + 1.0);
  out.terms = {{(x + S * w0) / den, (s + S) / 4.0}, {-(x - S * w0) / den, (s - S) / 4.0}};
  return out;
}

Evaluation<double> opencavity_pg(const OpenCavityParams& oc, const PhysicalParams& p, double t,
                                 const CouplingProfile& profile) {
  oc.validate();
  p.validate();
  require_time(t);
  if (t == 0.0) return {0.0, oc.degenerate()};
  if (oc.degenerate()) return {ground_probability(opencavity_rho_numeric(oc, p, t, profile)), true};
  return {opencavity_pg_terms(oc, p, profile).at(t), false};
}

Evaluation<double> energy_mean(const OpenCavityParams& oc, const PhysicalParams& p, double t) {
  oc.validate();
  p.validate();
  require_time(t);
  if (t == 0.0) return {mean_energy(excited_state(Basis::Dressed), p), oc.degenerate()};
  if (oc.degenerate()) return {mean_energy(opencavity_rho_numeric(oc, p, t), p), true};
  return {energy_terms(oc, p).at(t), false};
}

double brune_fit_formula(BruneVariant variant, double gamma, double g, double nbar, const CavityGeometry& geom,
                         double t) {
  if (!(nbar >= 0.0)) throw ValidationError("brune_fit_formula: nbar must be >= 0");
  if (!(gamma >= 0.0)) throw ValidationError("brune_fit_formula: gamma must be >= 0");
  geom.validate();
  require_time(t);
  const double f = geom.effective_time_factor();
  double decay = 0.0, phase_g = g;
  switch (variant) {
    case BruneVariant::EffTime: decay = gamma * t; break;
    case BruneVariant::TrueTime:
      decay = gamma * t;
      phase_g = g * f;
      break;
    case BruneVariant::Rescaled: decay = gamma / f * t; break;
  }
  const double damp = std::exp(-decay);
  // P(n) = nbar^n / (1+nbar)^(n+1), summed until the missing mass is 1e-9.
  const double q = nbar / (1.0 + nbar);
  double pn = 1.0 / (1.0 + nbar);
  double cumulative = 0.0, acc = 0.0;
  for (long n = 0; cumulative < 1.0 - 1e-9; ++n) {
    acc += pn * std::cos(2.0 * phase_g * std::sqrt(static_cast<double>(n + 1)) * t);
    cumulative += pn;
    pn *= q;
    if (pn == 0.0) break;
  }
  return 1.0 - 0.5 * (1.0 + damp * acc);
}

}  // namespace vrabi
