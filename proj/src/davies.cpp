#include "vrabi/davies.hpp"

#include <cmath>

#include "vrabi/errors.hpp"

namespace vrabi {

namespace {

void check_nmax(int n_max) {
  if (n_max < 1 || davies_dim(n_max) > kMaxDim) throw ValidationError("n_max must lie in [1, 7]");
}

std::vector<DressedLevel> levels(int n_max) {
  std::vector<DressedLevel> out{{0, 0}};
  for (int n = 1; n <= n_max; ++n) {
    out.push_back({n, +1});
    out.push_back({n, -1});
  }
  return out;
}

// <Omega_{N,m}| X |Omega_{N',m'}> for X = alpha (a + a^+) + beta a^+ a.
double matrix_element(DressedLevel to, DressedLevel from, double alpha, double beta) {
  const int n = to.manifold, np = from.manifold;
  const double mm = static_cast<double>(to.sign * from.sign);
  const double s2 = 1.0 / std::sqrt(2.0);
  if (np == n + 1) {
    if (n == 0) return alpha * s2;
    return 0.5 * alpha * (std::sqrt(n + 1.0) + mm * std::sqrt(static_cast<double>(n)));
  }
  if (np == n - 1) {
    if (np == 0) return alpha * s2;
    return 0.5 * alpha * (std::sqrt(static_cast<double>(n)) + mm * std::sqrt(n - 1.0));
  }
  if (np == n && n > 0) return 0.5 * beta * (n + mm * (n - 1.0));
  return 0.0;
}

double rotating_energy(DressedLevel l, double g) { return l.sign * std::sqrt(static_cast<double>(l.manifold)) * g; }

}  // namespace

std::size_t davies_dim(int n_max) { return static_cast<std::size_t>(2 * n_max + 1); }

std::size_t dressed_index(DressedLevel l) {
  if (l.manifold == 0) return 2;
  if (l.manifold == 1) return l.sign > 0 ? 0 : 1;
  return static_cast<std::size_t>(3 + 2 * (l.manifold - 2) + (l.sign > 0 ? 0 : 1));
}

std::string level_name(DressedLevel l) {
  if (l.manifold == 0) return "Omega_0";
  return "Omega_{" + std::to_string(l.manifold) + (l.sign > 0 ? ",+}" : ",-}");
}

double level_energy(DressedLevel l, const PhysicalParams& p, Frame frame) {
  const double rot = rotating_energy(l, p.g);
  if (frame == Frame::Rotating) return rot;
  return l.manifold * p.omega0 - 0.5 * p.omega0 + rot;
}

std::vector<DaviesOperator> davies_decompose(double alpha, double beta, int n_max, const PhysicalParams& p) {
  check_nmax(n_max);
  p.validate();
  const auto lv = levels(n_max);
  const std::size_t dim = davies_dim(n_max);
  std::vector<DaviesOperator> ops;
  for (const auto& to : lv)
    for (const auto& from : lv) {
      const int dn = from.manifold - to.manifold;
      if (std::abs(dn) > 1) continue;
      if (dn == 0 && to.manifold == 0) continue;
      const double rot = rotating_energy(from, p.g) - rotating_energy(to, p.g);
      DaviesOperator* slot = nullptr;
      for (auto& op : ops)
        if (op.excitation_change == dn &&
            std::abs(op.rotating_frequency - rot) <= 1e-12 * std::max(1.0, std::abs(rot))) {
          slot = &op;
          break;
        }
      if (!slot) {
        ops.push_back({dn * p.omega0 + rot, rot, dn, {}, ComplexMatrix(dim)});
        slot = &ops.back();
      }
      slot->transitions.emplace_back(to, from);
      slot->op(dressed_index(to), dressed_index(from)) += matrix_element(to, from, alpha, beta);
    }
  return ops;
}

ComplexMatrix interaction_operator(double alpha, double beta, int n_max) {
  check_nmax(n_max);
  const std::size_t dim = davies_dim(n_max);
  // Bare Fock states |g,N> and |e,N-1> placed where the dressed order puts
  // |Omega_{N,+}> and |Omega_{N,->> respectively; |g,0> at index 2.
  auto g_index = [](int n) { return dressed_index({n, n == 0 ? 0 : +1}); };
  auto e_index = [](int n_photons) { return dressed_index({n_photons + 1, -1}); };
  ComplexMatrix a(dim);
  for (int n = 1; n <= n_max; ++n) a(g_index(n - 1), g_index(n)) = std::sqrt(static_cast<double>(n));
  for (int k = 1; k + 1 <= n_max; ++k) a(e_index(k - 1), e_index(k)) = std::sqrt(static_cast<double>(k));
  const ComplexMatrix x = alpha * (a + a.adjoint()) + beta * (a.adjoint() * a);

  ComplexMatrix u(dim);
  const double s = 1.0 / std::sqrt(2.0);
  u(2, 2) = 1.0;
  for (int n = 1; n <= n_max; ++n) {
    const std::size_t ip = dressed_index({n, +1}), im = dressed_index({n, -1});
    // Omega_{N,+-} = (|g,N> +- |e,N-1>)/sqrt2
    u(g_index(n), ip) = s;
    u(e_index(n - 1), ip) = s;
    u(g_index(n), im) = s;
    u(e_index(n - 1), im) = -s;
  }
  return u.adjoint() * x * u;
}

double commutation_defect(const DaviesOperator& a, const PhysicalParams& p, Frame frame) {
  const std::size_t dim = a.op.dim();
  const int n_max = static_cast<int>((dim - 1) / 2);
  ComplexMatrix h(dim);
  for (const auto& l : levels(n_max)) h(dressed_index(l), dressed_index(l)) = level_energy(l, p, frame);
  const double w = frame == Frame::Lab ? a.bohr_frequency : a.rotating_frequency;
  return (commutator(h, a.op) + a.op * cplx(w)).max_abs();
}

void SpectralWeights::set(double omega, double gamma) {
  if (!(omega > 0.0)) throw ValidationError("SpectralWeights: set weights for omega > 0 only");
  if (!(gamma >= 0.0)) throw ValidationError("SpectralWeights: gamma must be >= 0");
  for (auto& [w, g] : table_)
    if (std::abs(w - omega) <= 1e-9 * omega) {
      g = gamma;
      return;
    }
  table_.emplace_back(omega, gamma);
}

double SpectralWeights::at(double omega) const {
  if (omega == 0.0) return 0.0;
  const double w = std::abs(omega);
  for (const auto& [wk, gk] : table_)
    if (std::abs(wk - w) <= 1e-9 * w) return omega > 0.0 ? gk : kms_ratio(w, params_) * gk;
  throw ValidationError("SpectralWeights: no weight for omega = " + std::to_string(w));
}

Liouvillian assemble_generator(const std::vector<DaviesOperator>& ops, const SpectralWeights& weights,
                               const PhysicalParams& p, Frame frame) {
  std::vector<JumpTerm> jumps;
  for (const auto& a : ops) {
    if (!(a.bohr_frequency > 0.0)) continue;
    ComplexMatrix a3(3);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) a3(i, j) = a.op(i, j);
    if (a3.max_abs() == 0.0) continue;
    jumps.push_back({weights.at(a.bohr_frequency), a3});
    jumps.push_back({weights.at(-a.bohr_frequency), a3.adjoint()});
  }
  const ComplexMatrix h = system_hamiltonian(Basis::Dressed, p, frame);
  // The model tag records the equivalent rates only for reference.
  return Liouvillian(lindblad_matrix(h, jumps), Basis::Dressed, OpenCavity{}, frame);
}

DecayRates davies_rates(double alpha, double beta, const SpectralWeights& w, const PhysicalParams& p) {
  const double a2 = alpha * alpha, b2 = beta * beta;
  const double wp = p.omega0 + p.g, wm = p.omega0 - p.g, w3 = 2.0 * p.g;
  DecayRates r;
  r.gamma1 = a2 == 0.0 ? 0.0 : w.at(wp) * a2;
  r.gamma2 = a2 == 0.0 ? 0.0 : w.at(wm) * a2;
  r.gamma3 = b2 == 0.0 ? 0.0 : w.at(w3) * b2 / 2.0;
  r.gamma_a = a2 == 0.0 ? 0.0 : w.at(-wp) * a2;
  r.gamma_b = a2 == 0.0 ? 0.0 : w.at(-wm) * a2;
  r.gamma_c = b2 == 0.0 ? 0.0 : w.at(-w3) * b2 / 2.0;
  return r;
}

SpectralWeights weights_for_rates(double gamma1, double gamma2, double gamma3, double alpha, double beta,
                                  const PhysicalParams& p) {
  SpectralWeights w(p);
  if (alpha != 0.0) {
    w.set(p.omega0 + p.g, gamma1 / (alpha * alpha));
    w.set(p.omega0 - p.g, gamma2 / (alpha * alpha));
  }
  if (beta != 0.0) w.set(2.0 * p.g, 2.0 * gamma3 / (beta * beta));
  return w;
}

}  // namespace vrabi
