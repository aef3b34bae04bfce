#include "imcf/roundness.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "imcf/quadrature.hpp"

namespace imcf {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

SphereField exp_scaled(const SphereField& f, double factor) {
  SphereField out(f.grid);
  for (size_t i = 0; i < f.v.size(); ++i) out.v[i] = std::exp(factor * f.v[i]);
  return out;
}
}  // namespace

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Round: return "round";
    case Verdict::NonRound: return "non-round";
    default: return "indeterminate";
  }
}

double limit_functional_n(const SphereField& f, int n) {
  const SphereGrid& g = *f.grid;
  if (g.n != n) throw std::invalid_argument("limit_functional_n: grid dimension mismatch");
  const SphereField w = exp_scaled(f, -1.0);
  const SphereTensor2 D = traceless_hess_sigma(w);
  SphereField weighted(f.grid);
  for (int i = 0; i < g.nnodes(); ++i)
    weighted.v[i] = std::exp((n - 3.0) * f.v[i]) * D.norm2_sigma(i);
  const double second = integrate_sphere(weighted);
  const double first = integrate_sphere(exp_scaled(f, n - 1.0));
  return std::pow(first, -static_cast<double>(n - 5) / (n - 1)) * second;
}

double limit_functional(const SphereField& f) {
  if (f.grid->n != 3) throw std::invalid_argument("limit_functional: defined on S^2");
  return limit_functional_n(f, 3);
}

RoundnessResidual roundness_residual(const SphereField& f) {
  const SphereGrid& g = *f.grid;
  RoundnessResidual out;
  const SphereField w = exp_scaled(f, -1.0);
  out.rho_proj = first_eigenspace_residual(w);
  if (g.n == 3) {
    const SphereField lap = laplace_sigma(f);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo, mean = 0.0;
    double wsum = 0.0;
    for (int i = 0; i < g.nnodes(); ++i) {
      const double K = std::exp(-2.0 * f.v[i]) * (1.0 - lap.v[i]);
      lo = std::min(lo, K);
      hi = std::max(hi, K);
      mean += K * g.node_w[i];
      wsum += g.node_w[i];
    }
    mean /= wsum;
    out.k_variation = (hi - lo) / std::max(std::abs(mean), 1e-300);
  } else {
    out.k_variation = kNaN;
  }
  return out;
}

SphereField rescaled_limit_metric(const FlowTrace& tr) {
  const ProfileResult pr = extract_profile(tr);
  const int n = tr.n;
  const double omega = sphere_area(n - 1);
  const double mass = integrate_sphere(exp_scaled(pr.f, n - 1.0));
  const double shift = std::log(omega / mass) / (n - 1.0);
  SphereField conf(pr.f.grid);
  for (size_t i = 0; i < conf.v.size(); ++i)
    conf.v[i] = std::exp(2.0 * (pr.f.v[i] + shift));
  return conf;
}

double ball_model_radius(double r) {
  if (!(r > 0.0)) throw std::domain_error("ball_model_radius: r must be positive");
  return 2.0 - 4.0 / (std::exp(r) + 1.0);
}

double ball_model_radius_inv(double rho) {
  if (!(rho > 0.0) || !(rho < 2.0))
    throw std::domain_error("ball_model_radius_inv: rho must lie in (0, 2)");
  return std::log((2.0 + rho) / (2.0 - rho));
}

BallModelLimit ball_model_limit(const FlowTrace& tr) {
  if (tr.n != 3) throw std::invalid_argument("ball_model_limit: defined for n = 3");
  extract_profile(tr);  // converged-profile precondition; throws NotConverged

  auto gap_at = [&](int k, SphereField* field_out) {
    HarmonicCoeffs c(tr.work_grid);
    c.a = tr.samples[k].coeffs;
    const SphereField r = synthesis_values(c);
    const double t = tr.samples[k].t;
    const double boost = std::exp(0.5 * t);
    double gap = 0.0;
    SphereField field(r.grid);
    for (size_t i = 0; i < r.v.size(); ++i) {
      field.v[i] = (ball_model_radius(r.v[i]) - 2.0) * boost;
      const double f = r.v[i] - 0.5 * t;
      gap = std::max(gap, std::abs(field.v[i] + 4.0 * std::exp(-f)));
    }
    if (field_out) *field_out = std::move(field);
    return gap;
  };

  const int last = static_cast<int>(tr.samples.size()) - 1;
  BallModelLimit out;
  out.gap = gap_at(last, &out.field);
  double prev = out.gap;
  for (int k = last - 1; k >= std::max(0, last - 4); --k) {
    const double gk = gap_at(k, nullptr);
    if (gk + 1e-12 < prev) out.gap_monotone = false;  // older gap must be larger
    prev = gk;
  }
  return out;
}

RoundnessReport roundness_report(const SphereField& f, const RoundnessThresholds& th) {
  RoundnessReport rep;
  rep.n = f.grid->n;
  rep.f = f;
  rep.w = exp_scaled(f, -1.0);
  FirstEigenspaceProjection split = project_first_eigenspace(rep.w);
  rep.proj = split.modes;
  const RoundnessResidual rr = roundness_residual(f);
  rep.rho_proj = rr.rho_proj;
  rep.k_variation = rr.k_variation;
  rep.limit_value = limit_functional_n(f, rep.n);
  if (rep.n == 3) {
    const SphereField lap = laplace_sigma(f);
    rep.K = SphereField(f.grid);
    for (size_t i = 0; i < rep.K.v.size(); ++i)
      rep.K.v[i] = std::exp(-2.0 * f.v[i]) * (1.0 - lap.v[i]);
  }
  rep.verdict = rep.rho_proj < th.rho_round
                    ? Verdict::Round
                    : (rep.rho_proj > th.rho_nonround ? Verdict::NonRound
                                                      : Verdict::Indeterminate);
  return rep;
}

}  // namespace imcf
