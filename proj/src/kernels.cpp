#include "lppv/kernels.hpp"

#include <cmath>

#include "lppv/errors.hpp"

namespace lppv {

double k_se(const Vec& a, const Vec& b, double length_scale) {
  const double d2 = (a - b).squaredNorm();
  return std::exp(-d2 / (2.0 * length_scale * length_scale));
}

double k_pse(double tau, double tau2, double length_scale, double period) {
  const double s = std::sin(M_PI * (tau - tau2) / period);
  return std::exp(-2.0 * s * s / (length_scale * length_scale));
}

double k_multi(double tau, const Vec& p, double tau2, const Vec& p2,
               double length_scale_tau, const Vec& length_scale_p,
               double period) {
  double v = k_pse(tau, tau2, length_scale_tau, period);
  double q = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    const double r = (p(i) - p2(i)) / length_scale_p(i);
    q += r * r;
  }
  return v * std::exp(-0.5 * q);
}

double kernel_eval(const KernelSpec& spec, double tau, const Vec& p,
                   double tau2, const Vec& p2) {
  switch (spec.kind) {
    case KernelKind::se: {
      Vec a(1), b(1);
      a(0) = tau;
      b(0) = tau2;
      return k_se(a, b, spec.length_scale_tau);
    }
    case KernelKind::periodic_se:
      return k_pse(tau, tau2, spec.length_scale_tau, spec.period);
    case KernelKind::multi:
      if (p.size() != spec.length_scale_p.size() ||
          p2.size() != spec.length_scale_p.size())
        throw Error(errc::dimension_mismatch,
                    "parameter dimension does not match kernel length scales");
      return k_multi(tau, p, tau2, p2, spec.length_scale_tau,
                     spec.length_scale_p, spec.period);
  }
  throw Error(errc::config, "unknown kernel kind");
}

std::string kernel_kind_name(KernelKind k) {
  switch (k) {
    case KernelKind::se:
      return "se";
    case KernelKind::periodic_se:
      return "periodic-se";
    case KernelKind::multi:
      return "multi";
  }
  throw Error(errc::config, "unknown kernel kind");
}

KernelKind kernel_kind_from_name(const std::string& name) {
  if (name == "se") return KernelKind::se;
  if (name == "periodic-se") return KernelKind::periodic_se;
  if (name == "multi") return KernelKind::multi;
  throw Error(errc::config, "unknown kernel kind '" + name + "'");
}

}  // namespace lppv
