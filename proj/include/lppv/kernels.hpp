#pragma once

#include <string>
#include <vector>

#include "lppv/core.hpp"

namespace lppv {

enum class KernelKind { se, periodic_se, multi };

// Scalar kernel over (phase, parameter) pairs.  `se` ignores the phase
// periodicity (generic squared exponential over the phase), `periodic_se`
// is the phase-periodic squared exponential, and `multi` multiplies the
// periodic phase kernel with a squared exponential over the operating
// parameters (one length scale per parameter dimension).
struct KernelSpec {
  KernelKind kind = KernelKind::periodic_se;
  double period = 0.0;           // required for periodic_se and multi
  double length_scale_tau = 1.0;
  Vec length_scale_p;            // multi only

  bool uses_param() const { return kind == KernelKind::multi; }
};

// Squared exponential on vectors: exp(-|a-b|^2 / (2 l^2)).
double k_se(const Vec& a, const Vec& b, double length_scale);

// Periodic squared exponential on phases:
//   exp(-2 sin^2(pi (tau - tau2) / period) / l^2).
double k_pse(double tau, double tau2, double length_scale, double period);

// Product of the periodic phase kernel and a squared exponential over the
// operating parameter vector.
double k_multi(double tau, const Vec& p, double tau2, const Vec& p2,
               double length_scale_tau, const Vec& length_scale_p,
               double period);

// Evaluate a KernelSpec on two (phase, parameter) samples.
double kernel_eval(const KernelSpec& spec, double tau, const Vec& p,
                   double tau2, const Vec& p2);

std::string kernel_kind_name(KernelKind k);
KernelKind kernel_kind_from_name(const std::string& name);

}  // namespace lppv
