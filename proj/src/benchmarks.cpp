#include "lppv/benchmarks.hpp"

#include <cmath>

#include "lppv/errors.hpp"

namespace lppv {

Vec vdp_rhs(const Vec& x, double forcing_amp, double forcing_omega, double t,
            double mu) {
  if (x.size() != 2)
    throw Error(errc::dimension_mismatch, "Van der Pol state must be 2-d");
  Vec out(2);
  out(0) = x(1);
  out(1) = mu * (1.0 - x(0) * x(0)) * x(1) - x(0) +
           forcing_amp * std::sin(forcing_omega * t);
  return out;
}

OdeSystem make_vanderpol(double mu) {
  OdeSystem sys;
  sys.state_dim = 2;
  sys.input_dim = 1;
  sys.param = Vec::Zero(0);
  sys.rhs = [mu](const Vec& x, const Vec& d, double) {
    Vec out(2);
    out(0) = x(1);
    out(1) = mu * (1.0 - x(0) * x(0)) * x(1) - x(0) +
             (d.size() > 0 ? d(0) : 0.0);
    return out;
  };
  return sys;
}

Vec kite_rhs(const Vec& x, double u, double vr) {
  if (x.size() != 3)
    throw Error(errc::dimension_mismatch, "kite state must be 3-d");
  const double c = std::cos(x(0));
  if (std::abs(c) < 1e-9)
    throw Error(errc::singular_latitude,
                "kite heading undefined at theta = +-pi/2");
  Vec out(3);
  out(0) = vr * std::cos(x(2));
  out(1) = vr * std::sin(x(2)) / c;
  out(2) = u;
  return out;
}

OdeSystem make_kite(double vr) {
  OdeSystem sys;
  sys.state_dim = 3;
  sys.input_dim = 1;
  sys.param = Vec::Constant(1, vr);
  sys.rhs = [vr](const Vec& x, const Vec& d, double) {
    return kite_rhs(x, d.size() > 0 ? d(0) : 0.0, vr);
  };
  return sys;
}

}  // namespace lppv
