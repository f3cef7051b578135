#pragma once

#include "lppv/ode.hpp"

namespace lppv {

// Forced Van der Pol oscillator:
//   x1dot = x2
//   x2dot = mu (1 - x1^2) x2 - x1 + D sin(omega t)
Vec vdp_rhs(const Vec& x, double forcing_amp, double forcing_omega, double t,
            double mu);

// Van der Pol as a system with the forcing as a scalar exogenous input d:
//   x2dot = mu (1 - x1^2) x2 - x1 + d
OdeSystem make_vanderpol(double mu);

// Kinematic kite model on the unit sphere, state x = (theta, phi, gamma)
// with turn-rate command u:
//   thetadot = vr cos(gamma)
//   phidot   = vr sin(gamma) / cos(theta)
//   gammadot = u
// Throws Error("singular-latitude") at theta = +-pi/2.
Vec kite_rhs(const Vec& x, double u, double vr);

// Kite as a system with the turn rate as a scalar exogenous input,
// param = [vr].
OdeSystem make_kite(double vr);

}  // namespace lppv
