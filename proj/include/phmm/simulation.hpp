// Copyright (c) the phmm authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>

#include "phmm/moments.hpp"

namespace phmm
{

// Uniform-grid trajectory with the moment-predicted steady-state signal.
struct SimResult
{
  Vector t;
  Matrix x;       // states, one column per grid point
  Matrix y;       // outputs
  Matrix y_pred;  // predicted steady-state outputs
  double tail_residual = 0.0;  // max over the last 20% of
                               // ||y - y_pred|| / (1 + max ||y_pred||)
  bool transient_bound_ok = true;  // exp(-min|Re lambda| 0.8 T) <= 1e-6
};

// Plant driven by the signal generator w' = S w, u = L w. For descriptor
// plants the derivative flags select the realization; the predicted
// steady-state is H X S w (output derivative) or H X w with X the solution
// of the interconnection's Sylvester equation.
SimResult simulate_right(const LtiSystem &sys, const GeneratorRight &gen, const Vector &w0,
                         double horizon, double dt);
SimResult simulate_right(const PortHamiltonianSystem &sys, const GeneratorRight &gen,
                         const Vector &w0, double horizon, double dt);
SimResult simulate_right(const DescriptorModel &sys, const GeneratorRight &gen,
                         const Vector &w0, double horizon, double dt);

enum class InputKind
{
  impulse,
  step
};

enum class LeftSimPath
{
  finite,  // plant x' = A x + B u, d = w + Upsilon x, impulse input
  markov   // descriptor interconnections; impulse reads d, step reads d_hat
};

// Generalized signal generator w' = Qc w + Rc y driven by the plant; the
// output trajectory is the d (or d_hat) signal whose steady state carries
// the moments, compared against its closed-form evolution.
SimResult simulate_left(const LtiSystem &sys, const GeneratorLeft &gen, InputKind input,
                        LeftSimPath path, double horizon, double dt);
SimResult simulate_left(const PortHamiltonianSystem &sys, const GeneratorLeft &gen,
                        InputKind input, LeftSimPath path, double horizon, double dt);

// Max positive violation of the discrete power balance
// H(x_{k+1}) - H(x_k) <= int u^T y dt over any step (up to O(dt^3) quadrature
// slack). Requires the r_psd and q_pd flags.
double energy_audit(const PortHamiltonianSystem &sys,
                    const std::function<Vector(double)> &input, const Vector &x0,
                    double horizon, double dt);

}  // namespace phmm
