#pragma once

// Standard-normal helpers: Phi, its inverse (Wichura's PPND16 rational
// approximation, deterministic polynomial evaluation), and the bivariate
// CDF (Genz's Gauss-Legendre scheme, |error| ~ 5e-16).

namespace aitc::normal {

double cdf(double x);

// Inverse CDF for p in (0,1); throws std::domain_error outside.
double quantile(double p);

// P(X <= h, Y <= k) for standard bivariate normal with correlation rho.
double bvn_cdf(double h, double k, double rho);

}  // namespace aitc::normal
