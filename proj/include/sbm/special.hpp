#pragma once

namespace sbm {

// Gamma at non-pole arguments; throws NumericError at 0, -1, -2, ...
double gamma_fn(double x);
// Residue of Gamma at -l: (-1)^l / l!
double gamma_residue(int l);
// Surface area of the unit sphere in R^n: 2 pi^(n/2) / Gamma(n/2)
double sphere_area(int n);

}  // namespace sbm
