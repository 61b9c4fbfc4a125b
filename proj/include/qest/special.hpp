#pragma once

#include <vector>

namespace qest {

/// J_0(t) .. J_kmax(t), Bessel functions of the first kind.
std::vector<double> bessel_j_upto(int kmax, double t);
double bessel_j(int k, double t);

/// exp(-t) * I_0(t) .. exp(-t) * I_kmax(t), t >= 0.
std::vector<double> bessel_i_scaled_upto(int kmax, double t);
double bessel_i_scaled(int k, double t);
/// Unscaled modified Bessel; throws range_error once exp(t) overflows.
double bessel_i(int k, double t);

double chebyshev_t(int k, double x);

/// Upper bound exp(-z^2) / (z sqrt(pi)) for erfc(z), z > 0.
double erfc_upper(double z);

}  // namespace qest
