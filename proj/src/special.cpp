#include "qest/special.hpp"

#include <cmath>
#include <stdexcept>

namespace qest {

namespace {
constexpr double kSqrtPi = 1.7724538509055160273;

int miller_start(int kmax, double t) {
    const double ta = std::fabs(t);
    const double base = std::max(static_cast<double>(kmax), ta);
    return static_cast<int>(std::ceil(base + 26.0 + 3.0 * std::sqrt(base + 1.0))) + 16;
}
}  // namespace

std::vector<double> bessel_j_upto(int kmax, double t) {
    if (kmax < 0) throw std::invalid_argument("bessel_j_upto: negative order");
    std::vector<double> out(kmax + 1, 0.0);
    if (t == 0.0) {
        out[0] = 1.0;
        return out;
    }
    const bool neg = t < 0;
    const double ta = std::fabs(t);
    const int mstart = miller_start(kmax, ta);
    std::vector<double> j(mstart + 2, 0.0);
    j[mstart + 1] = 0.0;
    j[mstart] = 1e-280;
    for (int k = mstart; k >= 1; --k) {
        j[k - 1] = (2.0 * k / ta) * j[k] - j[k + 1];
        if (std::fabs(j[k - 1]) > 1e260) {
            for (int m = k - 1; m <= mstart + 1; ++m) j[m] *= 1e-260;
        }
    }
    // J_0 + 2 sum_{k even >= 2} J_k = 1
    double s = j[0];
    for (int k = 2; k <= mstart; k += 2) s += 2.0 * j[k];
    for (int k = 0; k <= kmax; ++k) {
        double v = j[k] / s;
        if (neg && (k % 2 == 1)) v = -v;
        out[k] = v;
    }
    return out;
}

double bessel_j(int k, double t) { return bessel_j_upto(k, t)[k]; }

std::vector<double> bessel_i_scaled_upto(int kmax, double t) {
    if (kmax < 0) throw std::invalid_argument("bessel_i_scaled_upto: negative order");
    if (t < 0) throw std::invalid_argument("bessel_i_scaled_upto: t must be >= 0");
    std::vector<double> out(kmax + 1, 0.0);
    if (t == 0.0) {
        out[0] = 1.0;
        return out;
    }
    const int mstart = miller_start(kmax, t);
    std::vector<double> f(mstart + 2, 0.0);
    f[mstart + 1] = 0.0;
    f[mstart] = 1e-280;
    for (int k = mstart; k >= 1; --k) {
        f[k - 1] = (2.0 * k / t) * f[k] + f[k + 1];
        if (std::fabs(f[k - 1]) > 1e260) {
            for (int m = k - 1; m <= mstart + 1; ++m) f[m] *= 1e-260;
        }
    }
    // exp(-t) * (I_0 + 2 sum_{k>=1} I_k) = 1
    double s = f[0];
    for (int k = 1; k <= mstart; ++k) s += 2.0 * f[k];
    for (int k = 0; k <= kmax; ++k) out[k] = f[k] / s;
    return out;
}

double bessel_i_scaled(int k, double t) { return bessel_i_scaled_upto(k, t)[k]; }

double bessel_i(int k, double t) {
    if (t > 700.0) throw std::range_error("bessel_i: unscaled value overflows, use the scaled variant");
    return bessel_i_scaled(k, t) * std::exp(t);
}

double chebyshev_t(int k, double x) {
    if (k < 0) throw std::invalid_argument("chebyshev_t: negative order");
    if (std::fabs(x) <= 1.0) return std::cos(k * std::acos(x));
    const double s = (x < 0 && (k % 2 == 1)) ? -1.0 : 1.0;
    return s * std::cosh(k * std::acosh(std::fabs(x)));
}

double erfc_upper(double z) {
    if (z <= 0.0) return 1.0;
    return std::exp(-z * z) / (z * kSqrtPi);
}

}  // namespace qest
