#pragma once

#include <functional>
#include <vector>

namespace qest {

enum class Parity { even, odd, none };

/// Chebyshev series sum_k coeffs[k] * T_k(y) with y the affine image of x
/// mapping [lo, hi] onto [-1, 1].
struct ChebyshevSeries {
    std::vector<double> coeffs;
    Parity parity = Parity::none;
    double lo = -1.0;
    double hi = 1.0;

    int degree() const { return coeffs.empty() ? 0 : static_cast<int>(coeffs.size()) - 1; }
    double eval(double x) const;         // Clenshaw
    double eval_direct(double x) const;  // plain sum, cross-check only
};

/// Horner evaluation of the monomial form; conditioning limits this to low
/// degree, cross-check only.
double eval_monomial_form(const ChebyshevSeries& s, double x);

/// Chebyshev interpolant of f on [-1,1], exact for polynomials of the given
/// degree (up to rounding).
ChebyshevSeries chebyshev_interpolate(const std::function<double(double)>& f, int degree);

struct DegreeBudget {
    double eta = 0.0;
    double delta = 0.0;
    long long degree_M = 0;
    double k_param = 0.0;  // sqrt(2)/(4 eta) * sqrt(ln(8/(pi delta)))
    double k_used = 0.0;   // steepness the construction actually uses
};

struct AmplifyingPoly {
    ChebyshevSeries series;  // domain [0, 1]
    DegreeBudget budget;
    double eval(double x) const { return series.eval(x); }
};

/// Unique solution r in (t', inf) of (t'/r)^r = eps'.
double solve_r(double t_prime, double eps_prime);

/// Even polynomial approximating cos(t*x) on [-1,1] to accuracy eps, eps in (0, 1/e).
ChebyshevSeries jacobi_anger_cos(double t, double eps);

double nominal_steepness(double eta, double delta);

/// Step-like polynomial: >= 1-delta on [0, 1/2-eta], <= delta on [1/2+eta, 1],
/// within [0,1] on [0,1].
AmplifyingPoly amplifying_poly(double eta, double delta);

/// Odd degree of amplifying_poly(eta, delta).
long long degree_M(double eta, double delta);

/// Below this error target the constraints cannot be certified in double
/// precision; the degree calculator switches to its asymptotic bound there.
inline constexpr double kCertifiableDelta = 1e-12;

/// Evaluable polynomial with bookkeeping for singular value transformation.
struct PolyFn {
    std::function<double(double)> f;
    long long degree = 0;
    Parity parity = Parity::none;
};

PolyFn amp_of_square(const AmplifyingPoly& amp);
PolyFn amp_of_cos_square(const AmplifyingPoly& amp, const ChebyshevSeries& pcos);

struct GridCheck {
    bool ok = false;
    double worst_violation = 0.0;
};

/// Verifies the three step-polynomial constraints on dense grids.
GridCheck check_amplifier_grid(const std::function<double(double)>& a, double eta, double delta,
                               int points_per_interval = 10000, double slack = 1e-10);

}  // namespace qest
