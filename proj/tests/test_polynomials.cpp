#include <cmath>

#include <random>
#include <stdexcept>
#include "doctest.h"
#include "qest/polynomials.hpp"
#include "qest/special.hpp"

using namespace qest;

namespace {
constexpr double kPi = 3.14159265358979323846;

double grid_max_err(const ChebyshevSeries& p, double t, int pts = 10000) {
    double worst = 0.0;
    for (int i = 0; i <= pts; ++i) {
        const double x = -1.0 + 2.0 * i / pts;
        worst = std::max(worst, std::fabs(std::cos(t * x) - p.eval(x)));
    }
    return worst;
}
}  // namespace

TEST_SUITE_BEGIN("polynomials");

TEST_CASE("solve_r matches the defining equation") {
    const double r = solve_r(1.0, 0.1);
    CHECK(r == doctest::Approx(2.506).epsilon(1e-2));
    CHECK(std::fabs(std::pow(1.0 / r, r) - 0.1) <= 1e-12 * 0.1);

    for (double tp : {0.3, 1.0, 40.0, 4372.0}) {
        for (double ep : {0.2, 1e-4, 1e-12, 1e-40}) {
            const double rr = solve_r(tp, ep);
            CHECK(rr > tp);
            // round-trip: residual below 1e-12 relative
            const double lhs = rr * std::log(tp / rr);
            CHECK(std::fabs(std::exp(lhs) - ep) <= 1e-12 * ep);
        }
    }
    CHECK_THROWS_AS(solve_r(0.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(solve_r(1.0, 1.5), std::invalid_argument);
}

TEST_CASE("jacobi_anger_cos endpoint and degree bookkeeping") {
    ChebyshevSeries p = jacobi_anger_cos(kPi, 1e-3);
    CHECK(std::fabs(p.eval(1.0) - std::cos(kPi)) <= 1e-3);
    CHECK(p.parity == Parity::even);
    for (int k = 1; k < p.degree(); k += 2) CHECK(p.coeffs[k] == 0.0);

    const double t = 2.0 * kPi * 4.0;
    ChebyshevSeries p2 = jacobi_anger_cos(t, 1e-6);
    CHECK(grid_max_err(p2, t) <= 1e-6);
    const long long big_r = static_cast<long long>(std::floor(solve_r(std::exp(1.0) * t / 2.0, 1.25e-6) / 2.0));
    CHECK(p2.degree() == 2 * big_r);

    CHECK_THROWS_AS(jacobi_anger_cos(kPi, 0.5), std::invalid_argument);
}

TEST_CASE("jacobi_anger_cos error shrinks as eps shrinks") {
    const double t = 8.0 * kPi;
    double prev_deg = 0;
    for (double eps : {1e-3, 1e-5, 1e-7, 1e-9}) {
        ChebyshevSeries p = jacobi_anger_cos(t, eps);
        CHECK(grid_max_err(p, t) <= eps);
        CHECK(p.degree() >= prev_deg);
        prev_deg = p.degree();
    }
}

TEST_CASE("amplifying polynomial budget parameters") {
    AmplifyingPoly a = amplifying_poly(0.25, 0.01);
    CHECK(a.budget.k_param == doctest::Approx(3.3287).epsilon(1e-3));
    CHECK(a.budget.degree_M % 2 == 1);
    CHECK(a.budget.degree_M == degree_M(0.25, 0.01));
    CHECK(a.eval(0.0) >= 0.99);
    CHECK(a.eval(1.0) <= 0.01);
    CHECK(a.eval(0.5) == doctest::Approx(0.5).epsilon(1e-12));  // odd series around the midpoint
}

TEST_CASE("amplifying polynomial certifies its constraint grid") {
    for (double eta : {0.05, 0.25}) {
        for (double delta : {1e-2, 1e-8}) {
            AmplifyingPoly a = amplifying_poly(eta, delta);
            GridCheck g = check_amplifier_grid([&](double x) { return a.eval(x); }, eta, delta);
            CHECK(g.ok);
        }
    }
}

TEST_CASE("degree_M is monotone in eta and bounded in the scaling sweep") {
    for (double delta : {1e-2, 1e-6}) {
        for (double eta : {0.05, 0.1, 0.2}) {
            CHECK(degree_M(eta, delta) >= degree_M(2.0 * eta, delta));
        }
    }
    // M(eta, delta) * eta / ln(1/delta) bounded above across the sweep.
    double worst = 0.0;
    for (int p = 3; p <= 10; ++p) {
        const double eta = std::pow(2.0, -p);
        for (double delta : {1e-2, 1e-8, 1e-14, 1e-22, 1e-30}) {
            const double ratio = static_cast<double>(degree_M(eta, delta)) * eta / std::log(1.0 / delta);
            worst = std::max(worst, ratio);
        }
    }
    CHECK(worst <= 4.0);
}

TEST_CASE("degree_M is monotone in delta within each regime") {
    CHECK(degree_M(0.1, 1e-4) >= degree_M(0.1, 1e-2));
    CHECK(degree_M(0.1, 1e-8) >= degree_M(0.1, 1e-4));
    CHECK(degree_M(0.1, 1e-30) >= degree_M(0.1, 1e-20));
    CHECK(degree_M(0.1, 1e-20) >= degree_M(0.1, 1e-14));
}

TEST_CASE("series parity bookkeeping") {
    AmplifyingPoly a = amplifying_poly(0.2, 1e-3);
    // even-index coefficients above the constant vanish (odd underlying series)
    for (int k = 2; k <= a.series.degree(); k += 2) CHECK(a.series.coeffs[k] == 0.0);
    PolyFn sq = amp_of_square(a);
    CHECK(sq.parity == Parity::even);
    CHECK(sq.degree == 2 * a.budget.degree_M);
    CHECK(sq.f(0.3) == doctest::Approx(sq.f(-0.3)));

    ChebyshevSeries pc = jacobi_anger_cos(4.0 * kPi, 1e-5);
    PolyFn comp = amp_of_cos_square(a, pc);
    CHECK(comp.parity == Parity::even);
    CHECK(comp.degree == 2 * a.budget.degree_M * pc.degree());
}

TEST_CASE("clenshaw, direct sum and monomial form agree") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    ChebyshevSeries s;
    s.coeffs.resize(200);
    for (auto& v : s.coeffs) v = unif(rng) / 50.0;
    for (int i = 0; i <= 40; ++i) {
        const double x = -1.0 + 2.0 * i / 40.0;
        CHECK(std::fabs(s.eval(x) - s.eval_direct(x)) <= 1e-10);
    }
    // Monomial cross-check at low degree, where that basis is well conditioned.
    ChebyshevSeries low;
    low.coeffs.assign(s.coeffs.begin(), s.coeffs.begin() + 21);
    for (int i = 0; i <= 40; ++i) {
        const double x = -1.0 + 2.0 * i / 40.0;
        CHECK(std::fabs(low.eval(x) - eval_monomial_form(low, x)) <= 1e-8);
    }
    // Degree-200 agreement against a Horner route, converting in the stable
    // direction (monomial coefficients to Chebyshev coefficients).
    std::vector<double> mono(201);
    for (size_t j = 0; j < mono.size(); ++j) mono[j] = unif(rng) / ((j + 1.0) * (j + 1.0));
    auto horner = [&](double x) {
        double acc = 0.0;
        for (int j = 200; j >= 0; --j) acc = acc * x + mono[j];
        return acc;
    };
    ChebyshevSeries interp = chebyshev_interpolate(horner, 200);
    for (int i = 0; i <= 40; ++i) {
        const double x = -1.0 + 2.0 * i / 40.0;
        CHECK(std::fabs(interp.eval(x) - horner(x)) <= 1e-8);
    }
}

TEST_CASE("amplifying_poly validates parameters") {
    CHECK_THROWS_AS(amplifying_poly(0.0, 0.01), std::invalid_argument);
    CHECK_THROWS_AS(amplifying_poly(0.6, 0.01), std::invalid_argument);
    CHECK_THROWS_AS(amplifying_poly(0.1, 0.7), std::invalid_argument);
}

TEST_SUITE_END();
