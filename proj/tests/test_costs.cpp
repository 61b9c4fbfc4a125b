#include <cmath>
#include <sstream>

#include "doctest.h"
#include "qest/costs.hpp"
#include "qest/estimators.hpp"
#include "qest/polynomials.hpp"

using namespace qest;

TEST_SUITE_BEGIN("costs");

TEST_CASE("textbook phase estimation closed form") {
    CostReport rep = cost_textbook_pe(3, 0.25, 0.1);
    CHECK(rep.queries == 510);
    CHECK(rep.garbage_qubits == 4 * 34);
    // delta -> delta/10 only grows M logarithmically
    CostReport finer = cost_textbook_pe(3, 0.25, 0.01);
    CHECK(finer.queries < 2 * rep.queries);
    // alpha > 1/2 branch uses the direct gap
    CostReport wide = cost_textbook_pe(3, 0.8, 0.1);
    CHECK(wide.garbage_qubits % 3 == 0);
    CHECK(wide.queries > 0);
}

TEST_CASE("textbook cost doubles when alpha halves at power-of-two corners") {
    for (int r = 1; r <= 11; ++r) {
        const long long q1 = cost_textbook_pe(10, std::pow(2.0, -r), 1e-30).queries;
        const long long q2 = cost_textbook_pe(10, std::pow(2.0, -r - 1), 1e-30).queries;
        const double ratio = static_cast<double>(q2) / q1;
        CHECK(ratio > 1.99);
        CHECK(ratio < 2.01);
    }
}

TEST_CASE("improved phase estimation cost structure") {
    // n=1: single term 2^{1-0} * M
    const CostReport one = cost_improved_pe(1, 0.3, 0.1);
    CHECK(one.queries == pe_bit_query_cost(1, 0, 0.3, 0.05));
    CHECK(one.garbage_qubits == 0);
    // k=0 dominance at small alpha
    for (int p : {5, 8, 10}) {
        const double alpha = std::pow(2.0, -p);
        const CostReport rep = cost_improved_pe(10, alpha, 1e-30);
        const long long k0 = pe_bit_query_cost(10, 0, alpha, 1e-30 / 2.0);
        CHECK(2 * k0 > rep.queries);
    }
}

TEST_CASE("headline speedups stay inside the published bands") {
    const double alpha = std::pow(2.0, -10);
    const double s_pe = static_cast<double>(cost_textbook_pe(10, alpha, 1e-30).queries) /
                        static_cast<double>(cost_improved_pe(10, alpha, 1e-30).queries);
    CHECK(s_pe >= 12.0);
    CHECK(s_pe <= 16.0);
    const double s_ee = static_cast<double>(cost_textbook_ee(10, alpha, 1e-30).queries) /
                        static_cast<double>(cost_improved_ee(10, alpha, 1e-30).queries);
    CHECK(s_ee >= 8.0);
    CHECK(s_ee <= 12.0);
}

TEST_CASE("energy estimation bookkeeping") {
    CostReport rep = cost_improved_ee(4, 0.1, 1e-10);
    CHECK(rep.ancilla_qubits == 1 + 4 + 3);
    CHECK(rep.garbage_qubits == 0);
    // textbook energy cost grows with n through the simulation times
    const long long q4 = cost_textbook_ee(4, 0.1, 1e-10).queries;
    const long long q5 = cost_textbook_ee(5, 0.1, 1e-10).queries;
    CHECK(q5 > q4);
}

TEST_CASE("speedup is stable across neighboring grid points") {
    auto speedup = [](int n, double alpha, double delta) {
        return static_cast<double>(cost_textbook_pe(n, alpha, delta).queries) /
               static_cast<double>(cost_improved_pe(n, alpha, delta).queries);
    };
    const double base = speedup(10, std::pow(2.0, -10), 1e-30);
    for (double s : {speedup(11, std::pow(2.0, -10), 1e-30), speedup(10, std::pow(2.0, -11), 1e-30),
                     speedup(10, std::pow(2.0, -10), 1e-32)}) {
        CHECK(std::fabs(s - base) / base < 0.2);
    }
}

TEST_CASE("asymptotic envelope of the improved estimator") {
    double worst = 0.0;
    for (int p : {6, 8, 10, 12}) {
        const double alpha = std::pow(2.0, -p);
        const CostReport rep = cost_improved_pe(10, alpha, 1e-30);
        const double envelope =
            static_cast<double>(rep.queries) * alpha / (std::pow(2.0, 10) * std::log(1e30));
        worst = std::max(worst, envelope);
    }
    CHECK(worst < 2.0);
}

TEST_CASE("simulated and closed-form counts agree wherever both exist") {
    RoundingPromiseInstance pe = gen_instance(3, 0.3, 2, 30, SpectrumKind::unitary);
    CHECK(improved_pe(pe, 0.08).report.query_count == cost_improved_pe(3, 0.3, 0.08).queries);
    CHECK(textbook_pe(pe, 0.1).report.query_count == cost_textbook_pe(3, 0.3, 0.1).queries);
    RoundingPromiseInstance ee = gen_instance(2, 0.3, 2, 31, SpectrumKind::hamiltonian);
    CHECK(improved_ee(ee, 0.1).report.query_count == cost_improved_ee(2, 0.3, 0.1).queries);
}

TEST_CASE("uncomputed improved estimation loses only above alpha = 1/2") {
    const CostKnobs unc{6.0, 3.0, 1, true};
    // comfortably ahead at alpha < 1/2
    CHECK(cost_improved_pe(10, 0.45, 1e-30, unc).queries < cost_textbook_pe(10, 0.45, 1e-30).queries);
    // overtaken somewhere above 1/2
    bool overtaken = false;
    for (double alpha : {0.6, 0.7, 0.8, 0.9, 0.95})
        overtaken |= cost_improved_pe(10, alpha, 1e-30, unc).queries >
                     cost_textbook_pe(10, alpha, 1e-30).queries;
    CHECK(overtaken);
}

TEST_CASE("branch boundary at alpha exactly 1/2") {
    // The rounding branch at r=0 and the direct-gap branch coincide there.
    const TextbookParams p = textbook_params(0.5, 1e-10);
    CHECK(p.r == 0);
    CHECK(p.eta == doctest::Approx(textbook_gamma(0.25) - 0.5).epsilon(1e-12));
}

TEST_CASE("energy bit cost pins the published budget split") {
    // delta_amp = (1 - 10^-m_svt) delta^2 / 8, eta shrunk by (1 - 10^-m_cos),
    // query = 4 M floor(r((e/2) pi 2^{n-k}, (5/4)(eta/2) 10^-m_cos)).
    const int n = 3, k = 0;
    const double alpha = 0.3, delta = 0.05, m_cos = 3.0, m_svt = 6.0;
    const double eta = eta_refined(k, alpha);
    const double delta_amp = (1.0 - std::pow(10.0, -m_svt)) * delta * delta / 8.0;
    const long long m = degree_M((1.0 - std::pow(10.0, -m_cos)) * eta, delta_amp);
    const double r = solve_r(std::exp(1.0) / 2.0 * 3.14159265358979323846 * 8.0,
                             1.25 * (eta / 2.0) * 1e-3);
    CHECK(ee_bit_query_cost(n, k, alpha, delta, m_cos, m_svt) ==
          4 * m * static_cast<long long>(std::floor(r)));
    CHECK(delta_amp + std::pow(10.0, -m_svt) * delta * delta / 8.0 ==
          doctest::Approx(delta * delta / 8.0).epsilon(1e-15));
}

TEST_CASE("sweep CSV output") {
    const std::vector<SweepPoint> grid = {{3, 0.25, 0.1}};
    const std::string csv = sweep_csv(grid, {Algorithm::textbook_pe, Algorithm::improved_pe}, {}, "v", "c");
    std::istringstream is(csv);
    std::string line;
    std::getline(is, line);
    CHECK(line.rfind("# version=", 0) == 0);
    std::getline(is, line);
    CHECK(line.rfind("# config=", 0) == 0);
    std::getline(is, line);
    CHECK(line == "algorithm,n,alpha,delta,queries,garbage_qubits,ancillas,speedup_vs_textbook");
    std::getline(is, line);
    CHECK(line.rfind("textbook_pe,3,0.25,0.1,510,", 0) == 0);
    // deterministic
    CHECK(csv == sweep_csv(grid, {Algorithm::textbook_pe, Algorithm::improved_pe}, {}, "v", "c"));
    // single-point grid yields one row per algorithm
    int rows = 0;
    std::istringstream is2(csv);
    while (std::getline(is2, line))
        if (!line.empty() && line[0] != '#' && line[0] != 'a') ++rows;
    CHECK(rows == 2);
}

TEST_SUITE_END();
