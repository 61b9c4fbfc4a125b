#include "qest/costs.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "qest/estimators.hpp"
#include "qest/polynomials.hpp"

namespace qest {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kE = 2.71828182845904523536;
}  // namespace

std::string algorithm_name(Algorithm alg) {
    switch (alg) {
        case Algorithm::textbook_pe: return "textbook_pe";
        case Algorithm::improved_pe: return "improved_pe";
        case Algorithm::textbook_ee: return "textbook_ee";
        case Algorithm::improved_ee: return "improved_ee";
    }
    throw std::invalid_argument("algorithm_name: unknown algorithm");
}

TextbookParams textbook_params(double alpha, double delta) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("textbook_params: alpha must be in (0,1)");
    TextbookParams p;
    p.delta_med = delta * delta / 6.25;
    if (alpha <= 0.5) {
        p.r = std::max(0, static_cast<int>(std::ceil(std::log2(1.0 / (2.0 * alpha)) - 1e-9)));
        p.eta = kTextbookEta0;
    } else {
        p.r = 0;
        p.eta = textbook_gamma((1.0 - alpha) / 2.0) - 0.5;
        if (p.eta <= 0.0) throw std::invalid_argument("textbook_params: amplification gap vanished");
    }
    p.m_reps = static_cast<long long>(std::ceil(std::log(1.0 / p.delta_med) / (2.0 * p.eta * p.eta)));
    return p;
}

long long pe_bit_query_cost(int n, int k, double alpha, double delta, double m_svt) {
    const double delta_amp = (1.0 - std::pow(10.0, -m_svt)) * delta * delta / 8.0;
    return (1LL << (n - k)) * degree_M(eta_refined(k, alpha), delta_amp);
}

long long ee_bit_query_cost(int n, int k, double alpha, double delta, double m_cos, double m_svt) {
    const double eta = eta_refined(k, alpha);
    const double delta_amp = (1.0 - std::pow(10.0, -m_svt)) * delta * delta / 8.0;
    const long long m = degree_M((1.0 - std::pow(10.0, -m_cos)) * eta, delta_amp);
    const double rarg =
        solve_r(kE / 2.0 * kPi * std::pow(2.0, n - k), 1.25 * (eta / 2.0) * std::pow(10.0, -m_cos));
    return 4LL * m * static_cast<long long>(std::floor(rarg));
}

CostReport cost_textbook_pe(int n, double alpha, double delta) {
    const TextbookParams p = textbook_params(alpha, delta);
    CostReport rep;
    rep.algorithm = Algorithm::textbook_pe;
    rep.n = n;
    rep.alpha = alpha;
    rep.delta = delta;
    rep.queries = ((1LL << (n + p.r)) - 1) * p.m_reps;
    rep.garbage_qubits = static_cast<long long>(n + p.r) * p.m_reps;
    rep.ancilla_qubits = rep.garbage_qubits;
    return rep;
}

CostReport cost_improved_pe(int n, double alpha, double delta, const CostKnobs& knobs) {
    CostReport rep;
    rep.algorithm = Algorithm::improved_pe;
    rep.n = n;
    rep.alpha = alpha;
    rep.delta = delta;
    const double inner = knobs.uncompute_pe ? delta / 2.0 : delta;
    long long q = 0;
    for (int k = 0; k < n; ++k) q += pe_bit_query_cost(n, k, alpha, inner * std::pow(2.0, -k - 1), knobs.m_svt);
    rep.queries = knobs.uncompute_pe ? 2 * q : q;
    rep.garbage_qubits = 0;
    rep.ancilla_qubits = knobs.uncompute_pe ? n : 0;
    return rep;
}

CostReport cost_textbook_ee(int n, double alpha, double delta, const CostKnobs& knobs) {
    const TextbookParams p = textbook_params(alpha, delta / 2.0);
    const long long steps = ((1LL << (n + p.r)) - 1) * p.m_reps;
    const double eps1 = (delta / 2.0) / static_cast<double>(steps);
    long long per_estimate = 0;
    for (int j = 0; j < n + p.r; ++j) {
        const double t = 2.0 * kPi * std::pow(2.0, j);
        per_estimate += hamsim_query_cost(t, std::pow(2.0, j) * eps1);
    }
    CostReport rep;
    rep.algorithm = Algorithm::textbook_ee;
    rep.n = n;
    rep.alpha = alpha;
    rep.delta = delta;
    rep.queries = p.m_reps * per_estimate;
    rep.garbage_qubits = static_cast<long long>(n + p.r) * p.m_reps;
    rep.ancilla_qubits = rep.garbage_qubits + knobs.block_ancillas_a + 2;
    return rep;
}

CostReport cost_improved_ee(int n, double alpha, double delta, const CostKnobs& knobs) {
    CostReport rep;
    rep.algorithm = Algorithm::improved_ee;
    rep.n = n;
    rep.alpha = alpha;
    rep.delta = delta;
    long long q = 0;
    for (int k = 0; k < n; ++k)
        q += 2 * ee_bit_query_cost(n, k, alpha, delta * std::pow(2.0, -k - 1), knobs.m_cos, knobs.m_svt);
    rep.queries = q;
    rep.garbage_qubits = 0;
    rep.ancilla_qubits = knobs.block_ancillas_a + n + 3;
    return rep;
}

CostReport cost_for(Algorithm alg, int n, double alpha, double delta, const CostKnobs& knobs) {
    switch (alg) {
        case Algorithm::textbook_pe: return cost_textbook_pe(n, alpha, delta);
        case Algorithm::improved_pe: return cost_improved_pe(n, alpha, delta, knobs);
        case Algorithm::textbook_ee: return cost_textbook_ee(n, alpha, delta, knobs);
        case Algorithm::improved_ee: return cost_improved_ee(n, alpha, delta, knobs);
    }
    throw std::invalid_argument("cost_for: unknown algorithm");
}

std::string sweep_csv(const std::vector<SweepPoint>& grid, const std::vector<Algorithm>& algorithms,
                      const CostKnobs& knobs, const std::string& version, const std::string& config_echo) {
    std::ostringstream os;
    os << "# version=" << version << "\n";
    os << "# config=" << config_echo << "\n";
    os << "algorithm,n,alpha,delta,queries,garbage_qubits,ancillas,speedup_vs_textbook\n";
    char buf[512];
    for (Algorithm alg : algorithms) {
        for (const SweepPoint& pt : grid) {
            const CostReport rep = cost_for(alg, pt.n, pt.alpha, pt.delta, knobs);
            const Algorithm baseline =
                (alg == Algorithm::textbook_ee || alg == Algorithm::improved_ee) ? Algorithm::textbook_ee
                                                                                 : Algorithm::textbook_pe;
            const CostReport base = cost_for(baseline, pt.n, pt.alpha, pt.delta, knobs);
            const double speedup = static_cast<double>(base.queries) / static_cast<double>(rep.queries);
            std::snprintf(buf, sizeof(buf), "%s,%d,%.12g,%.6g,%lld,%lld,%lld,%.6f\n",
                          algorithm_name(alg).c_str(), rep.n, rep.alpha, rep.delta, rep.queries,
                          rep.garbage_qubits, rep.ancilla_qubits, speedup);
            os << buf;
        }
    }
    return os.str();
}

std::vector<SweepPoint> figure4_grid() {
    std::vector<SweepPoint> g;
    for (int r = 1; r <= 12; ++r) g.push_back({10, std::pow(2.0, -r), 1e-30});
    return g;
}

std::vector<SweepPoint> figure5_grid() {
    std::vector<SweepPoint> g;
    for (int n : {10, 11, 12})
        for (int r : {10, 11, 12})
            for (double delta : {1e-30, 1e-32, 1e-34}) g.push_back({n, std::pow(2.0, -r), delta});
    return g;
}

}  // namespace qest
