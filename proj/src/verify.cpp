#include "qest/verify.hpp"

#include <cmath>
#include <sstream>

#include "qest/block_encoding.hpp"
#include "qest/costs.hpp"
#include "qest/estimators.hpp"
#include "qest/linalg.hpp"
#include "qest/polynomials.hpp"
#include "qest/special.hpp"

namespace qest {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Checker {
    const VerifyOptions& opt;
    std::vector<CheckResult> results;

    void run(const std::string& name, const std::function<std::string()>& body) {
        if (!opt.suite_filter.empty() && name.find(opt.suite_filter) == std::string::npos) return;
        CheckResult r;
        r.name = name;
        try {
            r.detail = body();
            r.ok = true;
        } catch (const std::exception& e) {
            r.ok = false;
            r.detail = e.what();
        }
        results.push_back(std::move(r));
    }
};

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::runtime_error(msg);
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

}  // namespace

std::vector<CheckResult> run_verification(const VerifyOptions& opt) {
    Checker c{opt, {}};
    // Fault injection flips the SVD reconstruction tolerance to an impossible one.
    const double svd_tol = opt.inject_fault ? 0.0 : 1e-10;

    c.run("numerics.svd_roundtrip", [&] {
        std::mt19937_64 rng(11);
        double worst = 0.0;
        for (int rep = 0; rep < 100; ++rep) {
            const int dim = 2 + static_cast<int>(rng() % 63);
            CMatrix m = random_gaussian(dim, dim, rng);
            const SvdResult d = svd(m);
            CMatrix sig(dim, dim);
            for (int i = 0; i < dim; ++i) sig(i, i) = d.s[i];
            const double err = spectral_norm(d.u * sig * dagger(d.v) - m);
            const double rel = err / std::max(1.0, d.s[0]);
            worst = std::max(worst, rel);
            require(rel <= svd_tol, "svd roundtrip error " + fmt(rel));
            require(unitarity_defect(d.u) <= 1e-10 && unitarity_defect(d.v) <= 1e-10,
                    "svd factors not unitary");
        }
        return "100 matrices up to 64x64, worst relative error " + fmt(worst);
    });

    c.run("numerics.spectral_norm_unitary", [&] {
        std::mt19937_64 rng(12);
        for (int rep = 0; rep < 25; ++rep) {
            const int dim = 2 + static_cast<int>(rng() % 15);
            CMatrix u = haar_unitary(dim, rng), v = haar_unitary(dim, rng);
            require(std::fabs(spectral_norm(u) - 1.0) <= 1e-10, "unitary norm != 1");
            require(spectral_norm(u * v) <= spectral_norm(u) * spectral_norm(v) + 1e-10,
                    "submultiplicativity violated");
        }
        return "25 random unitary pairs";
    });

    c.run("numerics.chebyshev_recurrence", [&] {
        for (int k = 1; k <= 60; ++k) {
            for (int i = 0; i <= 200; ++i) {
                const double x = -1.0 + 2.0 * i / 200.0;
                const double lhs = chebyshev_t(k + 1, x);
                const double rhs = 2.0 * x * chebyshev_t(k, x) - chebyshev_t(k - 1, x);
                require(std::fabs(lhs - rhs) <= 1e-12, "recurrence residual at k=" + std::to_string(k));
            }
        }
        return "orders 1..60 on a 201-point grid";
    });

    c.run("polynomials.amplifier_constraints", [&] {
        for (double eta : {0.1, 0.25}) {
            for (double delta : {1e-2, 1e-6}) {
                AmplifyingPoly a = amplifying_poly(eta, delta);
                GridCheck g = check_amplifier_grid([&](double x) { return a.eval(x); }, eta, delta, 10000, 1e-10);
                require(g.ok, "amplifier grid violation " + fmt(g.worst_violation));
            }
        }
        return "grids clean at 1e-10 slack";
    });

    c.run("polynomials.jacobi_anger", [&] {
        long long prev_deg = -1;
        for (double eps : {1e-3, 1e-5, 1e-7}) {
            ChebyshevSeries p = jacobi_anger_cos(2.0 * kPi * 4.0, eps);
            double worst = 0.0;
            for (int i = 0; i <= 10000; ++i) {
                const double x = -1.0 + 2.0 * i / 10000.0;
                worst = std::max(worst, std::fabs(std::cos(2.0 * kPi * 4.0 * x) - p.eval(x)));
            }
            require(worst <= eps, "cosine grid error " + fmt(worst) + " > " + fmt(eps));
            require(p.degree() >= prev_deg, "degree not monotone in accuracy");
            prev_deg = p.degree();
        }
        return "max grid errors within target, degrees monotone";
    });

    c.run("polynomials.clenshaw_vs_monomial", [&] {
        std::mt19937_64 rng(13);
        std::uniform_real_distribution<double> unif(-1.0, 1.0);
        std::vector<double> mono(201);
        for (size_t j = 0; j < mono.size(); ++j) mono[j] = unif(rng) / ((j + 1.0) * (j + 1.0));
        auto horner = [&](double x) {
            double acc = 0.0;
            for (int j = 200; j >= 0; --j) acc = acc * x + mono[j];
            return acc;
        };
        ChebyshevSeries s = chebyshev_interpolate(horner, 200);
        for (int i = 0; i < 50; ++i) {
            const double x = unif(rng);
            require(std::fabs(s.eval(x) - horner(x)) <= 1e-8, "basis mismatch");
        }
        return "degree-200 series agrees with the Horner route to 1e-8";
    });

    c.run("lemma2.diamond_vs_spectral", [&] {
        std::mt19937_64 rng(14);
        for (int rep = 0; rep < 200; ++rep) {
            const int dim = 2 + static_cast<int>(rng() % 15);
            CMatrix u = haar_unitary(dim, rng), v = haar_unitary(dim, rng);
            const double dd = diamond_distance_unitary(u, v);
            require(dd <= 2.0 * spectral_norm(u - v) + 1e-9, "diamond bound violated");
        }
        return "200 random unitary pairs, dims 2..16";
    });

    c.run("blockenc.trace_out_contraction", [&] {
        std::mt19937_64 rng(15);
        for (int rep = 0; rep < 30; ++rep) {
            CMatrix g = random_gaussian(12, 12, rng);
            CMatrix rho = g * dagger(g);
            rho = cplx(1.0 / trace(rho).real(), 0.0) * rho;
            require(trace_norm(partial_trace_first(rho, 3, 4)) <= trace_norm(rho) + 1e-10,
                    "partial trace grew the trace norm");
        }
        return "30 random states on a 3x4 split";
    });

    c.run("blockmeasure.collapse_statistics", [&] {
        std::mt19937_64 rng(16);
        CMatrix basis = haar_unitary(4, rng);
        CMatrix a(4, 4);
        const double evs[4] = {0.83, 0.2, 0.55, 0.0};
        for (int j = 0; j < 4; ++j) {
            CVector v = column(basis, j);
            a = a + cplx(evs[j], 0.0) * outer(v, v);
        }
        QuantumChannel ch = block_measure(dilate(a));
        for (int j = 0; j < 4; ++j) {
            CVector v = column(basis, j);
            CVector in(8);
            for (int i = 0; i < 4; ++i) in[i] = v[i];
            CMatrix rho_out = apply_channel(ch, outer(in, in));
            CMatrix flag = partial_trace_last(rho_out, 2, 4);
            const double g2 = evs[j] * evs[j];
            require(std::fabs(flag(1, 1).real() - g2) <= 1e-8 && std::fabs(flag(0, 0).real() - (1.0 - g2)) <= 1e-8,
                    "flag marginal mismatch");
        }
        return "flag marginal matches |ev|^2 on 4 eigenstates";
    });

    c.run("blockmeasure.error_bound", [&] {
        std::mt19937_64 rng(17);
        CMatrix basis = haar_unitary(4, rng);
        for (double eps : {1e-1, 1e-2, 1e-3}) {
            CMatrix proj(4, 4), a(4, 4);
            for (int j = 0; j < 4; ++j) {
                CVector v = column(basis, j);
                const double pj = (j < 2) ? 1.0 : 0.0;
                proj = proj + cplx(pj, 0.0) * outer(v, v);
                const double aj = (j < 2) ? std::sqrt(1.0 - eps) : std::sqrt(eps);
                a = a + cplx(aj, 0.0) * outer(v, v);
            }
            QuantumChannel lam_a = block_measure(dilate(a));
            QuantumChannel lam_p = block_measure(dilate(proj));
            double best = 0.0;
            for (int rep = 0; rep < 12; ++rep) {
                // flag enters in |0>; the system is entangled with a reference
                CVector sysref(16);
                std::normal_distribution<double> gs(0.0, 1.0);
                for (auto& x : sysref.a) x = cplx(gs(rng), gs(rng));
                sysref = normalized(sysref);
                CVector in(32);
                for (int s = 0; s < 4; ++s)
                    for (int r = 0; r < 4; ++r) in[(0 * 4 + s) * 4 + r] = sysref[s * 4 + r];
                CMatrix rho = outer(in, in);
                CMatrix out_a(32, 32), out_p(32, 32);
                for (const auto& k : lam_a.kraus) {
                    CMatrix kk = kron(k, CMatrix::identity(4));
                    out_a = out_a + kk * rho * dagger(kk);
                }
                for (const auto& k : lam_p.kraus) {
                    CMatrix kk = kron(k, CMatrix::identity(4));
                    out_p = out_p + kk * rho * dagger(kk);
                }
                best = std::max(best, trace_norm(out_a - out_p));
            }
            require(best <= 4.0 * std::sqrt(2.0) * eps + 1e-9,
                    "sampled distance " + fmt(best) + " above the bound at eps=" + fmt(eps));
        }
        return "sampled lower bounds stay below 4*sqrt(2)*eps";
    });

    c.run("hamsim.postselection_and_bound", [&] {
        std::mt19937_64 rng(18);
        CMatrix g = random_gaussian(4, 4, rng);
        CMatrix h = g + dagger(g);
        h = cplx(0.45 / spectral_norm(h), 0.0) * h;
        for (double eps : {1e-2, 1e-4}) {
            HamsimResult hs = hamsim_channel(dilate(h), 2.5, eps);
            require(hs.bound <= eps, "channel bound " + fmt(hs.bound) + " above eps");
            // Postselection branch = first Kraus operator.
            const double smin = svd(hs.channel.kraus.front()).s.back();
            const double eint = eps / 4.0;
            require(smin * smin >= 1.0 - 2.0 * eint, "postselection success too small");
        }
        return "bounds certified at eps=1e-2, 1e-4";
    });

    c.run("estimators.promise_soundness", [&] {
        RoundingPromiseInstance inst = gen_instance(3, 0.3, 4, 77, SpectrumKind::unitary);
        ImprovedResult res = improved_pe(inst, 0.05, true);
        for (double s : res.report.per_eigenstate_success)
            require(s >= 0.95, "eigenstate success " + fmt(s));
        require(res.report.coherence_fidelity >= 0.95, "coherence " + fmt(res.report.coherence_fidelity));
        return "n=3 instance sound at delta=0.05";
    });

    c.run("estimators.query_accounting", [&] {
        RoundingPromiseInstance inst = gen_instance(3, 0.3, 4, 78, SpectrumKind::unitary);
        ImprovedResult res = improved_pe(inst, 0.05);
        const CostReport rep = cost_improved_pe(3, 0.3, 0.05);
        require(res.report.query_count == rep.queries, "simulated and closed-form counts differ");
        return "integer match at n=3";
    });

    c.run("costs.textbook_zigzag", [&] {
        for (int r = 2; r <= 11; ++r) {
            const long long q1 = cost_textbook_pe(10, std::pow(2.0, -r), 1e-30).queries;
            const long long q2 = cost_textbook_pe(10, std::pow(2.0, -r - 1), 1e-30).queries;
            const double ratio = static_cast<double>(q2) / static_cast<double>(q1);
            require(ratio > 1.99 && ratio < 2.01, "halving alpha did not double the cost");
        }
        return "cost doubles per alpha halving";
    });

    c.run("costs.speedup_bands", [&] {
        const double a = std::pow(2.0, -10);
        const double s_pe = static_cast<double>(cost_textbook_pe(10, a, 1e-30).queries) /
                            static_cast<double>(cost_improved_pe(10, a, 1e-30).queries);
        const double s_ee = static_cast<double>(cost_textbook_ee(10, a, 1e-30).queries) /
                            static_cast<double>(cost_improved_ee(10, a, 1e-30).queries);
        require(s_pe >= 12.0 && s_pe <= 16.0, "phase speedup " + fmt(s_pe));
        require(s_ee >= 8.0 && s_ee <= 12.0, "energy speedup " + fmt(s_ee));
        return "phase " + fmt(s_pe) + "x, energy " + fmt(s_ee) + "x";
    });

    return c.results;
}

}  // namespace qest
