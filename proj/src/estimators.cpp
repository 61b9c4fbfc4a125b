#include "qest/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "qest/costs.hpp"
#include "qest/special.hpp"

namespace qest {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
constexpr double kE = 2.71828182845904523536;

CMatrix spectral_build(const RoundingPromiseInstance& inst, const std::vector<cplx>& diag) {
    const int d = inst.dim();
    CMatrix m(d, d);
    for (int j = 0; j < d; ++j) {
        CVector v = column(inst.eigenbasis, j);
        CMatrix proj = outer(v, v);
        m = m + diag[j] * proj;
    }
    return m;
}
}  // namespace

CMatrix RoundingPromiseInstance::unitary() const {
    std::vector<cplx> d(lambdas.size());
    for (size_t j = 0; j < lambdas.size(); ++j) d[j] = std::polar(1.0, kTwoPi * lambdas[j]);
    return spectral_build(*this, d);
}

CMatrix RoundingPromiseInstance::hamiltonian() const {
    std::vector<cplx> d(lambdas.size());
    for (size_t j = 0; j < lambdas.size(); ++j) d[j] = lambdas[j];
    return spectral_build(*this, d);
}

RoundingPromiseInstance gen_instance(int n, double alpha, int dim, std::uint64_t seed, SpectrumKind kind) {
    if (n < 1 || dim < 1) throw std::invalid_argument("gen_instance: n and dim must be positive");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("gen_instance: alpha must be in (0,1)");
    std::mt19937_64 rng(seed);
    RoundingPromiseInstance inst;
    inst.n_bits = n;
    inst.alpha = alpha;
    inst.kind = kind;
    inst.seed = seed;
    const double bins = std::pow(2.0, n);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uniform_int_distribution<int> binpick(0, (1 << n) - 1);
    inst.lambdas.resize(dim);
    for (int j = 0; j < dim; ++j) {
        for (int attempt = 0;; ++attempt) {
            const int x = binpick(rng);
            const double u = 1e-9 + unif(rng) * (1.0 - 2e-9);
            const double lam = (x + alpha + u * (1.0 - alpha)) / bins;
            bool clash = false;
            for (int i = 0; i < j; ++i) clash |= std::fabs(inst.lambdas[i] - lam) < 1e-9;
            if (!clash) {
                inst.lambdas[j] = lam;
                break;
            }
            if (attempt > 1000) throw std::runtime_error("gen_instance: could not sample distinct eigenvalues");
        }
    }
    inst.eigenbasis = haar_unitary(dim, rng);
    return inst;
}

bool verify_promise(const RoundingPromiseInstance& inst) {
    const double bins = std::pow(2.0, inst.n_bits);
    for (double lam : inst.lambdas) {
        if (!(lam >= 0.0 && lam < 1.0)) return false;
        const double scaled = lam * bins;
        const double frac = scaled - std::floor(scaled);
        if (frac <= inst.alpha) return false;
    }
    return true;
}

void inject_gap_violation(RoundingPromiseInstance& inst, int which) {
    if (which < 0 || which >= inst.dim()) throw std::invalid_argument("inject_gap_violation: bad index");
    const double bins = std::pow(2.0, inst.n_bits);
    const double x = std::floor(inst.lambdas[which] * bins);
    inst.lambdas[which] = (x + 0.5 * inst.alpha) / bins;
}

int floor_estimate(double lambda, int n) {
    if (!(lambda >= 0.0 && lambda < 1.0)) throw std::invalid_argument("floor_estimate: lambda outside [0,1)");
    const double scaled = std::floor(lambda * std::pow(2.0, n));
    return std::min((1 << n) - 1, static_cast<int>(scaled));
}

int bit_k(double lambda, int n, int k) {
    if (k < 0 || k >= n) throw std::invalid_argument("bit_k: k out of range");
    return (floor_estimate(lambda, n) >> k) & 1;
}

std::string report_to_json(const EstimationReport& rep, const std::string& tool_version,
                           const std::string& config_echo) {
    nlohmann::ordered_json j;
    j["algorithm"] = rep.algorithm;
    j["n"] = rep.n;
    j["alpha"] = rep.alpha;
    j["delta"] = rep.delta;
    j["query_count"] = rep.query_count;
    j["garbage_qubits"] = rep.flavor.garbage_qubits;
    j["per_eigenstate_success"] = rep.per_eigenstate_success;
    j["coherence_fidelity"] = rep.coherence_fidelity;
    j["seed"] = rep.seed;
    j["version"] = tool_version;
    j["config"] = config_echo;
    return j.dump(2);
}

double eta_linear(int k, double alpha) {
    if (k == 0) return alpha / 2.0;
    return 0.5 - std::pow(2.0, -k) * (0.5 + alpha / 2.0);
}

double eta_refined(int k, double alpha) {
    if (k == 0) return 0.5 * std::sin(kPi * alpha / 2.0);
    const double w = std::pow(2.0, -k) * (0.5 + alpha / 2.0);
    const double s = std::sin(kPi * w / 2.0);
    return 0.5 - s * s;
}

double phi_shift(int k, double alpha) {
    if (k == 0) return (1.0 - alpha) / 4.0;
    return 0.5 - std::pow(2.0, -k - 1) * (0.5 + alpha / 2.0);
}

double textbook_gamma(double x) {
    if (x == 0.0) return 1.0;
    const double s = std::sin(kPi * x);
    return s * s / (kPi * kPi * x * x);
}

// ---------------------------------------------------------------------------
// Textbook phase estimation (classical convolution shortcut).
// ---------------------------------------------------------------------------

namespace {

// |(1/2^N) sum_t exp(2 pi i t v / 2^N)|^2 evaluated as an explicit sum.
double comb_probability(double v, int big_n) {
    const int terms = 1 << big_n;
    cplx acc = 0.0;
    for (int t = 0; t < terms; ++t) acc += std::polar(1.0, kTwoPi * t * v / terms);
    return std::norm(acc) / (static_cast<double>(terms) * terms);
}

double binomial_tail_at_least(long long m, long long i, double p) {
    // P[Bin(m, p) >= i], summed over the upper tail for accuracy.
    if (i <= 0) return 1.0;
    if (i > m) return 0.0;
    p = std::min(1.0, std::max(0.0, p));
    if (p >= 1.0 - 1e-15) return 1.0;
    if (p <= 1e-300) return 0.0;
    double acc = 0.0;
    for (long long c = i; c <= m; ++c) {
        const double lg = std::lgamma(static_cast<double>(m + 1)) - std::lgamma(static_cast<double>(c + 1)) -
                          std::lgamma(static_cast<double>(m - c + 1)) + c * std::log(p) +
                          (m - c) * std::log1p(-p);
        acc += std::exp(lg);
    }
    return std::min(1.0, acc);
}

}  // namespace

TextbookPeResult textbook_pe(const RoundingPromiseInstance& inst, double delta) {
    if (inst.kind != SpectrumKind::unitary)
        throw std::invalid_argument("textbook_pe: expected a unitary instance");
    const int n = inst.n_bits;
    const TextbookParams par = textbook_params(inst.alpha, delta);
    if (n + par.r > 6 || par.m_reps > 64)
        throw std::invalid_argument(
            "textbook_pe: simulation budget exceeded (n+r <= 6, M <= 64); use the cost model instead");

    const int big_n = n + par.r;
    const int coarse = 1 << n;
    const int fine_per = 1 << par.r;
    const int d = inst.dim();
    const long long i_med = (par.m_reps + 1) / 2;  // lower median

    // Comb shift centering the allowed eigenvalue set between estimates; the
    // answer flips between adjacent coarse bins only inside excluded intervals.
    const double shift = (1.0 + inst.alpha * fine_per) / 2.0;
    std::vector<std::vector<double>> pmed(d, std::vector<double>(coarse, 0.0));
    std::vector<double> success(d, 0.0);
    for (int j = 0; j < d; ++j) {
        std::vector<double> q(coarse, 0.0);
        for (int x = 0; x < coarse; ++x) {
            for (int t = 0; t < fine_per; ++t) {
                const int fine = x * fine_per + t;
                const double v = std::pow(2.0, big_n) * inst.lambdas[j] - fine - shift;
                q[x] += comb_probability(v, big_n);
            }
        }
        double tot = 0.0;
        for (double& val : q) tot += val;
        for (double& val : q) val /= tot;  // tot == 1 up to rounding
        double cdf = 0.0;
        double prev_tail = 0.0;
        for (int x = 0; x < coarse; ++x) {
            cdf += q[x];
            const double tail = binomial_tail_at_least(par.m_reps, i_med, std::min(1.0, cdf));
            pmed[j][x] = tail - prev_tail;
            prev_tail = tail;
        }
        success[j] = pmed[j][floor_estimate(inst.lambdas[j], n)];
    }

    TextbookPeResult out;
    out.report.algorithm = "textbook_pe";
    out.report.n = n;
    out.report.alpha = inst.alpha;
    out.report.delta = delta;
    out.report.seed = inst.seed;
    out.report.query_count = ((1LL << big_n) - 1) * par.m_reps;
    out.report.flavor = EstimatorFlavor{true, true, static_cast<int>(big_n * par.m_reps)};
    out.report.per_eigenstate_success = success;

    // Measure-and-prepare representative of the garbage-traced channel.
    const int full = coarse * d;
    for (int j = 0; j < d; ++j) {
        CVector psi = column(inst.eigenbasis, j);
        for (int x = 0; x < coarse; ++x) {
            if (pmed[j][x] < 1e-14) continue;
            CMatrix k(full, full);
            const double amp = std::sqrt(pmed[j][x]);
            for (int rr = 0; rr < d; ++rr)
                for (int cc = 0; cc < d; ++cc)
                    k(x * d + rr, 0 * d + cc) = amp * psi[rr] * std::conj(psi[cc]);
            out.channel.kraus.push_back(std::move(k));
        }
    }
    for (int x = 1; x < coarse; ++x) {
        CMatrix k(full, full);
        for (int s = 0; s < d; ++s) k(x * d + s, x * d + s) = 1.0;
        out.channel.kraus.push_back(std::move(k));
    }

    // Uniform superposition collapses under the measure-and-prepare form.
    {
        CVector uni(d);
        for (int j = 0; j < d; ++j) {
            CVector psi = column(inst.eigenbasis, j);
            for (int i = 0; i < d; ++i) uni[i] += psi[i] / std::sqrt(static_cast<double>(d));
        }
        CVector in(full);
        for (int i = 0; i < d; ++i) in[i] = uni[i];
        CMatrix rho = outer(in, in);
        CMatrix rho_out = apply_channel(out.channel, rho);
        CVector ideal(full);
        for (int j = 0; j < d; ++j) {
            CVector psi = column(inst.eigenbasis, j);
            const int fl = floor_estimate(inst.lambdas[j], n);
            for (int i = 0; i < d; ++i) ideal[fl * d + i] += psi[i] / std::sqrt(static_cast<double>(d));
        }
        CVector tmp = rho_out * ideal;
        out.report.coherence_fidelity = std::max(0.0, inner(ideal, tmp).real());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Coherent iterative phase estimation.
// ---------------------------------------------------------------------------

double lambda_bit_value(double lambda, int delta_reg, int n, int k, double alpha) {
    return std::pow(2.0, n - k - 1) * (lambda - delta_reg / std::pow(2.0, n)) + phi_shift(k, alpha);
}

CMatrix pe_signal_unitary(const RoundingPromiseInstance& inst, int k) {
    const int n = inst.n_bits;
    if (k < 0 || k >= n) throw std::invalid_argument("pe_signal_unitary: k out of range");
    const int d = inst.dim();
    const int dk = 1 << k;
    // Phase unitary with eigenvalues lambda^{(k)} on Delta x system.
    CMatrix w(dk * d, dk * d);
    for (int dd = 0; dd < dk; ++dd) {
        for (int j = 0; j < d; ++j) {
            const double lk = lambda_bit_value(inst.lambdas[j], dd, n, k, inst.alpha);
            const cplx ph = std::polar(1.0, kTwoPi * lk);
            CVector psi = column(inst.eigenbasis, j);
            for (int rr = 0; rr < d; ++rr)
                for (int cc = 0; cc < d; ++cc)
                    w(dd * d + rr, dd * d + cc) += ph * psi[rr] * std::conj(psi[cc]);
        }
    }
    // Modified Hadamard conjugation of the controlled phase.
    const double s2 = 1.0 / std::sqrt(2.0);
    CMatrix htilde(2, 2);
    htilde(0, 0) = s2;
    htilde(0, 1) = s2;
    htilde(1, 0) = cplx(0.0, s2);
    htilde(1, 1) = cplx(0.0, -s2);
    CMatrix htilde_t(2, 2);
    htilde_t(0, 0) = htilde(0, 0);
    htilde_t(0, 1) = htilde(1, 0);
    htilde_t(1, 0) = htilde(0, 1);
    htilde_t(1, 1) = htilde(1, 1);
    const int sub = dk * d;
    CMatrix ctrl(2 * sub, 2 * sub);
    for (int i = 0; i < sub; ++i) ctrl(i, i) = 1.0;
    for (int rr = 0; rr < sub; ++rr)
        for (int cc = 0; cc < sub; ++cc) ctrl(sub + rr, sub + cc) = w(rr, cc);
    const CMatrix id_sub = CMatrix::identity(sub);
    return kron(htilde, id_sub) * ctrl * kron(htilde_t, id_sub);
}

PeBitResult iterative_pe_bit(const RoundingPromiseInstance& inst, int k, double delta, double m_svt) {
    if (inst.kind != SpectrumKind::unitary)
        throw std::invalid_argument("iterative_pe_bit: expected a unitary instance");
    const int n = inst.n_bits;
    if (k < 0 || k >= n) throw std::invalid_argument("iterative_pe_bit: k out of range");
    const int d = inst.dim();
    const int dk = 1 << k;

    const double delta_amp = (1.0 - std::pow(10.0, -m_svt)) * delta * delta / 8.0;
    const double eta = eta_refined(k, inst.alpha);
    AmplifyingPoly amp = amplifying_poly(eta, delta_amp);

    BlockEncoding be_signal = make_block_encoding(pe_signal_unitary(inst, k), 1, dk * d, 1e-8);
    SvtResult svt = apply_svt(be_signal, amp_of_square(amp));

    PeBitResult out;
    out.unitary = svt.be.unitary;
    out.channel.kraus.push_back(out.unitary);
    out.query_count = (1LL << (n - k - 1)) * svt.query_cost;
    out.flavor = EstimatorFlavor{true, false, 0};
    return out;
}

CMatrix stitch_pe(const std::vector<PeBitResult>& bits, int n, int system_dim) {
    if (static_cast<int>(bits.size()) != n) throw std::invalid_argument("stitch_pe: need one channel per bit");
    CMatrix v = CMatrix::identity((1 << n) * system_dim);
    for (int k = 0; k < n; ++k) {
        const int lead = 1 << (n - 1 - k);
        const CMatrix full = kron(CMatrix::identity(lead), bits[k].unitary);
        if (full.rows != v.rows) throw std::invalid_argument("stitch_pe: inconsistent dimensions");
        v = full * v;
    }
    return v;
}

QuantumChannel uncompute(const UnitaryEstimator& est) {
    const int da = est.ans_dim, dg = est.gar_dim, dr = est.rest_dim;
    if (est.v.rows != da * dg * dr) throw std::invalid_argument("uncompute: dimension mismatch");
    if (unitarity_defect(est.v) > 1e-8)
        throw std::invalid_argument("uncompute: channel has no unitary implementation");
    const int inner = da * dg * dr;
    const int full = da * inner;
    const CMatrix lift_v = kron(CMatrix::identity(da), est.v);
    CMatrix copy(full, full);
    for (int y = 0; y < da; ++y)
        for (int a = 0; a < da; ++a)
            for (int g = 0; g < dg; ++g)
                for (int r = 0; r < dr; ++r) {
                    const int colidx = ((y * da + a) * dg + g) * dr + r;
                    const int rowidx = ((((y + a) % da) * da + a) * dg + g) * dr + r;
                    copy(rowidx, colidx) = 1.0;
                }
    const CMatrix wmat = kron(CMatrix::identity(da), dagger(est.v)) * copy * lift_v;
    QuantumChannel out;
    for (int a = 0; a < da; ++a)
        for (int g = 0; g < dg; ++g) {
            CMatrix kr(da * dr, da * dr);
            double mass = 0.0;
            for (int y = 0; y < da; ++y)
                for (int r = 0; r < dr; ++r)
                    for (int yc = 0; yc < da; ++yc)
                        for (int rc = 0; rc < dr; ++rc) {
                            const int row = ((y * da + a) * dg + g) * dr + r;
                            const int col = ((yc * da + 0) * dg + 0) * dr + rc;
                            const cplx val = wmat(row, col);
                            kr(y * dr + r, yc * dr + rc) = val;
                            mass += std::norm(val);
                        }
            if (mass > 1e-24) out.kraus.push_back(std::move(kr));
        }
    return compress_kraus(out);
}

// ---------------------------------------------------------------------------
// Coherent iterative energy estimation.
// ---------------------------------------------------------------------------

BlockEncoding less_significant_bits_encoding(int n, int k) {
    if (n < 1 || k < 0 || k >= n) throw std::invalid_argument("less_significant_bits_encoding: bad registers");
    const int nx = 1 << (n - 1);  // comparand register
    const int dk = 1 << k;
    const int dim = nx * 2 * dk;
    CMatrix cmp(dim, dim);
    for (int x = 0; x < nx; ++x)
        for (int c = 0; c < 2; ++c)
            for (int dd = 0; dd < dk; ++dd) {
                const int cr = (x < dd) ? 1 - c : c;
                cmp((x * 2 + cr) * dk + dd, (x * 2 + c) * dk + dd) = 1.0;
            }
    CMatrix had1(2, 2);
    had1(0, 0) = had1(0, 1) = had1(1, 0) = 1.0 / std::sqrt(2.0);
    had1(1, 1) = -1.0 / std::sqrt(2.0);
    CMatrix hadx = CMatrix::identity(1);
    for (int i = 0; i < n - 1; ++i) hadx = kron(hadx, had1);
    CMatrix xgate(2, 2);
    xgate(0, 1) = xgate(1, 0) = 1.0;
    const CMatrix pre = kron(kron(hadx, CMatrix::identity(2)), CMatrix::identity(dk));
    const CMatrix post = kron(kron(hadx, xgate), CMatrix::identity(dk));
    CMatrix u = post * cmp * pre;
    return make_block_encoding(std::move(u), n, dk, 1e-9);
}

namespace {

BlockEncoding lift_system_right(const BlockEncoding& be, int right_dim) {
    const int anc = 1 << be.ancillas_m;
    const int d = be.system_dim;
    CMatrix u(anc * d * right_dim, anc * d * right_dim);
    for (int a = 0; a < anc; ++a)
        for (int ac = 0; ac < anc; ++ac)
            for (int r = 0; r < d; ++r)
                for (int c = 0; c < d; ++c)
                    for (int s = 0; s < right_dim; ++s)
                        u((a * d + r) * right_dim + s, (ac * d + c) * right_dim + s) =
                            be.unitary(a * d + r, ac * d + c);
    BlockEncoding out;
    out.unitary = std::move(u);
    out.ancillas_m = be.ancillas_m;
    out.system_dim = d * right_dim;
    return out;
}

BlockEncoding lift_system_left(const BlockEncoding& be, int left_dim) {
    const int anc = 1 << be.ancillas_m;
    const int d = be.system_dim;
    CMatrix u(anc * left_dim * d, anc * left_dim * d);
    for (int a = 0; a < anc; ++a)
        for (int ac = 0; ac < anc; ++ac)
            for (int l = 0; l < left_dim; ++l)
                for (int r = 0; r < d; ++r)
                    for (int c = 0; c < d; ++c)
                        u((a * left_dim + l) * d + r, (ac * left_dim + l) * d + c) = be.unitary(a * d + r, ac * d + c);
    BlockEncoding out;
    out.unitary = std::move(u);
    out.ancillas_m = be.ancillas_m;
    out.system_dim = left_dim * d;
    return out;
}

struct EeBitPoly {
    AmplifyingPoly amp;
    ChebyshevSeries pcos;
    PolyFn composed;
    long long query_formula = 0;
    double eta = 0.0;
    double delta_amp = 0.0;
};

EeBitPoly ee_bit_poly(int n, int k, double alpha, double delta, double m_cos, double m_svt) {
    EeBitPoly out;
    out.eta = eta_refined(k, alpha);
    out.delta_amp = (1.0 - std::pow(10.0, -m_svt)) * delta * delta / 8.0;
    const double delta_cos = std::pow(10.0, -m_cos) * out.eta;
    const double t = kPi * std::pow(2.0, n - k);
    out.amp = amplifying_poly((1.0 - std::pow(10.0, -m_cos)) * out.eta, out.delta_amp);
    out.pcos = jacobi_anger_cos(t, delta_cos);
    out.composed = amp_of_cos_square(out.amp, out.pcos);
    const double rarg = solve_r(kE / 2.0 * t, 1.25 * (out.eta / 2.0) * std::pow(10.0, -m_cos));
    out.query_formula = 4LL * out.amp.budget.degree_M * static_cast<long long>(std::floor(rarg));
    return out;
}

}  // namespace

BlockEncoding ee_hk_encoding(const RoundingPromiseInstance& inst, int k, const BlockEncoding& be_h) {
    const int n = inst.n_bits;
    const int dk = 1 << k;
    const int a = be_h.ancillas_m;
    const int msub = a + n;
    BlockEncoding term_h = pad_ancillas(lift_system_left(be_h, dk), msub);
    // The W term acts on Delta with identity on the system, so it lifts right.
    BlockEncoding w_enc = less_significant_bits_encoding(n, k);
    BlockEncoding w_neg{cplx(-1.0, 0.0) * w_enc.unitary, w_enc.ancillas_m, w_enc.system_dim};
    BlockEncoding term_w = pad_ancillas(lift_system_right(w_neg, inst.dim()), msub);
    const double cval = 4.0 * phi_shift(k, inst.alpha) * std::pow(2.0, k - n);
    BlockEncoding term_c = pad_ancillas(dilate(cplx(cval, 0.0) * CMatrix::identity(dk * inst.dim())), msub);
    return lcu_combine({{0.5, term_h}, {0.25, term_w}, {0.25, term_c}});
}

EeBitResult iterative_ee_bit(const RoundingPromiseInstance& inst, int k, double delta, double m_cos,
                             double m_svt) {
    if (inst.kind != SpectrumKind::hamiltonian)
        throw std::invalid_argument("iterative_ee_bit: expected a hamiltonian instance");
    const int n = inst.n_bits;
    if (k < 0 || k >= n) throw std::invalid_argument("iterative_ee_bit: k out of range");
    const int d = inst.dim();
    const int dk = 1 << k;

    BlockEncoding be_h = dilate(inst.hamiltonian());
    const int a = be_h.ancillas_m;
    const int gq = a + n + 3;

    EeBitPoly poly = ee_bit_poly(n, k, inst.alpha, delta, m_cos, m_svt);
    BlockEncoding be_hk = ee_hk_encoding(inst, k, be_h);
    SvtResult svt = apply_svt(be_hk, poly.composed);

    // Embed the one-ancilla result into the declared garbage register and flip
    // a fresh output qubit on the non-zero ancilla states.
    const int gdim = 1 << gq;
    const int sub = dk * d;
    CMatrix u_emb(gdim * sub, gdim * sub);
    const int hstate = gdim / 2;  // first garbage qubit set
    for (int g = 0; g < gdim; ++g) {
        if (g == 0 || g == hstate) continue;
        for (int s = 0; s < sub; ++s) u_emb(g * sub + s, g * sub + s) = 1.0;
    }
    for (int b = 0; b < 2; ++b)
        for (int bc = 0; bc < 2; ++bc) {
            const int gr = b == 0 ? 0 : hstate;
            const int gc = bc == 0 ? 0 : hstate;
            for (int r = 0; r < sub; ++r)
                for (int c = 0; c < sub; ++c)
                    u_emb(gr * sub + r, gc * sub + c) = svt.be.unitary(b * sub + r, bc * sub + c);
        }
    CMatrix v(2 * gdim * sub, 2 * gdim * sub);
    for (int o = 0; o < 2; ++o)
        for (int g = 0; g < gdim; ++g) {
            const int orow = (g == 0) ? o : 1 - o;
            for (int r = 0; r < sub; ++r)
                for (int gc = 0; gc < gdim; ++gc)
                    for (int c = 0; c < sub; ++c) {
                        const cplx val = u_emb(g * sub + r, gc * sub + c);
                        if (val != cplx(0.0, 0.0)) v((orow * gdim + g) * sub + r, (o * gdim + gc) * sub + c) = val;
                    }
        }

    EeBitResult out;
    out.unitary = std::move(v);
    out.channel.kraus.push_back(out.unitary);
    out.query_count = poly.query_formula;
    out.flavor = EstimatorFlavor{true, true, gq};
    out.sector_amp.assign(dk, std::vector<double>(d, 0.0));
    for (int dd = 0; dd < dk; ++dd)
        for (int j = 0; j < d; ++j) {
            const double x = std::pow(2.0, k - n) * lambda_bit_value(inst.lambdas[j], dd, n, k, inst.alpha);
            out.sector_amp[dd][j] = std::min(1.0, std::max(0.0, poly.composed.f(x)));
        }
    return out;
}

// Two-Kraus form of (uncompute of (Toffoli flip after the embedded SVT)),
// diagonal over Delta x eigenstate sectors.
QuantumChannel uncomputed_ee_bit(const RoundingPromiseInstance& inst, const EeBitResult& bit, int k) {
    const int d = inst.dim();
    const int dk = 1 << k;
    const int sub = dk * d;
    CMatrix k_ok(2 * sub, 2 * sub), k_fail(2 * sub, 2 * sub);
    for (int dd = 0; dd < dk; ++dd)
        for (int j = 0; j < d; ++j) {
            const double p = bit.sector_amp[dd][j];
            const double q2 = std::max(0.0, 1.0 - p * p);
            const double pq = p * std::sqrt(q2);
            CVector psi = column(inst.eigenbasis, j);
            CMatrix proj = outer(psi, psi);
            for (int r = 0; r < d; ++r)
                for (int c = 0; c < d; ++c) {
                    const cplx pr = proj(r, c);
                    const int rr0 = (0 * dk + dd) * d + r, cc0 = (0 * dk + dd) * d + c;
                    const int rr1 = (1 * dk + dd) * d + r, cc1 = (1 * dk + dd) * d + c;
                    k_ok(rr0, cc0) += p * p * pr;
                    k_ok(rr1, cc1) += p * p * pr;
                    k_ok(rr1, cc0) += q2 * pr;
                    k_ok(rr0, cc1) += q2 * pr;
                    k_fail(rr0, cc0) += pq * pr;
                    k_fail(rr1, cc1) += pq * pr;
                    k_fail(rr1, cc0) -= pq * pr;
                    k_fail(rr0, cc1) -= pq * pr;
                }
        }
    QuantumChannel ch;
    ch.kraus.push_back(std::move(k_ok));
    ch.kraus.push_back(std::move(k_fail));
    return ch;
}

ImprovedResult improved_pe(const RoundingPromiseInstance& inst, double delta, bool do_uncompute, double m_svt) {
    const int n = inst.n_bits;
    const int d = inst.dim();
    const double inner_delta = do_uncompute ? delta / 2.0 : delta;
    std::vector<PeBitResult> bits;
    long long queries = 0;
    for (int k = 0; k < n; ++k) {
        bits.push_back(iterative_pe_bit(inst, k, inner_delta * std::pow(2.0, -k - 1), m_svt));
        queries += bits.back().query_count;
    }
    const CMatrix v = stitch_pe(bits, n, d);
    const int coarse = 1 << n;

    ImprovedResult out;
    out.report.algorithm = "improved_pe";
    out.report.n = n;
    out.report.alpha = inst.alpha;
    out.report.delta = delta;
    out.report.seed = inst.seed;
    out.report.flavor = do_uncompute ? EstimatorFlavor{false, false, 0} : EstimatorFlavor{true, false, 0};
    out.report.query_count = do_uncompute ? 2 * queries : queries;

    QuantumChannel unc = uncompute(UnitaryEstimator{v, coarse, 1, d});
    if (do_uncompute) {
        out.channel = unc;
    } else {
        out.channel.kraus.push_back(v);
    }

    out.report.per_eigenstate_success.resize(d);
    for (int j = 0; j < d; ++j) {
        CVector psi = column(inst.eigenbasis, j);
        CVector in(coarse * d);
        for (int i = 0; i < d; ++i) in[i] = psi[i];
        const int fl = floor_estimate(inst.lambdas[j], n);
        CMatrix rho_out = apply_channel(out.channel, outer(in, in));
        double mass = 0.0;
        for (int i = 0; i < d; ++i) mass += rho_out(fl * d + i, fl * d + i).real();
        out.report.per_eigenstate_success[j] = mass;
    }

    // Fidelity of the uncomputed channel against the entangled target.
    {
        CVector in(coarse * d);
        for (int j = 0; j < d; ++j) {
            CVector psi = column(inst.eigenbasis, j);
            for (int i = 0; i < d; ++i) in[i] += psi[i] / std::sqrt(static_cast<double>(d));
        }
        CMatrix rho_out = apply_channel(unc, outer(in, in));
        CVector ideal(coarse * d);
        for (int j = 0; j < d; ++j) {
            CVector psi = column(inst.eigenbasis, j);
            const int fl = floor_estimate(inst.lambdas[j], n);
            for (int i = 0; i < d; ++i) ideal[fl * d + i] += psi[i] / std::sqrt(static_cast<double>(d));
        }
        CVector tmp = rho_out * ideal;
        out.report.coherence_fidelity = std::max(0.0, inner(ideal, tmp).real());
    }
    return out;
}

ImprovedResult improved_ee(const RoundingPromiseInstance& inst, double delta, double m_cos, double m_svt) {
    if (inst.kind != SpectrumKind::hamiltonian)
        throw std::invalid_argument("improved_ee: expected a hamiltonian instance");
    const int n = inst.n_bits;
    const int d = inst.dim();
    const int coarse = 1 << n;

    long long queries = 0;
    // Rectangular Kraus accumulation: system -> answer-so-far x system.
    std::vector<CMatrix> acc;
    acc.push_back(CMatrix::identity(d));
    for (int k = 0; k < n; ++k) {
        EeBitResult bit = iterative_ee_bit(inst, k, delta * std::pow(2.0, -k - 1), m_cos, m_svt);
        queries += 2 * bit.query_count;
        QuantumChannel bitch = uncomputed_ee_bit(inst, bit, k);
        std::vector<CMatrix> next;
        const int dk = 1 << k;
        for (const auto& kb : bitch.kraus)
            for (const auto& ka : acc) {
                // Inject the fresh answer bit in |0> before applying the bit channel.
                CMatrix lifted(2 * dk * d, d);
                for (int row = 0; row < dk * d; ++row)
                    for (int col = 0; col < d; ++col) lifted(row, col) = ka(row, col);
                next.push_back(kb * lifted);
            }
        acc = std::move(next);
    }

    ImprovedResult out;
    out.report.algorithm = "improved_ee";
    out.report.n = n;
    out.report.alpha = inst.alpha;
    out.report.delta = delta;
    out.report.seed = inst.seed;
    out.report.query_count = queries;
    out.report.flavor = EstimatorFlavor{false, false, 0};

    // Square TP channel on answer x system: inputs outside |0^n> pass through.
    for (const auto& ka : acc) {
        CMatrix k(coarse * d, coarse * d);
        for (int row = 0; row < coarse * d; ++row)
            for (int col = 0; col < d; ++col) k(row, col) = ka(row, col);
        out.channel.kraus.push_back(std::move(k));
    }
    for (int x = 1; x < coarse; ++x) {
        CMatrix k(coarse * d, coarse * d);
        for (int s = 0; s < d; ++s) k(x * d + s, x * d + s) = 1.0;
        out.channel.kraus.push_back(std::move(k));
    }

    out.report.per_eigenstate_success.resize(d);
    for (int j = 0; j < d; ++j) {
        CVector psi = column(inst.eigenbasis, j);
        CVector in(coarse * d);
        for (int i = 0; i < d; ++i) in[i] = psi[i];
        CMatrix rho_out = apply_channel(out.channel, outer(in, in));
        const int fl = floor_estimate(inst.lambdas[j], n);
        double mass = 0.0;
        for (int i = 0; i < d; ++i) mass += rho_out(fl * d + i, fl * d + i).real();
        out.report.per_eigenstate_success[j] = mass;
    }
    {
        CVector in(coarse * d);
        for (int j = 0; j < d; ++j) {
            CVector psi = column(inst.eigenbasis, j);
            for (int i = 0; i < d; ++i) in[i] += psi[i] / std::sqrt(static_cast<double>(d));
        }
        CMatrix rho_out = apply_channel(out.channel, outer(in, in));
        CVector ideal(coarse * d);
        for (int j = 0; j < d; ++j) {
            CVector psi = column(inst.eigenbasis, j);
            const int fl = floor_estimate(inst.lambdas[j], n);
            for (int i = 0; i < d; ++i) ideal[fl * d + i] += psi[i] / std::sqrt(static_cast<double>(d));
        }
        CVector tmp = rho_out * ideal;
        out.report.coherence_fidelity = std::max(0.0, inner(ideal, tmp).real());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Hamiltonian simulation and amplitude estimation.
// ---------------------------------------------------------------------------

long long hamsim_query_cost(double t, double eps) {
    if (t == 0.0) return 3;
    return static_cast<long long>(std::ceil(3.0 * solve_r(kE * t / 2.0, eps / 24.0))) + 3;
}

HamsimResult hamsim_channel(const BlockEncoding& be_h, double t, double eps) {
    const CMatrix h = encoded_block(be_h);
    if (max_abs(h - dagger(h)) > 1e-8) throw std::invalid_argument("hamsim_channel: block is not hermitian");
    HamsimResult out;
    out.query_count = hamsim_query_cost(t, eps);
    if (t == 0.0) {
        out.channel.kraus.push_back(CMatrix::identity(be_h.system_dim));
        out.bound = 0.0;
        return out;
    }
    const double eps_int = eps / 4.0;
    const double series_eps = std::min(0.25 / kE, eps_int / 4.0);
    const ChebyshevSeries pc = jacobi_anger_cos(t, series_eps);
    // Odd counterpart of the cosine series.
    const double rr = solve_r(kE * t / 2.0, 1.25 * series_eps);
    const long long bigR = static_cast<long long>(std::floor((rr - 1.0) / 2.0));
    const auto jv = bessel_j_upto(static_cast<int>(2 * bigR + 1), t);
    ChebyshevSeries ps;
    ps.parity = Parity::odd;
    ps.coeffs.assign(2 * bigR + 2, 0.0);
    {
        double sign = 1.0;
        for (long long kk = 0; kk <= bigR; ++kk) {
            ps.coeffs[2 * kk + 1] = 2.0 * sign * jv[2 * kk + 1];
            sign = -sign;
        }
    }
    const HermEig eh = eig_hermitian(h);
    const int d = h.rows;
    CMatrix amat(d, d);
    for (int j = 0; j < d; ++j) {
        const double lam = eh.vals[j];
        const cplx val(pc.eval(lam), ps.eval(lam));
        CVector v = column(eh.vecs, j);
        amat = amat + val * outer(v, v);
    }
    const double scale = 1.0 + eps_int / 2.0;
    amat = cplx(1.0 / scale, 0.0) * amat;
    CMatrix target(d, d);
    for (int j = 0; j < d; ++j) {
        CVector v = column(eh.vecs, j);
        target = target + std::polar(1.0, t * eh.vals[j]) * outer(v, v);
    }
    auto [ch, bound] = channel_from_block(dilate(amat), target);
    out.channel = std::move(ch);
    out.bound = bound;
    return out;
}

AmplitudeResult amplitude_estimate(const CMatrix& r_pi, const CMatrix& r_psi, const CVector& psi, int n,
                                   double delta, double m_cos, double m_svt) {
    const int d = r_pi.rows;
    if (r_psi.rows != d || psi.dim != d) throw std::invalid_argument("amplitude_estimate: dimension mismatch");
    for (const CMatrix* r : {&r_pi, &r_psi}) {
        if (unitarity_defect(*r) > 1e-8 || max_abs(*r - dagger(*r)) > 1e-8)
            throw std::invalid_argument("amplitude_estimate: inputs must be unitary reflections");
    }
    if (std::fabs(norm(psi) - 1.0) > 1e-8) throw std::invalid_argument("amplitude_estimate: psi not normalized");

    const CMatrix id = CMatrix::identity(d);
    BlockEncoding be_pi = lcu_combine({{0.5, trivial_encoding(id)}, {0.5, trivial_encoding(r_pi)}});
    BlockEncoding be_proj = lcu_combine({{0.5, trivial_encoding(id)}, {0.5, trivial_encoding(r_psi)}});
    BlockEncoding be_a = be_product(be_proj, be_product(be_pi, be_proj));

    AmplitudeResult out;
    out.be_a = be_a;
    const CMatrix ablock = encoded_block(be_a);
    {
        CVector tmp = ablock * psi;
        out.a_squared = std::min(1.0 - 1e-15, std::max(0.0, inner(psi, tmp).real()));
    }

    // No-promise energy estimation on the eigenstate sector: one bit at a time,
    // measured and discarded.
    const double alpha_internal = 0.5;
    const int coarse = 1 << n;
    std::vector<double> dist(coarse, 0.0);
    dist[0] = 1.0;
    long long queries = 0;
    for (int k = 0; k < n; ++k) {
        EeBitPoly poly = ee_bit_poly(n, k, alpha_internal, delta * std::pow(2.0, -k - 1), m_cos, m_svt);
        queries += poly.query_formula;
        std::vector<double> next(coarse, 0.0);
        for (int dd = 0; dd < (1 << k); ++dd) {
            if (dist[dd] <= 0.0) continue;
            const double x = std::pow(2.0, k - n) * lambda_bit_value(out.a_squared, dd, n, k, alpha_internal);
            const double p = std::min(1.0, std::max(0.0, poly.composed.f(x)));
            next[dd] += dist[dd] * p * p;
            next[dd + (1 << k)] += dist[dd] * (1.0 - p * p);
        }
        dist = std::move(next);
    }
    out.estimate_distribution = dist;
    out.query_count = queries;
    // The system register is an eigenstate of every sector operator, so it is
    // left exactly in place.
    out.post_fidelity = 1.0;

    out.report.algorithm = "amplitude_estimate";
    out.report.n = n;
    out.report.alpha = alpha_internal;
    out.report.delta = delta;
    out.report.query_count = queries;
    out.report.flavor = EstimatorFlavor{false, false, 0};
    out.report.per_eigenstate_success = {dist[std::min(coarse - 1, floor_estimate(out.a_squared, n))]};
    out.report.coherence_fidelity = out.post_fidelity;
    return out;
}

}  // namespace qest
