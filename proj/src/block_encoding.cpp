#include "qest/block_encoding.hpp"

#include <algorithm>
#include <cmath>

namespace qest {

namespace {

void check_unitary_cheap(const CMatrix& u, double tol) {
    // Full spectral check up to dim 128, randomized norm preservation above.
    if (u.rows <= 128) {
        if (unitarity_defect(u) > tol) throw std::invalid_argument("block encoding: unitary check failed");
        return;
    }
    std::mt19937_64 rng(0x5eed1234u);
    for (int rep = 0; rep < 4; ++rep) {
        CVector v(u.rows);
        std::normal_distribution<double> g(0.0, 1.0);
        for (auto& x : v.a) x = cplx(g(rng), g(rng));
        v = normalized(v);
        if (std::fabs(norm(u * v) - 1.0) > 16.0 * tol)
            throw std::invalid_argument("block encoding: unitary check failed");
    }
}

void check_density(const CMatrix& rho, double tol) {
    if (!rho.square()) throw std::invalid_argument("density operator must be square");
    if (max_abs(rho - dagger(rho)) > tol) throw std::invalid_argument("density operator not hermitian");
    if (std::fabs(trace(rho).real() - 1.0) > tol || std::fabs(trace(rho).imag()) > tol)
        throw std::invalid_argument("density operator trace != 1");
    const auto e = eig_hermitian(rho);
    if (e.vals.front() < -tol) throw std::invalid_argument("density operator not PSD");
}

// Gram-Schmidt completion of a real first column to a unitary.
void complete_real_first_column(CMatrix& prep) {
    const int n = prep.rows;
    int next = 1;
    for (int e = 0; e < n && next < n; ++e) {
        CVector cand(n);
        cand[e] = 1.0;
        for (int rep = 0; rep < 2; ++rep) {
            for (int j = 0; j < next; ++j) {
                cplx ov = 0.0;
                for (int i = 0; i < n; ++i) ov += std::conj(prep(i, j)) * cand[i];
                for (int i = 0; i < n; ++i) cand[i] -= ov * prep(i, j);
            }
        }
        const double nn = norm(cand);
        if (nn < 1e-8) continue;
        for (int i = 0; i < n; ++i) prep(i, next) = cand[i] / nn;
        ++next;
    }
    if (next != n) throw std::runtime_error("lcu_combine: prepare completion failed");
}

}  // namespace

BlockEncoding make_block_encoding(CMatrix u, int ancillas_m, int system_dim, double tol) {
    if (ancillas_m < 0 || system_dim < 1) throw std::invalid_argument("block encoding: bad dimensions");
    const long long want = (1LL << ancillas_m) * system_dim;
    if (u.rows != u.cols || u.rows != want) throw std::invalid_argument("block encoding: dimension mismatch");
    check_unitary_cheap(u, tol);
    BlockEncoding be;
    be.unitary = std::move(u);
    be.ancillas_m = ancillas_m;
    be.system_dim = system_dim;
    const double nb = spectral_norm(encoded_block(be));
    if (nb > 1.0 + 1e-10 + tol) throw std::invalid_argument("block encoding: block norm exceeds 1");
    return be;
}

BlockEncoding trivial_encoding(const CMatrix& u) { return make_block_encoding(u, 0, u.rows); }

CMatrix encoded_block(const BlockEncoding& be) {
    const int d = be.system_dim;
    CMatrix b(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) b(i, j) = be.unitary(i, j);
    return b;
}

BlockEncoding dilate(const CMatrix& m) {
    if (!m.square()) throw std::invalid_argument("dilate: matrix must be square");
    if (!all_finite(m)) throw std::invalid_argument("dilate: non-finite entries");
    if (spectral_norm(m) > 1.0 + 1e-9) throw std::invalid_argument("dilate: spectral norm exceeds 1");
    const int d = m.rows;
    const CMatrix md = dagger(m);
    const CMatrix id = CMatrix::identity(d);
    const CMatrix top = sqrt_psd(id - m * md);
    const CMatrix bot = sqrt_psd(id - md * m);
    CMatrix u(2 * d, 2 * d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            u(i, j) = m(i, j);
            u(i, d + j) = top(i, j);
            u(d + i, j) = bot(i, j);
            u(d + i, d + j) = -md(i, j);
        }
    return make_block_encoding(std::move(u), 1, d, 1e-8);
}

BlockEncoding pad_ancillas(const BlockEncoding& be, int ancillas_m) {
    if (ancillas_m < be.ancillas_m) throw std::invalid_argument("pad_ancillas: cannot shrink");
    if (ancillas_m == be.ancillas_m) return be;
    const int extra = 1 << (ancillas_m - be.ancillas_m);
    CMatrix u = kron(CMatrix::identity(extra), be.unitary);
    BlockEncoding out;
    out.unitary = std::move(u);
    out.ancillas_m = ancillas_m;
    out.system_dim = be.system_dim;
    return out;
}

BlockEncoding lcu_combine(const std::vector<std::pair<double, BlockEncoding>>& terms) {
    if (terms.empty()) throw std::invalid_argument("lcu_combine: no terms");
    const int d = terms.front().second.system_dim;
    const int msub = terms.front().second.ancillas_m;
    double total = 0.0;
    for (const auto& [w, be] : terms) {
        if (w < 0.0) throw std::invalid_argument("lcu_combine: negative weight");
        if (be.system_dim != d || be.ancillas_m != msub)
            throw std::invalid_argument("lcu_combine: terms must share dimensions (pad_ancillas first)");
        total += w;
    }
    if (total > 1.0 + 1e-12) throw std::invalid_argument("lcu_combine: weights exceed 1");

    // Leftover weight is split over a +I/-I pair so the block is exact.
    std::vector<double> w;
    std::vector<const CMatrix*> us;
    CMatrix plus_i = CMatrix::identity((1 << msub) * d);
    CMatrix minus_i = cplx(-1.0, 0.0) * plus_i;
    for (const auto& [wi, be] : terms) {
        w.push_back(wi);
        us.push_back(&be.unitary);
    }
    const double leftover = std::max(0.0, 1.0 - total);
    if (leftover > 1e-15) {
        w.push_back(leftover / 2.0);
        us.push_back(&plus_i);
        w.push_back(leftover / 2.0);
        us.push_back(&minus_i);
    }
    int sel_qubits = 1;
    while ((1 << sel_qubits) < static_cast<int>(w.size())) ++sel_qubits;
    const int slots = 1 << sel_qubits;
    while (static_cast<int>(w.size()) < slots) {
        w.push_back(0.0);
        us.push_back(&plus_i);
    }

    // Prepare unitary with first column sqrt(w) (real entries).
    CMatrix prep(slots, slots);
    {
        std::vector<double> col(slots);
        for (int i = 0; i < slots; ++i) col[i] = std::sqrt(std::max(0.0, w[i]));
        double nn = 0.0;
        for (double x : col) nn += x * x;
        nn = std::sqrt(nn);
        for (int i = 0; i < slots; ++i) prep(i, 0) = col[i] / nn;
        complete_real_first_column(prep);
    }

    const int sub = (1 << msub) * d;
    CMatrix select(slots * sub, slots * sub);
    for (int i = 0; i < slots; ++i)
        for (int r = 0; r < sub; ++r)
            for (int c = 0; c < sub; ++c) select(i * sub + r, i * sub + c) = (*us[i])(r, c);

    const CMatrix prep_full = kron(prep, CMatrix::identity(sub));
    CMatrix u = dagger(prep_full) * select * prep_full;
    BlockEncoding out;
    out.unitary = std::move(u);
    out.ancillas_m = sel_qubits + msub;
    out.system_dim = d;
    return out;
}

BlockEncoding be_product(const BlockEncoding& a, const BlockEncoding& b) {
    if (a.system_dim != b.system_dim) throw std::invalid_argument("be_product: system dims differ");
    const int d = a.system_dim;
    const int da = 1 << a.ancillas_m, db = 1 << b.ancillas_m;
    // Lay out ancillas as (anc_a x anc_b); apply b then a, each on its own register.
    CMatrix ua(da * db * d, da * db * d), ub(da * db * d, da * db * d);
    for (int i = 0; i < da; ++i)
        for (int j = 0; j < da; ++j)
            for (int k = 0; k < db; ++k)
                for (int r = 0; r < d; ++r)
                    for (int c = 0; c < d; ++c)
                        ua((i * db + k) * d + r, (j * db + k) * d + c) = a.unitary(i * d + r, j * d + c);
    for (int i = 0; i < da; ++i)
        for (int k = 0; k < db; ++k)
            for (int l = 0; l < db; ++l)
                for (int r = 0; r < d; ++r)
                    for (int c = 0; c < d; ++c)
                        ub((i * db + k) * d + r, (i * db + l) * d + c) = b.unitary(k * d + r, l * d + c);
    BlockEncoding out;
    out.unitary = ua * ub;
    out.ancillas_m = a.ancillas_m + b.ancillas_m;
    out.system_dim = d;
    return out;
}

SvtResult apply_svt(const BlockEncoding& be, const PolyFn& p) {
    if (p.parity != Parity::even)
        throw std::invalid_argument("apply_svt: only definite even parity is supported");
    const CMatrix block = encoded_block(be);
    const SvdResult dec = svd(block);
    const int d = be.system_dim;
    CMatrix transformed(d, d);
    for (int i = 0; i < d; ++i) {
        const double val = p.f(dec.s[i]);
        if (std::fabs(val) > 1.0 + 1e-9)
            throw std::invalid_argument("apply_svt: polynomial exceeds 1 on a singular value");
        const double clamped = std::min(1.0, std::max(-1.0, val));
        CVector vi = column(dec.v, i);
        CMatrix proj = outer(vi, vi);
        transformed = transformed + cplx(clamped, 0.0) * proj;
    }
    SvtResult out{dilate(transformed), p.degree};
    return out;
}

bool is_trace_preserving(const QuantumChannel& ch, double tol) {
    if (ch.kraus.empty()) return false;
    const int din = ch.kraus.front().cols;
    CMatrix acc(din, din);
    for (const auto& k : ch.kraus) acc = acc + dagger(k) * k;
    return max_abs(acc - CMatrix::identity(din)) <= tol;
}

CMatrix apply_channel(const QuantumChannel& ch, const CMatrix& rho) {
    check_density(rho, 1e-8);
    if (ch.kraus.empty() || ch.kraus.front().cols != rho.rows)
        throw std::invalid_argument("apply_channel: dimension mismatch");
    CMatrix out(ch.kraus.front().rows, ch.kraus.front().rows);
    for (const auto& k : ch.kraus) out = out + k * rho * dagger(k);
    return out;
}

QuantumChannel compose(const QuantumChannel& second, const QuantumChannel& first) {
    QuantumChannel out;
    for (const auto& k2 : second.kraus)
        for (const auto& k1 : first.kraus) out.kraus.push_back(k2 * k1);
    const int d = out.dim();
    if (static_cast<long long>(out.kraus.size()) > static_cast<long long>(d) * d)
        out = compress_kraus(out);
    return out;
}

QuantumChannel compress_kraus(const QuantumChannel& ch, double tol) {
    const int n = static_cast<int>(ch.kraus.size());
    if (n <= 1) return ch;
    CMatrix gram(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            cplx s = 0.0;
            for (size_t t = 0; t < ch.kraus[i].a.size(); ++t)
                s += std::conj(ch.kraus[i].a[t]) * ch.kraus[j].a[t];
            gram(i, j) = s;
        }
    const HermEig e = eig_hermitian(gram);
    QuantumChannel out;
    const double cutoff = std::max(tol, 1e-14 * std::max(1.0, e.vals.back()));
    for (int j = n - 1; j >= 0; --j) {
        if (e.vals[j] <= cutoff) break;
        CMatrix k(ch.kraus.front().rows, ch.kraus.front().cols);
        for (int i = 0; i < n; ++i) {
            const cplx w = std::conj(e.vecs(i, j));
            if (w == cplx(0.0, 0.0)) continue;
            for (size_t t = 0; t < k.a.size(); ++t) k.a[t] += w * ch.kraus[i].a[t];
        }
        out.kraus.push_back(std::move(k));
    }
    return out;
}

QuantumChannel block_measure(const BlockEncoding& be_a) {
    const int m = be_a.ancillas_m;
    const int anc = 1 << m;
    const int d = be_a.system_dim;
    const CMatrix u_full = kron(CMatrix::identity(2), be_a.unitary);
    // X on the flag controlled on the ancilla register being |0^m>.
    CMatrix cflip(2 * anc * d, 2 * anc * d);
    for (int f = 0; f < 2; ++f)
        for (int a = 0; a < anc; ++a)
            for (int s = 0; s < d; ++s) {
                const int col = (f * anc + a) * d + s;
                const int fr = (a == 0) ? 1 - f : f;
                cflip((fr * anc + a) * d + s, col) = 1.0;
            }
    const CMatrix v = dagger(u_full) * cflip * u_full;
    // The flag and the m ancillas enter in |0>; the ancillas are traced out and
    // any incoming flag state is replaced. Kraus index: (ancilla outcome,
    // discarded flag input).
    QuantumChannel ch;
    for (int a = 0; a < anc; ++a)
        for (int fc = 0; fc < 2; ++fc) {
            CMatrix k(2 * d, 2 * d);
            for (int f = 0; f < 2; ++f)
                for (int s = 0; s < d; ++s)
                    for (int sc = 0; sc < d; ++sc)
                        k(f * d + s, fc * d + sc) = v((f * anc + a) * d + s, (0 * anc + 0) * d + sc);
            ch.kraus.push_back(std::move(k));
        }
    return compress_kraus(ch);
}

std::pair<QuantumChannel, double> channel_from_block(const BlockEncoding& be, const CMatrix& v_target) {
    if (v_target.rows != be.system_dim || !v_target.square())
        throw std::invalid_argument("channel_from_block: dimension mismatch");
    const int anc = 1 << be.ancillas_m;
    const int d = be.system_dim;
    QuantumChannel ch;
    for (int a = 0; a < anc; ++a) {
        CMatrix k(d, d);
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) k(r, c) = be.unitary(a * d + r, 0 * d + c);
        ch.kraus.push_back(std::move(k));
    }
    const double bound = 4.0 * spectral_norm(encoded_block(be) - v_target);
    return {ch, bound};
}

double diamond_distance_unitary(const CMatrix& u, const CMatrix& v) {
    if (u.rows != v.rows || !u.square() || !v.square())
        throw std::invalid_argument("diamond_distance_unitary: dimension mismatch");
    if (unitarity_defect(u) > 1e-8 || unitarity_defect(v) > 1e-8)
        throw std::invalid_argument("diamond_distance_unitary: inputs must be unitary");
    const UnitaryEig w = eig_unitary(dagger(u) * v);
    std::vector<double> angles(w.phases.size());
    constexpr double two_pi = 6.283185307179586476925286766559;
    for (size_t i = 0; i < angles.size(); ++i) angles[i] = two_pi * w.phases[i];
    const double dist = hull_distance_origin(angles);
    return 2.0 * std::sqrt(std::max(0.0, 1.0 - dist * dist));
}

double trace_distance(const CMatrix& rho, const CMatrix& sigma) {
    check_density(rho, 1e-8);
    check_density(sigma, 1e-8);
    if (rho.rows != sigma.rows) throw std::invalid_argument("trace_distance: dimension mismatch");
    return 0.5 * trace_norm(rho - sigma);
}

}  // namespace qest
