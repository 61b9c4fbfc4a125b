#include "qest/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qest {

namespace {

// One-sided Jacobi on the columns of g, accumulating rotations into v.
// On exit the columns of g are mutually orthogonal.
void orthogonalize_columns(CMatrix& g, CMatrix& v) {
    const int n = g.cols;
    for (int sweep = 0; sweep < 60; ++sweep) {
        bool changed = false;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                double hpp = 0.0, hqq = 0.0;
                cplx hpq = 0.0;
                for (int i = 0; i < g.rows; ++i) {
                    hpp += std::norm(g(i, p));
                    hqq += std::norm(g(i, q));
                    hpq += std::conj(g(i, p)) * g(i, q);
                }
                const double off = std::abs(hpq);
                if (off <= 1e-15 * std::sqrt(hpp * hqq) || hpp == 0.0 || hqq == 0.0) continue;
                changed = true;
                const cplx phase = hpq / off;
                // Rotate the phase out of column q, then apply a real rotation.
                for (int i = 0; i < g.rows; ++i) g(i, q) *= std::conj(phase);
                for (int i = 0; i < v.rows; ++i) v(i, q) *= std::conj(phase);
                const double tau = (hqq - hpp) / (2.0 * off);
                const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (int i = 0; i < g.rows; ++i) {
                    const cplx gp = g(i, p), gq = g(i, q);
                    g(i, p) = c * gp - s * gq;
                    g(i, q) = s * gp + c * gq;
                }
                for (int i = 0; i < v.rows; ++i) {
                    const cplx vp = v(i, p), vq = v(i, q);
                    v(i, p) = c * vp - s * vq;
                    v(i, q) = s * vp + c * vq;
                }
            }
        }
        if (!changed) break;
    }
}

// Extend the orthonormal set held in the first `have` columns of u to a full basis.
void complete_basis(CMatrix& u, int have) {
    const int n = u.rows;
    int next = have;
    for (int e = 0; e < n && next < n; ++e) {
        CVector cand(n);
        cand[e] = 1.0;
        for (int rep = 0; rep < 2; ++rep) {
            for (int j = 0; j < next; ++j) {
                cplx ov = 0.0;
                for (int i = 0; i < n; ++i) ov += std::conj(u(i, j)) * cand[i];
                for (int i = 0; i < n; ++i) cand[i] -= ov * u(i, j);
            }
        }
        const double nn = norm(cand);
        if (nn < 1e-7) continue;
        for (int i = 0; i < n; ++i) u(i, next) = cand[i] / nn;
        ++next;
    }
    if (next != n) throw std::runtime_error("basis completion failed");
}

}  // namespace

SvdResult svd(const CMatrix& m) {
    if (!all_finite(m)) throw std::invalid_argument("svd: non-finite entries");
    if (m.rows < m.cols) {
        SvdResult t = svd(dagger(m));
        return SvdResult{t.v, t.s, t.u};
    }
    CMatrix g = m;
    CMatrix v = CMatrix::identity(m.cols);
    orthogonalize_columns(g, v);

    const int n = m.cols;
    std::vector<double> s(n);
    for (int j = 0; j < n; ++j) {
        double nn = 0.0;
        for (int i = 0; i < g.rows; ++i) nn += std::norm(g(i, j));
        s[j] = std::sqrt(nn);
    }
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return s[x] > s[y]; });

    CMatrix u(m.rows, m.rows);
    CMatrix vs(m.cols, m.cols);
    std::vector<double> ss(n);
    const double rank_tol = 1e-13 * std::max(1.0, s.empty() ? 0.0 : s[order[0]]);
    int have = 0;
    for (int j = 0; j < n; ++j) {
        const int src = order[j];
        ss[j] = s[src];
        for (int i = 0; i < m.cols; ++i) vs(i, j) = v(i, src);
        if (s[src] > rank_tol) {
            for (int i = 0; i < m.rows; ++i) u(i, j) = g(i, src) / s[src];
            have = j + 1;
        }
    }
    for (int j = have; j < n; ++j) ss[j] = s[order[j]];
    complete_basis(u, have);
    return SvdResult{u, ss, vs};
}

double spectral_norm(const CMatrix& m) {
    if (!all_finite(m)) throw std::invalid_argument("spectral_norm: non-finite entries");
    if (m.rows == 0 || m.cols == 0) return 0.0;
    return svd(m).s[0];
}

double trace_norm(const CMatrix& m) {
    const auto d = svd(m);
    double t = 0.0;
    for (double x : d.s) t += x;
    return t;
}

HermEig eig_hermitian(const CMatrix& h) {
    if (!h.square()) throw std::invalid_argument("eig_hermitian: not square");
    const int n = h.rows;
    CMatrix a = h;
    // Symmetrize to damp representation noise.
    {
        CMatrix hd = dagger(h);
        for (size_t i = 0; i < a.a.size(); ++i) a.a[i] = 0.5 * (a.a[i] + hd.a[i]);
    }
    CMatrix v = CMatrix::identity(n);
    const double scale = std::max(1.0, max_abs(a));
    for (int sweep = 0; sweep < 80; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off = std::max(off, std::abs(a(p, q)));
        if (off <= 1e-15 * scale) break;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = std::abs(a(p, q));
                if (apq <= 1e-16 * scale) continue;
                const cplx phase = a(p, q) / apq;
                // Column/row phase so the pivot entry becomes real.
                for (int i = 0; i < n; ++i) a(i, q) *= std::conj(phase);
                for (int i = 0; i < n; ++i) a(q, i) *= phase;
                for (int i = 0; i < n; ++i) v(i, q) *= std::conj(phase);
                const double app = a(p, p).real(), aqq = a(q, q).real();
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (int i = 0; i < n; ++i) {
                    const cplx aip = a(i, p), aiq = a(i, q);
                    a(i, p) = c * aip - s * aiq;
                    a(i, q) = s * aip + c * aiq;
                }
                for (int i = 0; i < n; ++i) {
                    const cplx api = a(p, i), aqi = a(q, i);
                    a(p, i) = c * api - s * aqi;
                    a(q, i) = s * api + c * aqi;
                }
                for (int i = 0; i < n; ++i) {
                    const cplx vip = v(i, p), viq = v(i, q);
                    v(i, p) = c * vip - s * viq;
                    v(i, q) = s * vip + c * viq;
                }
            }
        }
    }
    std::vector<double> vals(n);
    for (int i = 0; i < n; ++i) vals[i] = a(i, i).real();
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return vals[x] < vals[y]; });
    HermEig out;
    out.vals.resize(n);
    out.vecs = CMatrix(n, n);
    for (int j = 0; j < n; ++j) {
        out.vals[j] = vals[order[j]];
        for (int i = 0; i < n; ++i) out.vecs(i, j) = v(i, order[j]);
    }
    return out;
}

double unitarity_defect(const CMatrix& u) {
    if (!u.square()) return 1e300;
    return spectral_norm(dagger(u) * u - CMatrix::identity(u.rows));
}

UnitaryEig eig_unitary(const CMatrix& u, double tol) {
    if (!u.square()) throw std::invalid_argument("eig_unitary: not square");
    if (unitarity_defect(u) > std::max(tol, 1e-8))
        throw std::invalid_argument("eig_unitary: input is not unitary");
    const int n = u.rows;
    const CMatrix ud = dagger(u);
    CMatrix re(n, n), im(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            re(i, j) = 0.5 * (u(i, j) + ud(i, j));
            im(i, j) = cplx(0.0, -0.5) * (u(i, j) - ud(i, j));
        }
    HermEig er = eig_hermitian(re);
    // Split clusters of the cosine part with the sine part.
    CMatrix basis = er.vecs;
    int start = 0;
    while (start < n) {
        int end = start + 1;
        while (end < n && std::abs(er.vals[end] - er.vals[start]) < 1e-9) ++end;
        const int w = end - start;
        if (w > 1) {
            CMatrix sub(w, w);
            CMatrix cluster(n, w);
            for (int j = 0; j < w; ++j)
                for (int i = 0; i < n; ++i) cluster(i, j) = basis(i, start + j);
            CMatrix tmp = im * cluster;
            sub = dagger(cluster) * tmp;
            HermEig es = eig_hermitian(sub);
            CMatrix rotated = cluster * es.vecs;
            for (int j = 0; j < w; ++j)
                for (int i = 0; i < n; ++i) basis(i, start + j) = rotated(i, j);
        }
        start = end;
    }
    UnitaryEig out;
    out.basis = basis;
    out.phases.resize(n);
    constexpr double two_pi = 6.283185307179586476925286766559;
    for (int j = 0; j < n; ++j) {
        CVector v = column(basis, j);
        CVector uv = u * v;
        const cplx ev = inner(v, uv);
        double ph = std::atan2(ev.imag(), ev.real()) / two_pi;
        ph -= std::floor(ph);
        if (ph >= 1.0) ph = 0.0;
        out.phases[j] = ph;
        // Residual check against the requested tolerance.
        CVector resid = uv;
        const cplx lam = std::polar(1.0, two_pi * ph);
        for (int i = 0; i < n; ++i) resid[i] -= lam * v[i];
        if (norm(resid) > 64.0 * std::max(tol, 1e-10))
            throw std::runtime_error("eig_unitary: residual too large");
    }
    return out;
}

CMatrix sqrt_psd(const CMatrix& h) {
    HermEig e = eig_hermitian(h);
    const int n = h.rows;
    CMatrix d(n, n);
    for (int i = 0; i < n; ++i) d(i, i) = std::sqrt(std::max(0.0, e.vals[i]));
    return e.vecs * d * dagger(e.vecs);
}

CMatrix haar_unitary(int dim, std::mt19937_64& rng) {
    CMatrix g = random_gaussian(dim, dim, rng);
    // Modified Gram-Schmidt with the usual phase fix on the diagonal of R.
    CMatrix q(dim, dim);
    for (int j = 0; j < dim; ++j) {
        CVector col = column(g, j);
        for (int rep = 0; rep < 2; ++rep) {
            for (int k = 0; k < j; ++k) {
                cplx ov = 0.0;
                for (int i = 0; i < dim; ++i) ov += std::conj(q(i, k)) * col[i];
                for (int i = 0; i < dim; ++i) col[i] -= ov * q(i, k);
            }
        }
        cplx rjj = 0.0;
        {
            CVector raw = column(g, j);
            // diagonal of R before the phase fix
            double nn = norm(col);
            cplx ph = 0.0;
            for (int i = 0; i < dim; ++i) ph += std::conj(col[i]) * raw[i];
            rjj = (std::abs(ph) > 0) ? ph / std::abs(ph) : cplx(1.0, 0.0);
            for (int i = 0; i < dim; ++i) q(i, j) = col[i] / nn * rjj;
        }
    }
    return q;
}

double hull_distance_origin(const std::vector<double>& thetas) {
    if (thetas.empty()) throw std::invalid_argument("hull_distance_origin: empty");
    constexpr double pi = 3.14159265358979323846;
    std::vector<double> t = thetas;
    for (auto& x : t) {
        x = std::fmod(x, 2.0 * pi);
        if (x < 0) x += 2.0 * pi;
    }
    std::sort(t.begin(), t.end());
    double gmax = 2.0 * pi - t.back() + t.front();
    for (size_t i = 1; i < t.size(); ++i) gmax = std::max(gmax, t[i] - t[i - 1]);
    if (gmax <= pi + 1e-12) return 0.0;
    return std::max(0.0, -std::cos(0.5 * gmax));
}

}  // namespace qest
