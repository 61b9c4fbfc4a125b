#include "qest/matrix.hpp"

#include <cmath>

namespace qest {

CMatrix CMatrix::identity(int n) {
    CMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

CMatrix CMatrix::zero(int r, int c) { return CMatrix(r, c); }

static void check_same_shape(const CMatrix& x, const CMatrix& y) {
    if (x.rows != y.rows || x.cols != y.cols)
        throw std::invalid_argument("matrix shape mismatch");
}

CMatrix operator+(const CMatrix& x, const CMatrix& y) {
    check_same_shape(x, y);
    CMatrix r = x;
    for (size_t i = 0; i < r.a.size(); ++i) r.a[i] += y.a[i];
    return r;
}

CMatrix operator-(const CMatrix& x, const CMatrix& y) {
    check_same_shape(x, y);
    CMatrix r = x;
    for (size_t i = 0; i < r.a.size(); ++i) r.a[i] -= y.a[i];
    return r;
}

CMatrix operator*(const CMatrix& x, const CMatrix& y) {
    if (x.cols != y.rows) throw std::invalid_argument("matrix product shape mismatch");
    CMatrix r(x.rows, y.cols);
    for (int i = 0; i < x.rows; ++i) {
        for (int k = 0; k < x.cols; ++k) {
            const cplx xv = x(i, k);
            if (xv == cplx(0.0, 0.0)) continue;
            const cplx* yrow = &y.a[static_cast<size_t>(k) * y.cols];
            cplx* rrow = &r.a[static_cast<size_t>(i) * r.cols];
            for (int j = 0; j < y.cols; ++j) rrow[j] += xv * yrow[j];
        }
    }
    return r;
}

CMatrix operator*(cplx s, const CMatrix& x) {
    CMatrix r = x;
    for (auto& v : r.a) v *= s;
    return r;
}

CVector operator*(const CMatrix& m, const CVector& v) {
    if (m.cols != v.dim) throw std::invalid_argument("matrix-vector shape mismatch");
    CVector r(m.rows);
    for (int i = 0; i < m.rows; ++i) {
        cplx acc = 0.0;
        for (int j = 0; j < m.cols; ++j) acc += m(i, j) * v[j];
        r[i] = acc;
    }
    return r;
}

CMatrix dagger(const CMatrix& m) {
    CMatrix r(m.cols, m.rows);
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) r(j, i) = std::conj(m(i, j));
    return r;
}

CMatrix kron(const CMatrix& x, const CMatrix& y) {
    CMatrix r(x.rows * y.rows, x.cols * y.cols);
    for (int i = 0; i < x.rows; ++i)
        for (int j = 0; j < x.cols; ++j) {
            const cplx xv = x(i, j);
            if (xv == cplx(0.0, 0.0)) continue;
            for (int k = 0; k < y.rows; ++k)
                for (int l = 0; l < y.cols; ++l)
                    r(i * y.rows + k, j * y.cols + l) = xv * y(k, l);
        }
    return r;
}

cplx trace(const CMatrix& m) {
    cplx t = 0.0;
    for (int i = 0; i < std::min(m.rows, m.cols); ++i) t += m(i, i);
    return t;
}

double fro_norm(const CMatrix& m) {
    double s = 0.0;
    for (const auto& v : m.a) s += std::norm(v);
    return std::sqrt(s);
}

double max_abs(const CMatrix& m) {
    double s = 0.0;
    for (const auto& v : m.a) s = std::max(s, std::abs(v));
    return s;
}

bool all_finite(const CMatrix& m) {
    for (const auto& v : m.a)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

double norm(const CVector& v) {
    double s = 0.0;
    for (const auto& x : v.a) s += std::norm(x);
    return std::sqrt(s);
}

CVector normalized(const CVector& v) {
    const double n = norm(v);
    if (n == 0.0) throw std::invalid_argument("cannot normalize zero vector");
    CVector r = v;
    for (auto& x : r.a) x /= n;
    return r;
}

cplx inner(const CVector& x, const CVector& y) {
    if (x.dim != y.dim) throw std::invalid_argument("inner: dim mismatch");
    cplx s = 0.0;
    for (int i = 0; i < x.dim; ++i) s += std::conj(x[i]) * y[i];
    return s;
}

CMatrix outer(const CVector& x, const CVector& y) {
    CMatrix r(x.dim, y.dim);
    for (int i = 0; i < x.dim; ++i)
        for (int j = 0; j < y.dim; ++j) r(i, j) = x[i] * std::conj(y[j]);
    return r;
}

CVector column(const CMatrix& m, int j) {
    CVector v(m.rows);
    for (int i = 0; i < m.rows; ++i) v[i] = m(i, j);
    return v;
}

CMatrix partial_trace_first(const CMatrix& rho, int da, int db) {
    if (rho.rows != da * db || rho.cols != da * db)
        throw std::invalid_argument("partial_trace: dimension mismatch");
    CMatrix r(db, db);
    for (int i = 0; i < db; ++i)
        for (int j = 0; j < db; ++j) {
            cplx s = 0.0;
            for (int k = 0; k < da; ++k) s += rho(k * db + i, k * db + j);
            r(i, j) = s;
        }
    return r;
}

CMatrix partial_trace_last(const CMatrix& rho, int da, int db) {
    if (rho.rows != da * db || rho.cols != da * db)
        throw std::invalid_argument("partial_trace: dimension mismatch");
    CMatrix r(da, da);
    for (int i = 0; i < da; ++i)
        for (int j = 0; j < da; ++j) {
            cplx s = 0.0;
            for (int k = 0; k < db; ++k) s += rho(i * db + k, j * db + k);
            r(i, j) = s;
        }
    return r;
}

CMatrix random_gaussian(int r, int c, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    CMatrix m(r, c);
    for (auto& v : m.a) v = cplx(gauss(rng), gauss(rng));
    return m;
}

}  // namespace qest
