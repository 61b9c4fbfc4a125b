#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace qest {

using cplx = std::complex<double>;

/// Dense complex matrix, row-major.
struct CMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<cplx> a;

    CMatrix() = default;
    CMatrix(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c) {
        if (r < 0 || c < 0) throw std::invalid_argument("CMatrix: negative dimension");
    }

    cplx& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    const cplx& operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

    bool square() const { return rows == cols; }

    static CMatrix identity(int n);
    static CMatrix zero(int r, int c);
};

struct CVector {
    int dim = 0;
    std::vector<cplx> a;

    CVector() = default;
    explicit CVector(int d) : dim(d), a(static_cast<size_t>(d)) {}

    cplx& operator[](int i) { return a[static_cast<size_t>(i)]; }
    const cplx& operator[](int i) const { return a[static_cast<size_t>(i)]; }
};

CMatrix operator+(const CMatrix& x, const CMatrix& y);
CMatrix operator-(const CMatrix& x, const CMatrix& y);
CMatrix operator*(const CMatrix& x, const CMatrix& y);
CMatrix operator*(cplx s, const CMatrix& x);
CVector operator*(const CMatrix& m, const CVector& v);

CMatrix dagger(const CMatrix& m);
CMatrix kron(const CMatrix& x, const CMatrix& y);
cplx trace(const CMatrix& m);
double fro_norm(const CMatrix& m);
double max_abs(const CMatrix& m);
bool all_finite(const CMatrix& m);

double norm(const CVector& v);
CVector normalized(const CVector& v);
cplx inner(const CVector& x, const CVector& y);  // <x|y>
CMatrix outer(const CVector& x, const CVector& y);  // |x><y|
CVector column(const CMatrix& m, int j);

/// rho acts on A (dim da) tensor B (dim db); trace out A.
CMatrix partial_trace_first(const CMatrix& rho, int da, int db);
/// Trace out B.
CMatrix partial_trace_last(const CMatrix& rho, int da, int db);

CMatrix random_gaussian(int r, int c, std::mt19937_64& rng);

}  // namespace qest
