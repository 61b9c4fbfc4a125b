#pragma once

#include "qest/matrix.hpp"

namespace qest {

/// m = u * diag(s) * dagger(v); u, v square unitary; s sorted descending.
struct SvdResult {
    CMatrix u;
    std::vector<double> s;
    CMatrix v;
};

SvdResult svd(const CMatrix& m);
double spectral_norm(const CMatrix& m);
double trace_norm(const CMatrix& m);

struct HermEig {
    std::vector<double> vals;   // ascending
    CMatrix vecs;               // columns are eigenvectors
};

HermEig eig_hermitian(const CMatrix& h);

struct UnitaryEig {
    std::vector<double> phases;  // in [0, 1); U v_j = exp(2*pi*i*phases[j]) v_j
    CMatrix basis;
};

UnitaryEig eig_unitary(const CMatrix& u, double tol = 1e-8);

/// ||dagger(u) u - I||, spectral.
double unitarity_defect(const CMatrix& u);

/// Principal square root of a hermitian PSD matrix (negative eigenvalues clamped).
CMatrix sqrt_psd(const CMatrix& h);

CMatrix haar_unitary(int dim, std::mt19937_64& rng);

/// Distance from the origin to the convex hull of the points exp(i*theta).
double hull_distance_origin(const std::vector<double>& thetas);

}  // namespace qest
