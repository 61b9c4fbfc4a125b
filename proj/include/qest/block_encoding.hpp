#pragma once

#include <utility>
#include <vector>

#include "qest/linalg.hpp"
#include "qest/matrix.hpp"
#include "qest/polynomials.hpp"

namespace qest {

/// Unitary on (2^ancillas_m) x system_dim whose top-left block (projection of
/// the ancilla register onto |0..0>) is the encoded operator.
struct BlockEncoding {
    CMatrix unitary;
    int ancillas_m = 0;
    int system_dim = 1;
};

BlockEncoding make_block_encoding(CMatrix u, int ancillas_m, int system_dim, double tol = 1e-9);
BlockEncoding trivial_encoding(const CMatrix& u);

CMatrix encoded_block(const BlockEncoding& be);

/// One-ancilla dilation [[M, sqrt(I-MM+)], [sqrt(I-M+M), -M+]] of a contraction.
BlockEncoding dilate(const CMatrix& m);

/// Re-embed with a larger ancilla register (block unchanged).
BlockEncoding pad_ancillas(const BlockEncoding& be, int ancillas_m);

/// Block = sum_i weight_i * block_i; weights >= 0, sum <= 1 (+1e-12).
/// All terms must share system_dim and ancilla count (pad first if needed).
BlockEncoding lcu_combine(const std::vector<std::pair<double, BlockEncoding>>& terms);

/// Block = block_a * block_b.
BlockEncoding be_product(const BlockEncoding& a, const BlockEncoding& b);

struct SvtResult {
    BlockEncoding be;        // one ancilla
    long long query_cost;    // deg(p) queries to the input encoding
};

/// Matrix-level singular value transformation with an even bounded polynomial.
SvtResult apply_svt(const BlockEncoding& be, const PolyFn& p);

struct QuantumChannel {
    std::vector<CMatrix> kraus;
    int dim() const { return kraus.empty() ? 0 : kraus.front().rows; }
};

bool is_trace_preserving(const QuantumChannel& ch, double tol = 1e-8);
CMatrix apply_channel(const QuantumChannel& ch, const CMatrix& rho);
QuantumChannel compose(const QuantumChannel& second, const QuantumChannel& first);
QuantumChannel compress_kraus(const QuantumChannel& ch, double tol = 1e-14);

/// Channel on flag x system writing the block-encoded (approximate) projector
/// outcome into the flag qubit; two queries to the encoding.
QuantumChannel block_measure(const BlockEncoding& be_a);

/// Run the encoding on |0^m> ancillas and trace them out; the returned bound
/// is 4 * ||block - v_target|| on the diamond-norm distance to v_target.
std::pair<QuantumChannel, double> channel_from_block(const BlockEncoding& be, const CMatrix& v_target);

/// Exact diamond distance between the conjugation channels of two unitaries.
double diamond_distance_unitary(const CMatrix& u, const CMatrix& v);

/// (1/2) || rho - sigma ||_1 for density operators.
double trace_distance(const CMatrix& rho, const CMatrix& sigma);

}  // namespace qest
