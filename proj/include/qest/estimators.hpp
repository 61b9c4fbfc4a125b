#pragma once

#include <cstdint>
#include <string>

#include "qest/block_encoding.hpp"

namespace qest {

enum class SpectrumKind { unitary, hamiltonian };

/// Spectrum staying clear of the intervals [x/2^n, x/2^n + alpha/2^n].
struct RoundingPromiseInstance {
    int n_bits = 1;
    double alpha = 0.5;
    std::vector<double> lambdas;
    CMatrix eigenbasis;
    SpectrumKind kind = SpectrumKind::unitary;
    std::uint64_t seed = 0;

    int dim() const { return static_cast<int>(lambdas.size()); }
    CMatrix unitary() const;
    CMatrix hamiltonian() const;
};

RoundingPromiseInstance gen_instance(int n, double alpha, int dim, std::uint64_t seed, SpectrumKind kind);
bool verify_promise(const RoundingPromiseInstance& inst);
/// Moves lambda[which] to the middle of its nearest excluded interval.
void inject_gap_violation(RoundingPromiseInstance& inst, int which = 0);

int floor_estimate(double lambda, int n);
int bit_k(double lambda, int n, int k);

struct EstimatorFlavor {
    bool with_phases = false;
    bool with_garbage = false;
    int garbage_qubits = 0;
};

struct EstimationReport {
    std::string algorithm;
    int n = 0;
    double alpha = 0.0;
    double delta = 0.0;
    long long query_count = 0;
    EstimatorFlavor flavor;
    std::vector<double> per_eigenstate_success;
    double coherence_fidelity = 0.0;
    std::uint64_t seed = 0;
};

std::string report_to_json(const EstimationReport& rep, const std::string& tool_version,
                           const std::string& config_echo);

// Interval-gap parameters shared by the iterative estimators and the cost model.
double eta_linear(int k, double alpha);
double eta_refined(int k, double alpha);
double phi_shift(int k, double alpha);

struct TextbookPeResult {
    QuantumChannel channel;  // measure-and-prepare representative on answer x system
    EstimationReport report;
};

/// Fourier-comb estimator with median amplification. Dense simulation is
/// limited to n+r <= 6 and M <= 64; beyond that only the cost model applies.
TextbookPeResult textbook_pe(const RoundingPromiseInstance& inst, double delta);

/// Probability lower bound sin^2(pi x) / (pi x)^2 for a single comb estimate.
double textbook_gamma(double x);
inline constexpr double kTextbookEta0 = 8.0 / (3.14159265358979323846 * 3.14159265358979323846) - 0.5;

struct PeBitResult {
    CMatrix unitary;  // on flag x Delta_k x system; flag is the output bit
    QuantumChannel channel;
    long long query_count = 0;
    EstimatorFlavor flavor;
};

PeBitResult iterative_pe_bit(const RoundingPromiseInstance& inst, int k, double delta, double m_svt = 6.0);

/// The one-ancilla signal unitary whose block has singular values
/// |cos(pi lambda^{(k)})| on the Delta_k x system sectors.
CMatrix pe_signal_unitary(const RoundingPromiseInstance& inst, int k);

/// Shifted eigenvalue 2^{n-k-1} (lambda - Delta/2^n) + phi_k.
double lambda_bit_value(double lambda, int delta_reg, int n, int k, double alpha);

struct EeBitResult {
    CMatrix unitary;  // on out x garbage x Delta_k x system
    QuantumChannel channel;
    long long query_count = 0;
    EstimatorFlavor flavor;
    std::vector<std::vector<double>> sector_amp;  // [Delta][j] success amplitude
};

EeBitResult iterative_ee_bit(const RoundingPromiseInstance& inst, int k, double delta, double m_cos = 3.0,
                             double m_svt = 6.0);

/// Linear combination (1/2) H - (1/4) W_k + phi_k 2^{k-n} I on Delta_k x system.
BlockEncoding ee_hk_encoding(const RoundingPromiseInstance& inst, int k, const BlockEncoding& be_h);

/// Per-bit uncompute of an energy-estimation bit, reduced over the garbage
/// register; acts on bit x Delta_k x system.
QuantumChannel uncomputed_ee_bit(const RoundingPromiseInstance& inst, const EeBitResult& bit, int k);

/// Composes per-bit unitaries (flag becomes the next answer bit); channels must
/// be built with the geometric budgets delta * 2^{-k-1}.
CMatrix stitch_pe(const std::vector<PeBitResult>& bits, int n, int system_dim);

struct UnitaryEstimator {
    CMatrix v;  // on answer x garbage x rest
    int ans_dim = 1;
    int gar_dim = 1;
    int rest_dim = 1;
};

/// Copy-out, inverse, discard. Output channel acts on answer x rest; the
/// caller doubles the query count and halves the budget.
QuantumChannel uncompute(const UnitaryEstimator& est);

struct ImprovedResult {
    QuantumChannel channel;
    EstimationReport report;
};

ImprovedResult improved_pe(const RoundingPromiseInstance& inst, double delta, bool do_uncompute = false,
                           double m_svt = 6.0);
ImprovedResult improved_ee(const RoundingPromiseInstance& inst, double delta, double m_cos = 3.0,
                           double m_svt = 6.0);

long long hamsim_query_cost(double t, double eps);

struct HamsimResult {
    QuantumChannel channel;
    double bound = 0.0;        // certified diamond-norm distance to exp(iHt)
    long long query_count = 0;
};

HamsimResult hamsim_channel(const BlockEncoding& be_h, double t, double eps);

struct AmplitudeResult {
    std::vector<double> estimate_distribution;  // over {0..2^n-1}
    long long query_count = 0;
    double post_fidelity = 0.0;
    double a_squared = 0.0;
    BlockEncoding be_a;
    EstimationReport report;
};

/// Non-destructive estimate of |Pi |Psi>|^2 from the two reflections.
AmplitudeResult amplitude_estimate(const CMatrix& r_pi, const CMatrix& r_psi, const CVector& psi, int n,
                                   double delta, double m_cos = 3.0, double m_svt = 6.0);

/// Block-encoding of 2 * sum_D (D / 2^n) |D><D| used by the energy estimator;
/// n ancillas, system dimension 2^k.
BlockEncoding less_significant_bits_encoding(int n, int k);

}  // namespace qest
