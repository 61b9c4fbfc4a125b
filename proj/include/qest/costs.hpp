#pragma once

#include <string>
#include <vector>

namespace qest {

enum class Algorithm { textbook_pe, improved_pe, textbook_ee, improved_ee };
std::string algorithm_name(Algorithm alg);

struct CostKnobs {
    double m_svt = 6.0;
    double m_cos = 3.0;
    int block_ancillas_a = 1;
    bool uncompute_pe = false;
};

struct CostReport {
    Algorithm algorithm = Algorithm::textbook_pe;
    int n = 0;
    double alpha = 0.0;
    double delta = 0.0;
    long long queries = 0;
    long long garbage_qubits = 0;
    long long ancilla_qubits = 0;
};

struct TextbookParams {
    int r = 0;
    double eta = 0.0;
    double delta_med = 0.0;
    long long m_reps = 0;
};

TextbookParams textbook_params(double alpha, double delta);

long long pe_bit_query_cost(int n, int k, double alpha, double delta, double m_svt = 6.0);
long long ee_bit_query_cost(int n, int k, double alpha, double delta, double m_cos = 3.0, double m_svt = 6.0);

CostReport cost_textbook_pe(int n, double alpha, double delta);
CostReport cost_improved_pe(int n, double alpha, double delta, const CostKnobs& knobs = {});
CostReport cost_textbook_ee(int n, double alpha, double delta, const CostKnobs& knobs = {});
CostReport cost_improved_ee(int n, double alpha, double delta, const CostKnobs& knobs = {});
CostReport cost_for(Algorithm alg, int n, double alpha, double delta, const CostKnobs& knobs = {});

struct SweepPoint {
    int n = 0;
    double alpha = 0.0;
    double delta = 0.0;
};

/// Deterministic CSV with header
/// algorithm,n,alpha,delta,queries,garbage_qubits,ancillas,speedup_vs_textbook.
std::string sweep_csv(const std::vector<SweepPoint>& grid, const std::vector<Algorithm>& algorithms,
                      const CostKnobs& knobs, const std::string& version, const std::string& config_echo);

std::vector<SweepPoint> figure4_grid();
std::vector<SweepPoint> figure5_grid();

}  // namespace qest
