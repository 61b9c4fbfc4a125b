#include <cmath>

#include <random>
#include "doctest.h"
#include "qest/block_encoding.hpp"

using namespace qest;

namespace {
constexpr double kPi = 3.14159265358979323846;

CMatrix pauli_z() {
    CMatrix z(2, 2);
    z(0, 0) = 1.0;
    z(1, 1) = -1.0;
    return z;
}
}  // namespace

TEST_SUITE_BEGIN("blockenc");

TEST_CASE("a unitary is a trivial block-encoding of itself") {
    std::mt19937_64 rng(31);
    CMatrix u = haar_unitary(4, rng);
    BlockEncoding be = trivial_encoding(u);
    CHECK(be.ancillas_m == 0);
    CHECK(max_abs(encoded_block(be) - u) <= 1e-12);
}

TEST_CASE("dilation block and unitarity") {
    CMatrix half = cplx(0.5, 0.0) * CMatrix::identity(2);
    BlockEncoding be = dilate(half);
    CHECK(be.ancillas_m == 1);
    CHECK(max_abs(encoded_block(be) - half) <= 1e-12);
    CHECK(unitarity_defect(be.unitary) <= 1e-9);

    CMatrix d(2, 2);
    d(0, 0) = 0.6;
    d(1, 1) = 0.8;
    CHECK(max_abs(encoded_block(dilate(d)) - d) <= 1e-12);

    // Zero block: off-diagonal swap structure.
    BlockEncoding z = dilate(CMatrix::zero(2, 2));
    CHECK(max_abs(encoded_block(z)) <= 1e-12);

    // Unitary input: off-diagonal blocks vanish.
    std::mt19937_64 rng(32);
    CMatrix u = haar_unitary(3, rng);
    BlockEncoding bu = dilate(u);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            CHECK(std::abs(bu.unitary(i, 3 + j)) <= 1e-7);
            CHECK(std::abs(bu.unitary(3 + i, j)) <= 1e-7);
        }

    CMatrix big = cplx(1.5, 0.0) * CMatrix::identity(2);
    CHECK_THROWS_AS(dilate(big), std::invalid_argument);
}

TEST_CASE("lcu of a unitary with the identity halves the phase") {
    std::mt19937_64 rng(33);
    const double lam = 0.37;
    CMatrix u(2, 2);
    u(0, 0) = std::polar(1.0, 2.0 * kPi * lam);
    u(1, 1) = std::polar(1.0, 2.0 * kPi * 0.81);
    BlockEncoding be = lcu_combine({{0.5, trivial_encoding(u)}, {0.5, trivial_encoding(CMatrix::identity(2))}});
    CHECK(be.ancillas_m == 1);
    const CMatrix block = encoded_block(be);
    const cplx expect = std::cos(kPi * lam) * std::polar(1.0, kPi * lam);
    CHECK(std::abs(block(0, 0) - expect) <= 1e-10);
}

TEST_CASE("lcu with a single unit-weight term keeps the block") {
    std::mt19937_64 rng(34);
    CMatrix u = haar_unitary(2, rng);
    BlockEncoding be = lcu_combine({{1.0, trivial_encoding(u)}});
    CHECK(be.ancillas_m == 1);
    CHECK(max_abs(encoded_block(be) - u) <= 1e-10);
}

TEST_CASE("lcu weight validation and sub-unit totals") {
    CMatrix id = CMatrix::identity(2);
    CHECK_THROWS_AS(lcu_combine({{0.8, trivial_encoding(id)}, {0.4, trivial_encoding(id)}}),
                    std::invalid_argument);
    BlockEncoding be = lcu_combine({{0.25, trivial_encoding(id)}});
    CHECK(max_abs(encoded_block(be) - cplx(0.25, 0.0) * id) <= 1e-10);
}

TEST_CASE("block-encoding product multiplies blocks") {
    std::mt19937_64 rng(35);
    CMatrix a(2, 2), b(2, 2);
    a(0, 0) = 0.3;
    a(1, 1) = 0.9;
    b = cplx(0.5, 0.0) * haar_unitary(2, rng);
    BlockEncoding prod = be_product(dilate(a), dilate(b));
    CHECK(prod.ancillas_m == 2);
    CHECK(max_abs(encoded_block(prod) - a * b) <= 1e-9);
}

TEST_CASE("apply_svt squares a diagonal block") {
    CMatrix a(1, 1);
    a(0, 0) = 0.5;
    PolyFn sq{[](double x) { return x * x; }, 2, Parity::even};
    SvtResult res = apply_svt(dilate(a), sq);
    CHECK(res.query_cost == 2);
    CHECK(std::abs(encoded_block(res.be)(0, 0) - cplx(0.25, 0.0)) <= 1e-10);
    CHECK(res.be.ancillas_m == 1);
}

TEST_CASE("apply_svt acts on singular values in the right eigenbasis") {
    std::mt19937_64 rng(36);
    CMatrix basis = haar_unitary(3, rng);
    CMatrix a(3, 3);
    const double evs[3] = {0.9, 0.4, 0.1};
    for (int j = 0; j < 3; ++j) {
        CVector v = column(basis, j);
        a = a + cplx(evs[j], 0.0) * outer(v, v);
    }
    PolyFn sq{[](double x) { return x * x; }, 2, Parity::even};
    CMatrix block = encoded_block(apply_svt(dilate(a), sq).be);
    CMatrix expect(3, 3);
    for (int j = 0; j < 3; ++j) {
        CVector v = column(basis, j);
        expect = expect + cplx(evs[j] * evs[j], 0.0) * outer(v, v);
    }
    CHECK(max_abs(block - expect) <= 1e-9);
    PolyFn odd{[](double x) { return x; }, 1, Parity::odd};
    CHECK_THROWS_AS(apply_svt(dilate(a), odd), std::invalid_argument);
}

TEST_CASE("block_measure with an exact projector acts as the flag unitary") {
    CMatrix proj(2, 2);
    proj(1, 1) = 1.0;  // |1><1|
    QuantumChannel ch = block_measure(dilate(proj));
    CHECK(is_trace_preserving(ch));
    // |0> flag, |1> system -> flag flips to |1|, system stays.
    CVector in(4);
    in[1] = 1.0;  // flag 0, sys 1
    CMatrix rho_out = apply_channel(ch, outer(in, in));
    CHECK(rho_out(3, 3).real() == doctest::Approx(1.0).epsilon(1e-9));
    // |0> system stays with flag |0>.
    CVector in0(4);
    in0[0] = 1.0;
    CMatrix rho0 = apply_channel(ch, outer(in0, in0));
    CHECK(rho0(0, 0).real() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("block_measure of the zero block leaves the flag at |0>") {
    QuantumChannel ch = block_measure(dilate(CMatrix::zero(2, 2)));
    std::mt19937_64 rng(37);
    CVector s(2);
    std::normal_distribution<double> g(0.0, 1.0);
    for (auto& x : s.a) x = cplx(g(rng), g(rng));
    s = normalized(s);
    CVector in(4);
    for (int i = 0; i < 2; ++i) in[i] = s[i];
    CMatrix rho_out = apply_channel(ch, outer(in, in));
    CMatrix flag = partial_trace_last(rho_out, 2, 2);
    CHECK(flag(0, 0).real() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("channel_from_block bounds") {
    std::mt19937_64 rng(38);
    CMatrix v = haar_unitary(3, rng);
    auto [ch, bound] = channel_from_block(trivial_encoding(v), v);
    CHECK(bound <= 1e-10);
    CHECK(ch.kraus.size() == 1);

    const double eps = 0.03;
    CMatrix a = cplx(1.0 - eps, 0.0) * v;
    auto [ch2, bound2] = channel_from_block(dilate(a), v);
    CHECK(bound2 == doctest::Approx(4.0 * eps).epsilon(1e-6));
    CHECK(is_trace_preserving(ch2));
}

TEST_CASE("diamond distance closed form") {
    std::mt19937_64 rng(39);
    CMatrix u = haar_unitary(3, rng);
    CHECK(diamond_distance_unitary(u, u) <= 1e-7);
    CHECK(diamond_distance_unitary(CMatrix::identity(2), pauli_z()) == doctest::Approx(2.0).epsilon(1e-9));
    CMatrix phase = std::polar(1.0, 0.7) * CMatrix::identity(3);
    CHECK(diamond_distance_unitary(CMatrix::identity(3), phase) <= 1e-7);
    CHECK_THROWS_AS(diamond_distance_unitary(cplx(2.0, 0.0) * u, u), std::invalid_argument);
}

TEST_CASE("diamond distance is bounded by twice the spectral distance") {
    std::mt19937_64 rng(40);
    for (int rep = 0; rep < 50; ++rep) {
        const int dim = 2 + static_cast<int>(rng() % 15);
        CMatrix u = haar_unitary(dim, rng), v = haar_unitary(dim, rng);
        CHECK(diamond_distance_unitary(u, v) <= 2.0 * spectral_norm(u - v) + 1e-9);
    }
}

TEST_CASE("trace distance basics and identity channel") {
    CMatrix r0(2, 2), r1(2, 2);
    r0(0, 0) = 1.0;
    r1(1, 1) = 1.0;
    CHECK(trace_distance(r0, r0) == doctest::Approx(0.0));
    CHECK(trace_distance(r0, r1) == doctest::Approx(1.0));
    QuantumChannel idch;
    idch.kraus.push_back(CMatrix::identity(2));
    CHECK(max_abs(apply_channel(idch, r0) - r0) <= 1e-14);
    CMatrix bad(2, 2);
    bad(0, 0) = 2.0;
    CHECK_THROWS_AS(trace_distance(bad, r0), std::invalid_argument);
}

TEST_CASE("kraus compression preserves the channel") {
    std::mt19937_64 rng(41);
    QuantumChannel ch = block_measure(dilate(cplx(0.5, 0.0) * haar_unitary(2, rng)));
    QuantumChannel packed = compress_kraus(ch);
    CHECK(packed.kraus.size() <= ch.kraus.size());
    CVector in(4);
    in[0] = 0.4;
    in[1] = std::sqrt(1.0 - 0.16);
    CMatrix rho = outer(in, in);
    CHECK(max_abs(apply_channel(ch, rho) - apply_channel(packed, rho)) <= 1e-10);
}

TEST_SUITE_END();
