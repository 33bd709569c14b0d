#include <doctest.h>

#include "cfbkit/cfb.hpp"

using namespace cfbkit;

namespace {

DiagonalKernel lk(double lam) { return lambda_kernel(lam, 8); }

CfbSpec two_block(double l1, double l2, AnalyticSymbol phi, int N = 16) {
    CfbSpec s;
    s.kernels = {lk(l1), lk(l2)};
    s.superdiag = {std::move(phi)};
    s.N = N;
    return s;
}

CfbSpec three_block() {
    CfbSpec s;
    s.kernels = {lk(1), lk(1), lk(1)};
    const auto phi = AnalyticSymbol::polynomial({-0.5, 1.0});
    s.superdiag = {phi, phi};
    s.N = 16;
    return s;
}

}  // namespace

TEST_CASE("single block is the truncated shift") {
    CfbSpec s;
    s.kernels = {lk(2)};
    s.N = 10;
    const auto T = build_cfb(s);
    CHECK(T.n() == 1);
    CHECK((T.assembled() - shift_from_kernel(lk(2), 10).matrix).norm() == 0.0);
    CHECK(T.h_evidence().empty());
    CHECK(T.edge().interior_dim == 9);
}

TEST_CASE("two blocks with a constant symbol") {
    const auto T = build_cfb(two_block(1, 2, AnalyticSymbol::constant(1.0)));
    CHECK(T.assembled().rows() == 32);
    CHECK((T.block(0, 0) - shift_from_kernel(lk(1), 16).matrix).norm() == 0.0);
    CHECK((T.block(1, 1) - shift_from_kernel(lk(2), 16).matrix).norm() == 0.0);
    CHECK(T.block(1, 0).norm() == 0.0);
    const Mat expect = symbol_operator(AnalyticSymbol::constant(1.0), lk(2), lk(1), 16);
    CHECK((T.block(0, 1) - expect).norm() == 0.0);
    REQUIRE(T.h_evidence().size() == 1);
    CHECK(T.h_evidence()[0].status == HStatus::Holds);
    const Mat r = T.block(0, 0) * T.block(0, 1) - T.block(0, 1) * T.block(1, 1);
    CHECK(r.topLeftCorner(15, 15).norm() <= 1e-13);
}

TEST_CASE("three blocks with a linear symbol") {
    const auto T = build_cfb(three_block());
    CHECK(T.n() == 3);
    CHECK(T.block(0, 2).norm() == 0.0);
    CHECK(T.edge().per_block.at({0, 2}) == 12);
    CHECK(T.edge().interior_dim == 12);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < i; ++j) CHECK(T.block(i, j).norm() == 0.0);
}

TEST_CASE("cofactors multiply the chain") {
    auto s = three_block();
    const auto psi = AnalyticSymbol::polynomial({0.0, 2.0});
    s.cofactors[{0, 2}] = psi;
    const auto T = build_cfb(s);
    const Mat expect = symbol_operator(psi, lk(1), lk(1), 16) * T.block(0, 1) * T.block(1, 2);
    CHECK((T.block(0, 2) - expect).norm() <= 1e-13);
    CHECK(T.edge().per_block.at({0, 2}) == 11);
    CHECK(T.cofactor(0, 2).degree() == 1);
    CHECK(T.cofactor(0, 1).is_zero());
}

TEST_CASE("construction rejections") {
    CHECK_THROWS_AS(build_cfb(CfbSpec{}), Error);
    auto bad = two_block(1, 2, AnalyticSymbol::constant(1.0));
    bad.superdiag.clear();
    CHECK_THROWS_AS(build_cfb(bad), Error);

    try {
        build_cfb(two_block(1, 3.5, AnalyticSymbol::constant(1.0)));
        FAIL("expected rejection");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ConstructionRejected);
    }

    auto idx = three_block();
    idx.cofactors[{0, 1}] = AnalyticSymbol::constant(1.0);
    try {
        build_cfb(idx);
        FAIL("expected index error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::IndexRange);
    }

    try {
        build_cfb(two_block(1, 2, AnalyticSymbol::polynomial({0, 0, 0, 0, 1}), 4));
        FAIL("expected truncation error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::TruncationInsufficient);
    }

    try {
        build_cfb(two_block(1, 2, AnalyticSymbol::polynomial({0, 0, 1}), 3));
        FAIL("expected empty interior");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ConstructionRejected);
    }
}

TEST_CASE("verification override builds without evidence") {
    auto s = two_block(1, 3.5, AnalyticSymbol::constant(1.0));
    s.verify = false;
    const auto T = build_cfb(s);
    CHECK(T.h_evidence()[0].status == HStatus::CriterionNotMet);

    auto e = two_block(1, 3.5, AnalyticSymbol::constant(1.0));
    PropertyHVerdict v;
    v.status = HStatus::Holds;
    e.h_evidence = {v};
    CHECK_NOTHROW(build_cfb(e));
    e.h_evidence = {v, v};
    CHECK_THROWS_AS(build_cfb(e), Error);
}

TEST_CASE("strong irreducibility") {
    const auto T = build_cfb(three_block());
    const auto si = strongly_irreducible(T);
    CHECK(si.strongly_irreducible);
    CHECK(!si.witness);

    auto s = three_block();
    s.superdiag[1] = AnalyticSymbol::constant(0.0);
    const auto R = strongly_irreducible(build_cfb(s));
    CHECK(!R.strongly_irreducible);
    REQUIRE(R.witness);
    CHECK(*R.witness == 1);
    REQUIRE(R.components.size() == 2);
    CHECK(R.components[0] == std::pair<int, int>{0, 1});
    CHECK(R.components[1] == std::pair<int, int>{2, 2});
    CHECK(R.coupling_norm == 0.0);

    auto c = s;
    c.cofactors[{0, 2}] = AnalyticSymbol::constant(1.0);
    CHECK(strongly_irreducible(build_cfb(c)).coupling_norm == 0.0);
}

TEST_CASE("strong irreducibility is unchanged by rescaling blocks") {
    for (cplx scale : {cplx(2.0), cplx(0.0, -3.0), cplx(1e-3)}) {
        auto s = three_block();
        for (auto& phi : s.superdiag) phi = phi.scaled(scale);
        CHECK(strongly_irreducible(build_cfb(s)).strongly_irreducible);
        s.superdiag[0] = AnalyticSymbol::constant(0.0);
        const auto r = strongly_irreducible(build_cfb(s));
        CHECK(!r.strongly_irreducible);
        CHECK(*r.witness == 0);
    }
}

TEST_CASE("diagonal part and its commutator") {
    const auto T = build_cfb(three_block());
    const auto d = diag_part(T);
    REQUIRE(d.size() == 3);
    for (int i = 0; i < 3; ++i) CHECK((d[i].matrix - T.block(i, i)).norm() == 0.0);
    CHECK(diag_commutator_residual(T) <= 1e-12);
    auto c = three_block();
    c.cofactors[{0, 2}] = AnalyticSymbol::polynomial({1.0, -1.0});
    CHECK(diag_commutator_residual(build_cfb(c)) <= 1e-12);

    auto s = three_block();
    s.superdiag = {AnalyticSymbol::constant(0.0), AnalyticSymbol::constant(0.0)};
    CHECK(diag_commutator_residual(build_cfb(s)) == 0.0);
}

TEST_CASE("assembly is linear in the superdiagonal symbol") {
    const auto p = AnalyticSymbol::polynomial({1.0, 0.5});
    const auto q = AnalyticSymbol::polynomial({cplx(0, 1), -2.0, 0.25});
    const auto sum = AnalyticSymbol::polynomial({cplx(1, 1), -1.5, 0.25});
    const Mat a = build_cfb(two_block(1, 2, p)).block(0, 1);
    const Mat b = build_cfb(two_block(1, 2, q)).block(0, 1);
    const Mat c = build_cfb(two_block(1, 2, sum)).block(0, 1);
    CHECK((a + b - c).norm() <= 1e-13);
    const Mat bi = build_cfb(three_block()).bidiagonal_part();
    CHECK(block(bi, 0, 2, 16).norm() == 0.0);
}
