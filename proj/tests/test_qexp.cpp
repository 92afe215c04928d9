#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "twpatch/qexp.hpp"

using namespace twpatch;

namespace {

QExpansion random_qexp(CoeffRing R, std::size_t prec, std::mt19937_64& rng) {
  QExpansion f(R, prec);
  for (std::size_t n = 0; n <= prec; ++n) f.a[n] = rng() % R.modulus;
  return f;
}

}  // namespace

TEST_CASE("eta quotients: discriminant form and the level 23 form") {
  auto Z = CoeffRing::truncated(5, 2);
  // eta(q)^24 = q prod (1-q^n)^24: a_1 = 1, a_2 = tau(2) = -24.
  auto delta = eta_quotient({{1, 24}}, 12, Z);
  CHECK(delta.coeff(0) == 0);
  CHECK(delta.coeff(1) == 1);
  CHECK(delta.coeff(2) == Z.reduce_int(-24));
  CHECK(delta.weight == 12);

  // eta(q) eta(q^23): leading exponent (1 + 23)/24 = 1.
  auto F5 = CoeffRing::residue_field(5);
  auto f = eta_quotient({{1, 1}, {23, 1}}, 30, F5);
  CHECK(f.coeff(0) == 0);
  CHECK(f.coeff(1) == 1);
  CHECK(f.weight == 1);
  CHECK(f.level == 23);

  // Empty product is the constant 1.
  auto one = eta_quotient({}, 8, F5);
  CHECK(one.coeff(0) == 1);
  for (std::size_t n = 1; n <= 8; ++n) CHECK(one.coeff(n) == 0);

  // Nonintegral leading exponent rejected.
  CHECK_THROWS(eta_quotient({{1, 1}}, 8, F5));
}

TEST_CASE("Delta mod 5: T_2 eigenvalue tau(2) = -24 = 1") {
  auto F5 = CoeffRing::residue_field(5);
  auto delta = eta_quotient({{1, 24}}, 10, F5);
  auto chi = DirichletCharacter::trivial(F5);
  auto t2 = hecke_T(delta, 2, 12, chi);
  CHECK(t2.coeff(1) == 1);  // tau(2) = -24 = 1 mod 5
  // Delta is an eigenform: T_2 Delta = tau(2) Delta.
  for (std::size_t n = 1; n <= t2.prec(); ++n)
    CHECK(t2.coeff(n) == F5.mul(1, delta.coeff(n)));
}

TEST_CASE("hecke operator identities") {
  auto F5 = CoeffRing::residue_field(5);
  auto chi = DirichletCharacter::trivial(F5);
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 10; ++trial) {
    auto f = random_qexp(F5, 78, rng);
    // U_l V_l = identity.
    for (std::uint64_t ell : {2, 3, 5, 7, 11, 13}) {
      auto uv = hecke_U(hecke_V(f, ell), ell);
      for (std::size_t n = 0; n <= std::min<std::size_t>(uv.prec(), f.prec()); ++n)
        CHECK(uv.coeff(n) == f.coeff(n));
    }
    // T_l = U_l + chi(l) l^{k-1} V_l for weight 1 (l^0 = 1).
    for (std::uint64_t ell : {2, 3, 5, 7, 11, 13}) {
      auto t = hecke_T(f, ell, 1, chi);
      auto rhs = hecke_U(f, ell).add(hecke_V(f, ell).scaled(chi(ell)));
      for (std::size_t n = 0; n <= t.prec(); ++n) CHECK(t.coeff(n) == rhs.coeff(n));
    }
    // Commutativity T_2 T_3 = T_3 T_2.
    auto a = hecke_T(hecke_T(f, 2, 1, chi), 3, 1, chi);
    auto b = hecke_T(hecke_T(f, 3, 1, chi), 2, 1, chi);
    CHECK(a == b);
  }
}

TEST_CASE("theta operator") {
  auto F5 = CoeffRing::residue_field(5);
  QExpansion c(F5, 10);
  c.a[0] = 3;
  CHECK(theta(c).is_zero());

  QExpansion f(F5, 10);
  f.a[1] = 1;
  f.a[3] = 1;
  auto th = theta(f);
  CHECK(th.coeff(1) == 1);
  CHECK(th.coeff(3) == 3);

  // Leibniz rule on truncated products.
  std::mt19937_64 rng(7);
  for (int t = 0; t < 10; ++t) {
    auto a = random_qexp(F5, 25, rng), b = random_qexp(F5, 25, rng);
    auto lhs = theta(qexp_mul(a, b));
    auto rhs = qexp_mul(theta(a), b).add(qexp_mul(a, theta(b)));
    CHECK(lhs == rhs);
  }

  // eta(q) eta(q^23) is not in ker theta: a_1 = 1.
  auto f23 = eta_quotient({{1, 1}, {23, 1}}, 20, F5);
  CHECK(theta(f23).coeff(1) == 1);
}

TEST_CASE("eisenstein series") {
  // E_4 mod 5 and E_6 mod 7 are the constant 1 (p | 240, p | 504).
  auto F5 = CoeffRing::residue_field(5);
  auto e4m5 = eisenstein(4, 20, F5);
  CHECK(e4m5.coeff(0) == 1);
  for (std::size_t n = 1; n <= 20; ++n) CHECK(e4m5.coeff(n) == 0);

  auto F7 = CoeffRing::residue_field(7);
  auto e6m7 = eisenstein(6, 20, F7);
  for (std::size_t n = 1; n <= 20; ++n) CHECK(e6m7.coeff(n) == 0);

  // E_4 mod 7: a_1 = 240 mod 7 = 2.
  auto e4m7 = eisenstein(4, 10, F7);
  CHECK(e4m7.coeff(1) == 2);

  // E_{p-1} = 1 mod p to precision 50 for p in {5,7,11,13}.
  for (Elt p : {5, 7, 11, 13}) {
    auto Fp = CoeffRing::residue_field(p);
    auto e = eisenstein(static_cast<std::uint32_t>(p - 1), 50, Fp);
    CHECK(e.coeff(0) == 1);
    for (std::size_t n = 1; n <= 50; ++n) CHECK(e.coeff(n) == 0);
  }
}

TEST_CASE("hasse lift multiplication is Hecke equivariant away from p") {
  auto F5 = CoeffRing::residue_field(5);
  auto chi = DirichletCharacter::trivial(F5);
  auto f = eta_quotient({{1, 1}, {23, 1}}, 60, F5);
  auto A = eisenstein(4, 60, F5);

  // A = 1 mod 5, so multiplication fixes expansions entirely.
  auto phf = hasse_mult(f, A);
  for (std::size_t n = 0; n <= phf.prec(); ++n) CHECK(phf.coeff(n) == f.coeff(n));
  CHECK(phf.weight == f.weight + 4);

  // T_l phi(f) = phi(T_l f) coefficientwise to precision 20, l != p.
  for (std::uint64_t ell : {2, 3}) {
    auto lhs = hecke_T(phf, ell, 1, chi);
    auto rhs = hasse_mult(hecke_T(f, ell, 1, chi), A.truncated(20));
    for (std::size_t n = 0; n <= 20 / ell; ++n) CHECK(lhs.coeff(n) == rhs.coeff(n));
  }

  // A not congruent to 1 is rejected.
  auto F7 = CoeffRing::residue_field(7);
  auto e4 = eisenstein(4, 20, F7);
  QExpansion g(F7, 20);
  g.a[1] = 1;
  CHECK_THROWS(hasse_mult(g, e4));
}

TEST_CASE("psi map and its rank shadow") {
  auto F5 = CoeffRing::residue_field(5);
  auto f = eta_quotient({{1, 1}, {23, 1}}, 30, F5);
  auto A = eisenstein(4, 30, F5);
  QExpansion zero(F5, 30);

  // (f, 0) -> phi(f); (0, g) -> <p> V_p g.
  auto only_f = psi_map(f, zero, 1, 5, A);
  for (std::size_t n = 0; n <= only_f.prec(); ++n) CHECK(only_f.coeff(n) == f.coeff(n));
  auto only_g = psi_map(zero, f, 2, 5, A);
  auto vpf = hecke_V(f, 5, only_g.prec()).scaled(2);
  for (std::size_t n = 0; n <= only_g.prec(); ++n) CHECK(only_g.coeff(n) == vpf.coeff(n));

  // Doubled rank = 2 x basis size.
  CHECK(psi_rank({f}, 1, 5, A) == 2);
}

TEST_CASE("operator_matrix") {
  auto F5 = CoeffRing::residue_field(5);
  auto f = eta_quotient({{1, 1}, {23, 1}}, 40, F5);
  HeckeSpace space(F5, {f});
  auto chi = DirichletCharacter::trivial(F5);

  auto id = operator_matrix(space, "id", {f});
  CHECK(id == Mat::identity(F5, 1));

  auto t2 = operator_matrix(space, "T2", {hecke_T(f, 2, 1, chi)});
  CHECK(t2.at(0, 0) == f.coeff(2));  // a_1-normalized eigenform

  // theta maps out of the span: the error contract names the vector.
  CHECK_THROWS_WITH_AS(operator_matrix(space, "theta", {theta(f)}),
                       doctest::Contains("not in the span"), std::invalid_argument);
}

TEST_CASE("up block matrix quadratic relation") {
  auto Z9 = CoeffRing::truncated(3, 2);
  auto F5 = CoeffRing::residue_field(5);
  std::mt19937_64 rng(11);
  // Scalar sanity cases.
  {
    Mat tp(Z9, 1, 1);
    tp.at(0, 0) = 4;
    auto A = up_block_matrix(tp, 7);
    CHECK(A.at(0, 0) == 4);
    CHECK(A.at(0, 1) == 1);
    CHECK(A.at(1, 0) == Z9.neg(7));
    CHECK(A.at(1, 1) == 0);
  }
  {
    Mat tp(Z9, 1, 1);
    auto A = up_block_matrix(tp, 1);  // T_p = 0, <p> = 1: A^2 = -I
    CHECK(A.mul(A) == Mat::identity(Z9, 2).scaled(Z9.neg(1)));
  }
  // 200 random T_p over Z/9 and F_5 up to size 3 (the construction
  // itself verifies the relation and throws on failure).
  for (int t = 0; t < 100; ++t) {
    std::size_t d = 1 + rng() % 3;
    Mat a(Z9, d, d), b(F5, d, d);
    for (auto& e : a.a) e = rng() % 9;
    for (auto& e : b.a) e = rng() % 5;
    CHECK_NOTHROW(up_block_matrix(a, rng() % 9));
    CHECK_NOTHROW(up_block_matrix(b, rng() % 5));
  }
}

TEST_CASE("doubling detector") {
  auto Z9 = CoeffRing::truncated(3, 2);
  // T = Z/9 scalars, T_p = 0, <p> = 1: doubled with lengths (2, 4).
  Mat tp(Z9, 1, 1);
  auto up = up_block_matrix(tp, 1);
  auto res = doubling_rank({}, tp, 1, up);
  CHECK(res.anemic_length == 2);
  CHECK(res.extended_length == 4);
  CHECK(res.quadratic_holds);
  CHECK(res.doubled);

  // Degenerate control: zero out the second block row; the prescribed
  // quadratic fails, so the detector reports not doubled.
  Mat bad = up;
  bad.at(1, 0) = 0;
  auto res2 = doubling_rank({}, tp, 1, bad);
  CHECK(!res2.quadratic_holds);
  CHECK(!res2.doubled);

  // Hensel-split case over k: T_p = alpha + beta with distinct roots;
  // the extension is still free of rank 2.
  auto F5 = CoeffRing::residue_field(5);
  Mat tp5(F5, 1, 1);
  tp5.at(0, 0) = F5.add(1, 2);  // alpha = 1, beta = 2
  auto up5 = up_block_matrix(tp5, F5.mul(1, 2));
  auto res3 = doubling_rank({}, tp5, F5.mul(1, 2), up5);
  CHECK(res3.doubled);
  CHECK(res3.extended_length == 2 * res3.anemic_length);
}

TEST_CASE("degeneracy determinant congruence") {
  // Exhaustive over (alpha, beta) in (F_p^x)^2, alpha != beta, with
  // x = 1 scalar data T_x = alpha + beta, <x> = alpha beta.
  for (Elt p : {3, 5, 7}) {
    auto Fp = CoeffRing::residue_field(p);
    for (Elt a = 1; a < p; ++a)
      for (Elt b = 1; b < p; ++b) {
        if (a == b) continue;
        Mat tx(Fp, 1, 1);
        tx.at(0, 0) = Fp.add(a, b);
        auto res = degeneracy_composite(tx, Fp.mul(a, b), 1, a, b);
        CHECK(res.congruence_ok);
        CHECK(res.unit);
      }
  }
  // alpha = beta: determinant vanishes mod p, not a unit.
  {
    auto F3 = CoeffRing::residue_field(3);
    Mat tx(F3, 1, 1);
    tx.at(0, 0) = F3.add(2, 2);
    auto res = degeneracy_composite(tx, F3.mul(2, 2), 1, 2, 2);
    CHECK(!res.unit);
    CHECK(res.det % 3 == 0);
    CHECK(res.congruence_ok);  // both sides are 0
  }
  // Scalar case over Z/9 with x = 10 = 1 mod 9.
  {
    auto Z9 = CoeffRing::truncated(3, 2);
    Mat tx(Z9, 1, 1);
    tx.at(0, 0) = Z9.reduce_int(1 + 2);
    auto res = degeneracy_composite(tx, Z9.mul(1, 2), 10, 1, 2);
    CHECK(res.congruence_ok);
    CHECK(res.unit);
  }
}

TEST_CASE("companion criterion") {
  auto Z9 = CoeffRing::truncated(3, 2);
  // Doubled fixture: extension strict.
  Mat tp(Z9, 1, 1);
  auto up = up_block_matrix(tp, 1);
  Mat tp_diag(Z9, 2, 2);
  CHECK(companion_criterion({tp_diag}, up));

  // U_p already inside the anemic algebra: distinct-eigenvalue split
  // with both roots present.
  auto F5 = CoeffRing::residue_field(5);
  Mat diag(F5, 2, 2);
  diag.at(0, 0) = 1;  // generates the full diagonal algebra with I
  Mat updiag(F5, 2, 2);
  updiag.at(0, 0) = 1;
  updiag.at(1, 1) = 2;
  CHECK(!companion_criterion({diag}, updiag));

  // Zero space.
  Mat z(F5, 0, 0);
  CHECK(!companion_criterion({}, z));

  // Non-ordinary rejected.
  Mat sing(F5, 1, 1);
  CHECK_THROWS(companion_criterion({}, sing));
}

TEST_CASE("nontrivial Dirichlet character") {
  // Modulus 3 character with generator 2 mapped to -1 (order 2),
  // realized with Teichmueller values in Z/25.
  auto Z25 = CoeffRing::truncated(5, 2);
  auto chi = DirichletCharacter::from_generator_value(Z25, 3, 2, Z25.neg(1));
  CHECK(chi.order() == 2);
  CHECK(chi(1) == 1);
  CHECK(chi(2) == Z25.neg(1));
  CHECK(chi(3) == 0);
  CHECK(chi(4) == 1);
  // The T_l identity still holds coefficientwise with a character.
  std::mt19937_64 rng(64);
  QExpansion f(Z25, 30);
  for (auto& x : f.a) x = rng() % 25;
  auto t = hecke_T(f, 2, 1, chi);
  auto rhs = hecke_U(f, 2).add(hecke_V(f, 2).scaled(chi(2)));
  for (std::size_t n = 0; n <= t.prec(); ++n) CHECK(t.coeff(n) == rhs.coeff(n));
  // Values must be roots of unity: rejecting a non-root is an error.
  CHECK_THROWS(DirichletCharacter::from_generator_value(Z25, 3, 2, 2));
}
