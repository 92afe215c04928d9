#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "twpatch/coeff.hpp"

using namespace twpatch;

namespace {

// Exhaustive oracle: enumerate all vectors in (Z/p^M)^n and check that
// the span of the returned kernel generators is exactly the kernel.
// Feasible for modulus^n <= a few thousand.
void check_kernel_exhaustive(const Mat& m) {
  auto gens = mat_kernel(m);
  Span span(m.ring, m.cols);
  for (const auto& g : gens) {
    Vec img = m.apply(g);
    for (Elt x : img) REQUIRE(x == 0);
    span.add(g);
  }
  std::size_t n = m.cols;
  Elt mod = m.ring.modulus;
  std::uint64_t count = 1;
  for (std::size_t i = 0; i < n; ++i) count *= mod;
  REQUIRE(count <= 1000000);
  for (std::uint64_t code = 0; code < count; ++code) {
    Vec v(n);
    std::uint64_t c = code;
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = c % mod;
      c /= mod;
    }
    bool in_kernel = Span::is_zero_vec(m.apply(v));
    CHECK(span.contains(v) == in_kernel);
  }
}

}  // namespace

TEST_CASE("ring basics") {
  auto F3 = CoeffRing::residue_field(3);
  auto Z9 = CoeffRing::truncated(3, 2);
  CHECK(F3.modulus == 3);
  CHECK(Z9.modulus == 9);
  CHECK(Z9.inv(2).value() == 5);  // 2*5 = 10 = 1 mod 9
  CHECK(!Z9.inv(3).has_value());
  CHECK(Z9.val(0) == 2);
  CHECK(Z9.val(3) == 1);
  CHECK(Z9.val(6) == 1);
  CHECK(Z9.val(4) == 0);
  CHECK_THROWS(CoeffRing::residue_field(2));
  CHECK_THROWS(CoeffRing::residue_field(4));
  // Teichmueller lifts are (p-1)-st roots of unity congruent to a mod p.
  auto Z25 = CoeffRing::truncated(5, 2);
  for (Elt a = 1; a < 5; ++a) {
    Elt t = Z25.teichmuller(a);
    CHECK(t % 5 == a);
    CHECK(Z25.pow(t, 4) == 1);
  }
}

TEST_CASE("mat_kernel spec examples") {
  auto F3 = CoeffRing::residue_field(3);
  auto Z9 = CoeffRing::truncated(3, 2);

  // 1x1 [0] over F_3: kernel = whole line.
  Mat z(F3, 1, 1);
  auto k0 = mat_kernel(z);
  REQUIRE(k0.size() == 1);
  CHECK(k0[0] == Vec{1});

  // 1x1 [3] over Z/9: kernel generated by (3); checked exhaustively.
  Mat three(Z9, 1, 1);
  three.at(0, 0) = 3;
  auto k3 = mat_kernel(three);
  Span s3(Z9, 1);
  for (auto& g : k3) s3.add(g);
  CHECK(s3.contains(Vec{3}));
  CHECK(!s3.contains(Vec{1}));
  check_kernel_exhaustive(three);

  // 2x2 identity over Z/9: trivial kernel.
  auto id = Mat::identity(Z9, 2);
  CHECK(mat_kernel(id).empty());
}

TEST_CASE("mat_solve spec examples") {
  auto Z9 = CoeffRing::truncated(3, 2);
  auto F5 = CoeffRing::residue_field(5);

  Mat m(Z9, 1, 1);
  m.at(0, 0) = 2;
  auto x = mat_solve(m, Vec{4});
  REQUIRE(x.has_value());
  CHECK((*x)[0] == 2);

  m.at(0, 0) = 3;
  CHECK(!mat_solve(m, Vec{1}).has_value());
  // 3x = 3 has solutions (1, 4, 7); the canonical one is x = 1.
  auto y = mat_solve(m, Vec{3});
  REQUIRE(y.has_value());
  CHECK((*y)[0] == 1);

  auto id = Mat::identity(F5, 2);
  auto z = mat_solve(id, Vec{1, 2});
  REQUIRE(z.has_value());
  CHECK(*z == Vec{1, 2});
}

TEST_CASE("kernel/solve exhaustive random matrices") {
  std::mt19937_64 rng(12345);
  for (auto [p, M] : {std::pair<Elt, std::uint32_t>{3, 1}, {3, 2}, {5, 1}}) {
    CoeffRing R = M == 1 ? CoeffRing::residue_field(p) : CoeffRing::truncated(p, M);
    for (int trial = 0; trial < 40; ++trial) {
      std::size_t nr = 1 + rng() % 3, nc = 1 + rng() % 3;
      Elt mod = R.modulus;
      std::uint64_t total = 1;
      for (std::size_t i = 0; i < nc; ++i) total *= mod;
      if (total > 100000) continue;
      Mat m(R, nr, nc);
      for (auto& e : m.a) e = rng() % mod;
      check_kernel_exhaustive(m);
      // Solve oracle: for random b, compare against exhaustive search.
      Vec b(nr);
      for (auto& e : b) e = rng() % mod;
      auto got = mat_solve(m, b);
      bool solvable = false;
      for (std::uint64_t code = 0; code < total && !solvable; ++code) {
        Vec v(nc);
        std::uint64_t c = code;
        for (std::size_t i = 0; i < nc; ++i) {
          v[i] = c % mod;
          c /= mod;
        }
        if (m.apply(v) == b) solvable = true;
      }
      CHECK(got.has_value() == solvable);
      if (got) CHECK(m.apply(*got) == b);
    }
  }
}

TEST_CASE("span canonical form and sizes") {
  auto Z9 = CoeffRing::truncated(3, 2);
  Span a(Z9, 2);
  a.add(Vec{3, 1});
  // |span{(3,1)}| includes the Howell closure (0,3).
  CHECK(a.contains(Vec{0, 3}));
  CHECK(a.log_size() == 2);  // 9 elements
  // Canonical form is insertion-order independent.
  Span b(Z9, 2);
  b.add(Vec{0, 3});
  b.add(Vec{3, 1});
  b.add(Vec{6, 2});
  CHECK(a.same_span(b));
  CHECK(a.reduce(Vec{3, 1}) == Vec{0, 0});
  CHECK(a.reduce(Vec{4, 1}) == Vec{1, 0});
}

TEST_CASE("poly_mul_trunc spec examples") {
  auto F3 = CoeffRing::residue_field(3);
  auto F5 = CoeffRing::residue_field(5);

  // (1+x)(1-x) = 1 - x^2 at bound 2 over F_3.
  auto one = TruncPoly::constant(F3, 1, 2, 1);
  auto x = TruncPoly::variable(F3, 1, 2, 0);
  auto prod = poly_mul_trunc(one.add(x), one.sub(x));
  CHECK(prod.get(Expo{0}) == 1);
  CHECK(prod.get(Expo{1}) == 0);
  CHECK(prod.get(Expo{2}) == 2);  // -1 mod 3

  // x^d * x = 0 at bound d.
  TruncPoly xd(F3, 1, 3);
  xd.set(Expo{3}, 1);
  auto x3 = TruncPoly::variable(F3, 1, 3, 0);
  CHECK(poly_mul_trunc(xd, x3).is_zero());

  // (1 + x + y)^2 over F_5, bound 2.
  auto c1 = TruncPoly::constant(F5, 2, 2, 1);
  auto vx = TruncPoly::variable(F5, 2, 2, 0);
  auto vy = TruncPoly::variable(F5, 2, 2, 1);
  auto s = c1.add(vx).add(vy);
  auto sq = poly_mul_trunc(s, s);
  CHECK(sq.get(Expo{0, 0}) == 1);
  CHECK(sq.get(Expo{1, 0}) == 2);
  CHECK(sq.get(Expo{0, 1}) == 2);
  CHECK(sq.get(Expo{2, 0}) == 1);
  CHECK(sq.get(Expo{1, 1}) == 2);
  CHECK(sq.get(Expo{0, 2}) == 1);
}

TEST_CASE("poly_mul_trunc commutative and associative up to truncation") {
  auto Z9 = CoeffRing::truncated(3, 2);
  std::mt19937_64 rng(777);
  for (int trial = 0; trial < 30; ++trial) {
    auto rand_poly = [&]() {
      TruncPoly f(Z9, 2, 3);
      auto monos = monomials_up_to(2, 3);
      for (const auto& e : monos)
        if (rng() % 2) f.set(e, rng() % 9);
      return f;
    };
    auto a = rand_poly(), b = rand_poly(), c = rand_poly();
    CHECK(poly_mul_trunc(a, b) == poly_mul_trunc(b, a));
    CHECK(poly_mul_trunc(poly_mul_trunc(a, b), c) ==
          poly_mul_trunc(a, poly_mul_trunc(b, c)));
  }
}

TEST_CASE("monomial order is graded lex") {
  auto ms = monomials_up_to(2, 2);
  // degree 0, then degree 1 (x first), then degree 2.
  REQUIRE(ms.size() == 6);
  CHECK(ms[0] == Expo{0, 0});
  CHECK(ms[1] == Expo{1, 0});
  CHECK(ms[2] == Expo{0, 1});
  CHECK(ms[3] == Expo{2, 0});
  CHECK(ms[4] == Expo{1, 1});
  CHECK(ms[5] == Expo{0, 2});
}

TEST_CASE("determinant on small blocks") {
  auto Z9 = CoeffRing::truncated(3, 2);
  Mat m(Z9, 2, 2);
  m.at(0, 0) = 2;
  m.at(0, 1) = 7;
  m.at(1, 0) = 1;
  m.at(1, 1) = 4;
  CHECK(m.det() == Z9.sub(Z9.mul(2, 4), Z9.mul(7, 1)));
  std::mt19937_64 rng(99);
  for (int t = 0; t < 20; ++t) {
    Mat a(Z9, 3, 3), b(Z9, 3, 3);
    for (auto& e : a.a) e = rng() % 9;
    for (auto& e : b.a) e = rng() % 9;
    CHECK(a.mul(b).det() == Z9.mul(a.det(), b.det()));
  }
}

TEST_CASE("matrix and polynomial JSON round trips") {
  auto Z9 = CoeffRing::truncated(3, 2);
  Mat m(Z9, 2, 3);
  std::mt19937_64 rng(3);
  for (auto& e : m.a) e = rng() % 9;
  Mat m2 = mat_from_json(mat_to_json(m));
  CHECK(m == m2);

  TruncPoly f(Z9, 2, 3);
  auto monos = monomials_up_to(2, 3);
  for (const auto& e : monos)
    if (rng() % 2) f.set(e, rng() % 9);
  TruncPoly f2 = poly_from_json(poly_to_json(f));
  CHECK(f == f2);
}
