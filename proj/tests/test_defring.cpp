#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "twpatch/defring.hpp"

using namespace twpatch;

TEST_CASE("unramified moduli ring: hypersurface Hilbert counts") {
  // The defining relation has a unit linear term, so degreewise the
  // quotient counts like a power series ring in three variables.
  for (std::uint32_t M = 1; M <= 2; ++M) {
    auto A = build_runr(3, M, 4);
    auto h = A.hilbert_counts();
    CHECK(h[0] == 1);
    CHECK(h[1] == 3);
    CHECK(h[2] == 6);
    CHECK(h[3] == 10);
    CHECK(h[4] == 15);
    CHECK(A.free_over_coeff());
    // The defining relation reduces to zero.
    auto pres = A.presentation();
    CHECK(A.is_zero(A.coords(pres.parse_poly("phi1 + phi4 + phi1*phi4 - phi2*phi3"))));
  }
}

TEST_CASE("quadratic eigenvalue extension is free of rank 2") {
  for (std::uint32_t M = 1; M <= 2; ++M) {
    auto rep = build_raunr(3, M, 4);
    CHECK(rep.free_rank2);
    CHECK(rep.free_over_coeff);
    for (std::uint32_t j = 0; j <= 4; ++j) {
      std::uint32_t expect = rep.counts_runr[j] + (j ? rep.counts_runr[j - 1] : 0);
      CHECK(rep.counts_raunr[j] == expect);
    }
    // beta^2 reduces to (phi1 + phi4)(beta + 1).
    const auto& pres = rep.algebra.presentation();
    auto lhs = rep.algebra.coords(pres.parse_poly("beta^2"));
    auto rhs = rep.algebra.coords(pres.parse_poly("(phi1 + phi4)*(beta + 1)"));
    CHECK(lhs == rhs);
  }
}

TEST_CASE("eigenvalue extension with all phi = 0 collapses to k[beta]/(beta^2)") {
  auto pres = raunr_presentation(3, 1, 4);
  for (const char* v : {"phi1", "phi2", "phi3", "phi4"})
    pres = quotient_by_element(pres, pres.parse_poly(v));
  ArtinianAlgebra A(pres);
  CHECK(A.dim() == 2);
}

TEST_CASE("ideal equality: both directions pass on the default fixture") {
  auto rep = check_ideal_equality(3, 1, 3);
  CHECK(rep.direction_doubling_in_unramified);
  CHECK(rep.direction_unramified_in_doubling);
  CHECK(!rep.direction_ii_vacuous);
  CHECK(rep.failed_entries.empty());
}

TEST_CASE("ideal equality: negative control without the last relation block") {
  auto rep = check_ideal_equality(3, 1, 3, 1, false);
  CHECK(!rep.direction_unramified_in_doubling);
  CHECK(!rep.failed_entries.empty());
}

TEST_CASE("ideal equality: no inertial block is vacuous") {
  auto rep = check_ideal_equality(3, 1, 3, 0);
  CHECK(rep.direction_ii_vacuous);
}

TEST_CASE("theorem-three pipeline at p = 3 and p = 5") {
  for (Elt p : {3, 5}) {
    auto rep = theorem_three_pipeline(p, 4);
    CHECK(rep.regseq.all_pass());
    CHECK(rep.dim_B == 4);
    CHECK(rep.socle_dim == 3);
    CHECK(rep.embedding_dim == 3);
    CHECK(rep.square_zero);
    CHECK(rep.socle_matches_listed_elements);
    CHECK(rep.canonical_generator_count == 3);
    CHECK(rep.tensor_preserves_count);
    CHECK(rep.pass);
  }
}

TEST_CASE("theorem-three pipeline is relation-order independent") {
  auto pres = fibre8_presentation(3, 4);
  std::reverse(pres.relations.begin(), pres.relations.end());
  std::vector<TruncPoly> seq{pres.parse_poly("a"), pres.parse_poly("b + beta"),
                             pres.parse_poly("c + phi1"), pres.parse_poly("phi2 + phi3")};
  auto reg = regular_sequence_check(pres, seq);
  CHECK(reg.all_pass());
  ArtinianAlgebra B(reg.final_presentation);
  CHECK(B.dim() == 4);
  CHECK(socle(B).size() == 3);
}

TEST_CASE("negative control: dropping a quadratic relation changes the socle") {
  auto pres = fibre8_presentation(3, 4);
  pres.relations.pop_back();  // drop a^2 + b c
  std::vector<TruncPoly> seq{pres.parse_poly("a"), pres.parse_poly("b + beta"),
                             pres.parse_poly("c + phi1"), pres.parse_poly("phi2 + phi3")};
  auto reg = regular_sequence_check(pres, seq);
  ArtinianAlgebra B(reg.final_presentation);
  bool same = B.dim() == 4 && B.exact() && socle(B).size() == 3;
  CHECK(!same);
}

TEST_CASE("multiplicity arithmetic") {
  CHECK(multiplicity_from_socle(3, 1) == 2);
  CHECK(multiplicity_from_socle(1, 1) == 1);
  CHECK_THROWS(multiplicity_from_socle(2, 1));
  CHECK_THROWS(multiplicity_from_socle(0, 1));
}
