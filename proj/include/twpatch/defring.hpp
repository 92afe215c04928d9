#pragma once

// Fixture library and verification pipelines for the explicit local
// deformation rings: the unramified moduli ring, its quadratic
// eigenvalue extension, the special fibre with one inertial block, the
// two ideal inclusions, and the socle-driven multiplicity arithmetic.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "twpatch/artin.hpp"

namespace twpatch {

// Presentation of the unramified moduli ring over Z/p^M:
// (Z/p^M)[phi1..phi4] / (phi1 + phi4 + phi1 phi4 - phi2 phi3).
LocalAlgebraPresentation runr_presentation(Elt p, std::uint32_t M, std::uint32_t d);

// The quadratic extension by the Frobenius eigenvalue: adjoin beta with
// beta^2 - (phi1+phi4) beta - (phi1+phi4).
LocalAlgebraPresentation raunr_presentation(Elt p, std::uint32_t M, std::uint32_t d);

// Full fixture with one inertial block: variables phi1..phi4, x1..x4,
// beta; the six defining conditions expanded into scalar equations on
// the special fibre.  The negative control drops the inertia
// conjugation blocks (the relations pairing (phi - alpha) with the
// inertial matrix): the last block alone is redundant, since for a
// trace-zero 2x2 inertial matrix the polarized Cayley-Hamilton
// identity recovers it from the other conjugation block.
LocalAlgebraPresentation special_fibre_presentation(Elt p, std::uint32_t M, std::uint32_t d,
                                                    std::uint32_t inertial_blocks = 1,
                                                    bool include_conjugation = true);

// The eight-variable presentation of the fibre used by the
// theorem-three pipeline (a, b, c, phi1..phi4, beta; seven relations).
LocalAlgebraPresentation fibre8_presentation(Elt p, std::uint32_t d);

ArtinianAlgebra build_runr(Elt p, std::uint32_t M, std::uint32_t d);

struct RaunrReport {
  ArtinianAlgebra algebra;
  bool free_rank2 = false;  // degreewise counts match h~[j] = h[j] + h[j-1]
  std::vector<std::uint32_t> counts_runr;
  std::vector<std::uint32_t> counts_raunr;
  bool free_over_coeff = false;
};

RaunrReport build_raunr(Elt p, std::uint32_t M, std::uint32_t d);

struct IdealEqualityReport {
  // (i) faithfulness of the unramified ring on the eigenvalue line:
  // multiplication by beta is injective on degrees <= d-1.
  bool direction_doubling_in_unramified = false;
  // (ii) the inertial identity (phi - 1)m - (phi1+phi4)m = -beta m
  // reduces to zero entrywise.
  bool direction_unramified_in_doubling = false;
  bool direction_ii_vacuous = false;  // no inertial block present
  std::vector<std::string> failed_entries;
};

IdealEqualityReport check_ideal_equality(Elt p, std::uint32_t M, std::uint32_t d,
                                         std::uint32_t inertial_blocks = 1,
                                         bool include_conjugation = true);

struct TheoremThreeReport {
  RegSeqReport regseq;
  std::uint64_t dim_B = 0;
  std::uint64_t socle_dim = 0;
  std::uint32_t embedding_dim = 0;
  bool square_zero = false;
  bool socle_matches_listed_elements = false;  // span{beta, phi4, phi3}
  std::string socle_note;
  std::uint64_t canonical_generator_count = 0;  // = socle_dim by duality
  std::uint64_t tensor_socle_dim = 0;           // socle of B (x) k[Z/p]
  bool tensor_preserves_count = false;
  bool pass = false;
};

TheoremThreeReport theorem_three_pipeline(Elt p, std::uint32_t d);

// (socle_dim + tangent_dim) / 2, rejecting odd sums.
std::uint64_t multiplicity_from_socle(std::uint64_t socle_dim, std::uint64_t tangent_dim = 1);

}  // namespace twpatch
