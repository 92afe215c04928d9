#pragma once

// Finite local algebras presented as truncated polynomial quotients:
// normal forms by degree-bounded linear algebra, Hilbert data, socle,
// regular-sequence quotients.
//
// A presentation O[x_1..x_v]/(f_1..f_r) truncated at total degree d is
// reduced by spanning { f_i * monomial } inside the coefficient space
// of degree-<= d polynomials.  When the top degree dies completely the
// quotient is exact (the ideal contains m^d, so nothing is lost to
// truncation); otherwise the reported dimension is an upper bound.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "twpatch/coeff.hpp"

namespace twpatch {

struct LocalAlgebraPresentation {
  CoeffRing ring;
  std::vector<std::string> variables;
  std::uint32_t bound = 1;
  std::vector<TruncPoly> relations;

  std::uint32_t nvars() const { return static_cast<std::uint32_t>(variables.size()); }

  // Text format: "ring p M" / "vars a b c" / "bound d" / one relation
  // per line in infix syntax, e.g.  phi1 + phi4 + phi1*phi4 - phi2*phi3
  static LocalAlgebraPresentation parse(const std::string& text);
  std::string to_text() const;

  // Infix polynomial parser against this presentation's variables.
  TruncPoly parse_poly(const std::string& src) const;
};

class ArtinianAlgebra {
 public:
  explicit ArtinianAlgebra(const LocalAlgebraPresentation& pres);

  const LocalAlgebraPresentation& presentation() const { return pres_; }
  // Exactness: the truncated model equals the true quotient, i.e. the
  // ideal contains every monomial of degree bound+1.  Fast path: all
  // top-degree monomials die in the span.  Otherwise a Nakayama check
  // one degree up decides it.
  bool exact() const;

  // Basis description: surviving monomial cosets.  order_exp(j) is the
  // size exponent of the graded piece contributed by basis monomial j
  // (canonical coordinates at that column range over [0, p^order_exp));
  // a value < M marks a p-scaled, torsion contribution.
  std::size_t basis_size() const { return basis_cols_.size(); }
  const Expo& basis_monomial(std::size_t j) const { return monomials_[basis_cols_[j]]; }
  std::uint32_t order_exp(std::size_t j) const { return basis_order_[j]; }
  bool free_over_coeff() const;  // every basis element has full order

  // Total length: log_p of the number of elements.
  std::uint64_t length() const;
  // dim_k in residue-field mode (= basis_size), otherwise the length.
  std::uint64_t dim() const;

  // Per-degree count of basis monomials and per-degree length.
  std::vector<std::uint32_t> hilbert_counts() const;
  std::vector<std::uint64_t> length_by_degree() const;

  // Element arithmetic in reduced coordinates (length basis_size()).
  Vec coords(const TruncPoly& f) const;
  Vec coords_one() const;
  Vec mul(const Vec& u, const Vec& v) const;
  Vec scale(Elt c, const Vec& u) const;
  Vec add(const Vec& u, const Vec& v) const;
  Vec sub(const Vec& u, const Vec& v) const;
  bool is_zero(const Vec& u) const;
  // Reduced multiplication-by-element matrix.
  Mat mult_matrix(const Vec& u) const;
  // Canonical residue in the reduced coordinate space.
  Vec reduce(Vec full_coords_on_basis) const;

  // A Span on the reduced coordinates pre-seeded with the torsion
  // relations p^{order} e_j, so that log sizes measure submodules of
  // the algebra.
  Span torsion_seeded_span() const;
  std::uint64_t submodule_length(const Span& s) const;

  // The maximal ideal as a list of reduced generators (variables, and
  // p in truncated-integers mode).
  std::vector<Vec> maximal_ideal_gens() const;

  std::string describe_basis() const;

 private:
  LocalAlgebraPresentation pres_;
  std::vector<Expo> monomials_;
  Span rel_span_;
  mutable std::optional<bool> exact_;
  std::vector<std::size_t> basis_cols_;
  std::vector<std::uint32_t> basis_order_;   // order exponent per basis col
  std::vector<long> basis_index_of_col_;     // column -> basis index or -1
  // product table: basis x basis -> reduced coordinates
  std::vector<std::vector<Vec>> prod_;

  Vec project(const Vec& full) const;
  std::size_t mono_col(const Expo& e) const;
};

ArtinianAlgebra algebra_from_presentation(const LocalAlgebraPresentation& pres);

// h[i] = number of basis monomials of degree i (exact algebras).
std::vector<std::uint32_t> hilbert_function(const ArtinianAlgebra& alg);

// Basis of the annihilator of the maximal ideal, in reduced coordinates.
std::vector<Vec> socle(const ArtinianAlgebra& alg);

LocalAlgebraPresentation quotient_by_element(const LocalAlgebraPresentation& pres,
                                             const TruncPoly& f);

enum class StepStatus { Pass, Fail, Inconclusive };

struct RegSeqStep {
  std::string element;
  bool linear_mod_msquared = false;
  std::vector<std::uint64_t> length_before;
  std::vector<std::uint64_t> length_after;
  StepStatus status = StepStatus::Inconclusive;
};

struct RegSeqReport {
  std::vector<RegSeqStep> steps;
  LocalAlgebraPresentation final_presentation;
  std::uint64_t final_length = 0;
  bool final_exact = false;
  bool all_pass() const {
    for (const auto& s : steps)
      if (s.status != StepStatus::Pass) return false;
    return true;
  }
};

// Checks the graded proxy for regularity: quotienting by an element
// with nonzero linear part must drop the partial length sums by
// exactly len(previous)_{<= d-2}.
RegSeqReport regular_sequence_check(const LocalAlgebraPresentation& pres,
                                    const std::vector<TruncPoly>& seq,
                                    const std::vector<long>& expected_drop = {});

// (dim_k m/m^2, whether m^2 = 0).
std::pair<std::uint32_t, bool> embedding_dim_and_square_zero(const ArtinianAlgebra& alg);

// Tensor product A (x) k[u]/(u^p) over the common coefficient ring,
// realized as an algebra on pairwise products of basis elements.
// Used for the group-ring tensor length check; the result supports
// socle().  Returns the presentation-based algebra.
ArtinianAlgebra tensor_with_cyclic_group_algebra(const ArtinianAlgebra& alg);

}  // namespace twpatch
