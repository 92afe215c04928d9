#pragma once

// Finite-depth realization of the abstract patching argument: systems
// of group-ring modules with compatible algebra actions, patching data
// (phi, X, psi, P) at each level, reduction maps, isomorphism search,
// the pigeonhole chain, and freeness certificates.
//
// The infinite inverse limit is replaced throughout by finite-depth
// certificates; reports label conclusions as verified to their depth.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "twpatch/artin.hpp"
#include "twpatch/grpring.hpp"

namespace twpatch {

// O-module O^n / W with named commuting operators, kept in canonical
// reduced coordinates (surviving columns of the Howell form of W).
class QuotientModule {
 public:
  QuotientModule(CoeffRing O, std::size_t ambient, const Span& W,
                 const std::vector<Mat>& ambient_ops);

  const CoeffRing& ring() const { return O_; }
  std::size_t dim() const { return basis_cols_.size(); }
  std::uint64_t length() const;
  std::uint32_t order_exp(std::size_t j) const { return orders_[j]; }
  const Mat& op(std::size_t i) const { return ops_[i]; }
  std::size_t num_ops() const { return ops_.size(); }

  // Canonical coordinates of an ambient vector.
  Vec project(const Vec& ambient) const;
  // Canonical form of reduced coordinates (mod torsion tails).
  Vec reduce(Vec coords) const;
  bool is_zero(const Vec& coords) const { return Span::is_zero_vec(reduce(coords)); }
  // Formal O-relations among the reduced coordinates.
  Span torsion_span() const;

 private:
  CoeffRing O_;
  std::size_t ambient_;
  Span W_;
  std::vector<std::size_t> basis_cols_;
  std::vector<std::uint32_t> orders_;
  std::vector<Mat> ops_;  // reduced operators
};

// The system: R, H, and per-level data.
struct TWSystem {
  std::string name;
  CoeffRing O;
  std::uint32_t q = 1;
  // R as a local O-algebra presentation (no variables for R = O).
  LocalAlgebraPresentation R_pres;
  // H = O^h / W_H with an action matrix per R variable.
  std::size_t h_dim = 1;
  std::vector<Vec> W_H_gens;
  std::vector<Mat> H_action;
  std::uint32_t max_level = 1;
  // Level data (index N-1): phi_N as images of x_1..x_{q-1} in R
  // (reduced coordinates), H_N as a group-ring module, the x-actions
  // on the realization of H_N, and psi_N on augmented coordinates.
  std::vector<std::vector<Vec>> phi;
  std::vector<GroupRingModule> H_N;
  std::vector<std::vector<Mat>> HN_xaction;
  std::vector<Mat> psi;

  std::string to_json() const;
  static TWSystem from_json(const std::string& text);
};

struct HypothesisReport {
  struct Level {
    std::uint32_t level = 0;
    bool action_contained = false;  // (a)
    bool psi_isomorphism = false;   // (b)
    bool balanced = false;          // (c)
    long defect = 0;
  };
  std::vector<Level> levels;
  bool pass() const {
    for (const auto& l : levels)
      if (!(l.action_contained && l.psi_isomorphism && l.balanced)) return false;
    return !levels.empty();
  }
  std::string first_failure() const;
};

HypothesisReport check_hypotheses(const TWSystem& sys);

struct PatchingDatum {
  std::uint32_t level = 0;       // N
  std::uint32_t from_level = 0;  // the M it was built from
  CoeffRing Ob;                  // coefficients O/p^min(M0,N)
  GroupRing Sb;                  // S_infty / b_N = Ob[(Z/p^N)^q]
  std::vector<Vec> phi;          // images of x_i in R/d_N (canonical coords)
  QuotientModule X;              // ops: q translations then q-1 x-actions
  Mat psi_x;                     // X coords -> O^h, through the coinvariants
  std::vector<Vec> h_slack;      // generators of W_H + p^N O^h
  std::size_t d = 1;             // presentation size
  std::vector<Vec> gens;         // d module generators of X (coordinates)
  Mat pres_map;                  // X-coords columns of (S/b)^d -> X
  std::vector<std::vector<Vec>> P_first;  // d kernel columns over Sb
};

PatchingDatum datum_from_system(const TWSystem& sys, std::uint32_t M, std::uint32_t N);

PatchingDatum datum_reduce(const TWSystem& sys, const PatchingDatum& D, std::uint32_t Nprime);

struct IsoWitness {
  Mat f;  // X1 -> X2 on reduced coordinates
};

enum class IsoOutcome { Found, None, BudgetExhausted };

struct IsoResult {
  IsoOutcome outcome = IsoOutcome::None;
  std::optional<IsoWitness> witness;
};

IsoResult datum_isomorphic(const PatchingDatum& D1, const PatchingDatum& D2,
                           std::uint64_t budget = 1000000);

struct ChainLink {
  std::uint32_t M = 0, N = 0;
  PatchingDatum datum;
  // Witness that datum_{i+1} reduced to level N_i is isomorphic to
  // datum_i (absent on the first link).
  std::optional<IsoWitness> witness;
};

struct Chain {
  std::vector<ChainLink> links;
  bool budget_exhausted = false;
};

Chain find_compatible_chain(const TWSystem& sys, std::uint32_t depth,
                            std::uint64_t budget = 1000000);

struct PatchedModule {
  PatchingDatum deepest;
  bool first_map_injective_shadow = false;  // kernel dies at the shallowest level
  std::string det_note;
};

PatchedModule patched_module(const TWSystem& sys, const Chain& chain);

struct FreenessResult {
  bool free = false;
  std::uint64_t rank = 0;
  std::uint64_t h_length = 0;
  std::uint64_t r_length = 0;
};

// Nakayama cardinality certificate: H is free over R iff |H| = |R|^g
// with g = dim_k H / m_R H.
FreenessResult verify_freeness(const TWSystem& sys);

struct PatchingReport {
  HypothesisReport hypotheses;
  Chain chain;
  std::optional<PatchedModule> patched;
  bool psi_infty_ok = false;  // X/aX = H at the verified depth
  FreenessResult freeness;
  std::uint32_t depth = 0;
  bool aborted = false;
  std::string abort_stage;
  bool pass() const {
    return !aborted && hypotheses.pass() && patched && patched->first_map_injective_shadow &&
           psi_infty_ok && freeness.free;
  }
};

PatchingReport run_patching(const TWSystem& sys, std::uint32_t depth,
                            std::uint64_t budget = 1000000);

// Canned systems used by tests, the CLI and the acceptance suite.
TWSystem trivial_system(Elt p, std::uint32_t M0, std::uint32_t levels);
// R = H = Z/p^2 with a redundantly presented H_N (still the trivial
// module), exercising the reduction machinery end to end.
TWSystem engineered_rank1_system(Elt p, std::uint32_t levels);
// q = 2 with H_N = O: fails hypothesis (c), defect -1.
TWSystem unbalanced_system(Elt p, std::uint32_t levels);
// phi_M alternates with the parity of M at the top level, producing
// two datum classes; the chain search must select a repeating class.
TWSystem alternating_system(Elt p, std::uint32_t levels);

}  // namespace twpatch
