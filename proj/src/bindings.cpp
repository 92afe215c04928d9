// Python bindings for the main operations: exact linear algebra over
// Z/p^M, Artinian algebra invariants, group-ring module defects, the
// deformation-ring pipelines, q-expansion operators and the patching
// pipeline.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "twpatch/artin.hpp"
#include "twpatch/defring.hpp"
#include "twpatch/grpring.hpp"
#include "twpatch/patch.hpp"
#include "twpatch/qexp.hpp"
#include "twpatch/suite.hpp"

namespace py = pybind11;
using namespace twpatch;

namespace {

CoeffRing make_ring(Elt p, std::uint32_t M) {
  return M == 1 ? CoeffRing::residue_field(p) : CoeffRing::truncated(p, M);
}

Mat make_mat(Elt p, std::uint32_t M, std::size_t rows, std::size_t cols,
             const std::vector<Elt>& entries) {
  if (entries.size() != rows * cols) throw std::invalid_argument("entries size mismatch");
  Mat m(make_ring(p, M), rows, cols);
  for (std::size_t i = 0; i < entries.size(); ++i) m.a[i] = entries[i] % m.ring.modulus;
  return m;
}

py::dict algebra_info(const ArtinianAlgebra& A) {
  py::dict d;
  d["dim"] = A.dim();
  d["length"] = A.length();
  d["exact"] = A.exact();
  d["hilbert"] = A.hilbert_counts();
  d["free_over_coeff"] = A.free_over_coeff();
  d["basis"] = A.describe_basis();
  if (A.exact()) {
    d["socle_dim"] = socle(A).size();
    auto [e, sq] = embedding_dim_and_square_zero(A);
    d["embedding_dim"] = e;
    d["square_zero"] = sq;
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_twpatch, m) {
  m.doc() = "exact computations: balanced group-ring modules, finite patching "
            "systems, weight-one Hecke identities, local deformation-ring fixtures";
  m.attr("__version__") = "1.0.0";

  // ---- exact linear algebra ----
  m.def(
      "mat_kernel",
      [](Elt p, std::uint32_t M, std::size_t rows, std::size_t cols,
         const std::vector<Elt>& entries) {
        return mat_kernel(make_mat(p, M, rows, cols, entries));
      },
      py::arg("p"), py::arg("M"), py::arg("rows"), py::arg("cols"), py::arg("entries"),
      "Generators of the kernel of a matrix over Z/p^M.");
  m.def(
      "mat_solve",
      [](Elt p, std::uint32_t M, std::size_t rows, std::size_t cols,
         const std::vector<Elt>& entries, const Vec& b) -> py::object {
        auto r = mat_solve(make_mat(p, M, rows, cols, entries), b);
        if (!r) return py::none();
        return py::cast(*r);
      },
      py::arg("p"), py::arg("M"), py::arg("rows"), py::arg("cols"), py::arg("entries"),
      py::arg("b"), "Deterministic solution of m x = b, or None.");

  // ---- Artinian algebras ----
  m.def(
      "algebra_from_presentation",
      [](const std::string& text) {
        return algebra_info(ArtinianAlgebra(LocalAlgebraPresentation::parse(text)));
      },
      py::arg("presentation"),
      "Invariants of a truncated local algebra from its text presentation.");

  // ---- group-ring modules ----
  m.def(
      "module_defect",
      [](const std::string& json) {
        auto mod = GroupRingModule::from_json(json);
        auto [t0, t1] = tor_dims(mod);
        auto bal = is_balanced(mod);
        py::dict d;
        d["t0"] = t0;
        d["t1"] = t1;
        d["defect"] = bal.defect;
        d["balanced"] = bal.balanced;
        d["coinvariants"] = coinvariants(mod);
        return d;
      },
      py::arg("module_json"), "t0, t1, defect, balancedness and coinvariant type.");
  m.def(
      "six_term_check",
      [](const std::string& json) {
        auto rep = six_term_check(GroupRingModule::from_json(json));
        py::dict d;
        d["pass"] = rep.pass();
        d["len_tor1_O"] = rep.len_tor1_O;
        d["dim_tor1_k"] = rep.dim_tor1_k;
        d["len_coinvariants"] = rep.len_coinv;
        d["dim_m_mod_k"] = rep.dim_m_mod_k;
        return d;
      },
      py::arg("module_json"), "Exactness report for the Tor sequence of a module.");

  // ---- deformation rings ----
  m.def(
      "theorem_three",
      [](Elt p, std::uint32_t d) {
        auto r = theorem_three_pipeline(p, d);
        py::dict out;
        out["pass"] = r.pass;
        out["dim_B"] = r.dim_B;
        out["socle_dim"] = r.socle_dim;
        out["embedding_dim"] = r.embedding_dim;
        out["square_zero"] = r.square_zero;
        out["canonical_generator_count"] = r.canonical_generator_count;
        out["tensor_socle_dim"] = r.tensor_socle_dim;
        out["multiplicity"] = multiplicity_from_socle(r.socle_dim, 1);
        return out;
      },
      py::arg("p"), py::arg("d") = 4,
      "Fibre quotient certificate: dimension, socle, embedding data.");
  m.def(
      "eigenvalue_extension",
      [](Elt p, std::uint32_t M, std::uint32_t d) {
        auto r = build_raunr(p, M, d);
        py::dict out;
        out["free_rank2"] = r.free_rank2;
        out["counts_base"] = r.counts_runr;
        out["counts_ext"] = r.counts_raunr;
        return out;
      },
      py::arg("p"), py::arg("M"), py::arg("d") = 4);
  m.def(
      "ideal_equality",
      [](Elt p, std::uint32_t M, std::uint32_t d, bool include_conjugation) {
        auto r = check_ideal_equality(p, M, d, 1, include_conjugation);
        py::dict out;
        out["direction_i"] = r.direction_doubling_in_unramified;
        out["direction_ii"] = r.direction_unramified_in_doubling;
        return out;
      },
      py::arg("p"), py::arg("M") = 1, py::arg("d") = 3, py::arg("include_conjugation") = true);
  m.def("multiplicity_from_socle", &multiplicity_from_socle, py::arg("socle_dim"),
        py::arg("tangent_dim") = 1);

  // ---- q-expansions ----
  m.def(
      "eta_quotient",
      [](const std::vector<std::pair<std::uint64_t, long>>& pairs, std::size_t prec, Elt p,
         std::uint32_t M) { return eta_quotient(pairs, prec, make_ring(p, M)).a; },
      py::arg("pairs"), py::arg("prec"), py::arg("p"), py::arg("M") = 1);
  m.def(
      "eisenstein",
      [](std::uint32_t k, std::size_t prec, Elt p, std::uint32_t M) {
        return eisenstein(k, prec, make_ring(p, M)).a;
      },
      py::arg("k"), py::arg("prec"), py::arg("p"), py::arg("M") = 1);
  m.def(
      "hecke_T",
      [](const Vec& coeffs, std::uint64_t ell, long weight, Elt p, std::uint32_t M) {
        QExpansion f(make_ring(p, M), coeffs.size() - 1);
        f.a = coeffs;
        for (auto& x : f.a) x %= f.ring.modulus;
        auto chi = DirichletCharacter::trivial(f.ring);
        return hecke_T(f, ell, weight, chi).a;
      },
      py::arg("coefficients"), py::arg("ell"), py::arg("weight"), py::arg("p"),
      py::arg("M") = 1);
  m.def(
      "psi_rank_weight_one",
      [](std::size_t prec, Elt p) {
        auto R = CoeffRing::residue_field(p);
        auto f = eta_quotient({{1, 1}, {23, 1}}, prec, R);
        auto A = eisenstein(static_cast<std::uint32_t>(p - 1), prec, R);
        return psi_rank({f}, 1, p, A);
      },
      py::arg("prec") = 30, py::arg("p") = 5);

  // ---- patching ----
  m.def(
      "run_patching",
      [](const std::string& bundle_json, std::uint32_t depth, std::uint64_t budget) {
        auto sys = TWSystem::from_json(bundle_json);
        auto rep = run_patching(sys, depth, budget);
        py::dict d;
        d["pass"] = rep.pass();
        d["aborted"] = rep.aborted;
        d["abort_stage"] = rep.abort_stage;
        d["chain_length"] = rep.chain.links.size();
        d["free"] = rep.freeness.free;
        d["rank"] = rep.freeness.rank;
        return d;
      },
      py::arg("bundle_json"), py::arg("depth") = 3, py::arg("budget") = 1000000);
  m.def("trivial_system_json",
        [](Elt p, std::uint32_t M0, std::uint32_t levels) {
          return trivial_system(p, M0, levels).to_json();
        },
        py::arg("p") = 3, py::arg("M0") = 2, py::arg("levels") = 3);

  // ---- the full battery ----
  m.def(
      "suite",
      [](std::uint64_t budget) {
        SuiteOptions opt;
        opt.budget = budget;
        return acceptance_suite(opt).to_json();
      },
      py::arg("budget") = 1000000, "Run the verification battery, returning the JSON report.");
}
