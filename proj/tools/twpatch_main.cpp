// twpatch: exact desk-scale computations for balanced group-ring
// modules, finite patching systems, weight-one Hecke identities, and
// the explicit local deformation-ring fixtures.
//
// Exit codes: 0 success, 1 certificate failure, 2 usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "twpatch/defring.hpp"
#include "twpatch/grpring.hpp"
#include "twpatch/patch.hpp"
#include "twpatch/qexp.hpp"
#include "twpatch/report.hpp"
#include "twpatch/suite.hpp"

using namespace twpatch;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::uint64_t env_budget(std::uint64_t fallback) {
  const char* s = std::getenv("TWPATCH_BUDGET");
  if (!s) return fallback;
  return std::strtoull(s, nullptr, 10);
}

void emit(const Report& rep, const std::string& format) {
  if (format == "json")
    std::cout << rep.to_json();
  else
    std::cout << rep.to_text();
}

int finish(const Report& rep, const std::string& format) {
  emit(rep, format);
  return rep.any_fail() ? 1 : 0;
}

void print_matrix(const Mat& m) {
  for (std::size_t i = 0; i < m.rows; ++i) {
    for (std::size_t j = 0; j < m.cols; ++j) std::cout << (j ? " " : "") << m.at(i, j);
    std::cout << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact verification toolkit for balanced modules, finite patching "
               "systems and weight-one Hecke identities"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string format = "text";
  app.add_option("--format", format, "output format: text|json")
      ->check(CLI::IsMember({"text", "json"}));

  // ---- defect ----
  auto* c_defect = app.add_subcommand("defect", "t0, t1, defect and balancedness of a module");
  std::string defect_file;
  c_defect->add_option("file", defect_file, "module JSON")->required();

  // ---- patch-run ----
  auto* c_patch = app.add_subcommand("patch-run", "run the patching pipeline on a system bundle");
  std::string patch_file;
  std::uint32_t patch_depth = 3;
  std::uint64_t patch_budget = env_budget(1000000);
  c_patch->add_option("bundle", patch_file, "system bundle JSON")->required();
  c_patch->add_option("--depth", patch_depth, "chain depth");
  c_patch->add_option("--budget", patch_budget, "isomorphism search budget");

  // ---- hecke ----
  auto* c_hecke = app.add_subcommand("hecke", "operator matrix on a q-expansion basis");
  std::string hecke_space, hecke_op = "T2";
  c_hecke->add_option("--space", hecke_space, "space JSON file")->required();
  c_hecke->add_option("--op", hecke_op, "operator name: T<l>, U<l>, V<l>, theta");

  // ---- qexp ----
  auto* c_qexp = app.add_subcommand("qexp", "print q-expansion coefficients");
  std::vector<std::string> qexp_args;
  std::size_t qexp_prec = 20;
  Elt qexp_mod = 5;
  std::uint32_t qexp_M = 1;
  c_qexp->add_option("spec", qexp_args,
                     "'eta d:r [d:r ...]' or 'eis k'")
      ->required();
  c_qexp->add_option("--prec", qexp_prec, "truncation precision");
  c_qexp->add_option("--mod", qexp_mod, "prime p");
  c_qexp->add_option("--power", qexp_M, "exponent M for Z/p^M");

  // ---- defring-report ----
  auto* c_def = app.add_subcommand("defring-report", "deformation-ring certificate chain");
  std::string def_fixture = "special-fibre";
  Elt def_p = 3;
  std::uint32_t def_M = 1, def_d = 4;
  c_def->add_option("--fixture", def_fixture,
                    "special-fibre | unramified | eigenvalue-extension | ideal-equality");
  c_def->add_option("--p", def_p, "prime");
  c_def->add_option("--power", def_M, "coefficient exponent M");
  c_def->add_option("--bound", def_d, "truncation degree");

  // ---- suite ----
  auto* c_suite = app.add_subcommand("suite", "run the full verification battery");
  std::uint64_t suite_budget = env_budget(1000000);
  c_suite->add_option("--budget", suite_budget, "isomorphism search budget");

  // ---- write-fixtures (maintenance) ----
  auto* c_gen = app.add_subcommand("write-fixtures", "regenerate the fixture files");
  std::string gen_dir = "fixtures";
  c_gen->add_option("dir", gen_dir, "target directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;  // usage errors exit 2, --help exits 0
  }

  try {
    if (c_defect->parsed()) {
      auto mod = GroupRingModule::from_json(slurp(defect_file));
      auto [t0, t1] = tor_dims(mod);
      auto bal = is_balanced(mod);
      Report rep;
      rep.config = {{"file", defect_file}};
      rep.add("defect computation", true, "defect-balanced",
              {{"t0", t0}, {"t1", t1}, {"defect", bal.defect}, {"balanced", bal.balanced}});
      if (format == "text") {
        std::cout << "t0 = " << t0 << "\nt1 = " << t1 << "\ndefect = " << bal.defect
                  << "\nbalanced = " << (bal.balanced ? "true" : "false") << "\n";
        return 0;
      }
      return finish(rep, format);
    }

    if (c_patch->parsed()) {
      auto sys = TWSystem::from_json(slurp(patch_file));
      auto pr = run_patching(sys, patch_depth, patch_budget);
      Report rep;
      rep.config = {{"bundle", patch_file}, {"depth", patch_depth}, {"budget", patch_budget}};
      rep.add("hypotheses", pr.hypotheses.pass(), "patching-hypotheses",
              {{"levels", pr.hypotheses.levels.size()},
               {"failure", pr.hypotheses.first_failure()}});
      if (!pr.aborted || !pr.chain.links.empty()) {
        nlohmann::json links = nlohmann::json::array();
        for (const auto& l : pr.chain.links) links.push_back({{"M", l.M}, {"N", l.N}});
        rep.add("compatible chain", !pr.chain.links.empty(), "patching-chain",
                {{"links", links}, {"budget_exhausted", pr.chain.budget_exhausted}});
      }
      if (pr.patched) {
        rep.add("patched module first-map certificate",
                pr.patched->first_map_injective_shadow, "patching-injectivity-shadow",
                {{"note", pr.patched->det_note},
                 {"verified_to_depth", pr.chain.links.back().N}});
        rep.add("patched coinvariants match H", pr.psi_infty_ok, "patching-psi-limit",
                {{"verified_to_depth", pr.chain.links.back().N}});
      }
      if (!pr.aborted)
        rep.add("freeness", pr.freeness.free, "patching-freeness",
                {{"rank", pr.freeness.rank},
                 {"H_length", pr.freeness.h_length},
                 {"R_length", pr.freeness.r_length}});
      if (pr.aborted)
        rep.add_status("pipeline", "FAIL", "patching-pipeline", {{"aborted_at", pr.abort_stage}});
      return finish(rep, format);
    }

    if (c_hecke->parsed()) {
      nlohmann::json j = nlohmann::json::parse(slurp(hecke_space));
      Elt p = j.at("ring").at("p").get<Elt>();
      std::uint32_t M = j.at("ring").at("M").get<std::uint32_t>();
      CoeffRing R = M == 1 ? CoeffRing::residue_field(p) : CoeffRing::truncated(p, M);
      long weight = j.value("weight", 1);
      std::vector<QExpansion> basis;
      for (const auto& row : j.at("basis")) {
        QExpansion f(R, row.size() - 1);
        f.a = row.get<Vec>();
        for (auto& x : f.a) x %= R.modulus;
        f.weight = weight;
        basis.push_back(std::move(f));
      }
      HeckeSpace space(R, basis);
      auto chi = DirichletCharacter::trivial(R);
      std::vector<QExpansion> images;
      for (const auto& f : space.basis) {
        if (hecke_op == "theta")
          images.push_back(theta(f));
        else if (hecke_op.size() >= 2 && (hecke_op[0] == 'T' || hecke_op[0] == 'U' ||
                                          hecke_op[0] == 'V')) {
          std::uint64_t ell = std::strtoull(hecke_op.c_str() + 1, nullptr, 10);
          if (hecke_op[0] == 'T')
            images.push_back(hecke_T(f, ell, weight, chi));
          else if (hecke_op[0] == 'U')
            images.push_back(hecke_U(f, ell));
          else
            images.push_back(hecke_V(f, ell));
        } else {
          throw CLI::ValidationError("unknown operator: " + hecke_op);
        }
      }
      Mat m = operator_matrix(space, hecke_op, images);
      if (format == "json") {
        Report rep;
        rep.config = {{"space", hecke_space}, {"op", hecke_op}};
        rep.add("operator matrix", true, "hecke-matrix",
                {{"rows", m.rows}, {"cols", m.cols}, {"entries", m.a}});
        return finish(rep, format);
      }
      print_matrix(m);
      return 0;
    }

    if (c_qexp->parsed()) {
      CoeffRing R = qexp_M == 1 ? CoeffRing::residue_field(qexp_mod)
                                : CoeffRing::truncated(qexp_mod, qexp_M);
      QExpansion f(R, qexp_prec);
      if (qexp_args.empty()) throw CLI::ValidationError("missing qexp spec");
      if (qexp_args[0] == "eta") {
        std::vector<std::pair<std::uint64_t, long>> pairs;
        for (std::size_t i = 1; i < qexp_args.size(); ++i) {
          auto colon = qexp_args[i].find(':');
          if (colon == std::string::npos)
            throw CLI::ValidationError("eta arguments look like d:r");
          pairs.emplace_back(std::stoull(qexp_args[i].substr(0, colon)),
                             std::stol(qexp_args[i].substr(colon + 1)));
        }
        f = eta_quotient(pairs, qexp_prec, R);
      } else if (qexp_args[0] == "eis") {
        if (qexp_args.size() != 2) throw CLI::ValidationError("usage: qexp eis <k>");
        f = eisenstein(static_cast<std::uint32_t>(std::stoul(qexp_args[1])), qexp_prec, R);
      } else {
        throw CLI::ValidationError("unknown qexp kind: " + qexp_args[0]);
      }
      if (format == "json") {
        Report rep;
        rep.config = {{"spec", qexp_args}, {"prec", qexp_prec}, {"mod", qexp_mod}};
        rep.add("q-expansion", true, "q-expansion",
                {{"weight", f.weight}, {"level", f.level}, {"coefficients", f.a}});
        return finish(rep, format);
      }
      for (std::size_t n = 0; n < f.a.size(); ++n)
        std::cout << "a(" << n << ") = " << f.a[n] << "\n";
      return 0;
    }

    if (c_def->parsed()) {
      Report rep;
      rep.config = {{"fixture", def_fixture}, {"p", def_p}, {"M", def_M}, {"bound", def_d}};
      if (def_fixture == "special-fibre") {
        auto t3 = theorem_three_pipeline(def_p, std::max<std::uint32_t>(def_d, 4));
        rep.add("regular sequence", t3.regseq.all_pass(), "regular-sequence-proxy");
        rep.add("dim B = 4", t3.dim_B == 4, "fibre-quotient-dimension", {{"dim", t3.dim_B}});
        rep.add("dim B[m] = 3", t3.socle_dim == 3, "socle-dimension",
                {{"socle_dim", t3.socle_dim}, {"note", t3.socle_note}});
        rep.add("embedding dim 3 with square-zero maximal ideal",
                t3.embedding_dim == 3 && t3.square_zero, "square-zero-embedding",
                {{"embedding_dim", t3.embedding_dim}});
        rep.add("canonical module generator count", t3.canonical_generator_count == 3,
                "canonical-generators", {{"count", t3.canonical_generator_count}});
        rep.add("group-ring tensor keeps the generator count", t3.tensor_preserves_count,
                "tensor-length-check", {{"tensor_socle", t3.tensor_socle_dim}});
        rep.add("multiplicity", multiplicity_from_socle(t3.socle_dim, 1) == 2,
                "multiplicity-two", {{"value", multiplicity_from_socle(t3.socle_dim, 1)}});
      } else if (def_fixture == "unramified") {
        auto A = build_runr(def_p, def_M, def_d);
        rep.add("unramified moduli ring built", true, "unramified-ring",
                {{"counts", A.hilbert_counts()}, {"free", A.free_over_coeff()}});
      } else if (def_fixture == "eigenvalue-extension") {
        auto r = build_raunr(def_p, def_M, def_d);
        rep.add("free of rank 2", r.free_rank2, "quadratic-extension-rank2",
                {{"counts_base", r.counts_runr}, {"counts_ext", r.counts_raunr}});
      } else if (def_fixture == "ideal-equality") {
        auto pos = check_ideal_equality(def_p, def_M, def_d);
        auto neg = check_ideal_equality(def_p, def_M, def_d, 1, false);
        rep.add("direction (i): faithful action on the eigenvalue line",
                pos.direction_doubling_in_unramified, "unramified-equals-doubling");
        rep.add("direction (ii): inertial identity reduces to zero",
                pos.direction_unramified_in_doubling, "unramified-equals-doubling");
        rep.add("negative control fails direction (ii)",
                !neg.direction_unramified_in_doubling, "unramified-equals-doubling");
      } else {
        throw CLI::ValidationError("unknown fixture: " + def_fixture);
      }
      return finish(rep, format);
    }

    if (c_suite->parsed()) {
      SuiteOptions opt;
      opt.budget = suite_budget;
      Report rep = acceptance_suite(opt);
      Report again = acceptance_suite(opt);
      bool deterministic = rep.to_json() == again.to_json();
      rep.add("suite determinism (double run byte-identical)", deterministic, "determinism");
      return finish(rep, format);
    }

    if (c_gen->parsed()) {
      auto write = [&](const std::string& name, const std::string& content) {
        std::ofstream out(gen_dir + "/" + name);
        out << content;
      };
      write("unramified.pres", runr_presentation(3, 1, 4).to_text());
      write("eigenvalue-extension.pres", raunr_presentation(3, 1, 4).to_text());
      write("special-fibre.pres", special_fibre_presentation(3, 1, 3).to_text());
      write("fibre8.pres", fibre8_presentation(3, 4).to_text());
      nlohmann::json manifest;
      manifest["schema"] = "twpatch-fixtures/1";
      manifest["presentations"] = {
          {{"file", "unramified.pres"},
           {"designated", {"phi1", "phi2", "phi3", "phi4"}}},
          {{"file", "eigenvalue-extension.pres"},
           {"designated", {"phi1", "phi2", "phi3", "phi4", "beta"}}},
          {{"file", "special-fibre.pres"},
           {"designated", {"phi1", "phi2", "phi3", "phi4", "x1", "x2", "x3", "x4", "beta"}}},
          {{"file", "fibre8.pres"},
           {"designated", {"a", "b", "c", "phi1", "phi2", "phi3", "phi4", "beta"}}}};
      write("defring-manifest.json", manifest.dump(2) + "\n");
      {
        GroupRing S2(CoeffRing::truncated(3, 1), 1, 2);
        GroupRingModule m;
        m.S = S2;
        m.gens = 1;
        m.relations.push_back({S2.gen_minus_one(0)});
        m.relations.push_back({S2.gen_minus_one(1)});
        write("O-over-S-q2.json", m.to_json() + "\n");
        GroupRing S1(CoeffRing::truncated(3, 2), 1, 1);
        GroupRingModule m1;
        m1.S = S1;
        m1.gens = 1;
        m1.relations.push_back({S1.gen_minus_one(0)});
        write("O-over-S-q1.json", m1.to_json() + "\n");
      }
      write("trivial-system.json", trivial_system(3, 2, 3).to_json() + "\n");
      write("engineered-rank1.json", engineered_rank1_system(3, 3).to_json() + "\n");
      write("unbalanced-system.json", unbalanced_system(3, 2).to_json() + "\n");
      write("alternating-system.json", alternating_system(3, 2).to_json() + "\n");
      {
        auto F5 = CoeffRing::residue_field(5);
        auto f = eta_quotient({{1, 1}, {23, 1}}, 40, F5);
        nlohmann::json sp;
        sp["ring"] = {{"p", 5}, {"M", 1}};
        sp["weight"] = 1;
        sp["level"] = 23;
        sp["basis"] = {f.a};
        write("eta23-space.json", sp.dump(2) + "\n");
      }
      std::cout << "fixtures written to " << gen_dir << "\n";
      return 0;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
