// Acceptance battery: one pass/fail line per criterion, nonzero exit
// on any failure.  Wraps the library suite and adds the runtime
// bounds, the independent Tor oracle cross-check, and the byte-level
// determinism comparison.

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <string>

#include "tor_oracle.hpp"
#include "twpatch/defring.hpp"
#include "twpatch/grpring.hpp"
#include "twpatch/patch.hpp"
#include "twpatch/suite.hpp"

using namespace twpatch;

namespace {

int failures = 0;

void line(const std::string& id, bool ok, const std::string& detail = "") {
  std::cout << (ok ? "PASS " : "FAIL ") << id;
  if (!detail.empty()) std::cout << "  [" << detail << "]";
  std::cout << "\n";
  if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool cert_pass(const Report& rep, const std::string& prefix) {
  bool found = false, ok = true;
  for (const auto& c : rep.certificates)
    if (c.name.rfind(prefix, 0) == 0) {
      found = true;
      if (c.status != "PASS") ok = false;
    }
  return found && ok;
}

tor_oracle::ModuleData to_oracle(const GroupRingModule& m) {
  tor_oracle::ModuleData md{tor_oracle::GroupData(m.S.O.p, m.S.O.M, m.S.N, m.S.q), m.gens, {}};
  for (const auto& rel : m.relations) {
    std::vector<tor_oracle::OVec> row;
    for (const auto& s : rel) row.push_back(s);
    md.relations.push_back(std::move(row));
  }
  return md;
}

}  // namespace

int main() {
  SuiteOptions opt;
  if (const char* s = std::getenv("TWPATCH_BUDGET")) opt.budget = std::strtoull(s, nullptr, 10);
  Report rep = acceptance_suite(opt);

  // 1. Theorem-three certificate under its runtime bound.
  {
    auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    for (Elt p : {3, 5}) {
      auto t3 = theorem_three_pipeline(p, 4);
      ok = ok && t3.pass && t3.dim_B == 4 && t3.socle_dim == 3 && t3.embedding_dim == 3 &&
           t3.square_zero;
    }
    double el = seconds_since(t0);
    line("01 theorem-three certificate (p=3,5; dim 4, socle 3, embdim 3, m^2=0)",
         ok && el < 5.0, el < 5.0 ? "" : "runtime bound exceeded");
  }

  // 2. Multiplicity arithmetic.
  line("02 multiplicity arithmetic ((3+1)/2 = 2, (1+1)/2 = 1, parity guard)",
       cert_pass(rep, "multiplicity arithmetic"));

  // 3. Quadratic-extension freeness.
  line("03 eigenvalue extension free of rank 2 (M = 1, 2; d = 4)",
       cert_pass(rep, "eigenvalue extension free of rank 2"));

  // 4. Ideal equality with negative control, under its bound.
  {
    auto t0 = std::chrono::steady_clock::now();
    auto pos = check_ideal_equality(3, 1, 3);
    auto neg = check_ideal_equality(3, 1, 3, 1, false);
    bool ok = pos.direction_doubling_in_unramified && pos.direction_unramified_in_doubling &&
              !neg.direction_unramified_in_doubling;
    double el = seconds_since(t0);
    line("04 ideal equality both directions + negative control", ok && el < 10.0,
         el < 10.0 ? "" : "runtime bound exceeded");
  }

  // 5. Degeneracy determinant congruence.
  line("05 degeneracy determinant congruence (exhaustive p = 3, 5, 7 and Z/9 scalar)",
       cert_pass(rep, "degeneracy determinant congruence"));

  // 6. U_p block quadratic relation.
  line("06 U_p block matrix quadratic relation (200 random T_p over Z/9, F_5)",
       cert_pass(rep, "U_p block matrix quadratic relation"));

  // 7. Doubling detector.
  line("07 doubling detector (standard true, degenerate control false)",
       cert_pass(rep, "doubling detector"));

  // 8. Hasse-lift battery.
  line("08 Hasse-lift battery (E_{p-1} = 1 mod p; T_l equivariance l = 2, 3)",
       cert_pass(rep, "Hasse-lift battery"));

  // 9. psi-injectivity shadow.
  line("09 psi rank = 2 x basis size on the weight-one fixture",
       cert_pass(rep, "psi rank on the doubled weight-one basis"));

  // 10. Defect calculus, cross-checked against the independent oracle
  // wherever the naive ambient computation is feasible (the library
  // values on the full grid are asserted by the suite certificate).
  {
    bool ok = cert_pass(rep, "defect calculus");
    for (std::uint32_t N = 1; N <= 2 && ok; ++N)
      for (std::uint32_t M = 1; M <= 2 && ok; ++M)
        for (std::uint32_t q = 1; q <= 2 && ok; ++q) {
          GroupRing S(CoeffRing::truncated(3, M), N, q);
          std::size_t B = S.order();
          GroupRingModule O_mod;
          O_mod.S = S;
          O_mod.gens = 1;
          for (std::uint32_t i = 0; i < q; ++i) O_mod.relations.push_back({S.gen_minus_one(i)});
          if (B <= 81 && !(B == 81 && M == 2)) {
            auto [t0v, t1v] = tor_dims(O_mod);
            auto md = to_oracle(O_mod);
            if (t0v != tor_oracle::t0_oracle(md) || t1v != tor_oracle::t1_oracle(md))
              ok = false;
          }
          for (std::size_t r = 1; r <= 3 && ok; ++r) {
            GroupRingModule f;
            f.S = S;
            f.gens = r;
            if (r * B > 81) continue;
            auto [ft0, ft1] = tor_dims(f);
            auto fd = to_oracle(f);
            if (ft0 != tor_oracle::t0_oracle(fd) || ft1 != tor_oracle::t1_oracle(fd))
              ok = false;
          }
        }
    line("10 defect calculus vs independent resolution oracle", ok);
  }

  // 11. Six-term corpus.
  line("11 six-term Tor sequence corpus (>= 20 modules)",
       cert_pass(rep, "six-term Tor sequence corpus"));

  // 12. Patching pipeline under its runtime bound.
  {
    auto t0 = std::chrono::steady_clock::now();
    auto triv = run_patching(trivial_system(3, 2, 3), 3, opt.budget);
    auto eng = run_patching(engineered_rank1_system(3, 3), 3, opt.budget);
    auto unb = run_patching(unbalanced_system(3, 2), 2, opt.budget);
    bool ok = triv.pass() && triv.freeness.rank == 1 && eng.pass() &&
              eng.freeness.rank == 1 && unb.aborted &&
              unb.abort_stage.find("hypotheses") != std::string::npos;
    double el = seconds_since(t0);
    line("12 patching pipeline (trivial + engineered free rank 1; unbalanced aborts)",
         ok && el < 60.0, el < 60.0 ? "" : "runtime bound exceeded");
  }

  // 13. Determinism: the suite report is byte-identical across runs.
  {
    Report again = acceptance_suite(opt);
    line("13 suite determinism (byte-identical reports)", rep.to_json() == again.to_json());
  }

  if (failures) {
    std::cout << failures << " criterion(s) failed\n";
    return 1;
  }
  std::cout << "all acceptance criteria passed\n";
  return 0;
}
