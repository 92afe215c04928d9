#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "tor_oracle.hpp"
#include "twpatch/grpring.hpp"

using namespace twpatch;

namespace {

GroupRing ring(Elt p, std::uint32_t M, std::uint32_t N, std::uint32_t q) {
  return GroupRing(CoeffRing::truncated(p, M), N, q);
}

GroupRingModule free_module(const GroupRing& S, std::size_t r) {
  GroupRingModule m;
  m.S = S;
  m.gens = r;
  return m;
}

// O with trivial group action: S / (t_1 - 1, ..., t_q - 1).
GroupRingModule trivial_O(const GroupRing& S) {
  GroupRingModule m;
  m.S = S;
  m.gens = 1;
  for (std::uint32_t i = 0; i < S.q; ++i) m.relations.push_back({S.gen_minus_one(i)});
  return m;
}

// k = S / (p, t_i - 1).
GroupRingModule residue_k(const GroupRing& S) {
  GroupRingModule m = trivial_O(S);
  Vec pvec = S.zero();
  pvec[0] = S.O.p % S.O.modulus;
  m.relations.insert(m.relations.begin(), {pvec});
  return m;
}

GroupRingModule direct_sum(const GroupRingModule& a, const GroupRingModule& b) {
  GroupRingModule m;
  m.S = a.S;
  m.gens = a.gens + b.gens;
  for (const auto& rel : a.relations) {
    std::vector<Vec> row = rel;
    for (std::size_t i = 0; i < b.gens; ++i) row.push_back(a.S.zero());
    m.relations.push_back(std::move(row));
  }
  for (const auto& rel : b.relations) {
    std::vector<Vec> row(a.gens, a.S.zero());
    for (const auto& s : rel) row.push_back(s);
    m.relations.push_back(std::move(row));
  }
  return m;
}

// Presentation of the submodule of S generated by the given elements:
// S^g / (syzygies).
GroupRingModule submodule_of_S(const GroupRing& S, const std::vector<Vec>& elts) {
  std::size_t B = S.order();
  Mat cols(S.O, B, elts.size() * B);
  for (std::size_t j = 0; j < elts.size(); ++j)
    for (std::size_t a = 0; a < B; ++a) {
      for (std::size_t g = 0; g < B; ++g) {
        if (!elts[j][g]) continue;
        std::size_t tg = S.group_mul(a, g);
        cols.at(tg, j * B + a) = S.O.add(cols.at(tg, j * B + a), elts[j][g]);
      }
    }
  GroupRingModule m;
  m.S = S;
  m.gens = elts.size();
  for (const auto& k : mat_kernel(cols)) {
    std::vector<Vec> rel;
    for (std::size_t j = 0; j < elts.size(); ++j)
      rel.emplace_back(k.begin() + static_cast<long>(j * B),
                       k.begin() + static_cast<long>((j + 1) * B));
    m.relations.push_back(std::move(rel));
  }
  return m;
}

tor_oracle::ModuleData to_oracle(const GroupRingModule& m) {
  tor_oracle::ModuleData md{
      tor_oracle::GroupData(m.S.O.p, m.S.O.M, m.S.N, m.S.q), m.gens, {}};
  for (const auto& rel : m.relations) {
    std::vector<tor_oracle::OVec> row;
    for (const auto& s : rel) row.push_back(s);
    md.relations.push_back(std::move(row));
  }
  return md;
}

void cross_check_tor(const GroupRingModule& m) {
  auto [t0, t1] = tor_dims(m);
  auto md = to_oracle(m);
  CHECK(t0 == tor_oracle::t0_oracle(md));
  CHECK(t1 == tor_oracle::t1_oracle(md));
}

}  // namespace

TEST_CASE("group ring arithmetic") {
  auto S = ring(3, 2, 1, 1);
  CHECK(S.order() == 3);
  auto t = S.gen(0);
  auto t2 = S.mul(t, t);
  CHECK(t2[2] == 1);
  CHECK(S.mul(t2, t) == S.one());
  CHECK(S.augmentation(S.gen_minus_one(0)) == 0);
  CHECK(S.is_unit(S.one()));
  CHECK(!S.is_unit(S.gen_minus_one(0)));
  auto u = S.add(S.one(), S.gen_minus_one(0));  // = t, a unit
  auto ui = S.inv(u);
  REQUIRE(ui.has_value());
  CHECK(S.mul(u, *ui) == S.one());
}

TEST_CASE("minimal presentation spec examples") {
  auto S = ring(3, 2, 1, 2);
  // S with a spurious zero relation (t1 - t1).
  GroupRingModule m = free_module(S, 1);
  m.relations.push_back({S.sub(S.gen(0), S.gen(0))});
  auto min = minimal_presentation(m);
  CHECK(min.gens == 1);
  CHECK(min.relations.empty());

  // O: one generator, q relations, none removable.
  auto minO = minimal_presentation(trivial_O(S));
  CHECK(minO.gens == 1);
  CHECK(minO.relations.size() == 2);

  // k: one generator, q + 1 relations.
  auto mink = minimal_presentation(residue_k(S));
  CHECK(mink.gens == 1);
  CHECK(mink.relations.size() == 3);

  // A presentation with a unit entry collapses.
  GroupRingModule red = free_module(S, 2);
  red.relations.push_back({S.one(), S.gen_minus_one(0)});
  auto minr = minimal_presentation(red);
  CHECK(minr.gens == 1);
}

TEST_CASE("minimal presentation is idempotent") {
  auto S = ring(3, 1, 1, 2);
  for (const auto& m : {trivial_O(S), residue_k(S), free_module(S, 2)}) {
    auto a = minimal_presentation(m);
    auto b = minimal_presentation(a);
    CHECK(a.gens == b.gens);
    CHECK(a.relations.size() == b.relations.size());
  }
}

TEST_CASE("tor_dims and defect spec examples") {
  // Free modules: (r, 0), defect r.
  for (std::uint32_t q = 1; q <= 2; ++q)
    for (std::uint32_t N = 1; N <= (q == 1 ? 2u : 1u); ++N)
      for (std::uint32_t M = 1; M <= 2; ++M)
        for (std::size_t r = 1; r <= 3; ++r) {
          auto S = ring(3, M, N, q);
          auto f = free_module(S, r);
          auto [t0, t1] = tor_dims(f);
          CHECK(t0 == r);
          CHECK(t1 == 0);
          CHECK(defect(f) == static_cast<long>(r));
        }

  // O over S_N: (1, q), defect 1 - q.
  {
    auto S1 = ring(3, 1, 1, 1);
    auto [a0, a1] = tor_dims(trivial_O(S1));
    CHECK(a0 == 1);
    CHECK(a1 == 1);
    CHECK(defect(trivial_O(S1)) == 0);
    auto S2 = ring(3, 1, 1, 2);
    auto [b0, b1] = tor_dims(trivial_O(S2));
    CHECK(b0 == 1);
    CHECK(b1 == 2);
    CHECK(defect(trivial_O(S2)) == -1);
  }
}

TEST_CASE("tor_dims cross-checked against the independent oracle") {
  for (auto [p, M, N, q] : {std::tuple<Elt, std::uint32_t, std::uint32_t, std::uint32_t>
                                {3, 1, 1, 1},
                            {3, 2, 1, 1},
                            {3, 1, 1, 2},
                            {3, 2, 1, 2},
                            {3, 1, 2, 1},
                            {3, 2, 2, 1},
                            {5, 1, 1, 1}}) {
    auto S = ring(p, M, N, q);
    cross_check_tor(free_module(S, 2));
    cross_check_tor(trivial_O(S));
    cross_check_tor(residue_k(S));
  }
}

TEST_CASE("tor_dims vs oracle on random presentations") {
  std::mt19937_64 rng(2024);
  int done = 0;
  while (done < 25) {
    std::uint32_t M = 1 + rng() % 2, q = 1 + rng() % 2, N = q == 1 ? 1 + rng() % 2 : 1;
    auto S = ring(3, M, N, q);
    GroupRingModule m;
    m.S = S;
    m.gens = 1 + rng() % 2;
    std::size_t nrel = rng() % 3;
    for (std::size_t j = 0; j < nrel; ++j) {
      std::vector<Vec> rel;
      for (std::size_t i = 0; i < m.gens; ++i) {
        Vec s = S.zero();
        for (std::size_t g = 0; g < S.order(); ++g)
          if (rng() % 3 == 0) s[g] = rng() % S.O.modulus;
        // Keep entries in the maximal ideal so the presentation is
        // already generator-minimal roughly half of the time.
        if (rng() % 2) s[0] = S.O.sub(s[0], S.augmentation(s));
        rel.push_back(std::move(s));
      }
      m.relations.push_back(std::move(rel));
    }
    cross_check_tor(m);
    ++done;
  }
}

TEST_CASE("defect is additive on direct sums") {
  std::mt19937_64 rng(7);
  auto S = ring(3, 2, 1, 1);
  std::vector<GroupRingModule> pool{free_module(S, 1), trivial_O(S), residue_k(S)};
  for (const auto& a : pool)
    for (const auto& b : pool) CHECK(defect(direct_sum(a, b)) == defect(a) + defect(b));
}

TEST_CASE("is_balanced emits a valid square presentation") {
  auto S = ring(3, 2, 1, 1);
  auto resO = is_balanced(trivial_O(S));
  CHECK(resO.balanced);
  CHECK(resO.defect == 0);
  REQUIRE(resO.square.has_value());
  CHECK(resO.square->gens == 1);
  CHECK(resO.square->relations.size() == 1);
  // The square presentation presents the same module: same tor data
  // and coinvariants.
  CHECK(tor_dims(*resO.square) == tor_dims(trivial_O(S)));
  CHECK(coinvariants(*resO.square) == coinvariants(trivial_O(S)));

  auto S2 = ring(3, 1, 1, 2);
  auto res2 = is_balanced(trivial_O(S2));
  CHECK(!res2.balanced);
  CHECK(res2.defect == -1);
  CHECK(!res2.square.has_value());

  auto resF = is_balanced(free_module(S, 1));
  CHECK(resF.balanced);
  REQUIRE(resF.square.has_value());
  for (const auto& rel : resF.square->relations)
    for (const auto& s : rel) CHECK(Span::is_zero_vec(s));
}

TEST_CASE("coinvariants") {
  // S_N itself: one factor Z/p^M.
  for (std::uint32_t M = 1; M <= 2; ++M) {
    auto S = ring(3, M, 1, 1);
    CHECK(coinvariants(free_module(S, 1)) == std::vector<std::uint32_t>{M});
    CHECK(coinvariants(trivial_O(S)) == std::vector<std::uint32_t>{M});
  }

  // Augmentation ideal of S_1 for p = 3, q = 1, M = 1: the ideal is
  // principal (generated by t - 1), so the coinvariants are a single
  // Z/3.  Cross-checked here by exhaustive enumeration of the
  // 27-element group ring.
  {
    auto S = ring(3, 1, 1, 1);
    auto u = S.gen_minus_one(0);
    auto aug_ideal = submodule_of_S(S, {u});
    auto co = coinvariants(aug_ideal);
    CHECK(co == std::vector<std::uint32_t>{1});

    // Enumeration oracle: |a| and |u a| directly.
    std::set<Vec> ideal;
    for (Elt a = 0; a < 3; ++a)
      for (Elt b = 0; b < 3; ++b)
        for (Elt c = 0; c < 3; ++c) {
          Vec x{a, b, c};
          if (S.augmentation(x) == 0) ideal.insert(x);
        }
    CHECK(ideal.size() == 9);
    std::set<Vec> ua;
    for (const auto& x : ideal) ua.insert(S.mul(u, x));
    CHECK(ua.size() == 3);  // quotient has 9/3 = 3 elements: one Z/3
  }

  // For q = 2 the augmentation ideal needs two generators and the
  // coinvariants are (Z/3)^2.
  {
    auto S = ring(3, 1, 1, 2);
    auto aug_ideal = submodule_of_S(S, {S.gen_minus_one(0), S.gen_minus_one(1)});
    auto co = coinvariants(aug_ideal);
    CHECK(co == std::vector<std::uint32_t>{1, 1});
  }
}

TEST_CASE("six-term sequence on the named modules") {
  // M = S_N: all Tor terms vanish.
  {
    auto S = ring(3, 2, 1, 1);
    auto rep = six_term_check(free_module(S, 1));
    CHECK(rep.pass());
    CHECK(rep.len_tor1_O == 0);
    CHECK(rep.dim_tor1_k == 0);
    CHECK(rep.len_coinv == 2);
    CHECK(rep.dim_m_mod_k == 1);
  }
  // M = O, q = 1, coefficient M = 2: both Tor terms have length 1.
  {
    auto S = ring(3, 2, 1, 1);
    auto rep = six_term_check(trivial_O(S));
    CHECK(rep.pass());
    CHECK(rep.len_tor1_O == 1);
    CHECK(rep.dim_tor1_k == 1);
  }
  // M = k, q = 1.
  {
    auto S = ring(3, 2, 1, 1);
    auto rep = six_term_check(residue_k(S));
    CHECK(rep.pass());
    CHECK(rep.dim_tor1_k == 2);
  }
}

TEST_CASE("six-term sequence on a generated corpus") {
  std::mt19937_64 rng(99);
  int pass_count = 0, total = 0;
  // Deterministic fixed corpus: free, cyclic quotients, sums, randoms.
  std::vector<GroupRingModule> corpus;
  for (std::uint32_t M = 1; M <= 2; ++M)
    for (std::uint32_t q = 1; q <= 2; ++q) {
      auto S = ring(3, M, 1, q);
      corpus.push_back(free_module(S, 1));
      corpus.push_back(free_module(S, 2));
      corpus.push_back(trivial_O(S));
      corpus.push_back(residue_k(S));
      corpus.push_back(direct_sum(trivial_O(S), free_module(S, 1)));
    }
  {
    auto S = ring(3, 2, 2, 1);
    corpus.push_back(trivial_O(S));
    corpus.push_back(free_module(S, 1));
  }
  while (corpus.size() < 30) {
    auto S = ring(3, 1 + rng() % 2, 1, 1 + rng() % 2);
    GroupRingModule m;
    m.S = S;
    m.gens = 1 + rng() % 2;
    std::size_t nrel = 1 + rng() % 2;
    for (std::size_t j = 0; j < nrel; ++j) {
      std::vector<Vec> rel;
      for (std::size_t i = 0; i < m.gens; ++i) {
        Vec s = S.zero();
        for (std::size_t g = 0; g < S.order(); ++g)
          if (rng() % 2 == 0) s[g] = rng() % S.O.modulus;
        rel.push_back(std::move(s));
      }
      m.relations.push_back(std::move(rel));
    }
    corpus.push_back(std::move(m));
  }
  for (const auto& m : corpus) {
    auto rep = six_term_check(m);
    ++total;
    if (rep.pass()) ++pass_count;
    CHECK(rep.pass());
  }
  CHECK(total >= 20);
  CHECK(pass_count == total);
}

TEST_CASE("finite-level defect identity on modules with free coinvariants") {
  // t1 - len(Tor1(M,O)/p) = t0 - dim_k ker(p : M_D -> M_D), checked on
  // modules whose coinvariants are free over Z/p^M.
  for (std::uint32_t M = 1; M <= 2; ++M)
    for (std::uint32_t q = 1; q <= 2; ++q) {
      auto S = ring(3, M, 1, q);
      for (const auto& m : {free_module(S, 1), free_module(S, 2), trivial_O(S),
                            direct_sum(trivial_O(S), free_module(S, 1))}) {
        auto co = coinvariants(m);
        bool free_coinv = true;
        for (auto e : co)
          if (e != M) free_coinv = false;
        if (!free_coinv) continue;
        auto [t0, t1] = tor_dims(m);
        auto rep = six_term_check(m);
        // len(Tor1/p): Tor1(M,O) is killed by p on these examples up
        // to its full length only when M = 1; compute via the report.
        // dim ker(p) on free coinvariants = rank = number of factors.
        std::uint64_t rank = co.size();
        // dim_k Tor1(M,O)/p is bounded by len_tor1_O; for these fixed
        // examples Tor1(M,O) is elementary (p * Tor1 = 0), so the
        // quotient has dimension len_tor1_O.
        long lhs = static_cast<long>(t1) - static_cast<long>(rep.len_tor1_O);
        long rhs = static_cast<long>(t0) - static_cast<long>(rank);
        CHECK(lhs == rhs);
      }
    }
}

TEST_CASE("module JSON round trip") {
  auto S = ring(3, 2, 1, 2);
  auto m = trivial_O(S);
  auto m2 = GroupRingModule::from_json(m.to_json());
  CHECK(m2.S == m.S);
  CHECK(m2.gens == m.gens);
  CHECK(m2.relations == m.relations);
}
