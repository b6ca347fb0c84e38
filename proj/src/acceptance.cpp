#include "basilica/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "basilica/element_index.hpp"
#include "basilica/nu.hpp"
#include "basilica/presentation.hpp"
#include "basilica/schreier.hpp"
#include "basilica/walk.hpp"

namespace basilica {

namespace {

const AutomatonGroupDef& basilica_def() {
  static AutomatonGroupDef def = AutomatonGroupDef::basilica();
  return def;
}

// Collects check outcomes; the criterion passes when every check holds.
struct Checker {
  bool pass = true;
  std::ostringstream detail;

  void expect(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (detail.tellp() > 0) detail << "; ";
      detail << "FAILED: " << what;
    }
  }
  void note(const std::string& s) {
    if (detail.tellp() > 0) detail << "; ";
    detail << s;
  }
};

Word random_word(RngStream& rng, int max_len) {
  int n = static_cast<int>(rng.uniform_below(max_len + 1));
  Word w;
  for (int i = 0; i < n; ++i) {
    int k = static_cast<int>(rng.uniform_below(4));
    w.push(make_letter(k / 2, k % 2 == 0));
  }
  return w;
}

// 1. Closed forms, tolerance 1e-12.
void criterion_closed_forms(Checker& c, int) {
  c.expect(std::abs(f_rate(1.0) - 0.375) < 1e-12, "f(1) = 0.375");
  c.expect(std::abs(t_circ(1.0) - 8.0 / 3.0) < 1e-12, "t_circ(1) = 8/3");
  for (double r : {0.5, 1.0, std::sqrt(2.0), 3.0})
    c.expect(std::abs(f_rate(r) * f_rate(2.0 / r) - 0.125) < 1e-12,
             "f(r) f(2/r) = 1/8 at r = " + std::to_string(r));
}

// 2. Induced-walk law within 3 sigma at N = 1e5 for r in {1, 2, sqrt 2}.
void criterion_induced_law(Checker& c, int) {
  std::uint64_t seed = 1001;
  for (double r : {1.0, 2.0, std::sqrt(2.0)}) {
    auto res = induced_law_test(basilica_def(), r, 100000, seed++);
    c.expect(res.pass, "induced law within 3 sigma at r = " +
                           std::to_string(r));
  }
  c.note("N = 1e5 per r");
}

// 3. m/sigma(m) and m/tau(m) within 1% of f(r) at m = 1e5 for r in {1, sqrt 2}.
void criterion_stopping_rates(Checker& c, int) {
  std::uint64_t seed = 2001;
  for (double r : {1.0, std::sqrt(2.0)}) {
    auto rates = estimate_stopping_rates(basilica_def(), r, 100000, seed++);
    c.expect(std::abs(rates.sigma_rate - f_rate(r)) / f_rate(r) < 0.01,
             "sigma rate within 1% at r = " + std::to_string(r));
    c.expect(std::abs(rates.tau_rate - f_rate(r)) / f_rate(r) < 0.01,
             "tau rate within 1% at r = " + std::to_string(r));
  }
}

// 4. Presentation relators for n <= 6; [a,b] nontrivial; [a, a^{b^3}] trivial.
void criterion_relators(Checker& c, int) {
  auto report = verify_relations(6);
  c.expect(report.all_pass, "sigma^n [a, a^b] trivial for n <= 6");
  c.expect(report.eliminated.size() == 3 && report.eliminated[1].trivial,
           "[a, a^{b^3}] trivial");
  auto& def = basilica_def();
  Word a = def.parse_word("a"), b = def.parse_word("b");
  c.expect(!is_trivial(commutator(a, b), def), "[a, b] nontrivial");
}

// 5. nu properties on ball(5) (exact) and 1e4 random words (upper bound);
// subtree-minimum oracle on ball(5); #nu_ball(n) <= 40^n for n <= 4.
void criterion_nu(Checker& c, int) {
  auto& def = basilica_def();
  NuContext ctx(def);
  ctx.ball().extend_to(5);
  auto ball5 = ctx.ball().ball(5);
  TrivialityCache cache;
  auto trees = enumerate_subtrees(6);

  bool exact_ok = true, oracle_ok = true;
  std::vector<int> values;
  for (const Word& g : ball5) {
    auto v = nu(g, ctx, NuMode::exact);
    if (!v) {
      exact_ok = false;
      break;
    }
    values.push_back(v->value);
    auto d = decompose(g, def);
    int n0 = nu(d.sections[0], ctx)->value;
    int n1 = nu(d.sections[1], ctx)->value;
    exact_ok &= n0 + n1 <= v->value && v->value <= n0 + n1 + 1;
    exact_ok &= nu(g.inverse(), ctx)->value == v->value;
    exact_ok &= v->value <= static_cast<int>(g.size());
    exact_ok &= (v->value == 0) == is_trivial(g, def, &cache);
    int best = INT32_MAX;
    for (const auto& S : trees) {
      auto s = nu_subtree(g, S, ctx);
      if (s) best = std::min(best, *s);
    }
    oracle_ok &= best == v->value;
  }
  c.expect(exact_ok, "exact-mode axioms on ball(5)");
  c.expect(oracle_ok, "subtree-minimum oracle equals recursive nu on ball(5)");

  RngStream rng(3001, 0);
  bool tri_ok = true;
  for (int t = 0; t < 1000 && tri_ok; ++t) {
    std::size_t i = rng.uniform_below(ball5.size());
    std::size_t j = rng.uniform_below(ball5.size());
    auto vij = nu(ball5[i] * ball5[j], ctx, NuMode::exact);
    if (vij) tri_ok = vij->value <= values[i] + values[j];
  }
  c.expect(tri_ok, "exact triangle inequality on sampled ball(5) pairs");

  bool upper_ok = true;
  for (int t = 0; t < 10000 && upper_ok; ++t) {
    Word g = random_word(rng, 30);
    Word h = random_word(rng, 30);
    int vg = nu_upper(g, ctx), vh = nu_upper(h, ctx);
    upper_ok &= nu_upper(g * h, ctx) <= vg + vh;
    upper_ok &= nu_upper(g.inverse(), ctx) == vg;
    upper_ok &= vg <= static_cast<int>(g.size());
    auto d = decompose(g, def);
    int n0 = nu_upper(d.sections[0], ctx), n1 = nu_upper(d.sections[1], ctx);
    upper_ok &= n0 + n1 <= vg && vg <= n0 + n1 + 1;
  }
  c.expect(upper_ok, "upper-bound axioms on 1e4 random words");

  for (int n = 0; n <= 4; ++n) {
    auto bn = nu_ball(ctx, n);
    c.expect(static_cast<double>(bn.size()) <= std::pow(40.0, n),
             "#nu_ball(" + std::to_string(n) + ") <= 40^n");
  }
}

// 6. Exact return probabilities, mass, free-group domination, and the
// Varopoulos-Carne bound for m <= 8.
void criterion_exact_distributions(Checker& c, int) {
  auto& def = basilica_def();
  BallEnumerator ball(def);
  ElementIndex& index = ball.index();
  int id1 = index.intern(Word{});

  auto d2 = exact_distribution(def, 2, 1.0, index);
  c.expect(d2.ok && std::abs(d2.prob.at(id1) - 0.25) < 1e-12,
           "P(Z_2 = 1) = 1/4 at r = 1");

  bool mass_ok = true, dominate_ok = true;
  for (int n = 1; n <= 5; ++n) {
    auto dg = exact_distribution(def, 2 * n, 1.0, index);
    if (!dg.ok) {
      mass_ok = false;
      break;
    }
    double mass = 0;
    for (const auto& [id, p] : dg.prob) mass += p;
    mass_ok &= std::abs(mass - 1.0) < 1e-12;
    auto dfree = free_group_distribution(2 * n, 1.0);
    dominate_ok &= dg.prob.at(id1) >= dfree.at(Word{}) - 1e-15;
  }
  c.expect(mass_ok, "distribution mass 1 +- 1e-12 for 2n <= 10");
  c.expect(dominate_ok, "P_G(Z_2n = 1) >= P_F2(Z_2n = 1) for n <= 5");

  auto rows = varopoulos_carne_check(def, 1.0, 8, ball);
  bool vc_ok = rows.size() == 8;
  for (const auto& row : rows) vc_ok &= row.pass;
  c.expect(vc_ok, "Varopoulos-Carne bound for m <= 8");
}

// 7. Scaling fits: u-exponent in [0.55, 0.85]; nu(Z_n)/n strictly decreasing
// along {2^10, 2^12, 2^14, 2^16}; escape tail monotone with bounded a*tail.
void criterion_scaling(Checker& c, int workers) {
  auto& def = basilica_def();
  std::vector<std::int64_t> ns;
  for (int e = 8; e <= 14; ++e) ns.push_back(std::int64_t{1} << e);
  auto u = estimate_u(def, 1.0, ns, 200, 4001, NuMode::upper_bound, workers);
  c.expect(u.fitted_exponent >= 0.55 && u.fitted_exponent <= 0.85,
           "u exponent in [0.55, 0.85] (got " +
               std::to_string(u.fitted_exponent) + ")");

  auto speed = estimate_speed(def, 1.0, {1 << 10, 1 << 12, 1 << 14, 1 << 16},
                              100, 4002, workers);
  bool dec = true;
  for (std::size_t i = 1; i < speed.nu_over_n.size(); ++i)
    dec &= speed.nu_over_n[i] < speed.nu_over_n[i - 1];
  c.expect(dec, "mean nu(Z_n)/n strictly decreasing along the ladder");

  std::vector<double> grid;
  for (int a = 1; a <= 8; ++a) grid.push_back(a);
  auto tail = escape_tail(def, 1.0, 1 << 12, grid, 400, 4003, workers);
  bool mono = true;
  for (std::size_t i = 1; i < tail.tail.size(); ++i)
    mono &= tail.tail[i] <= tail.tail[i - 1];
  c.expect(mono, "escape tail nonincreasing in a");
  c.expect(tail.fitted_c <= 4.0,
           "a * tail bounded across the grid (c = " +
               std::to_string(tail.fitted_c) + ")");

  // At this length max nu concentrates well below n^{5/6}, so the integer
  // grid sits in the zero tail; a sub-1 grid confirms the statistic is not
  // degenerate.
  auto small = escape_tail(def, 1.0, 1 << 12, {0.125, 0.25, 0.5}, 400, 4003,
                           workers);
  c.expect(small.tail.front() > 0.0 &&
               small.tail.back() <= small.tail.front(),
           "escape tail nondegenerate and nonincreasing at small a");
}

// 8. Generalization machinery: k-example closed forms, product invariance,
// Basilica consistency, backend agreement within 3 sigma.
void criterion_generalizations(Checker& c, int workers) {
  for (int k = 1; k <= 4; ++k) {
    auto def = AutomatonGroupDef::k_example(k);
    auto fp = fixed_point(def, GeneratorDistribution::uniform(k), 1e-10, 400);
    double mass = 0;
    for (int i = 0; i < k; ++i) mass += std::pow(2.0, double(i) / k);
    bool mu_ok = true;
    for (int i = 0; i < k; ++i)
      mu_ok &= std::abs(fp.mu.p[i] - std::pow(2.0, double(i) / k) / mass) <
               1e-6;
    c.expect(mu_ok, "k = " + std::to_string(k) + " fixed point closed form");
    c.expect(std::abs(fp.e_tau - std::pow(2.0, 1.0 + 1.0 / k)) < 1e-6,
             "E_tau = 2^{1+1/k} at k = " + std::to_string(k));
    auto a = alpha(def, fp.mu);
    c.expect(std::abs(a.alpha - double(k) / (k + 1)) < 1e-6,
             "alpha = k/(k+1) at k = " + std::to_string(k));

    GeneratorDistribution mu0 = GeneratorDistribution::uniform(k);
    for (int i = 0; i < k; ++i) mu0.p[i] = i + 1;
    double s = 0;
    for (double x : mu0.p) s += x;
    for (double& x : mu0.p) x /= s;
    c.expect(std::abs(product_invariance_check(k, mu0) -
                      std::pow(2.0, k + 1)) < 1e-6,
             "product of E_tau = 2^{k+1} at k = " + std::to_string(k));
  }

  auto& bd = basilica_def();
  auto fp = fixed_point(bd, GeneratorDistribution::uniform(2), 1e-10, 200);
  c.expect(std::abs(fp.mu.ratio() - std::sqrt(2.0)) < 1e-6,
           "Basilica fixed-point ratio sqrt(2)");
  auto ab = alpha(bd, fp.mu);
  c.expect(std::abs(ab.alpha - 2.0 / 3.0) < 1e-6, "Basilica alpha = 2/3");

  // Backend agreement.
  RefineParams params;
  params.mc_trials = 100000;
  params.seed = 4242;
  params.workers = workers;
  auto compare = [&](const AutomatonGroupDef& def,
                     const GeneratorDistribution& mu, const std::string& tag) {
    auto ex = refine(def, mu, RefineBackend::exact);
    auto mc = refine(def, mu, RefineBackend::monte_carlo, params);
    bool ok = std::abs(mc.e_tau - ex.e_tau) < 3 * mc.e_tau_stderr + 1e-9;
    for (std::size_t g = 0; g < mu.p.size(); ++g)
      ok &= std::abs(mc.mu_prime.p[g] - ex.mu_prime.p[g]) <
            3 * mc.mu_prime_stderr[g] + 1e-9;
    c.expect(ok, "exact and Monte Carlo agree within 3 sigma (" + tag + ")");
  };
  compare(bd, GeneratorDistribution::from_ratio(1.0), "basilica r=1");
  compare(bd, GeneratorDistribution::from_ratio(std::sqrt(2.0)),
          "basilica r=sqrt2");
  for (int k = 1; k <= 4; ++k)
    compare(AutomatonGroupDef::k_example(k), GeneratorDistribution::uniform(k),
            "k=" + std::to_string(k));
}

// 9. Structural laws: wreath homomorphism/inverse on 1e3 random pairs, step
// vs recomputation, Schreier connectivity n <= 10, cycle labels in S.
void criterion_structural(Checker& c, int) {
  auto& def = basilica_def();
  RngStream rng(5001, 0);
  bool hom_ok = true;
  TrivialityCache cache;
  for (int t = 0; t < 1000 && hom_ok; ++t) {
    Word g = random_word(rng, 12);
    Word h = random_word(rng, 12);
    auto dg = decompose(g, def), dh = decompose(h, def),
         dgh = decompose(g * h, def);
    hom_ok &= dgh.perm == dg.perm.then(dh.perm);
    for (int i = 0; i < 2; ++i)
      hom_ok &= dgh.sections[i] == dg.sections[i] * dh.sections[dg.perm(i)];
    hom_ok &= is_trivial((g * h) * (h.inverse() * g.inverse()), def, &cache);
  }
  c.expect(hom_ok, "wreath homomorphism and inverse laws on 1e3 pairs");

  bool step_ok = true;
  try {
    RunOptions opts;
    opts.verify_every = 1 << 10;
    run(def, 1 << 13, 1.0, 5002, opts);
  } catch (const std::exception&) {
    step_ok = false;
  }
  c.expect(step_ok, "step() equals full recomputation at checkpoints");

  bool conn_ok = true;
  for (int n = 1; n <= 10; ++n) conn_ok &= build_schreier(def, n).connected;
  c.expect(conn_ok, "Schreier graphs connected for n <= 10");

  auto report = irreducible_cycles(def, 1, 8);
  bool labels_ok = !report.labels.empty();
  for (const auto& cls : report.classes) labels_ok &= cls.has_value();
  c.expect(labels_ok, "cycle labels up to cap 8 lie in {1} u S u S^-1");
}

// 10. Reproducibility: identical outputs across repeated runs and across
// worker counts {1, 4}.
void criterion_reproducibility(Checker& c, int) {
  auto& def = basilica_def();
  auto t1 = run(def, 50000, 1.0, 6001);
  auto t2 = run(def, 50000, 1.0, 6001);
  c.expect(t1.letters == t2.letters, "run() repeats byte-identically");

  auto u1 = estimate_u(def, 1.0, {256, 1024}, 40, 6002, NuMode::upper_bound, 1);
  auto u4 = estimate_u(def, 1.0, {256, 1024}, 40, 6002, NuMode::upper_bound, 4);
  c.expect(u1.u == u4.u, "estimate_u identical for workers {1, 4}");

  auto s1 = estimate_speed(def, 1.0, {512, 2048}, 20, 6003, 1);
  auto s4 = estimate_speed(def, 1.0, {512, 2048}, 20, 6003, 4);
  c.expect(s1.nu_over_n == s4.nu_over_n && s1.len_over_n == s4.len_over_n,
           "estimate_speed identical for workers {1, 4}");

  auto e1 = escape_tail(def, 1.0, 2048, {1, 2, 4}, 60, 6004, 1);
  auto e4 = escape_tail(def, 1.0, 2048, {1, 2, 4}, 60, 6004, 4);
  c.expect(e1.tail == e4.tail, "escape_tail identical for workers {1, 4}");

  RefineParams p1, p4;
  p1.mc_trials = p4.mc_trials = 20000;
  p1.seed = p4.seed = 6005;
  p1.workers = 1;
  p4.workers = 4;
  auto m1 = refine(def, GeneratorDistribution::from_ratio(1.0),
                   RefineBackend::monte_carlo, p1);
  auto m4 = refine(def, GeneratorDistribution::from_ratio(1.0),
                   RefineBackend::monte_carlo, p4);
  c.expect(m1.e_tau == m4.e_tau && m1.mu_prime.p == m4.mu_prime.p,
           "Monte Carlo refine identical for workers {1, 4}");
}

struct Criterion {
  const char* name;
  void (*fn)(Checker&, int);
};

const Criterion kCriteria[] = {
    {"closed forms", criterion_closed_forms},
    {"induced-walk law", criterion_induced_law},
    {"stopping-time rates", criterion_stopping_rates},
    {"presentation relators", criterion_relators},
    {"nu properties", criterion_nu},
    {"exact return probabilities", criterion_exact_distributions},
    {"scaling fits", criterion_scaling},
    {"generalization machinery", criterion_generalizations},
    {"structural laws", criterion_structural},
    {"reproducibility", criterion_reproducibility},
};

}  // namespace

CriterionResult run_criterion(int id, int workers) {
  if (id < 1 || id > 10) throw std::invalid_argument("criterion id in 1..10");
  const Criterion& cr = kCriteria[id - 1];
  CriterionResult result;
  result.id = id;
  result.name = cr.name;
  Checker checker;
  auto start = std::chrono::steady_clock::now();
  try {
    cr.fn(checker, workers);
  } catch (const std::exception& e) {
    checker.expect(false, std::string("exception: ") + e.what());
  }
  result.millis = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - start)
                      .count();
  result.pass = checker.pass;
  result.detail = checker.detail.str();
  return result;
}

std::vector<CriterionResult> run_acceptance(int workers,
                                            const std::vector<int>& ids) {
  std::vector<int> which = ids;
  if (which.empty())
    for (int i = 1; i <= 10; ++i) which.push_back(i);
  std::vector<CriterionResult> out;
  for (int id : which) out.push_back(run_criterion(id, workers));
  return out;
}

}  // namespace basilica
