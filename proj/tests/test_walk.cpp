#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <map>

#include "basilica/walk.hpp"

using namespace basilica;

namespace {

const AutomatonGroupDef& basilica_def() {
  static AutomatonGroupDef def = AutomatonGroupDef::basilica();
  return def;
}

Word W(const std::string& text) { return basilica_def().parse_word(text); }

Trajectory from_letters(std::initializer_list<Letter> ls) {
  Trajectory t;
  WreathWalkState state;
  t.summary.push_back({0, 0, 0});
  for (Letter l : ls) {
    t.letters.push_back(l);
    state.step(l, basilica_def(), false);
    t.summary.push_back({static_cast<std::uint8_t>(state.eps),
                         static_cast<std::uint32_t>(state.x.size()),
                         static_cast<std::uint32_t>(state.y.size())});
  }
  return t;
}

std::uint64_t summary_digest(const Trajectory& t) {
  std::uint64_t h = 1469598103934665603ull;
  auto eat = [&](std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ull;
  };
  for (const auto& p : t.summary) {
    eat(p.eps);
    eat(p.x_len);
    eat(p.y_len);
  }
  return h;
}

constexpr Letter kA = 1, kAi = -1, kB = 2, kBi = -2;

}  // namespace

TEST_CASE("rng streams are deterministic and distinct") {
  RngStream r1(42, 0), r2(42, 0), r3(42, 1), r4(43, 0);
  int differs13 = 0, differs14 = 0;
  for (int i = 0; i < 64; ++i) {
    std::uint64_t v = r1.next_u64();
    CHECK(v == r2.next_u64());
    if (v != r3.next_u64()) ++differs13;
    if (v != r4.next_u64()) ++differs14;
  }
  CHECK(differs13 > 32);
  CHECK(differs14 > 32);
  RngStream r5(7, 3);
  for (int i = 0; i < 1000; ++i) {
    double u = r5.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(r5.uniform_below(10) < 10);
  }
}

TEST_CASE("step distribution") {
  StepDistribution sd(1.0);
  for (int k = 0; k < 4; ++k) CHECK(sd.prob[k] == doctest::Approx(0.25));
  StepDistribution sd2(2.0);
  CHECK(sd2.prob[0] == doctest::Approx(1.0 / 6));
  CHECK(sd2.prob[2] == doctest::Approx(2.0 / 6));
  CHECK(sd2.prob[0] + sd2.prob[1] + sd2.prob[2] + sd2.prob[3] ==
        doctest::Approx(1.0));
  CHECK_THROWS(StepDistribution(0.0));
  CHECK_THROWS(StepDistribution(-1.0));

  // Empirical sampling matches the weights.
  RngStream rng(5, 0);
  int counts[4] = {0, 0, 0, 0};
  const int n = 60000;
  for (int i = 0; i < n; ++i) ++counts[sd2.support_index(sd2.sample(rng))];
  for (int k = 0; k < 4; ++k) {
    double z = (counts[k] - n * sd2.prob[k]) /
               std::sqrt(n * sd2.prob[k] * (1 - sd2.prob[k]));
    CHECK(std::abs(z) < 4.0);
  }
}

TEST_CASE("step routing matches the wreath recursion") {
  auto& def = basilica_def();
  WreathWalkState s;
  s.step(kA, def, true);
  CHECK(s.x == W("b"));
  CHECK(s.y.empty());
  CHECK(s.eps == 0);
  s.reset();
  s.step(kB, def, true);
  CHECK(s.x == W("a"));
  CHECK(s.y.empty());
  CHECK(s.eps == 1);
  s.reset();
  s.step(kBi, def, true);
  CHECK(s.y == W("a^-1"));
  CHECK(s.x.empty());
  CHECK(s.eps == 1);

  // Letter then inverse restores the state.
  s.reset();
  s.step(kB, def, true);
  s.step(kA, def, true);
  WreathWalkState saved = s;
  for (Letter l : {kA, kAi, kB, kBi}) {
    s.step(l, def, true);
    s.step(inverse_letter(l), def, true);
    CHECK(s.x == saved.x);
    CHECK(s.y == saved.y);
    CHECK(s.eps == saved.eps);
  }
}

TEST_CASE("projection invariant against full recomputation") {
  auto& def = basilica_def();
  StepDistribution sd(1.3);
  RngStream rng(2024, 0);
  WreathWalkState s;
  for (int i = 1; i <= 4000; ++i) {
    s.step(sd.sample(rng), def, true);
    if (i % 128 == 0) {
      WreathDecomp d = decompose(s.z, def);
      CHECK(d.sections[0] == s.y);
      CHECK(d.sections[1] == s.x);
      CHECK(!d.perm.is_identity() == (s.eps == 1));
    }
  }
}

TEST_CASE("run is deterministic with a frozen digest") {
  auto& def = basilica_def();
  RunOptions opts;
  opts.verify_every = 1 << 10;
  Trajectory t1 = run(def, 100000, 1.0, 20240501, opts);
  Trajectory t2 = run(def, 100000, 1.0, 20240501);
  REQUIRE(t1.letters == t2.letters);
  CHECK(summary_digest(t1) == summary_digest(t2));
  // Frozen regression from the first run.
  CHECK(summary_digest(t1) == 760776775494967300ull);

  Trajectory t3 = run(def, 1000, 1.0, 20240502);
  CHECK(run(def, 1000, 1.0, 20240501).letters != t3.letters);

  Trajectory empty = run(def, 0, 1.0, 1);
  CHECK(empty.letters.empty());
  CHECK(empty.summary.size() == 1);
}

TEST_CASE("eps occupation matches the two-state chain") {
  // eps flips exactly on b-letters, so the flip probability is r/(1+r) and
  // the stationary occupation of each eps value is 1/2 for every r.
  for (double r : {1.0, 2.0, 0.5}) {
    Trajectory t = run(basilica_def(), 100000, r, 99);
    std::int64_t ones = 0;
    for (const auto& p : t.summary) ones += p.eps;
    double frac = static_cast<double>(ones) / t.summary.size();
    CHECK(std::abs(frac - 0.5) < 0.01);
  }
}

TEST_CASE("stopping time hand examples") {
  auto& def = basilica_def();
  auto s1 = extract_stopping_times(from_letters({kA}), def);
  REQUIRE(s1.sigma.size() == 2);
  CHECK(s1.sigma[0] == 0);
  CHECK(s1.sigma[1] == 1);
  REQUIRE(s1.x_increments.size() == 1);
  CHECK(s1.x_increments[0] == kB);
  CHECK(s1.tau.empty());

  auto s2 = extract_stopping_times(from_letters({kB, kB}), def);
  REQUIRE(s2.tau.size() == 1);
  CHECK(s2.tau[0] == 1);  // first eps = 1
  CHECK(s2.y_start.empty());
  REQUIRE(s2.sigma.size() == 2);
  CHECK(s2.sigma[1] == 2);
  CHECK(s2.x_increments[0] == kA);

  // b^-1 from the identity lands at Y = a^-1: the Y walk's nonstandard start.
  auto s3 = extract_stopping_times(from_letters({kBi, kBi}), def);
  REQUIRE(s3.tau.size() == 1);
  CHECK(s3.tau[0] == 1);
  CHECK(s3.y_start == W("a^-1"));

  auto s0 = extract_stopping_times(Trajectory{}, def);
  CHECK(s0.sigma == std::vector<std::int64_t>{0});
  CHECK(s0.tau.empty());
  CHECK(s0.x_increments.empty());
}

TEST_CASE("stopping time extraction matches the literal definition") {
  auto& def = basilica_def();
  Trajectory traj = run(def, 3000, 1.4, 7);
  auto series = extract_stopping_times(traj, def);

  // Brute force: recompute every (Y_n, X_n, eps_n) and apply the displayed
  // definitions with whole-word comparisons.
  std::vector<Word> xs{Word{}}, ys{Word{}};
  std::vector<int> eps{0};
  WreathWalkState s;
  for (Letter l : traj.letters) {
    s.step(l, def, false);
    xs.push_back(s.x);
    ys.push_back(s.y);
    eps.push_back(s.eps);
  }
  std::vector<std::int64_t> sigma{0}, tau;
  std::vector<Letter> xinc, yinc;
  Word y_start;
  for (std::size_t n = 1; n < xs.size(); ++n) {
    if (eps[n] == 0 && xs[n] != xs[sigma.back()]) {
      Word d = xs[sigma.back()].inverse() * xs[n];
      REQUIRE(d.size() == 1);
      xinc.push_back(d[0]);
      sigma.push_back(n);
    }
    if (eps[n] == 1) {
      if (tau.empty()) {
        tau.push_back(n);
        y_start = ys[n];
      } else if (ys[n] != ys[tau.back()]) {
        Word d = ys[tau.back()].inverse() * ys[n];
        REQUIRE(d.size() == 1);
        yinc.push_back(d[0]);
        tau.push_back(n);
      }
    }
  }
  CHECK(series.sigma == sigma);
  CHECK(series.tau == tau);
  CHECK(series.x_increments == xinc);
  CHECK(series.y_increments == yinc);
  CHECK(series.y_start == y_start);
}

TEST_CASE("closed forms") {
  CHECK(f_rate(1.0) == doctest::Approx(0.375).epsilon(1e-14));
  CHECK(t_circ(1.0) == doctest::Approx(8.0 / 3.0).epsilon(1e-14));
  for (double r : {0.5, 1.0, std::sqrt(2.0), 3.0}) {
    CHECK(std::abs(f_rate(r) * f_rate(2.0 / r) - 0.125) < 1e-12);
    CHECK(std::abs(t_circ(r) - 4.0 * (1.0 + r) / (2.0 + r)) < 1e-12);
  }
  // t_circ is 1/f up to the factor relating the two statements.
  CHECK(t_circ(2.0) == doctest::Approx(3.0));
}

TEST_CASE("induced law matches the refined weights") {
  auto& def = basilica_def();
  for (double r : {1.0, 2.0, std::sqrt(2.0)}) {
    auto res = induced_law_test(def, r, 30000, 11);
    CHECK(res.pass);
    double mass = 2.0 + r;
    CHECK(res.target[0] == doctest::Approx((r / 2) / mass));
    CHECK(res.target[2] == doctest::Approx(1.0 / mass));
  }
  auto r1 = induced_law_test(def, 1.0, 30000, 12);
  CHECK(r1.target[0] == doctest::Approx(1.0 / 6));
  CHECK(r1.target[2] == doctest::Approx(1.0 / 3));
  // N = 0 is a vacuous pass.
  CHECK(induced_law_test(def, 1.0, 0, 1).pass);
}

TEST_CASE("stopping-time rates approach f(r)") {
  auto& def = basilica_def();
  for (double r : {1.0, std::sqrt(2.0)}) {
    auto rates = estimate_stopping_rates(def, r, 20000, 3);
    CHECK(std::abs(rates.sigma_rate - f_rate(r)) / f_rate(r) < 0.02);
    CHECK(std::abs(rates.tau_rate - f_rate(r)) / f_rate(r) < 0.02);
  }
  auto tiny = estimate_stopping_rates(def, 1.0, 1, 4);
  CHECK(tiny.sigma_rate > 0.0);
  CHECK(tiny.sigma_rate <= 1.0);
}

TEST_CASE("incremental nu tracks the direct computation") {
  auto& def = basilica_def();
  NuContext ctx(def);
  NuContext direct_ctx(def);
  IncrementalNu inc(def, ctx, 8);
  StepDistribution sd(1.0);
  RngStream rng(77, 0);
  Word z;
  for (int i = 1; i <= 3000; ++i) {
    Letter l = sd.sample(rng);
    inc.push(l);
    z.push(l);
    if (i % 250 == 0) {
      CHECK(inc.word() == z);
      CHECK(inc.value() == nu_upper(z, direct_ctx));
    }
  }
  inc.reset();
  CHECK(inc.word().empty());
  CHECK(inc.value() == 0);
}

TEST_CASE("estimate_u basics") {
  auto& def = basilica_def();
  auto t1 = estimate_u(def, 1.0, {1}, 50, 9);
  CHECK(t1.u[0] <= 1.0);
  CHECK(t1.u[0] >= 0.0);
  CHECK(t1.mode == "upper_bound");

  auto tbl = estimate_u(def, 1.0, {64, 256, 1024}, 30, 9);
  CHECK(tbl.u[0] <= tbl.u[1]);  // running max is monotone in n
  CHECK(tbl.u[1] <= tbl.u[2]);
  CHECK(tbl.fitted_exponent > 0.0);
  CHECK(tbl.fitted_exponent < 1.0);

  auto ex = estimate_u(def, 1.0, {16, 64}, 5, 9, NuMode::exact);
  CHECK(ex.mode == "exact");
  auto ub = estimate_u(def, 1.0, {16, 64}, 5, 9, NuMode::upper_bound);
  for (int k = 0; k < 2; ++k) CHECK(ex.u[k] <= ub.u[k] + 1e-12);

  CHECK_THROWS(estimate_u(def, 1.0, {8}, 0, 9));
  CHECK_THROWS(estimate_u(def, 1.0, {1 << 12}, 1, 9, NuMode::exact));
}

TEST_CASE("estimators are worker-count independent") {
  auto& def = basilica_def();
  auto a = estimate_u(def, 1.0, {32, 128}, 12, 5, NuMode::upper_bound, 1);
  auto b = estimate_u(def, 1.0, {32, 128}, 12, 5, NuMode::upper_bound, 4);
  CHECK(a.u == b.u);
  auto sa = estimate_speed(def, 1.0, {64, 256}, 10, 5, 1);
  auto sb = estimate_speed(def, 1.0, {64, 256}, 10, 5, 3);
  CHECK(sa.nu_over_n == sb.nu_over_n);
  CHECK(sa.len_over_n == sb.len_over_n);
  auto ea = escape_tail(def, 1.0, 512, {1.0, 2.0}, 40, 5, 1);
  auto eb = escape_tail(def, 1.0, 512, {1.0, 2.0}, 40, 5, 4);
  CHECK(ea.tail == eb.tail);
}

TEST_CASE("speed ratios decrease along the ladder") {
  auto& def = basilica_def();
  auto t = estimate_speed(def, 1.0, {256, 4096}, 60, 21);
  CHECK(t.nu_over_n[1] < t.nu_over_n[0]);
  CHECK(t.len_over_n[1] < t.len_over_n[0]);
  for (double v : t.nu_over_n) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("escape tail") {
  auto& def = basilica_def();
  auto t = escape_tail(def, 1.0, 2048, {0.25, 0.5, 1.0, 2.0, 16.0}, 200, 31);
  for (std::size_t i = 1; i < t.tail.size(); ++i)
    CHECK(t.tail[i] <= t.tail[i - 1]);
  CHECK(t.tail.back() == 0.0);  // far past any observed maximum
  CHECK(t.fitted_c >= 0.0);
  for (std::size_t i = 0; i < t.a.size(); ++i)
    CHECK(t.a[i] * t.tail[i] <= t.fitted_c + 1e-12);
}

TEST_CASE("exact distribution small cases") {
  auto& def = basilica_def();
  ElementIndex index(def);

  auto d0 = exact_distribution(def, 0, 1.0, index);
  REQUIRE(d0.ok);
  REQUIRE(d0.prob.size() == 1);
  CHECK(d0.prob.at(index.intern(Word{})) == doctest::Approx(1.0));

  auto d1 = exact_distribution(def, 1, 2.0, index);
  REQUIRE(d1.ok);
  CHECK(d1.prob.size() == 4);
  CHECK(d1.prob.at(index.intern(W("a"))) == doctest::Approx(1.0 / 6));
  CHECK(d1.prob.at(index.intern(W("b"))) == doctest::Approx(2.0 / 6));

  auto d2 = exact_distribution(def, 2, 1.0, index);
  REQUIRE(d2.ok);
  CHECK(d2.prob.at(index.intern(Word{})) == doctest::Approx(0.25).epsilon(1e-12));

  // Soft errors.
  CHECK_FALSE(exact_distribution(def, 13, 1.0, index).ok);
  CHECK_FALSE(exact_distribution(def, -1, 1.0, index).ok);
}

TEST_CASE("exact distribution mass and symmetry") {
  auto& def = basilica_def();
  ElementIndex index(def);
  for (int n = 0; n <= 6; ++n) {
    auto d = exact_distribution(def, n, 1.5, index);
    REQUIRE(d.ok);
    double mass = 0;
    for (const auto& [id, p] : d.prob) mass += p;
    CHECK(std::abs(mass - 1.0) < 1e-12);
    // P(g) = P(g^-1): the step law is symmetric.
    for (const auto& [id, p] : d.prob) {
      int inv = index.intern(index.representative(id).inverse());
      CHECK(d.prob.at(inv) == doctest::Approx(p).epsilon(1e-10));
    }
  }
}

TEST_CASE("exact distribution agrees with simulation") {
  auto& def = basilica_def();
  ElementIndex index(def);
  auto d4 = exact_distribution(def, 4, 1.0, index);
  REQUIRE(d4.ok);

  StepDistribution sd(1.0);
  std::map<int, int> counts;
  const int trials = 20000;
  for (int t = 0; t < trials; ++t) {
    RngStream rng(606, t + 1);
    Word z;
    for (int i = 0; i < 4; ++i) z.push(sd.sample(rng));
    ++counts[index.intern(z)];
  }
  for (const auto& [id, p] : d4.prob) {
    if (p < 0.01) continue;
    double freq = counts.count(id) ? counts.at(id) / double(trials) : 0.0;
    double sigma = std::sqrt(p * (1 - p) / trials);
    CHECK(std::abs(freq - p) < 4 * sigma + 1e-9);
  }
}

TEST_CASE("group return probabilities dominate the free group") {
  auto& def = basilica_def();
  ElementIndex index(def);
  for (int n = 1; n <= 3; ++n) {
    auto dg = exact_distribution(def, 2 * n, 1.0, index);
    REQUIRE(dg.ok);
    auto df = free_group_distribution(2 * n, 1.0);
    double pg = dg.prob.at(index.intern(Word{}));
    double pf = df.at(Word{});
    CHECK(pg >= pf - 1e-15);
    double fmass = 0;
    for (const auto& [w, p] : df) fmass += p;
    CHECK(std::abs(fmass - 1.0) < 1e-12);
  }
}

TEST_CASE("heat kernel report") {
  auto& def = basilica_def();
  ElementIndex index(def);
  auto report = heat_kernel_report(def, 1.0, 4, index);
  REQUIRE(report.ok);
  REQUIRE(report.rows.size() == 5);
  CHECK(report.rows[0].p_return == doctest::Approx(1.0));
  // One-step return = sum of squared weights.
  StepDistribution sd(1.0);
  double sq = 0;
  for (int k = 0; k < 4; ++k) sq += sd.prob[k] * sd.prob[k];
  CHECK(report.rows[1].p_return == doctest::Approx(sq).epsilon(1e-12));
  for (std::size_t i = 1; i < report.rows.size(); ++i)
    CHECK(report.rows[i].p_return <= report.rows[i - 1].p_return + 1e-15);
  CHECK(report.fit_slope > 0.0);
  // Frozen regression (r = 1): P(Z_4 = 1).
  CHECK(report.rows[2].p_return == doctest::Approx(0.109375).epsilon(1e-12));
}

TEST_CASE("varopoulos-carne bound holds at desk scale") {
  auto& def = basilica_def();
  BallEnumerator ball(def);
  auto rows = varopoulos_carne_check(def, 1.0, 6, ball);
  REQUIRE(rows.size() == 6);
  for (const auto& row : rows) {
    CHECK(row.pass);
    CHECK(row.worst_margin > -1e-12);
  }
}
