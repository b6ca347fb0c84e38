#include "basilica/walk.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <thread>

namespace basilica {

namespace {

inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ull;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebull;
  z ^= z >> 31;
  return z;
}

void require_binary(const AutomatonGroupDef& def) {
  if (def.arity() != 2)
    throw std::invalid_argument("walk engine requires a binary tree");
  if (def.num_generators() != 2)
    throw std::invalid_argument("walk engine requires two generators");
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream) {
  state_ = mix64(seed + 0x9e3779b97f4a7c15ull * (stream + 1));
  state_ = mix64(state_ ^ (stream * 0xd1342543de82ef95ull));
}

std::uint64_t RngStream::next_u64() {
  state_ += 0x9e3779b97f4a7c15ull;
  return mix64(state_);
}

std::uint64_t RngStream::uniform_below(std::uint64_t n) {
  // Multiply-shift map of a full-width draw; deterministic across platforms.
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
}

StepDistribution::StepDistribution(double r_value) : r(r_value) {
  if (!(r > 0.0)) throw std::invalid_argument("step weight r must be > 0");
  double mass = 2.0 + 2.0 * r;
  prob[0] = 1.0 / mass;
  prob[1] = 1.0 / mass;
  prob[2] = r / mass;
  prob[3] = r / mass;
}

const std::array<Letter, 4>& StepDistribution::support() {
  static const std::array<Letter, 4> s = {Letter{1}, Letter{-1}, Letter{2},
                                          Letter{-2}};
  return s;
}

Letter StepDistribution::sample(RngStream& rng) const {
  double u = rng.uniform();
  double acc = 0.0;
  for (int k = 0; k < 3; ++k) {
    acc += prob[k];
    if (u < acc) return support()[k];
  }
  return support()[3];
}

int StepDistribution::support_index(Letter l) const {
  for (int k = 0; k < 4; ++k)
    if (support()[k] == l) return k;
  throw std::invalid_argument("letter outside the step support");
}

void WreathWalkState::step(Letter l, const AutomatonGroupDef& def,
                           bool retain_z) {
  // new_sec[i] = sec[i] * l_sec[pi(i)] with pi the accumulated permutation;
  // Y is section 0 and X is section 1.
  Letter sy = def.letter_section(l, eps ? 1 : 0);
  Letter sx = def.letter_section(l, eps ? 0 : 1);
  if (sy != 0) y.push(sy);
  if (sx != 0) x.push(sx);
  if (!def.letter_perm(l).is_identity()) eps ^= 1;
  ++n;
  if (retain_z) z.push(l);
}

void WreathWalkState::reset() { *this = WreathWalkState{}; }

Trajectory run(const AutomatonGroupDef& def, std::int64_t n, double r,
               std::uint64_t seed, const RunOptions& opts) {
  require_binary(def);
  if (n < 0) throw std::invalid_argument("n must be >= 0");
  StepDistribution sd(r);
  RngStream rng(seed, 0);

  bool retain_z = opts.retain_z || opts.verify_every > 0;
  Trajectory traj;
  traj.r = r;
  traj.seed = seed;
  traj.letters.reserve(n);
  traj.summary.reserve(n + 1);

  WreathWalkState state;
  traj.summary.push_back({0, 0, 0});
  std::int64_t next_dyadic = 1;
  for (std::int64_t i = 1; i <= n; ++i) {
    Letter l = sd.sample(rng);
    state.step(l, def, retain_z);
    traj.letters.push_back(l);
    traj.summary.push_back({static_cast<std::uint8_t>(state.eps),
                            static_cast<std::uint32_t>(state.x.size()),
                            static_cast<std::uint32_t>(state.y.size())});
    if (opts.dyadic_snapshots && i == next_dyadic) {
      traj.snapshots.emplace_back(i, state);
      next_dyadic *= 2;
    }
    if (opts.verify_every > 0 && i % opts.verify_every == 0) {
      WreathDecomp d = decompose(state.z, def);
      bool swap = !d.perm.is_identity();
      if (swap != (state.eps == 1) || d.sections[0] != state.y ||
          d.sections[1] != state.x)
        throw std::logic_error("projection invariant violated");
    }
  }
  if (retain_z) traj.final_z = state.z;
  return traj;
}

namespace {

// Replays input letters, tracking only eps and the right-difference words of
// X and Y since the last stopping time; emptiness of a difference word is the
// free-group inequality test, so each step is O(1).
struct StoppingTracker {
  const AutomatonGroupDef& def;
  StoppingTimeSeries out;
  int eps = 0;
  std::int64_t n = 0;
  Word dx;  // X_n = X_sigma(m) * dx
  Word dy;  // Y_n = Y_tau(m) * dy (from the start until tau(0))
  bool tau_started = false;

  explicit StoppingTracker(const AutomatonGroupDef& d) : def(d) {
    out.sigma.push_back(0);
  }

  void feed(Letter l) {
    Letter sy = def.letter_section(l, eps ? 1 : 0);
    Letter sx = def.letter_section(l, eps ? 0 : 1);
    if (sy != 0) dy.push(sy);
    if (sx != 0) dx.push(sx);
    if (!def.letter_perm(l).is_identity()) eps ^= 1;
    ++n;

    if (eps == 0 && !dx.empty()) {
      if (dx.size() != 1)
        throw std::logic_error("induced X-increment is not a single letter");
      out.sigma.push_back(n);
      out.x_increments.push_back(dx[0]);
      dx = Word{};
    }
    if (eps == 1) {
      if (!tau_started) {
        // tau(0) asks only for eps = 1; Y may be anything, recorded verbatim.
        tau_started = true;
        out.tau.push_back(n);
        out.y_start = dy;
        dy = Word{};
      } else if (!dy.empty()) {
        if (dy.size() != 1)
          throw std::logic_error("induced Y-increment is not a single letter");
        out.tau.push_back(n);
        out.y_increments.push_back(dy[0]);
        dy = Word{};
      }
    }
  }
};

}  // namespace

StoppingTimeSeries extract_stopping_times(const Trajectory& traj,
                                          const AutomatonGroupDef& def) {
  require_binary(def);
  StoppingTracker tracker(def);
  for (Letter l : traj.letters) tracker.feed(l);
  return tracker.out;
}

double f_rate(double r) { return (2.0 + r) / (4.0 + 4.0 * r); }

double t_circ(double r) { return 4.0 * (1.0 + r) / (2.0 + r); }

InducedLawResult induced_law_test(const AutomatonGroupDef& def, double r,
                                  std::int64_t num_increments,
                                  std::uint64_t seed) {
  require_binary(def);
  StepDistribution sd(r);
  RngStream rng(seed, 0);
  StoppingTracker tracker(def);

  InducedLawResult res{};
  while (static_cast<std::int64_t>(tracker.out.x_increments.size()) <
         num_increments)
    tracker.feed(sd.sample(rng));
  for (Letter l : tracker.out.x_increments) ++res.counts[sd.support_index(l)];

  // Induced law proportional to (r/2, r/2, 1, 1) on (a, a^-1, b, b^-1).
  double mass = 2.0 + r;
  res.target[0] = res.target[1] = (r / 2.0) / mass;
  res.target[2] = res.target[3] = 1.0 / mass;
  res.pass = true;
  for (int k = 0; k < 4; ++k) {
    double nn = static_cast<double>(num_increments);
    res.freq[k] = nn > 0 ? res.counts[k] / nn : 0.0;
    double sd_k = std::sqrt(nn * res.target[k] * (1.0 - res.target[k]));
    res.zscore[k] = sd_k > 0 ? (res.counts[k] - nn * res.target[k]) / sd_k : 0;
    if (std::abs(res.zscore[k]) > 3.0) res.pass = false;
  }
  return res;
}

StoppingRates estimate_stopping_rates(const AutomatonGroupDef& def, double r,
                                      std::int64_t m_max, std::uint64_t seed) {
  require_binary(def);
  if (m_max < 1) throw std::invalid_argument("m_max must be >= 1");
  StepDistribution sd(r);
  RngStream rng(seed, 0);
  StoppingTracker tracker(def);

  std::int64_t sigma_at = -1, tau_at = -1;
  while (sigma_at < 0 || tau_at < 0) {
    tracker.feed(sd.sample(rng));
    // sigma(m_max) is entry m_max of the sigma sequence (sigma(0) = 0).
    if (sigma_at < 0 &&
        static_cast<std::int64_t>(tracker.out.sigma.size()) > m_max)
      sigma_at = tracker.out.sigma[m_max];
    if (tau_at < 0 && static_cast<std::int64_t>(tracker.out.tau.size()) > m_max)
      tau_at = tracker.out.tau[m_max];
  }
  return {static_cast<double>(m_max) / sigma_at,
          static_cast<double>(m_max) / tau_at};
}

// ---------------------------------------------------------------------------
// IncrementalNu

struct IncrementalNu::Node {
  Word w;
  int eps = 0;  // root permutation bit; maintained once materialized
  Node* child[2] = {nullptr, nullptr};
  int cached = -1;  // -1 = needs re-evaluation
};

IncrementalNu::IncrementalNu(const AutomatonGroupDef& def, NuContext& leaf_ctx,
                             int cutoff)
    : def_(def), leaf_ctx_(leaf_ctx), cutoff_(cutoff), root_(new Node) {
  require_binary(def);
}

IncrementalNu::~IncrementalNu() { delete_nodes(root_); }

void IncrementalNu::delete_nodes(Node* node) {
  if (!node) return;
  delete_nodes(node->child[0]);
  delete_nodes(node->child[1]);
  delete node;
}

void IncrementalNu::reset() {
  delete_nodes(root_);
  root_ = new Node;
}

const Word& IncrementalNu::word() const { return root_->w; }

void IncrementalNu::materialize(Node* node) {
  WreathDecomp d = decompose(node->w, def_);
  node->eps = d.perm.is_identity() ? 0 : 1;
  for (int i = 0; i < 2; ++i) {
    node->child[i] = new Node;
    node->child[i]->w = std::move(d.sections[i]);
    if (static_cast<int>(node->child[i]->w.size()) > cutoff_)
      materialize(node->child[i]);
  }
}

void IncrementalNu::push_at(Node* node, Letter l) {
  node->cached = -1;
  node->w.push(l);
  if (node->child[0]) {
    Letter s0 = def_.letter_section(l, node->eps ? 1 : 0);
    Letter s1 = def_.letter_section(l, node->eps ? 0 : 1);
    if (s0 != 0) push_at(node->child[0], s0);
    if (s1 != 0) push_at(node->child[1], s1);
    if (!def_.letter_perm(l).is_identity()) node->eps ^= 1;
  } else if (static_cast<int>(node->w.size()) > cutoff_) {
    materialize(node);
  }
}

void IncrementalNu::push(Letter l) { push_at(root_, l); }

int IncrementalNu::eval(Node* node) {
  if (node->cached >= 0) return node->cached;
  if (!node->child[0]) {
    node->cached = nu(node->w, leaf_ctx_, NuMode::upper_bound)->value;
  } else {
    node->cached = std::min(static_cast<int>(node->w.size()),
                            1 + eval(node->child[0]) + eval(node->child[1]));
  }
  return node->cached;
}

int IncrementalNu::value() { return eval(root_); }

// ---------------------------------------------------------------------------
// Trial-parallel estimators

namespace {

// Runs fn(trial, rng) for each trial on `workers` threads; fn writes its
// result into a preallocated slot, so aggregation order never depends on
// scheduling.
template <typename Fn>
void for_each_trial(int trials, int workers, std::uint64_t seed, Fn&& fn) {
  if (trials <= 0) throw std::invalid_argument("trials must be >= 1");
  workers = std::max(1, std::min(workers, trials));
  auto body = [&](int worker) {
    for (int t = worker; t < trials; t += workers) {
      RngStream rng(seed, static_cast<std::uint64_t>(t) + 1);
      fn(t, rng);
    }
  };
  if (workers == 1) {
    body(0);
    return;
  }
  std::vector<std::thread> pool;
  for (int wkr = 0; wkr < workers; ++wkr) pool.emplace_back(body, wkr);
  for (auto& th : pool) th.join();
}

struct LinearFit {
  double intercept;
  double slope;
};

LinearFit least_squares(const std::vector<double>& xs,
                        const std::vector<double>& ys) {
  double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  double denom = n * sxx - sx * sx;
  double slope = denom != 0 ? (n * sxy - sx * sy) / denom : 0.0;
  return {(sy - slope * sx) / n, slope};
}

}  // namespace

UTable estimate_u(const AutomatonGroupDef& def, double r,
                  const std::vector<std::int64_t>& n_list, int trials,
                  std::uint64_t seed, NuMode mode, int workers) {
  require_binary(def);
  if (n_list.empty()) throw std::invalid_argument("n_list must be nonempty");
  std::vector<std::int64_t> ns = n_list;
  std::sort(ns.begin(), ns.end());
  std::int64_t n_max = ns.back();
  if (mode == NuMode::exact && n_max > (1 << 10))
    throw std::invalid_argument("exact mode is limited to n <= 1024");

  StepDistribution sd(r);
  // results[t] = running max at each checkpoint.
  std::vector<std::vector<int>> results(trials,
                                        std::vector<int>(ns.size(), 0));
  // Each worker owns its contexts; round-robin assignment keeps trial t on
  // worker t % workers deterministically.
  int nworkers = std::max(1, std::min(workers, trials));
  std::vector<std::unique_ptr<NuContext>> ctxs;
  for (int wkr = 0; wkr < nworkers; ++wkr)
    ctxs.push_back(std::make_unique<NuContext>(def));

  for_each_trial(trials, nworkers, seed, [&](int t, RngStream& rng) {
    NuContext& ctx = *ctxs[t % nworkers];
    IncrementalNu inc(def, ctx, 8);
    int running_max = 0;
    std::size_t next = 0;
    for (std::int64_t i = 1; i <= n_max; ++i) {
      inc.push(sd.sample(rng));
      int v;
      if (mode == NuMode::upper_bound) {
        v = inc.value();
      } else {
        auto ev = nu(inc.word(), ctx, NuMode::exact);
        v = ev ? ev->value : inc.value();
      }
      running_max = std::max(running_max, v);
      while (next < ns.size() && i == ns[next]) results[t][next++] = running_max;
    }
  });

  UTable table;
  table.n = ns;
  table.mode = mode == NuMode::upper_bound ? "upper_bound" : "exact";
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < ns.size(); ++k) {
    double sum = 0;
    for (int t = 0; t < trials; ++t) sum += results[t][k];
    double mean = sum / trials;
    table.u.push_back(mean);
    if (ns[k] >= 2 && mean > 0) {
      lx.push_back(std::log(static_cast<double>(ns[k])));
      ly.push_back(std::log(mean));
    }
  }
  table.fitted_exponent =
      lx.size() >= 2 ? least_squares(lx, ly).slope
                     : 0.0;
  return table;
}

SpeedTable estimate_speed(const AutomatonGroupDef& def, double r,
                          const std::vector<std::int64_t>& n_ladder,
                          int trials, std::uint64_t seed, int workers) {
  require_binary(def);
  if (n_ladder.empty()) throw std::invalid_argument("ladder must be nonempty");
  std::vector<std::int64_t> ns = n_ladder;
  std::sort(ns.begin(), ns.end());
  std::int64_t n_max = ns.back();

  StepDistribution sd(r);
  struct Row {
    std::vector<double> nu_ratio, len_ratio;
  };
  std::vector<Row> results(trials);
  int nworkers = std::max(1, std::min(workers, trials));
  std::vector<std::unique_ptr<NuContext>> ctxs;
  for (int wkr = 0; wkr < nworkers; ++wkr)
    ctxs.push_back(std::make_unique<NuContext>(def));

  for_each_trial(trials, nworkers, seed, [&](int t, RngStream& rng) {
    IncrementalNu inc(def, *ctxs[t % nworkers], 8);
    std::size_t next = 0;
    for (std::int64_t i = 1; i <= n_max; ++i) {
      inc.push(sd.sample(rng));
      while (next < ns.size() && i == ns[next]) {
        double nn = static_cast<double>(i);
        results[t].nu_ratio.push_back(inc.value() / nn);
        results[t].len_ratio.push_back(inc.word().size() / nn);
        ++next;
      }
    }
  });

  SpeedTable table;
  table.n = ns;
  for (std::size_t k = 0; k < ns.size(); ++k) {
    double su = 0, sl = 0;
    for (int t = 0; t < trials; ++t) {
      su += results[t].nu_ratio[k];
      sl += results[t].len_ratio[k];
    }
    table.nu_over_n.push_back(su / trials);
    table.len_over_n.push_back(sl / trials);
  }
  return table;
}

EscapeTailTable escape_tail(const AutomatonGroupDef& def, double r,
                            std::int64_t n, const std::vector<double>& a_list,
                            int trials, std::uint64_t seed, int workers) {
  require_binary(def);
  StepDistribution sd(r);
  std::vector<std::int64_t> max_x(trials, 0);

  for_each_trial(trials, workers, seed, [&](int t, RngStream& rng) {
    WreathWalkState state;
    std::int64_t m = 0;
    for (std::int64_t i = 0; i < n; ++i) {
      state.step(sd.sample(rng), def, false);
      m = std::max(m, static_cast<std::int64_t>(state.x.size()));
    }
    max_x[t] = m;
  });

  EscapeTailTable table;
  table.n = n;
  table.a = a_list;
  double scale = std::pow(static_cast<double>(n), 5.0 / 6.0);
  table.fitted_c = 0.0;
  for (double a : a_list) {
    int hits = 0;
    for (std::int64_t m : max_x)
      if (static_cast<double>(m) > a * scale) ++hits;
    double tail = static_cast<double>(hits) / trials;
    table.tail.push_back(tail);
    table.fitted_c = std::max(table.fitted_c, a * tail);
  }
  return table;
}

// ---------------------------------------------------------------------------
// Exact distributions

ExactDistribution exact_distribution(const AutomatonGroupDef& def,
                                     std::int64_t n, double r,
                                     ElementIndex& index, std::int64_t cap) {
  ExactDistribution out;
  if (n < 0) {
    out.ok = false;
    out.message = "n must be >= 0";
    return out;
  }
  if (n > cap) {
    out.ok = false;
    out.message = "n exceeds the exact-convolution cap";
    return out;
  }
  StepDistribution sd(r);
  out.prob.emplace(index.intern(Word{}), 1.0);
  constexpr std::size_t kSupportBudget = 2'000'000;
  for (std::int64_t step = 0; step < n; ++step) {
    std::unordered_map<int, double> next;
    next.reserve(out.prob.size() * 3);
    for (const auto& [id, p] : out.prob) {
      const Word rep = index.representative(id);
      for (int k = 0; k < 4; ++k) {
        Word w = rep;
        w.push(StepDistribution::support()[k]);
        next[index.intern(w)] += p * sd.prob[k];
      }
    }
    if (next.size() > kSupportBudget) {
      out.ok = false;
      out.message = "support exceeded the memory budget";
      return out;
    }
    out.prob = std::move(next);
  }
  return out;
}

std::unordered_map<Word, double, WordHash> free_group_distribution(
    std::int64_t n, double r) {
  StepDistribution sd(r);
  std::unordered_map<Word, double, WordHash> dist;
  dist.emplace(Word{}, 1.0);
  for (std::int64_t step = 0; step < n; ++step) {
    std::unordered_map<Word, double, WordHash> next;
    next.reserve(dist.size() * 3);
    for (const auto& [w, p] : dist) {
      for (int k = 0; k < 4; ++k) {
        Word x = w;
        x.push(StepDistribution::support()[k]);
        next[x] += p * sd.prob[k];
      }
    }
    dist = std::move(next);
  }
  return dist;
}

HeatKernelReport heat_kernel_report(const AutomatonGroupDef& def, double r,
                                    std::int64_t n_cap, ElementIndex& index) {
  HeatKernelReport report;
  int id1 = index.intern(Word{});
  std::vector<double> xs, ys;
  for (std::int64_t n = 0; n <= n_cap; ++n) {
    auto dist = exact_distribution(def, 2 * n, r, index, 2 * n_cap);
    if (!dist.ok) {
      report.ok = false;
      report.message = dist.message;
      return report;
    }
    auto it = dist.prob.find(id1);
    double p = it != dist.prob.end() ? it->second : 0.0;
    report.rows.push_back({n, p});
    if (n >= 1 && p > 0) {
      xs.push_back(std::pow(static_cast<double>(n), 2.0 / 3.0));
      ys.push_back(std::log(p));
    }
  }
  if (xs.size() >= 2) {
    LinearFit fit = least_squares(xs, ys);
    report.fit_intercept = fit.intercept;
    report.fit_slope = -fit.slope;  // log p ~ intercept - slope * n^{2/3}
  } else {
    report.fit_intercept = 0.0;
    report.fit_slope = 0.0;
  }
  return report;
}

std::vector<VaropoulosCarneRow> varopoulos_carne_check(
    const AutomatonGroupDef& def, double r, std::int64_t m_cap,
    BallEnumerator& ball) {
  std::vector<VaropoulosCarneRow> rows;
  ball.extend_to(static_cast<int>(m_cap));
  for (std::int64_t m = 1; m <= m_cap; ++m) {
    auto dist = exact_distribution(def, m, r, ball.index(), m_cap);
    if (!dist.ok)
      throw std::runtime_error("exact distribution failed: " + dist.message);
    VaropoulosCarneRow row{m, std::numeric_limits<double>::infinity(), true};
    for (const auto& [id, p] : dist.prob) {
      auto norm = ball.norm_of_id(id);
      if (!norm) {
        row.pass = false;
        continue;
      }
      double bound =
          2.0 * std::exp(-(*norm) * static_cast<double>(*norm) / (2.0 * m));
      row.worst_margin = std::min(row.worst_margin, bound - p);
    }
    if (row.worst_margin < -1e-12) row.pass = false;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace basilica
