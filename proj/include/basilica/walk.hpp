#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "basilica/automaton.hpp"
#include "basilica/element_index.hpp"
#include "basilica/nu.hpp"
#include "basilica/word.hpp"

namespace basilica {

// Counter-based deterministic stream: outputs are a pure function of
// (seed, stream index, counter), so parallel trials on distinct streams give
// the same numbers regardless of scheduling.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();
  double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }
  // Uniform index in [0, n) without using library distributions, so results
  // are identical across standard libraries.
  std::uint64_t uniform_below(std::uint64_t n);

 private:
  std::uint64_t state_;
};

// Weighted step law on (a, a^-1, b, b^-1) with weights (1, 1, r, r).
struct StepDistribution {
  double r;
  double prob[4];  // indexed by support()

  explicit StepDistribution(double r_value);
  static const std::array<Letter, 4>& support();
  Letter sample(RngStream& rng) const;
  int support_index(Letter l) const;
};

// The projected state (Y, X, eps) in F2 wr C2, updated one input letter at a
// time. Convention: Y is the section at vertex 0, X the section at vertex 1,
// eps the root permutation bit; this matches decompose() and is locked by a
// recomputation test.
struct WreathWalkState {
  Word y;
  Word x;
  int eps = 0;
  std::int64_t n = 0;
  Word z;  // unprojected free word, kept only when retain_z is set

  void step(Letter l, const AutomatonGroupDef& def, bool retain_z);
  void reset();
};

struct TrajectoryPoint {
  std::uint8_t eps;
  std::uint32_t x_len;
  std::uint32_t y_len;
};

struct Trajectory {
  double r = 1.0;
  std::uint64_t seed = 0;
  std::vector<Letter> letters;            // sampled inputs, one per step
  std::vector<TrajectoryPoint> summary;   // indexed by step, including step 0
  std::vector<std::pair<std::int64_t, WreathWalkState>> snapshots;  // dyadic
  Word final_z;                           // set when retain_z
};

struct RunOptions {
  bool retain_z = false;
  bool dyadic_snapshots = false;
  // Recompute (Y, X, eps) from Z this often and compare; 0 disables.
  std::int64_t verify_every = 0;
};

Trajectory run(const AutomatonGroupDef& def, std::int64_t n, double r,
               std::uint64_t seed, const RunOptions& opts = {});

// sigma(0) = 0; sigma(m+1) = min{ n > sigma(m) : eps_n = 0, X_n != X_sigma(m) }.
// tau(0)   = min{ n > 0 : eps_n = 1 };
// tau(m+1) = min{ n > tau(m) : eps_n = 1, Y_n != Y_tau(m) }.
// Increments are right multipliers between consecutive stopping times; each
// must be a single signed generator (throws std::logic_error otherwise).
// y_start records Y at tau(0) verbatim; the Y-induced walk does not start at
// the identity and no correction is applied.
struct StoppingTimeSeries {
  std::vector<std::int64_t> sigma;
  std::vector<std::int64_t> tau;
  std::vector<Letter> x_increments;  // x_increments[m] covers sigma(m)->sigma(m+1)
  std::vector<Letter> y_increments;  // y_increments[m] covers tau(m)->tau(m+1)
  Word y_start;
};

StoppingTimeSeries extract_stopping_times(const Trajectory& traj,
                                          const AutomatonGroupDef& def);

// Closed forms from the stopping-time analysis.
double f_rate(double r);       // lim m / sigma(m) = (2 + r) / (4 + 4r)
double t_circ(double r);       // 4 (1 + r) / (2 + r)

struct InducedLawResult {
  std::int64_t counts[4];      // by StepDistribution::support() order
  double freq[4];
  double target[4];            // (r/2, r/2, 1, 1) normalized
  double zscore[4];
  bool pass;                   // all |z| <= 3
};

InducedLawResult induced_law_test(const AutomatonGroupDef& def, double r,
                                  std::int64_t num_increments,
                                  std::uint64_t seed);

struct StoppingRates {
  double sigma_rate;  // m / sigma(m) at m = m_max
  double tau_rate;    // m / tau(m) at m = m_max
};

StoppingRates estimate_stopping_rates(const AutomatonGroupDef& def, double r,
                                      std::int64_t m_max, std::uint64_t seed);

inline double estimate_sigma_rate(const AutomatonGroupDef& def, double r,
                                  std::int64_t m_max, std::uint64_t seed) {
  return estimate_stopping_rates(def, r, m_max, seed).sigma_rate;
}

// Incremental nu upper bound for a growing free word: a decomposition tree of
// the current word where nodes longer than the cutoff hold their first-level
// sections as children. Pushing a letter routes one letter down a single
// root-to-leaf path, so each update and re-evaluation costs O(depth).
class IncrementalNu {
 public:
  IncrementalNu(const AutomatonGroupDef& def, NuContext& leaf_ctx,
                int cutoff = 8);
  ~IncrementalNu();
  IncrementalNu(const IncrementalNu&) = delete;
  IncrementalNu& operator=(const IncrementalNu&) = delete;

  void push(Letter l);
  int value();            // nu upper bound of the current word
  const Word& word() const;
  void reset();

 private:
  struct Node;
  int eval(Node* node);
  void push_at(Node* node, Letter l);
  void materialize(Node* node);
  static void delete_nodes(Node* node);

  const AutomatonGroupDef& def_;
  NuContext& leaf_ctx_;
  int cutoff_;
  Node* root_;
};

struct UTable {
  std::vector<std::int64_t> n;
  std::vector<double> u;          // mean over trials of max_{i<=n} nu(Z_i)
  double fitted_exponent;         // slope of log u vs log n
  std::string mode;               // "upper_bound" or "exact"
};

UTable estimate_u(const AutomatonGroupDef& def, double r,
                  const std::vector<std::int64_t>& n_list, int trials,
                  std::uint64_t seed, NuMode mode = NuMode::upper_bound,
                  int workers = 1);

struct SpeedTable {
  std::vector<std::int64_t> n;    // doubling ladder
  std::vector<double> nu_over_n;  // mean nu(Z_n) / n
  std::vector<double> len_over_n; // mean |Z_n| / n (free length surrogate)
};

SpeedTable estimate_speed(const AutomatonGroupDef& def, double r,
                          const std::vector<std::int64_t>& n_ladder,
                          int trials, std::uint64_t seed, int workers = 1);

struct EscapeTailTable {
  std::int64_t n;
  std::vector<double> a;
  std::vector<double> tail;       // empirical P(M_n > a n^{5/6})
  double fitted_c;                // max over the grid of a * tail
};

EscapeTailTable escape_tail(const AutomatonGroupDef& def, double r,
                            std::int64_t n, const std::vector<double>& a_list,
                            int trials, std::uint64_t seed, int workers = 1);

// Exact n-step distribution by convolution over canonical elements. Soft
// errors: ok = false with a message when the cap or budget is exceeded.
struct ExactDistribution {
  bool ok = true;
  std::string message;
  std::unordered_map<int, double> prob;  // ElementIndex id -> probability
};

ExactDistribution exact_distribution(const AutomatonGroupDef& def,
                                     std::int64_t n, double r,
                                     ElementIndex& index,
                                     std::int64_t cap = 12);

// Same walk on the free group F2 (free reduction only, no relations).
std::unordered_map<Word, double, WordHash> free_group_distribution(
    std::int64_t n, double r);

struct HeatKernelRow {
  std::int64_t n;        // P(Z_{2n} = identity)
  double p_return;
};

struct HeatKernelReport {
  std::vector<HeatKernelRow> rows;
  double fit_intercept;  // log p ~ intercept - slope * n^{2/3}
  double fit_slope;
  bool ok = true;
  std::string message;
};

HeatKernelReport heat_kernel_report(const AutomatonGroupDef& def, double r,
                                    std::int64_t n_cap, ElementIndex& index);

struct VaropoulosCarneRow {
  std::int64_t m;
  double worst_margin;   // min over support of bound - probability
  bool pass;
};

// P(Z_m = g) <= 2 exp(-norm(g)^2 / (2m)) over the full support, m <= m_cap.
std::vector<VaropoulosCarneRow> varopoulos_carne_check(
    const AutomatonGroupDef& def, double r, std::int64_t m_cap,
    BallEnumerator& ball);

}  // namespace basilica
