#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "basilica/automaton.hpp"
#include "basilica/element_index.hpp"
#include "basilica/word.hpp"

namespace basilica {

// Level-n Schreier graph of the action on {0..d-1}^n. Vertices are listed in
// lexicographic order; edge (v, g) points to act(g, v) and carries the
// section of g at v as its label (always a single generator symbol or the
// identity, written Letter 0).
struct SchreierGraph {
  int level = 0;
  std::vector<Vertex> vertices;
  std::vector<std::vector<int>> target;   // target[v][g]
  std::vector<std::vector<Letter>> label; // label[v][g]
  bool connected = false;

  int vertex_id(const Vertex& v) const;
};

SchreierGraph build_schreier(const AutomatonGroupDef& def, int n);

std::string schreier_dot(const SchreierGraph& g, const AutomatonGroupDef& def);
std::string schreier_csv(const SchreierGraph& g, const AutomatonGroupDef& def);

// Irreducible cycles at a level-1 base vertex: walks along generator edges
// (forward or backward) that start and end at the base and avoid it in
// between. The label multiplies the section letters along the way (inverted
// on backward edges) and is freely reduced.
struct IrreducibleCycleReport {
  int base = 0;
  int length_cap = 0;
  std::vector<Word> labels;  // distinct reduced labels, sorted
  // Group classification per label: Letter 0 for the identity, a signed
  // generator when equal to one, nullopt when outside S, S^-1 and 1.
  std::vector<std::optional<Letter>> classes;

  // Condition (1) against a generator subset, certified only up to the
  // length cap: every label lies in the subset (or its inverses, or 1) and
  // every subset generator occurs.
  bool condition1_up_to_cap(const std::vector<int>& gens) const;
};

IrreducibleCycleReport irreducible_cycles(const AutomatonGroupDef& def,
                                          int base, int length_cap);

// Probability per unsigned generator; signed steps split the weight evenly.
struct GeneratorDistribution {
  std::vector<double> p;

  bool interior() const;
  double l1_distance(const GeneratorDistribution& o) const;
  static GeneratorDistribution uniform(int k);
  // Basilica weights (1, 1, r, r) as the unsigned pair (1, r)/(1 + r).
  static GeneratorDistribution from_ratio(double r);
  // b-weight over a-weight for two-generator distributions.
  double ratio() const { return p[1] / p[0]; }
};

enum class RefineBackend { exact, monte_carlo };

struct RefineParams {
  int base = 1;  // level-1 vertex whose cycles satisfy condition (1)
  int state_cap = 10000;
  std::int64_t mc_trials = 100000;
  std::uint64_t seed = 1;
  int workers = 1;
};

// mu -> mu' refinement: run the mu-walk until the first positive time tau at
// which its level-1 image fixes the base vertex with a nontrivial accumulated
// section there; mu' is the law of that section and E_tau its expected time.
// The exact backend solves first-passage equations on the finite chain
// (root permutation, section class); the class set stays finite exactly when
// condition (1) holds, otherwise the state cap is hit and an error reports
// condition (1) as unverified.
struct RefinementResult {
  GeneratorDistribution mu_prime;
  double e_tau = 0.0;
  RefineBackend backend = RefineBackend::exact;
  // Monte Carlo standard errors (zero for the exact backend).
  std::vector<double> mu_prime_stderr;
  double e_tau_stderr = 0.0;
};

RefinementResult refine(const AutomatonGroupDef& def,
                        const GeneratorDistribution& mu, RefineBackend backend,
                        const RefineParams& params = {});

struct FixedPointResult {
  GeneratorDistribution mu;
  double e_tau = 0.0;   // refine's expected time at the fixed point
  int iterations = 0;
  double residual = 0.0;  // L1 distance between refine(mu).mu' and mu
};

// Damped iteration mu <- (mu + refine(mu)) / 2 from mu0 until the residual
// drops below tol. The plain iterate can be periodic (for the k-example the
// map permutes coordinates), so damping is what makes iteration converge;
// errors if max_iter is hit or the iterate leaves the interior.
FixedPointResult fixed_point(const AutomatonGroupDef& def,
                             const GeneratorDistribution& mu0, double tol,
                             int max_iter, const RefineParams& params = {});

struct AlphaResult {
  double alpha = 0.0;
  double e_tau = 0.0;
  // alpha <= 1/2 is the regime where the large-deviation bounds for sigma
  // break down; flagged, not rejected.
  bool boundary_warning = false;
};

AlphaResult alpha(const AutomatonGroupDef& def, const GeneratorDistribution& mu,
                  const RefineParams& params = {});

// Product of E_tau over k successive refinements of the k-generator example,
// starting from mu0; independent of mu0 and equal to 2^{k+1}.
double product_invariance_check(int k, const GeneratorDistribution& mu0,
                                const RefineParams& params = {});

}  // namespace basilica
