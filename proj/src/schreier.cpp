#include "basilica/schreier.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "basilica/walk.hpp"

namespace basilica {

namespace {

std::string vertex_name(const Vertex& v) {
  if (v.empty()) return "root";
  std::string s;
  for (auto d : v) s += static_cast<char>('0' + d);
  return s;
}

std::string label_name(Letter l, const AutomatonGroupDef& def) {
  if (l == 0) return "1";
  std::string s = def.name(gen_index(l));
  if (!is_positive(l)) s += "^-1";
  return s;
}

}  // namespace

int SchreierGraph::vertex_id(const Vertex& v) const {
  auto it = std::lower_bound(vertices.begin(), vertices.end(), v);
  if (it == vertices.end() || *it != v)
    throw std::invalid_argument("vertex not at this level");
  return static_cast<int>(it - vertices.begin());
}

SchreierGraph build_schreier(const AutomatonGroupDef& def, int n) {
  if (n < 0) throw std::invalid_argument("level must be >= 0");
  SchreierGraph g;
  g.level = n;
  std::int64_t count = 1;
  for (int i = 0; i < n; ++i) count *= def.arity();

  // Lexicographic order = counting with the most significant digit first.
  for (std::int64_t c = 0; c < count; ++c) {
    Vertex v(n);
    std::int64_t rest = c;
    for (int i = n - 1; i >= 0; --i) {
      v[i] = static_cast<std::uint8_t>(rest % def.arity());
      rest /= def.arity();
    }
    g.vertices.push_back(std::move(v));
  }

  g.target.assign(g.vertices.size(), {});
  g.label.assign(g.vertices.size(), {});
  for (std::size_t vi = 0; vi < g.vertices.size(); ++vi) {
    for (int gen = 0; gen < def.num_generators(); ++gen) {
      Word gw = word_of({make_letter(gen, true)});
      g.target[vi].push_back(g.vertex_id(act(gw, g.vertices[vi], def)));
      Word sec = section_at(gw, g.vertices[vi], def);
      if (sec.size() > 1)
        throw std::logic_error("generator section is not a single symbol");
      g.label[vi].push_back(sec.empty() ? Letter{0} : sec[0]);
    }
  }

  // Connectivity by BFS over the undirected edge set.
  std::vector<char> seen(g.vertices.size(), 0);
  std::vector<int> queue{0};
  seen[0] = 1;
  std::size_t reached = 1;
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    int v = queue[qi];
    auto visit = [&](int u) {
      if (!seen[u]) {
        seen[u] = 1;
        ++reached;
        queue.push_back(u);
      }
    };
    for (int gen = 0; gen < def.num_generators(); ++gen) visit(g.target[v][gen]);
    for (std::size_t u = 0; u < g.vertices.size(); ++u)
      for (int gen = 0; gen < def.num_generators(); ++gen)
        if (g.target[u][gen] == v) visit(static_cast<int>(u));
  }
  g.connected = reached == g.vertices.size();
  return g;
}

std::string schreier_dot(const SchreierGraph& g, const AutomatonGroupDef& def) {
  std::ostringstream out;
  out << "digraph schreier {\n";
  for (const auto& v : g.vertices) out << "  \"" << vertex_name(v) << "\";\n";
  for (std::size_t vi = 0; vi < g.vertices.size(); ++vi)
    for (int gen = 0; gen < def.num_generators(); ++gen)
      out << "  \"" << vertex_name(g.vertices[vi]) << "\" -> \""
          << vertex_name(g.vertices[g.target[vi][gen]]) << "\" [label=\""
          << def.name(gen) << "/" << label_name(g.label[vi][gen], def)
          << "\"];\n";
  out << "}\n";
  return out.str();
}

std::string schreier_csv(const SchreierGraph& g, const AutomatonGroupDef& def) {
  std::ostringstream out;
  out << "from,generator,to,label\n";
  for (std::size_t vi = 0; vi < g.vertices.size(); ++vi)
    for (int gen = 0; gen < def.num_generators(); ++gen)
      out << vertex_name(g.vertices[vi]) << "," << def.name(gen) << ","
          << vertex_name(g.vertices[g.target[vi][gen]]) << ","
          << label_name(g.label[vi][gen], def) << "\n";
  return out.str();
}

namespace {

void cycle_dfs(const AutomatonGroupDef& def, int base, int v, int depth,
               int cap, Word label, std::set<Word>& out) {
  for (int gen = 0; gen < def.num_generators(); ++gen) {
    for (bool positive : {true, false}) {
      Letter l = make_letter(gen, positive);
      int to = def.letter_perm(l)(v);
      Word next = label;
      Letter sec = def.letter_section(l, v);
      if (sec != 0) next.push(sec);
      if (to == base) {
        out.insert(std::move(next));
      } else if (depth + 1 < cap) {
        cycle_dfs(def, base, to, depth + 1, cap, std::move(next), out);
      }
    }
  }
}

}  // namespace

IrreducibleCycleReport irreducible_cycles(const AutomatonGroupDef& def,
                                          int base, int length_cap) {
  if (length_cap < 1) throw std::invalid_argument("length_cap must be >= 1");
  if (base < 0 || base >= def.arity())
    throw std::invalid_argument("base must be a level-1 vertex");
  IrreducibleCycleReport report;
  report.base = base;
  report.length_cap = length_cap;

  std::set<Word> labels;
  cycle_dfs(def, base, base, 0, length_cap, Word{}, labels);
  report.labels.assign(labels.begin(), labels.end());

  TrivialityCache cache;
  for (const Word& w : report.labels) {
    std::optional<Letter> cls;
    if (is_trivial(w, def, &cache)) {
      cls = Letter{0};
    } else {
      for (int gen = 0; gen < def.num_generators() && !cls; ++gen)
        for (bool positive : {true, false}) {
          Letter l = make_letter(gen, positive);
          if (equal(w, word_of({l}), def, &cache)) {
            cls = l;
            break;
          }
        }
    }
    report.classes.push_back(cls);
  }
  return report;
}

bool IrreducibleCycleReport::condition1_up_to_cap(
    const std::vector<int>& gens) const {
  std::set<int> allowed(gens.begin(), gens.end());
  std::set<int> seen;
  for (const auto& cls : classes) {
    if (!cls) return false;
    if (*cls == 0) continue;
    int g = gen_index(*cls);
    if (!allowed.count(g)) return false;
    seen.insert(g);
  }
  return seen.size() == allowed.size();
}

// ---------------------------------------------------------------------------
// Refinement

bool GeneratorDistribution::interior() const {
  for (double x : p)
    if (!(x > 0.0)) return false;
  return true;
}

double GeneratorDistribution::l1_distance(const GeneratorDistribution& o) const {
  double d = 0;
  for (std::size_t i = 0; i < p.size(); ++i) d += std::abs(p[i] - o.p[i]);
  return d;
}

GeneratorDistribution GeneratorDistribution::uniform(int k) {
  return {std::vector<double>(k, 1.0 / k)};
}

GeneratorDistribution GeneratorDistribution::from_ratio(double r) {
  return {{1.0 / (1.0 + r), r / (1.0 + r)}};
}

namespace {

void check_mu(const AutomatonGroupDef& def, const GeneratorDistribution& mu) {
  if (static_cast<int>(mu.p.size()) != def.num_generators())
    throw std::invalid_argument("mu size does not match the generator count");
  if (!mu.interior())
    throw std::invalid_argument("mu must be interior to the simplex");
  double sum = 0;
  for (double x : mu.p) sum += x;
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("mu must sum to 1");
}

// Classify a group element as a signed generator; throws when it is not one
// (the refinement law is only defined when labels lie in S and S^-1).
Letter classify_label(const Word& w, const AutomatonGroupDef& def,
                      TrivialityCache* cache) {
  for (int gen = 0; gen < def.num_generators(); ++gen)
    for (bool positive : {true, false}) {
      Letter l = make_letter(gen, positive);
      if (equal(w, word_of({l}), def, cache)) return l;
    }
  throw std::runtime_error(
      "refinement label is not a generator; condition (1) fails here");
}

RefinementResult refine_exact(const AutomatonGroupDef& def,
                              const GeneratorDistribution& mu,
                              const RefineParams& params) {
  ElementIndex index(def);
  const int id1 = index.intern(Word{});
  const int nletters = 2 * def.num_generators();

  // Transient states (eps, section class at the base), discovered by BFS.
  std::map<std::pair<int, int>, int> state_id;
  std::vector<std::pair<int, int>> states{{0, id1}};
  state_id[{0, id1}] = 0;
  struct Arc {
    int from;
    double prob;
    int to;        // transient target, or -1
    int label;     // absorbing label id when to == -1
  };
  std::vector<Arc> arcs;
  std::map<int, int> label_index;  // element id -> column
  std::vector<int> label_ids;

  for (std::size_t si = 0; si < states.size(); ++si) {
    auto [eps, id] = states[si];
    for (int k = 0; k < nletters; ++k) {
      Letter l = make_letter(k / 2, k % 2 == 0);
      double pr = mu.p[k / 2] / 2.0;
      int pb = eps ? (1 - params.base) : params.base;  // pi(base)
      Letter sec = def.letter_section(l, pb);
      Word w = index.representative(id);
      if (sec != 0) w.push(sec);
      int nid = index.intern(w);
      int neps = eps ^ (def.letter_perm(l).is_identity() ? 0 : 1);
      if (neps == 0 && nid != id1) {
        if (!label_index.count(nid)) {
          label_index[nid] = static_cast<int>(label_ids.size());
          label_ids.push_back(nid);
        }
        arcs.push_back({static_cast<int>(si), pr, -1, label_index[nid]});
      } else {
        auto key = std::make_pair(neps, nid);
        auto it = state_id.find(key);
        if (it == state_id.end()) {
          if (static_cast<int>(states.size()) >= params.state_cap)
            throw std::runtime_error(
                "state cap exceeded; condition (1) unverified");
          it = state_id.emplace(key, static_cast<int>(states.size())).first;
          states.push_back(key);
        }
        arcs.push_back({static_cast<int>(si), pr, it->second, 0});
      }
    }
  }

  const int T = static_cast<int>(states.size());
  const int L = static_cast<int>(label_ids.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(T, T);
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(T, L);
  for (const Arc& arc : arcs) {
    if (arc.to >= 0)
      A(arc.from, arc.to) -= arc.prob;
    else
      R(arc.from, arc.label) += arc.prob;
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  Eigen::VectorXd e_tau = lu.solve(Eigen::VectorXd::Ones(T));
  Eigen::MatrixXd absorb = lu.solve(R);

  RefinementResult result;
  result.backend = RefineBackend::exact;
  result.e_tau = e_tau(0);
  result.mu_prime.p.assign(def.num_generators(), 0.0);
  result.mu_prime_stderr.assign(def.num_generators(), 0.0);
  for (int c = 0; c < L; ++c) {
    Letter l = classify_label(index.representative(label_ids[c]), def,
                              &index.cache());
    result.mu_prime.p[gen_index(l)] += absorb(0, c);
  }
  double mass = 0;
  for (double x : result.mu_prime.p) mass += x;
  if (std::abs(mass - 1.0) > 1e-9)
    throw std::logic_error("refined distribution does not sum to 1");
  return result;
}

RefinementResult refine_monte_carlo(const AutomatonGroupDef& def,
                                    const GeneratorDistribution& mu,
                                    const RefineParams& params) {
  const std::int64_t trials = params.mc_trials;
  if (trials < 1) throw std::invalid_argument("mc_trials must be >= 1");
  std::vector<int> label_gen(trials);
  std::vector<std::int64_t> taus(trials);

  int workers = std::max(1, std::min<int>(params.workers,
                                          static_cast<int>(trials)));
  auto body = [&](int worker) {
    TrivialityCache cache;
    for (std::int64_t t = worker; t < trials; t += workers) {
      RngStream rng(params.seed, static_cast<std::uint64_t>(t) + 1);
      int eps = 0;
      Word w;
      std::int64_t n = 0;
      while (true) {
        double u = rng.uniform();
        int gen = 0;
        double acc = 0;
        for (; gen < def.num_generators() - 1; ++gen) {
          acc += mu.p[gen];
          if (u < acc) break;
        }
        Letter l = make_letter(gen, rng.uniform() < 0.5);
        int pb = eps ? (1 - params.base) : params.base;
        Letter sec = def.letter_section(l, pb);
        if (sec != 0) w.push(sec);
        eps ^= def.letter_perm(l).is_identity() ? 0 : 1;
        ++n;
        if (eps == 0 && !is_trivial(w, def, &cache)) break;
      }
      taus[t] = n;
      label_gen[t] = gen_index(classify_label(w, def, &cache));
    }
  };
  if (workers == 1) {
    body(0);
  } else {
    std::vector<std::thread> pool;
    for (int wkr = 0; wkr < workers; ++wkr) pool.emplace_back(body, wkr);
    for (auto& th : pool) th.join();
  }

  RefinementResult result;
  result.backend = RefineBackend::monte_carlo;
  std::vector<std::int64_t> counts(def.num_generators(), 0);
  double sum = 0, sumsq = 0;
  for (std::int64_t t = 0; t < trials; ++t) {
    ++counts[label_gen[t]];
    sum += taus[t];
    sumsq += static_cast<double>(taus[t]) * taus[t];
  }
  result.e_tau = sum / trials;
  double var = sumsq / trials - result.e_tau * result.e_tau;
  result.e_tau_stderr = std::sqrt(std::max(0.0, var) / trials);
  for (std::int64_t c : counts) {
    double p = static_cast<double>(c) / trials;
    result.mu_prime.p.push_back(p);
    result.mu_prime_stderr.push_back(std::sqrt(p * (1 - p) / trials));
  }
  return result;
}

}  // namespace

RefinementResult refine(const AutomatonGroupDef& def,
                        const GeneratorDistribution& mu, RefineBackend backend,
                        const RefineParams& params) {
  if (def.arity() != 2)
    throw std::invalid_argument("refinement requires a binary tree");
  if (params.base < 0 || params.base > 1)
    throw std::invalid_argument("base must be a level-1 vertex");
  check_mu(def, mu);
  // Renormalize: rounding deficits in the input mass would otherwise be
  // amplified by a factor of about E[tau] per refinement.
  GeneratorDistribution unit = mu;
  double sum = 0;
  for (double x : unit.p) sum += x;
  for (double& x : unit.p) x /= sum;
  return backend == RefineBackend::exact ? refine_exact(def, unit, params)
                                         : refine_monte_carlo(def, unit, params);
}

FixedPointResult fixed_point(const AutomatonGroupDef& def,
                             const GeneratorDistribution& mu0, double tol,
                             int max_iter, const RefineParams& params) {
  if (!(tol > 0)) throw std::invalid_argument("tol must be > 0");
  GeneratorDistribution mu = mu0;
  for (int it = 1; it <= max_iter; ++it) {
    RefinementResult res = refine(def, mu, RefineBackend::exact, params);
    double resid = res.mu_prime.l1_distance(mu);
    if (resid < tol) {
      if (!mu.interior())
        throw std::runtime_error("fixed point lies on the boundary");
      return {mu, res.e_tau, it, resid};
    }
    // Damped step: the bare map can be periodic (it permutes coordinates for
    // the k-example), while the average converges for affine maps.
    for (std::size_t i = 0; i < mu.p.size(); ++i)
      mu.p[i] = 0.5 * (mu.p[i] + res.mu_prime.p[i]);
    if (!mu.interior())
      throw std::runtime_error("iterate left the interior of the simplex");
  }
  throw std::runtime_error("fixed-point iteration did not converge");
}

AlphaResult alpha(const AutomatonGroupDef& def, const GeneratorDistribution& mu,
                  const RefineParams& params) {
  RefinementResult res = refine(def, mu, RefineBackend::exact, params);
  AlphaResult out;
  out.e_tau = res.e_tau;
  out.alpha = std::log(2.0) / std::log(res.e_tau);
  out.boundary_warning = out.alpha <= 0.5 + 1e-9;
  return out;
}

double product_invariance_check(int k, const GeneratorDistribution& mu0,
                                const RefineParams& params) {
  AutomatonGroupDef def = AutomatonGroupDef::k_example(k);
  GeneratorDistribution mu = mu0;
  double product = 1.0;
  for (int i = 0; i < k; ++i) {
    RefinementResult res = refine(def, mu, RefineBackend::exact, params);
    product *= res.e_tau;
    mu = res.mu_prime;
  }
  return product;
}

}  // namespace basilica
