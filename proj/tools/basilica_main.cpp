// basilica-cli: simulation, exact computation, and report tooling for
// automaton-group random walks.
//
// Every subcommand writes its artifacts plus a manifest.json into the output
// directory (--out, else $BASILICA_OUT, else the working directory).
// Exit codes: 0 success, 1 invalid usage or arguments, 2 resource cap hit.
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "basilica/acceptance.hpp"
#include "basilica/artifacts.hpp"
#include "basilica/element_index.hpp"
#include "basilica/nu.hpp"
#include "basilica/presentation.hpp"
#include "basilica/schreier.hpp"
#include "basilica/walk.hpp"

namespace {

using namespace basilica;
using nlohmann::ordered_json;

struct CommonOpts {
  std::string out;
  std::string preset = "basilica";
  int k_example = 0;  // 0 = use preset name
  std::uint64_t seed = 1;
  int workers = 1;
};

void add_out_option(CLI::App* cmd, CommonOpts& opts) {
  const char* env = std::getenv("BASILICA_OUT");
  opts.out = env ? env : ".";
  cmd->add_option("--out", opts.out, "Output directory for artifacts");
}

void add_group_options(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--preset", opts.preset,
                  "Group preset: basilica, odometer, k1..k9");
  cmd->add_option("--k-example", opts.k_example,
                  "Shorthand for the k-generator example preset")
      ->check(CLI::Range(1, 9));
}

AutomatonGroupDef resolve_def(const CommonOpts& opts) {
  if (opts.k_example > 0) return AutomatonGroupDef::k_example(opts.k_example);
  return AutomatonGroupDef::preset(opts.preset);
}

std::string group_tag(const CommonOpts& opts) {
  if (opts.k_example > 0) return "k" + std::to_string(opts.k_example);
  return opts.preset;
}

// Collects artifacts, then writes them with a manifest in one place so every
// subcommand produces the same layout.
struct Emitter {
  std::string subcommand;
  std::uint64_t seed = 0;
  ordered_json config = ordered_json::object();
  std::vector<std::pair<std::string, std::string>> files;
  std::chrono::steady_clock::time_point start =
      std::chrono::steady_clock::now();

  void add(const std::string& name, const std::string& content) {
    files.emplace_back(name, content);
  }

  void flush(const std::string& out_dir) {
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - start)
                  .count();
    std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    for (const auto& [name, content] : files)
      write_text_file(dir / name, content);
    write_text_file(dir / "manifest.json",
                    run_manifest(subcommand, seed, config, ms));
  }
};

GeneratorDistribution parse_mu(const AutomatonGroupDef& def,
                               const std::vector<double>& mu_in, double r) {
  if (!mu_in.empty()) {
    if (static_cast<int>(mu_in.size()) != def.num_generators())
      throw std::invalid_argument("--mu needs one weight per generator");
    GeneratorDistribution mu{mu_in};
    double sum = 0;
    for (double p : mu.p) {
      if (p <= 0) throw std::invalid_argument("--mu weights must be positive");
      sum += p;
    }
    for (double& p : mu.p) p /= sum;
    return mu;
  }
  if (def.num_generators() == 2) return GeneratorDistribution::from_ratio(r);
  return GeneratorDistribution::uniform(def.num_generators());
}

ordered_json mu_json(const GeneratorDistribution& mu) {
  ordered_json j = ordered_json::array();
  for (double p : mu.p) j.push_back(p);
  return j;
}

// ---------------------------------------------------------------------------

void cmd_simulate(const CommonOpts& opts, double r, std::int64_t n, int trials,
                  const std::string& mode_name) {
  if (n < 256) throw std::invalid_argument("--n must be at least 256");
  auto def = resolve_def(opts);
  NuMode mode =
      mode_name == "exact" ? NuMode::exact : NuMode::upper_bound;

  std::vector<std::int64_t> ladder;
  for (std::int64_t m = n; m >= 256; m /= 2) ladder.push_back(m);
  std::reverse(ladder.begin(), ladder.end());

  Emitter em{"simulate", opts.seed};
  em.config = {{"group", group_tag(opts)}, {"r", r},       {"n", n},
               {"trials", trials},         {"mode", mode_name},
               {"workers", opts.workers}};

  auto speed = estimate_speed(def, r, ladder, trials, opts.seed, opts.workers);
  Csv speed_csv({"n", "nu_over_n", "len_over_n"});
  for (std::size_t i = 0; i < speed.n.size(); ++i)
    speed_csv.add_row({std::to_string(speed.n[i]),
                       format_real(speed.nu_over_n[i]),
                       format_real(speed.len_over_n[i])});
  em.add("speed.csv", speed_csv.str());

  auto u = estimate_u(def, r, ladder, trials, opts.seed + 1, mode,
                      opts.workers);
  Csv u_csv({"n", "u"});
  for (std::size_t i = 0; i < u.n.size(); ++i)
    u_csv.add_row({std::to_string(u.n[i]), format_real(u.u[i])});
  em.add("u.csv", u_csv.str());

  ordered_json summary = {{"fitted_exponent", u.fitted_exponent},
                          {"mode", u.mode}};
  em.add("simulate.json", summary.dump(2) + "\n");
  em.flush(opts.out);
  std::cout << "fitted u exponent " << format_real(u.fitted_exponent) << " ("
            << u.mode << ")\n";
}

void cmd_nu(const CommonOpts& opts, const std::string& word_text,
            const std::string& mode_name) {
  auto def = resolve_def(opts);
  Word w = def.parse_word(word_text);
  NuContext ctx(def);
  NuMode mode = mode_name == "exact" ? NuMode::exact : NuMode::upper_bound;
  auto v = nu(w, ctx, mode);
  if (!v)
    throw std::runtime_error(
        "word norm exceeded the radius cap; rerun with --mode upper");

  Emitter em{"nu", 0};
  em.config = {{"group", group_tag(opts)},
               {"word", word_text},
               {"mode", mode_name}};
  ordered_json j = {{"word", def.format_word(w)},
                    {"nu", v->value},
                    {"mode", mode_name},
                    {"free_length", w.size()}};
  em.add("nu.json", j.dump(2) + "\n");
  em.flush(opts.out);
  std::cout << "nu(" << def.format_word(w) << ") = " << v->value << " ("
            << mode_name << ")\n";
}

void cmd_ball(const CommonOpts& opts, int radius) {
  auto def = resolve_def(opts);
  BallEnumerator ball(def);
  if (!ball.extend_to(radius))
    throw std::runtime_error("node budget exhausted before radius " +
                             std::to_string(radius));

  Emitter em{"ball", 0};
  em.config = {{"group", group_tag(opts)}, {"radius", radius}};
  Csv csv({"radius", "sphere_size", "ball_size"});
  std::size_t total = 0;
  for (int rr = 0; rr <= radius; ++rr) {
    total += ball.sphere(rr).size();
    csv.add_row({std::to_string(rr), std::to_string(ball.sphere(rr).size()),
                 std::to_string(total)});
  }
  em.add("ball.csv", csv.str());
  em.flush(opts.out);
  std::cout << "ball(" << radius << ") has " << total << " elements\n";
}

void cmd_exact_dist(const CommonOpts& opts, std::int64_t n, double r,
                    std::int64_t cap) {
  auto def = resolve_def(opts);
  ElementIndex index(def);
  auto dist = exact_distribution(def, n, r, index, cap);
  if (!dist.ok) throw std::runtime_error(dist.message);

  std::vector<std::pair<Word, double>> rows;
  rows.reserve(dist.prob.size());
  for (const auto& [id, p] : dist.prob)
    rows.emplace_back(index.representative(id), p);
  std::sort(rows.begin(), rows.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  Emitter em{"exact-dist", 0};
  em.config = {{"group", group_tag(opts)}, {"n", n}, {"r", r}, {"cap", cap}};
  Csv csv({"word", "prob"});
  for (const auto& [w, p] : rows)
    csv.add_row({def.format_word(w), format_real(p)});
  em.add("exact_dist.csv", csv.str());
  em.flush(opts.out);
  std::cout << "distribution over " << rows.size() << " elements at n = " << n
            << "\n";
}

void cmd_heat_kernel(const CommonOpts& opts, std::int64_t n_cap, double r) {
  auto def = resolve_def(opts);
  ElementIndex index(def);
  auto report = heat_kernel_report(def, r, n_cap, index);
  if (!report.ok) throw std::runtime_error(report.message);

  Emitter em{"heat-kernel", 0};
  em.config = {{"group", group_tag(opts)}, {"n_cap", n_cap}, {"r", r}};
  Csv csv({"n", "p_return"});
  for (const auto& row : report.rows)
    csv.add_row({std::to_string(row.n), format_real(row.p_return)});
  em.add("heat_kernel.csv", csv.str());
  ordered_json fit = {{"fit_intercept", report.fit_intercept},
                      {"fit_slope", report.fit_slope}};
  em.add("heat_kernel.json", fit.dump(2) + "\n");
  em.flush(opts.out);
  std::cout << "log p fit: intercept " << format_real(report.fit_intercept)
            << ", slope " << format_real(report.fit_slope) << " vs n^{2/3}\n";
}

void cmd_escape_tail(const CommonOpts& opts, std::int64_t n,
                     std::vector<double> a_list, int trials, double r) {
  auto def = resolve_def(opts);
  if (a_list.empty()) a_list = {0.125, 0.25, 0.5, 1, 2, 4, 8};
  auto tail =
      escape_tail(def, r, n, a_list, trials, opts.seed, opts.workers);

  Emitter em{"escape-tail", opts.seed};
  em.config = {{"group", group_tag(opts)}, {"n", n},
               {"a", a_list},              {"trials", trials},
               {"r", r},                   {"workers", opts.workers}};
  Csv csv({"a", "tail"});
  for (std::size_t i = 0; i < tail.a.size(); ++i)
    csv.add_row({format_real(tail.a[i]), format_real(tail.tail[i])});
  em.add("escape_tail.csv", csv.str());
  ordered_json j = {{"fitted_c", tail.fitted_c}};
  em.add("escape_tail.json", j.dump(2) + "\n");
  em.flush(opts.out);
  std::cout << "max a * tail = " << format_real(tail.fitted_c) << "\n";
}

void cmd_schreier(const CommonOpts& opts, int level) {
  auto def = resolve_def(opts);
  auto g = build_schreier(def, level);

  Emitter em{"schreier", 0};
  em.config = {{"group", group_tag(opts)}, {"level", level}};
  em.add("schreier.dot", schreier_dot(g, def));
  em.add("schreier.csv", schreier_csv(g, def));
  em.flush(opts.out);
  std::cout << "level-" << level << " graph: " << g.vertices.size()
            << " vertices, " << (g.connected ? "connected" : "disconnected")
            << "\n";
}

void cmd_cycles(const CommonOpts& opts, int base, int cap) {
  auto def = resolve_def(opts);
  auto report = irreducible_cycles(def, base, cap);

  Emitter em{"cycles", 0};
  em.config = {{"group", group_tag(opts)}, {"base", base}, {"cap", cap}};
  Csv csv({"label", "class"});
  for (std::size_t i = 0; i < report.labels.size(); ++i) {
    std::string cls = "outside";
    if (report.classes[i])
      cls = *report.classes[i] == 0
                ? "identity"
                : def.format_word(word_of({*report.classes[i]}));
    csv.add_row({def.format_word(report.labels[i]), cls});
  }
  em.add("cycles.csv", csv.str());

  std::vector<int> all_gens;
  for (int g = 0; g < def.num_generators(); ++g) all_gens.push_back(g);
  ordered_json j = {{"base", base},
                    {"length_cap", cap},
                    {"labels", report.labels.size()},
                    {"condition1_up_to_cap",
                     report.condition1_up_to_cap(all_gens)}};
  em.add("cycles.json", j.dump(2) + "\n");
  em.flush(opts.out);
  std::cout << report.labels.size() << " irreducible cycle labels at base "
            << base << "\n";
}

void cmd_refine(const CommonOpts& opts, double r,
                const std::vector<double>& mu_in,
                const std::string& backend_name, std::int64_t trials) {
  auto def = resolve_def(opts);
  auto mu = parse_mu(def, mu_in, r);
  RefineBackend backend = backend_name == "exact" ? RefineBackend::exact
                                                  : RefineBackend::monte_carlo;
  RefineParams params;
  params.mc_trials = trials;
  params.seed = opts.seed;
  params.workers = opts.workers;
  auto res = refine(def, mu, backend, params);

  Emitter em{"refine", opts.seed};
  em.config = {{"group", group_tag(opts)},   {"mu", mu_json(mu)},
               {"backend", backend_name},    {"trials", trials},
               {"workers", opts.workers}};
  ordered_json j = {{"mu", mu_json(mu)},
                    {"mu_prime", mu_json(res.mu_prime)},
                    {"e_tau", res.e_tau},
                    {"backend", backend_name}};
  if (backend == RefineBackend::monte_carlo) {
    j["mu_prime_stderr"] = res.mu_prime_stderr;
    j["e_tau_stderr"] = res.e_tau_stderr;
  }
  em.add("refine.json", j.dump(2) + "\n");
  em.flush(opts.out);
  std::cout << "E_tau = " << format_real(res.e_tau) << "\n";
}

void cmd_fixed_point(const CommonOpts& opts, const std::vector<double>& mu_in,
                     double tol, int max_iter) {
  auto def = resolve_def(opts);
  GeneratorDistribution mu0 =
      mu_in.empty() ? GeneratorDistribution::uniform(def.num_generators())
                    : parse_mu(def, mu_in, 1.0);
  auto fp = fixed_point(def, mu0, tol, max_iter);
  auto a = alpha(def, fp.mu);

  Emitter em{"fixed-point", 0};
  em.config = {{"group", group_tag(opts)},
               {"mu0", mu_json(mu0)},
               {"tol", tol},
               {"max_iter", max_iter}};
  ordered_json j = {{"mu", mu_json(fp.mu)},
                    {"e_tau", fp.e_tau},
                    {"alpha", a.alpha},
                    {"iterations", fp.iterations},
                    {"residual", fp.residual},
                    {"boundary_warning", a.boundary_warning}};
  em.add("fixed_point.json", j.dump(2) + "\n");
  em.flush(opts.out);
  std::cout << "fixed point mu = (";
  for (std::size_t i = 0; i < fp.mu.p.size(); ++i)
    std::cout << (i ? ", " : "") << format_real(fp.mu.p[i]);
  std::cout << "), E_tau = " << format_real(fp.e_tau)
            << ", alpha = " << format_real(a.alpha) << "\n";
}

void cmd_alpha(const CommonOpts& opts, double r,
               const std::vector<double>& mu_in) {
  auto def = resolve_def(opts);
  auto mu = parse_mu(def, mu_in, r);
  auto a = alpha(def, mu);

  Emitter em{"alpha", 0};
  em.config = {{"group", group_tag(opts)}, {"mu", mu_json(mu)}};
  ordered_json j = {{"mu", mu_json(mu)},
                    {"alpha", a.alpha},
                    {"e_tau", a.e_tau},
                    {"boundary_warning", a.boundary_warning}};
  em.add("alpha.json", j.dump(2) + "\n");
  em.flush(opts.out);
  std::cout << "alpha = " << format_real(a.alpha)
            << " (E_tau = " << format_real(a.e_tau) << ")"
            << (a.boundary_warning ? " [boundary warning]" : "") << "\n";
}

void cmd_relations(const CommonOpts& opts, int max_n) {
  auto report = verify_relations(max_n);
  Emitter em{"relations", 0};
  em.config = {{"max_n", max_n}};
  em.add("relations.json", report.to_json());
  em.flush(opts.out);
  std::cout << (report.all_pass ? "all relators trivial up to n = "
                                : "RELATOR CHECK FAILED at n <= ")
            << max_n << "\n";
  if (!report.all_pass) throw std::runtime_error("relator verification failed");
}

int cmd_report(const CommonOpts& opts, const std::vector<int>& only) {
  auto results = run_acceptance(opts.workers, only);
  std::string text;
  bool all_pass = true;
  for (const auto& r : results) {
    std::string line = std::string("[") + (r.pass ? "PASS" : "FAIL") +
                       "] criterion " + std::to_string(r.id) + ": " + r.name +
                       (r.detail.empty() ? "" : " - " + r.detail) + "\n";
    std::cout << line;
    text += line;
    all_pass &= r.pass;
  }
  Emitter em{"report", 0};
  em.config = {{"only", only}, {"workers", opts.workers}};
  em.add("report.txt", text);
  em.flush(opts.out);
  std::cout << (all_pass ? "ALL PASS" : "FAILURES") << "\n";
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random walks, nu norms, and Schreier-graph analysis for "
               "automaton groups"};
  app.require_subcommand(1);

  CommonOpts opts;
  double r = 1.0;
  std::int64_t n = 65536;
  int trials = 100;
  std::string mode = "upper";
  std::string word_text;
  int radius = 6;
  std::int64_t cap = 12;
  std::int64_t n_cap = 8;
  std::vector<double> a_list;
  int level = 4;
  int base = 1;
  int cycle_cap = 8;
  std::vector<double> mu_in;
  std::string backend = "exact";
  std::int64_t mc_trials = 100000;
  double tol = 1e-10;
  int max_iter = 400;
  int max_n = 6;
  std::vector<int> only;

  auto common = [&](CLI::App* cmd, bool group = true, bool seeded = false) {
    add_out_option(cmd, opts);
    if (group) add_group_options(cmd, opts);
    if (seeded) {
      cmd->add_option("--seed", opts.seed, "RNG seed");
      cmd->add_option("--workers", opts.workers, "Worker threads")
          ->check(CLI::PositiveNumber);
    }
    return cmd;
  };

  auto* simulate = common(app.add_subcommand(
      "simulate", "Speed and u-statistic tables along a doubling ladder"),
      true, true);
  simulate->add_option("--r", r, "b-weight over a-weight");
  simulate->add_option("--n", n, "Largest walk length");
  simulate->add_option("--trials", trials, "Trials per length");
  simulate->add_option("--mode", mode, "nu mode: exact or upper")
      ->check(CLI::IsMember({"exact", "upper"}));

  auto* nu_cmd = common(app.add_subcommand("nu", "nu norm of one word"));
  nu_cmd->add_option("--word", word_text, "Word, e.g. \"a b a^-1 b^-1\"")
      ->required();
  nu_cmd->add_option("--mode", mode, "exact or upper")
      ->check(CLI::IsMember({"exact", "upper"}));

  auto* ball_cmd =
      common(app.add_subcommand("ball", "Cayley ball growth table"));
  ball_cmd->add_option("--radius", radius, "Ball radius");

  auto* exact = common(
      app.add_subcommand("exact-dist", "Exact n-step distribution"));
  exact->add_option("--n", n, "Number of steps")->required();
  exact->add_option("--r", r, "b-weight over a-weight");
  exact->add_option("--cap", cap, "Largest n accepted");

  auto* heat = common(
      app.add_subcommand("heat-kernel", "Exact return probabilities and fit"));
  heat->add_option("--n-cap", n_cap, "Largest half-step count");
  heat->add_option("--r", r, "b-weight over a-weight");

  auto* tail_cmd = common(
      app.add_subcommand("escape-tail", "Tail of max nu against a n^{5/6}"),
      true, true);
  tail_cmd->add_option("--n", n, "Walk length");
  tail_cmd->add_option("--a", a_list,
                       "Threshold grid (default 0.125 .. 8, doubling)");
  tail_cmd->add_option("--trials", trials, "Trials");
  tail_cmd->add_option("--r", r, "b-weight over a-weight");

  auto* schreier_cmd =
      common(app.add_subcommand("schreier", "Level-n Schreier graph"));
  schreier_cmd->add_option("--level", level, "Tree level");

  auto* cycles_cmd = common(
      app.add_subcommand("cycles", "Irreducible cycle labels at a base"));
  cycles_cmd->add_option("--base", base, "Level-1 base vertex");
  cycles_cmd->add_option("--cap", cycle_cap, "Cycle length cap");

  auto* refine_cmd = common(
      app.add_subcommand("refine", "One mu -> mu' refinement step"), true,
      true);
  refine_cmd->add_option("--r", r, "b-weight over a-weight (2 generators)");
  refine_cmd->add_option("--mu", mu_in, "Explicit generator weights");
  refine_cmd->add_option("--backend", backend, "exact or monte-carlo")
      ->check(CLI::IsMember({"exact", "monte-carlo"}));
  refine_cmd->add_option("--trials", mc_trials, "Monte Carlo trials");

  auto* fp_cmd = common(
      app.add_subcommand("fixed-point", "Self-similar generator law"));
  fp_cmd->add_option("--mu0", mu_in, "Starting weights (default uniform)");
  fp_cmd->add_option("--tol", tol, "L1 residual tolerance");
  fp_cmd->add_option("--max-iter", max_iter, "Iteration cap");

  auto* alpha_cmd = common(
      app.add_subcommand("alpha", "Rate-of-escape exponent log 2 / log E_tau"));
  alpha_cmd->add_option("--r", r, "b-weight over a-weight (2 generators)");
  alpha_cmd->add_option("--mu", mu_in, "Explicit generator weights");

  auto* relations_cmd = common(
      app.add_subcommand("relations", "Verify the presentation relators"),
      false);
  relations_cmd->add_option("--max-n", max_n, "Largest relator index");

  auto* report_cmd = common(
      app.add_subcommand("report", "Run the acceptance criteria"), false,
      true);
  report_cmd->add_option("--only", only, "Criterion ids (default all)");

  try {
    app.parse(argc, argv);
    if (simulate->parsed()) cmd_simulate(opts, r, n, trials, mode);
    else if (nu_cmd->parsed()) cmd_nu(opts, word_text, mode);
    else if (ball_cmd->parsed()) cmd_ball(opts, radius);
    else if (exact->parsed()) cmd_exact_dist(opts, n, r, cap);
    else if (heat->parsed()) cmd_heat_kernel(opts, n_cap, r);
    else if (tail_cmd->parsed()) cmd_escape_tail(opts, n, a_list, trials, r);
    else if (schreier_cmd->parsed()) cmd_schreier(opts, level);
    else if (cycles_cmd->parsed()) cmd_cycles(opts, base, cycle_cap);
    else if (refine_cmd->parsed()) cmd_refine(opts, r, mu_in, backend, mc_trials);
    else if (fp_cmd->parsed()) cmd_fixed_point(opts, mu_in, tol, max_iter);
    else if (alpha_cmd->parsed()) cmd_alpha(opts, r, mu_in);
    else if (relations_cmd->parsed()) cmd_relations(opts, max_n);
    else if (report_cmd->parsed()) return cmd_report(opts, only);
    return 0;
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
