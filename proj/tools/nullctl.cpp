#include <nullctl/config.hpp>
#include <nullctl/cycles.hpp>
#include <nullctl/diffusion.hpp>
#include <nullctl/engine.hpp>
#include <nullctl/errors.hpp>
#include <nullctl/fluid.hpp>
#include <nullctl/harness.hpp>
#include <nullctl/model.hpp>
#include <nullctl/policies.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using namespace nullctl;

namespace {

struct PolicyFlags {
  std::string policy = "preemptive";
  std::string cycle = "auto";
  std::size_t i0 = 1;
  std::size_t j0 = 1;
  double kn_exponent = 0.25;
  bool strict_guard = false;
  std::optional<double> kappa, delta, gamma;

  void attach(CLI::App* app) {
    app->add_option("--policy", policy, "preemptive, nonpreemptive or work-conserving")
        ->check(CLI::IsMember({"preemptive", "nonpreemptive", "work-conserving"}));
    app->add_option("--cycle-choice", cycle, "'auto' or the nonbasic activity 'i,j' of the cycle to use");
    app->add_option("--i0", i0, "class that absorbs the queue (1-based)")->check(CLI::PositiveNumber);
    app->add_option("--j0", j0, "station that absorbs idleness (1-based)")->check(CLI::PositiveNumber);
    app->add_option("--kn-exponent", kn_exponent, "K_n = ceil(n^p), 0 < p < 1/2");
    app->add_flag("--strict-guard", strict_guard, "fall back whenever |X^| exceeds a0 sqrt(n)");
    app->add_option("--kappa", kappa, "expert: override kappa");
    app->add_option("--delta", delta, "expert: override delta");
    app->add_option("--gamma", gamma, "expert: override gamma");
  }

  PolicyChoice resolve(const NetworkSpec& spec, const FluidSolution& fluid) const {
    PolicyChoice c;
    c.kind = parse_policy_kind(policy);
    c.preemptive.i0 = i0 - 1;
    c.preemptive.j0 = j0 - 1;
    c.preemptive.kn_exponent = kn_exponent;
    c.preemptive.strict_guard = strict_guard;
    if (cycle != "auto") {
      std::size_t ci = 0, cj = 0;
      char comma = 0;
      std::istringstream in(cycle);
      if (!(in >> ci >> comma >> cj) || comma != ',') throw DomainError("--cycle-choice expects 'auto' or 'i,j'");
      const auto cycles = enumerate_simple_cycles(ActivityGraph(spec, fluid), spec.mu);
      bool found = false;
      for (std::size_t k = 0; k < cycles.size(); ++k) {
        if (cycles[k].nonbasic == Edge{ci - 1, cj - 1}) {
          c.preemptive.cycle = k;
          found = true;
        }
      }
      if (!found) throw DomainError("no simple cycle through nonbasic activity (" + cycle + ")");
    }
    c.nonpreemptive = {kappa, delta, gamma};
    return c;
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw SpecError("cannot read " + p.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::int64_t> parse_int_list(const std::string& text) {
  std::vector<std::int64_t> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(std::stoll(item));
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(std::stod(item));
  return out;
}

std::string fmt(const Rational& r, bool as_float) {
  if (!as_float) return to_string(r);
  std::ostringstream s;
  s << std::setprecision(12) << to_double(r);
  return s.str();
}

std::string edge_label(const Edge& e) { return "(" + std::to_string(e.cls + 1) + "," + std::to_string(e.station + 1) + ")"; }

// ---- analyze ----

int run_analyze(const fs::path& config, bool as_float, bool as_json) {
  const NetworkSpec spec = load_spec(config);
  const auto problems = validate_spec(spec);
  if (!problems.empty()) {
    for (const auto& p : problems) std::cerr << "invalid spec: " << p << '\n';
    return 2;
  }
  const FluidSolution fluid = solve_static_lp(spec);
  const HeavyTrafficReport ht = check_heavy_traffic(fluid);
  const std::size_t I = spec.class_count, J = spec.station_count;

  nlohmann::json doc;
  auto mat = [&](const Matrix<Rational>& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(fmt(m(i, j), as_float));
      rows.push_back(row);
    }
    return rows;
  };
  auto vec = [&](const std::vector<Rational>& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& x : v) arr.push_back(fmt(x, as_float));
    return arr;
  };
  auto edges = [&](const std::vector<Edge>& es) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : es) arr.push_back({e.cls + 1, e.station + 1});
    return arr;
  };
  doc["xi_star"] = mat(fluid.xi_star);
  doc["rho_star"] = fmt(fluid.rho_star, as_float);
  doc["psi_star"] = mat(fluid.psi_star);
  doc["x_star"] = vec(fluid.x_star);
  doc["basic"] = edges(fluid.basic_edges);
  doc["nonbasic"] = edges(fluid.nonbasic_edges);
  doc["heavy_traffic"] = ht.holds;
  if (!ht.holds) doc["heavy_traffic_reason"] = ht.reason;
  doc["resource_pooling"] = fluid.resource_pooling;

  std::ostringstream text;
  text << "network: " << I << " classes, " << J << " stations\n";
  text << "rho* = " << fmt(fluid.rho_star, as_float) << '\n';
  auto print_matrix = [&](const char* name, const Matrix<Rational>& m) {
    text << name << ":\n";
    for (std::size_t i = 0; i < m.rows(); ++i) {
      text << "  class " << i + 1 << ":";
      for (std::size_t j = 0; j < m.cols(); ++j) text << ' ' << std::setw(8) << fmt(m(i, j), as_float);
      text << '\n';
    }
  };
  print_matrix("xi*", fluid.xi_star);
  print_matrix("psi*", fluid.psi_star);
  text << "x* =";
  for (const auto& v : fluid.x_star) text << ' ' << fmt(v, as_float);
  text << "\nbasic activities:";
  for (const auto& e : fluid.basic_edges) text << ' ' << edge_label(e);
  text << "\nnonbasic activities:";
  for (const auto& e : fluid.nonbasic_edges) text << ' ' << edge_label(e);
  text << "\nheavy traffic: " << (ht.holds ? "yes" : "no (" + ht.reason + ")") << '\n';
  text << "complete resource pooling: " << (fluid.resource_pooling ? "yes" : "no") << '\n';

  int status = 0;
  if (ht.holds && fluid.resource_pooling) {
    const ActivityGraph graph(spec, fluid);
    const auto cycles = enumerate_simple_cycles(graph, spec.mu);
    const auto chosen = check_null_controllability(cycles);
    const AssignmentMap G(graph);
    nlohmann::json cyc = nlohmann::json::array();
    text << "simple cycles:\n";
    for (const auto& c : cycles) {
      text << "  through " << edge_label(c.nonbasic) << ": ";
      for (std::size_t k = 0; k < c.vertices.size(); ++k) {
        const auto v = c.vertices[k];
        text << (v < I ? "class " + std::to_string(v + 1) : "station " + std::to_string(v - I + 1)) << " -> ";
      }
      text << "class " << c.nonbasic.cls + 1 << "\n    m = (";
      for (std::size_t i = 0; i < I; ++i) text << (i ? ", " : "") << fmt(c.direction[i], as_float);
      text << "), e.m = " << fmt(c.e_dot_m(), as_float) << '\n';
      nlohmann::json signs = nlohmann::json::array();
      for (std::size_t k = 0; k < c.edges.size(); ++k) {
        signs.push_back({{"edge", {c.edges[k].cls + 1, c.edges[k].station + 1}}, {"s", c.signs[k]}});
      }
      cyc.push_back({{"nonbasic", {c.nonbasic.cls + 1, c.nonbasic.station + 1}},
                     {"m", vec(c.direction)},
                     {"e_dot_m", fmt(c.e_dot_m(), as_float)},
                     {"signs", signs}});
    }
    doc["cycles"] = cyc;
    doc["null_controllable"] = chosen.has_value();
    if (chosen) {
      const auto& c = cycles[*chosen];
      doc["chosen_cycle"] = {c.nonbasic.cls + 1, c.nonbasic.station + 1};
      text << "verdict: null-controllable via cycle through " << edge_label(c.nonbasic)
           << " (e.m = " << fmt(c.e_dot_m(), as_float) << " < 0)\n";
    } else {
      text << "verdict: not null-controllable (e.m >= 0 for every simple cycle)\n";
      status = 4;
    }
    const Rational ch = G.lipschitz_constant(spec.mu);
    doc["c_h"] = fmt(ch, as_float);
    text << "C'_H = " << fmt(ch, as_float) << '\n';
    if (chosen && I == 2 && J == 2) {
      const NonpreemptiveConstants k = derive_constants(spec, fluid);
      doc["nonpreemptive"] = {{"kappa", fmt(k.kappa, as_float)}, {"delta", k.delta}, {"gamma", k.gamma},
                              {"c_m", fmt(k.c_m, as_float)}, {"m_norm", fmt(k.m_norm, as_float)}};
      text << "nonpreemptive constants: C_m = " << fmt(k.c_m, as_float) << ", |m| = " << fmt(k.m_norm, as_float)
           << ", kappa = " << fmt(k.kappa, as_float) << ", delta = " << k.delta << ", gamma = " << k.gamma << '\n';
    }
  } else {
    text << "verdict: structural conditions fail; cycles not analysed\n";
    status = 4;
  }
  if (as_json) std::cout << doc.dump(2) << '\n';
  else std::cout << text.str();
  return status;
}

// ---- simulate ----

struct SimulateArgs {
  fs::path config;
  std::int64_t n = 100;
  double horizon = 5.0;
  double epsilon = 0.5;
  std::uint64_t seed = 1;
  std::uint64_t replication = 0;
  std::string trace;
  std::size_t stride = 1;
  bool no_representation = false;
  PolicyFlags policy;
};

int run_simulate(const SimulateArgs& a) {
  const NetworkSpec spec = load_spec(a.config);
  require_valid(spec);
  const FluidSolution fluid = solve_static_lp(spec);
  const PolicyChoice choice = a.policy.resolve(spec, fluid);
  const PolicyFactory factory(spec, fluid, choice);
  const ScaledInstance inst = scale_instance(spec, fluid, a.n);
  auto policy = factory.make(inst);
  Simulator sim(spec, inst, *policy, RngStreams(a.seed, a.replication, spec.class_count, spec.station_count));

  Trace trace;
  trace.master_seed = a.seed;
  trace.replication = a.replication;
  trace.stride = a.stride == 0 ? 1 : a.stride;
  Observer record = a.trace.empty() ? Observer{} : trace.recorder();
  std::optional<RepresentationChecker> checker;
  if (!a.no_representation && fluid.resource_pooling) checker.emplace(spec, fluid, inst);

  std::int64_t max_queue = 0;
  bool window_empty = true, entered = false, zero_at_eps = true;
  sim.run(a.horizon, [&](const Event& ev, const SystemState& s) {
    if (record) record(ev, s);
    if (checker) checker->observe(s);
    std::int64_t q = 0;
    for (auto y : s.Y) q += y;
    max_queue = std::max(max_queue, q);
    if (ev.time <= a.epsilon) {
      zero_at_eps = q == 0;
    } else {
      if (!entered) window_empty = window_empty && zero_at_eps;
      entered = true;
      window_empty = window_empty && q == 0;
    }
  });

  if (!a.trace.empty()) {
    std::ofstream out(a.trace);
    if (!out) throw Error("cannot write " + a.trace);
    trace.write_csv(out);
  }
  const SystemState& s = sim.state();
  std::cout << "policy: " << a.policy.policy << ", n = " << a.n << ", T = " << a.horizon << ", seed = " << a.seed
            << '\n';
  std::cout << "servers:";
  for (auto v : inst.servers) std::cout << ' ' << v;
  std::cout << "\ninitial headcount:";
  for (auto v : inst.initial) std::cout << ' ' << v;
  std::cout << "\nevents: " << sim.event_count() << '\n';
  std::cout << "final X:";
  for (auto v : s.X) std::cout << ' ' << v;
  std::cout << "  Y:";
  for (auto v : s.Y) std::cout << ' ' << v;
  std::cout << "  Z:";
  for (auto v : s.Z) std::cout << ' ' << v;
  std::cout << "\nmax total queue: " << max_queue << '\n';
  std::cout << "queues empty on [" << a.epsilon << ", " << a.horizon << "]: " << (window_empty ? "yes" : "no") << '\n';
  const PolicyCounters c = policy->counters();
  std::cout << "fallback events: " << c.fallback << ", full-station events: " << c.full_station << '\n';
  if (checker) {
    std::cout << "representation residual: " << checker->max_residual() << " (worst at t = " << checker->worst_time()
              << "), constraint violations: " << checker->constraint_violations() << '\n';
    if (checker->constraint_violations() != 0) return 3;
  }
  return 0;
}

// ---- sweep ----

struct SweepArgs {
  fs::path config;
  std::string ns = "50,200,800";
  double epsilon = 0.5;
  double horizon = 5.0;
  std::size_t reps = 200;
  std::uint64_t seed = 1;
  std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
  std::string out;
  bool representation = false;
  PolicyFlags policy;
};

int run_sweep(const SweepArgs& a) {
  Scenario s;
  s.spec = load_spec(a.config);
  require_valid(s.spec);
  const FluidSolution fluid = solve_static_lp(s.spec);
  s.policy = a.policy.resolve(s.spec, fluid);
  s.ns = parse_int_list(a.ns);
  s.epsilon = a.epsilon;
  s.horizon = a.horizon;
  s.replications = a.reps;
  s.master_seed = a.seed;
  s.threads = a.threads;
  s.check_representation = a.representation;

  LevelCallback per_level;
  if (!a.out.empty()) {
    fs::create_directories(a.out);
    per_level = [&](std::int64_t n, const std::vector<ReplicationOutcome>& outcomes) {
      std::ofstream csv(fs::path(a.out) / ("replications_n" + std::to_string(n) + "_" + a.policy.policy + ".csv"));
      csv << "replication,null_window,null_from_zero,max_queue,max_scaled_norm,fallback_events,full_station_events,"
             "events\n";
      for (std::size_t k = 0; k < outcomes.size(); ++k) {
        const auto& o = outcomes[k];
        csv << k << ',' << o.null_window << ',' << o.null_from_zero << ',' << o.max_queue << ',' << o.max_scaled_norm
            << ',' << o.counters.fallback << ',' << o.counters.full_station << ',' << o.events << '\n';
      }
    };
  }
  const SummaryStats stats = estimate_null_probability(s, per_level);
  write_summary_text(std::cout, stats);
  if (!a.out.empty()) {
    std::ofstream csv(fs::path(a.out) / "summary.csv");
    write_summary_csv(csv, stats);
    std::ostringstream cmd;
    cmd << "sweep --policy " << a.policy.policy << " --n " << a.ns << " --epsilon " << a.epsilon << " --horizon "
        << a.horizon << " --reps " << a.reps;
    write_manifest(fs::path(a.out) / "manifest.json", dump_spec(s.spec), cmd.str(), a.seed);
  }
  for (const auto& l : stats.levels) {
    if (l.constraint_violations != 0) return 3;
  }
  return 0;
}

// ---- overload ----

struct OverloadArgs {
  fs::path config;
  double factor = 1.1;
  std::int64_t n = 400;
  std::string times = "5,10,20";
  std::size_t reps = 100;
  std::uint64_t seed = 1;
  std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
  std::string out;
  PolicyFlags policy;
};

int run_overload(const OverloadArgs& a) {
  OverloadScenario s;
  s.spec = load_spec(a.config);
  require_valid(s.spec);
  const FluidSolution fluid = solve_static_lp(s.spec);
  s.policy = a.policy.resolve(s.spec, fluid);
  const Rational factor = parse_decimal(std::to_string(a.factor));
  for (const auto& l : s.spec.lambda) s.overloaded_lambda.push_back(l * factor);
  s.n = a.n;
  s.times = parse_double_list(a.times);
  s.replications = a.reps;
  s.master_seed = a.seed;
  s.threads = a.threads;
  const OverloadStats st = overloaded_sweep(s);

  std::cout << "overload factor " << a.factor << ", n = " << a.n << ", " << a.reps << " replications\n";
  std::cout << std::left << std::setw(8) << "t" << std::setw(14) << "P(e.Y > 0)" << std::setw(14) << "median e.Y/n"
            << "5% quantile\n";
  for (const auto& p : st.points) {
    std::cout << std::setw(8) << p.t << std::setw(14) << p.fraction_positive << std::setw(14) << p.median
              << p.lower_quantile << '\n';
  }
  std::cout << "lower envelope: e.Y(t)/n >= " << st.envelope_intercept << " + " << st.envelope_slope << " t\n";
  std::cout << "replications with rising e.Y/n: " << st.fraction_positive_slope << '\n';
  if (!a.out.empty()) {
    std::ofstream csv(a.out);
    csv << "replication";
    for (const auto& p : st.points) csv << ",eY_over_n_t" << p.t;
    csv << '\n';
    for (std::size_t k = 0; k < a.reps; ++k) {
      csv << k;
      for (const auto& p : st.points) csv << ',' << p.per_replication[k];
      csv << '\n';
    }
  }
  return 0;
}

// ---- diffusion ----

struct DiffusionArgs {
  fs::path config;
  double dt = 1e-3;
  double horizon = 10.0;
  double alpha = 0.0;
  std::size_t paths = 1;
  std::uint64_t seed = 1;
  std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
  std::string cycle = "auto";
  std::size_t j0 = 1;
  std::string out;
  bool convergence = false;
};

int run_diffusion(const DiffusionArgs& a) {
  const NetworkSpec spec = load_spec(a.config);
  require_valid(spec);
  const FluidSolution fluid = solve_static_lp(spec);
  PolicyFlags pf;
  pf.cycle = a.cycle;
  const PolicyChoice choice = pf.resolve(spec, fluid);
  const PreemptivePlan plan(spec, fluid, choice.preemptive);
  const DiffusionSpec ds = make_diffusion_spec(spec, fluid, plan.cycle(), a.j0 - 1, a.alpha);

  if (!a.out.empty()) {
    std::mt19937_64 rng(derive_seed(a.seed, 0, StreamKind::Diffusion, 0));
    const DiffusionPath path = simulate_reflected(ds, a.dt, a.horizon, rng);
    std::ofstream csv(a.out);
    csv << "time";
    for (std::size_t i = 0; i < ds.dimension(); ++i) csv << ",X" << i + 1;
    csv << ",eX,eta\n";
    csv << std::setprecision(12);
    for (std::size_t k = 0; k < path.time.size(); ++k) {
      double e = 0.0;
      csv << path.time[k];
      for (auto v : path.X[k]) {
        csv << ',' << v;
        e += v;
      }
      csv << ',' << e << ',' << path.eta[k] << '\n';
    }
  }
  const DiffusionBatchStats st = run_diffusion_batch(ds, a.dt, a.horizon, a.paths, a.seed, a.threads);
  std::cout << "reflection direction m = (";
  for (std::size_t i = 0; i < ds.dimension(); ++i) std::cout << (i ? ", " : "") << ds.direction[i];
  std::cout << "), alpha = " << a.alpha << ", dt = " << a.dt << ", T = " << a.horizon << ", paths = " << a.paths << '\n';
  std::cout << "max e.X + alpha: " << st.max_total << '\n';
  std::cout << "initial jump beta (mean): " << st.mean_beta << '\n';
  std::cout << "total push eta(T) - beta (mean): " << st.mean_push << '\n';
  std::cout << "eta decreases: " << st.monotonicity_violations
            << ", pushes from the interior: " << st.complementarity_violations << '\n';
  if (a.convergence) {
    const DiffusionBatchStats half = run_diffusion_batch(ds, a.dt / 2, a.horizon, a.paths, a.seed, a.threads);
    std::cout << "at dt/2: total push (mean) " << half.mean_push << ", relative change "
              << std::abs(half.mean_push - st.mean_push) / std::max(1e-12, std::abs(st.mean_push)) << '\n';
  }
  const bool ok = st.max_total <= 0.0 && st.monotonicity_violations == 0 && st.complementarity_violations == 0;
  return ok ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Null controllability of many-server queueing networks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", version_string());

  fs::path analyze_config;
  bool analyze_float = false, analyze_json = false;
  auto* analyze = app.add_subcommand("analyze", "fluid model, cycles and the null-controllability verdict");
  analyze->add_option("config", analyze_config, "network file (JSON)")->required()->check(CLI::ExistingFile);
  analyze->add_flag("--float", analyze_float, "print decimals instead of exact fractions");
  analyze->add_flag("--json", analyze_json, "machine-readable output");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "one trace with the representation check");
  simulate->add_option("config", sim.config, "network file (JSON)")->required()->check(CLI::ExistingFile);
  simulate->add_option("-n,--n", sim.n, "scale parameter")->check(CLI::PositiveNumber);
  simulate->add_option("-T,--horizon", sim.horizon, "time horizon");
  simulate->add_option("--epsilon", sim.epsilon, "start of the empty-queue window");
  simulate->add_option("--seed", sim.seed, "master seed");
  simulate->add_option("--replication", sim.replication, "replication index");
  simulate->add_option("--trace", sim.trace, "write the trace as CSV");
  simulate->add_option("--stride", sim.stride, "keep every k-th event in the trace")->check(CLI::PositiveNumber);
  simulate->add_flag("--no-representation", sim.no_representation, "skip the representation check");
  sim.policy.attach(simulate);

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "empty-queue probability over a ladder of n");
  sweep->add_option("config", sw.config, "network file (JSON)")->required()->check(CLI::ExistingFile);
  sweep->add_option("--n", sw.ns, "comma-separated increasing n values");
  sweep->add_option("--epsilon", sw.epsilon, "window start");
  sweep->add_option("-T,--horizon", sw.horizon, "window end");
  sweep->add_option("--reps", sw.reps, "replications per n")->check(CLI::PositiveNumber);
  sweep->add_option("--seed", sw.seed, "master seed");
  sweep->add_option("--threads", sw.threads, "worker threads")->check(CLI::PositiveNumber);
  sweep->add_option("--out", sw.out, "output directory for CSV files and the manifest");
  sweep->add_flag("--check-representation", sw.representation, "evaluate the representation identity in every run");
  sw.policy.attach(sweep);

  OverloadArgs ov;
  auto* overload = app.add_subcommand("overload", "queue growth under arrival rates above the nominal ones");
  overload->add_option("config", ov.config, "network file (JSON)")->required()->check(CLI::ExistingFile);
  overload->add_option("--factor", ov.factor, "multiply every arrival rate by this factor (> 1)");
  overload->add_option("-n,--n", ov.n, "scale parameter")->check(CLI::PositiveNumber);
  overload->add_option("--times", ov.times, "comma-separated sample times");
  overload->add_option("--reps", ov.reps, "replications")->check(CLI::PositiveNumber);
  overload->add_option("--seed", ov.seed, "master seed");
  overload->add_option("--threads", ov.threads, "worker threads")->check(CLI::PositiveNumber);
  overload->add_option("--out", ov.out, "per-replication CSV");
  ov.policy.attach(overload);

  DiffusionArgs df;
  auto* diffusion = app.add_subcommand("diffusion", "constrained diffusion paths");
  diffusion->add_option("config", df.config, "network file (JSON)")->required()->check(CLI::ExistingFile);
  diffusion->add_option("--dt", df.dt, "Euler step")->check(CLI::PositiveNumber);
  diffusion->add_option("-T,--horizon", df.horizon, "time horizon");
  diffusion->add_option("--alpha", df.alpha, "boundary level e.x = -alpha");
  diffusion->add_option("--paths", df.paths, "number of paths")->check(CLI::PositiveNumber);
  diffusion->add_option("--seed", df.seed, "master seed");
  diffusion->add_option("--threads", df.threads, "worker threads")->check(CLI::PositiveNumber);
  diffusion->add_option("--cycle-choice", df.cycle, "'auto' or the nonbasic activity 'i,j'");
  diffusion->add_option("--j0", df.j0, "idle-absorbing station (1-based)")->check(CLI::PositiveNumber);
  diffusion->add_option("--out", df.out, "CSV of the first path");
  diffusion->add_flag("--convergence", df.convergence, "repeat at dt/2 and compare");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*analyze) return run_analyze(analyze_config, analyze_float, analyze_json);
    if (*simulate) return run_simulate(sim);
    if (*sweep) return run_sweep(sw);
    if (*overload) return run_overload(ov);
    if (*diffusion) return run_diffusion(df);
  } catch (const InvariantViolation& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const NotNullControllableError& e) {
    std::cerr << "refused: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
