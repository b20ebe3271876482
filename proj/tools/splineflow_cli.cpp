// Command-line front end: flow generation, spline fitting, batched
// evaluation, benchmarking and the error-comparison harness.
//
// Exit codes: 0 success, 2 usage/validation, 3 file parse, 4 numeric/shape.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "splineflow/splineflow.hpp"

namespace sf = splineflow;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitParse = 3;
constexpr int kExitNumeric = 4;

struct CliState {
  sf::RunConfig cfg;
  std::string config_path;
  bool relaxed = false;
};

sf::Flow generate_from_config(const sf::RunConfig& cfg) {
  cfg.validate();
  if (cfg.strict && (cfg.S - 1) % 3 != 0)
    throw sf::ShapeError("S = " + std::to_string(cfg.S) +
                         " does not satisfy (S-1) mod 3 = 0; pass --relaxed to truncate");
  return sf::generate_flow(cfg.make_field(), cfg.M, cfg.S, cfg.dt);
}

sf::FitOptions fit_options(const sf::RunConfig& cfg) {
  sf::FitOptions opts;
  opts.convention = cfg.make_convention();
  opts.blend = cfg.make_blend();
  opts.raw_u = cfg.raw_u;
  opts.grouping = cfg.make_grouping();
  return opts;
}

void cmd_gen(const CliState& st, const std::string& out_path) {
  const sf::Flow flow = generate_from_config(st.cfg);
  sf::io::save_flow(out_path, flow, st.cfg.format, st.cfg.to_kv());
}

void cmd_fit(const CliState& st, const std::string& in_path, const std::string& out_path) {
  st.cfg.make_blend().validate();
  const sf::Flow flow = sf::io::load_flow(in_path);
  std::size_t dropped = 0;
  const sf::CoeffSet coeffs = sf::fit_flow(flow, fit_options(st.cfg), &dropped);
  if (dropped > 0)
    std::cerr << "warning: truncated " << dropped << " trailing sample(s) per trajectory\n";
  sf::io::save_coeffs(out_path, coeffs, st.cfg.format, st.cfg.to_kv());
}

void cmd_eval(const CliState& st, const std::string& in_path, const std::string& out_path) {
  const sf::CoeffSet coeffs = sf::io::load_coeffs(in_path);
  const sf::Snapshot snap = sf::assemble_snapshot(coeffs, st.cfg.V);
  std::ofstream out(out_path);
  if (!out) throw std::invalid_argument("cannot open '" + out_path + "' for writing");
  sf::io::write_snapshot_csv(out, snap, st.cfg.to_kv());
}

void cmd_pipeline(const CliState& st, const std::string& in_path, const std::string& out_path,
                  const std::string& coeffs_path) {
  sf::Flow flow = in_path.empty() ? generate_from_config(st.cfg) : sf::io::load_flow(in_path);
  std::size_t dropped = 0;
  const sf::CoeffSet coeffs = sf::fit_flow(flow, fit_options(st.cfg), &dropped);
  if (dropped > 0)
    std::cerr << "warning: truncated " << dropped << " trailing sample(s) per trajectory\n";
  if (!coeffs_path.empty()) sf::io::save_coeffs(coeffs_path, coeffs, st.cfg.format, st.cfg.to_kv());
  const sf::Snapshot snap = sf::assemble_snapshot(coeffs, st.cfg.V);
  std::ofstream out(out_path);
  if (!out) throw std::invalid_argument("cannot open '" + out_path + "' for writing");
  sf::io::write_snapshot_csv(out, snap, st.cfg.to_kv());
}

void cmd_bench(const CliState& st, const std::vector<std::size_t>& m_list,
               const std::vector<unsigned>& p_list, std::size_t n,
               const std::vector<std::string>& stages, const std::string& out_path) {
  std::ofstream out(out_path);
  if (!out) throw std::invalid_argument("cannot open '" + out_path + "' for writing");
  const unsigned cores = std::thread::hardware_concurrency();
  unsigned max_p = 1;
  for (unsigned p : p_list) max_p = std::max(max_p, p);
  sf::io::write_bench_header(out);
  if (cores < max_p) {
    const std::string warning = "host has " + std::to_string(cores) +
                                " logical core(s) but p up to " + std::to_string(max_p) +
                                " was requested; speedup rows are not meaningful";
    std::cerr << "warning: " << warning << "\n";
    out << "#warning " << warning << "\n";
  }
  out << "#config " << st.cfg.to_kv() << "\n";
  for (std::size_t m : m_list) {
    sf::RunConfig run = st.cfg;
    run.M = m;
    run.S = 3 * n + 1;
    sf::Flow flow = sf::generate_flow(run.make_field(), run.M, run.S, run.dt);
    for (const std::string& stage_name : stages) {
      sf::Stage stage;
      if (stage_name == "fit") stage = sf::Stage::fit;
      else if (stage_name == "eval") stage = sf::Stage::eval;
      else if (stage_name == "pipeline") stage = sf::Stage::pipeline;
      else throw std::invalid_argument("unknown stage '" + stage_name + "'");
      std::vector<sf::SpeedupRow> rows;
      std::vector<std::uint64_t> counted;
      for (unsigned p : p_list) {
        sf::flops::reset();
        const sf::SpmdResult r =
            sf::run_spmd(flow, p, stage, fit_options(run), run.V, sf::PartitionMode::relaxed);
        counted.push_back(sf::flops::count());
        rows.push_back({p, r.timing.time_execution, r.timing.time_cpu, r.timing.time_overhead, 1.0});
      }
      double base = rows.front().time_execution;
      for (const auto& r : rows)
        if (r.p == 1) base = r.time_execution;
      const std::size_t big_n = (flow.sample_count() - 1) / 3;

      // theoretic wall time for perfect sharding: one product timed alone,
      // times the product count, divided by p
      double t_product = 0.0;
      if (stage == sf::Stage::fit) {
        const sf::FlowGroups groups = sf::group_flow(flow);
        const sf::BlockSparseG g_one = sf::assemble_g(m, sf::GStorage::constant_block);
        const sf::StackedInput b_one = sf::assemble_b(groups, 0, 1, run.make_convention(), 0);
        t_product = 1e300;
        for (int rep = 0; rep < 5; ++rep) {
          const auto t0 = std::chrono::steady_clock::now();
          sf::batched_coeffs(g_one, b_one);
          t_product = std::min(
              t_product,
              std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
        }
      }
      const std::size_t products = 3 * big_n * std::size_t(flow.dims);

      // total flops each stage actually executes (the eval stage includes
      // its untimed fit preparation)
      const std::uint64_t fit_flops = sf::flops_coeffs_sparse(m, big_n, flow.dims);
      const std::uint64_t eval_flops = sf::flops_values(m, big_n, run.V) * flow.dims;
      const std::uint64_t expected =
          stage == sf::Stage::fit ? fit_flops : fit_flops + eval_flops;

      for (std::size_t i = 0; i < rows.size(); ++i) {
        sf::SpeedupRow r = rows[i];
        r.speedup = r.p == 1 ? 1.0 : base / r.time_execution;
        sf::TimingBreakdown t;
        t.time_execution = r.time_execution;
        t.time_cpu = r.time_cpu;
        t.time_overhead = r.time_overhead;
        sf::io::write_bench_row(out, r.p, m, big_n, run.V, stage_name, t, r.speedup);
        out << "#flops p=" << r.p << " M=" << m << " stage=" << stage_name
            << " counted=" << counted[i] << " expected=" << expected << "\n";
        if (stage == sf::Stage::fit)
          out << "#theoretic p=" << r.p << " M=" << m
              << " fit_s=" << sf::detail::format_double(t_product * double(products) / r.p)
              << " measured_s=" << sf::detail::format_double(r.time_execution)
              << " (single product " << sf::detail::format_double(t_product) << " s x "
              << products << " products / p)\n";
      }
    }
  }
}

void cmd_cfl(double space_step, double time_step, double speed, const std::string& csv_path) {
  std::ostringstream csv;
  csv << "metric,value,units\n";
  if (space_step > 0.0) {
    const double dt = sf::cfl_max_timestep(space_step, speed);
    std::cout << "max time-step = " << sf::detail::format_double(dt) << " s  (space-step "
              << sf::detail::format_double(space_step) << " cm / speed "
              << sf::detail::format_double(speed) << " cm/s)\n";
    sf::io::write_metric(csv, "cfl_max_timestep", dt, "s");
  }
  if (time_step > 0.0) {
    const double dx = sf::cfl_min_spacestep(time_step, speed);
    std::cout << "min space-step = " << sf::detail::format_double(dx) << " cm  (time-step "
              << sf::detail::format_double(time_step) << " s * speed "
              << sf::detail::format_double(speed) << " cm/s)\n";
    sf::io::write_metric(csv, "cfl_min_spacestep", dx, "cm");
  }
  if (space_step <= 0.0 && time_step <= 0.0)
    throw std::invalid_argument("cfl needs --space-step or --time-step");
  if (!csv_path.empty()) {
    std::ofstream out(csv_path);
    if (!out) throw std::invalid_argument("cannot open '" + csv_path + "' for writing");
    out << csv.str();
  }
}

void cmd_equiv(double length, std::size_t n, std::size_t v, double speed,
               const std::string& csv_path) {
  const sf::EquivalenceReport r = sf::virtual_equivalence(length, n, v, speed);
  std::cout << "heuristic equivalence for L = " << sf::detail::format_double(length)
            << " cm, N = " << n << ", V = " << v
            << ", s = " << sf::detail::format_double(speed) << " cm/s\n"
            << "  time-step (splines) = " << sf::detail::format_double(r.dt_splines) << " s\n"
            << "  time-step (FD)      = " << sf::detail::format_double(r.dt_fd) << " s\n"
            << "  ratio               = " << sf::detail::format_double(r.ratio) << " (= V)\n";
  if (!csv_path.empty()) {
    std::ofstream out(csv_path);
    if (!out) throw std::invalid_argument("cannot open '" + csv_path + "' for writing");
    out << "metric,value,units\n";
    sf::io::write_metric(out, "dt_splines", r.dt_splines, "s");
    sf::io::write_metric(out, "dt_fd", r.dt_fd, "s");
    sf::io::write_metric(out, "ratio", r.ratio, "1");
  }
}

void cmd_compare(const CliState& st, std::size_t fine_div, const std::string& metrics_path,
                 const std::string& pairs_path) {
  const sf::RunConfig& cfg = st.cfg;
  const sf::Flow flow = generate_from_config(cfg);
  std::size_t dropped = 0;
  const sf::CoeffSet coeffs = sf::fit_flow(flow, fit_options(cfg), &dropped);
  const sf::Snapshot snap = sf::assemble_snapshot(coeffs, cfg.V);
  const sf::FlowField field = cfg.make_field();
  const double duration = static_cast<double>(flow.sample_count() - 1 - dropped) * cfg.dt;
  const double fine_dt = cfg.dt / static_cast<double>(fine_div);
  std::vector<sf::GroundTruth> truths;
  truths.reserve(flow.trajectory_count());
  for (std::size_t i = 0; i < flow.trajectory_count(); ++i)
    truths.push_back(sf::ground_truth(field, flow.trajectories[i][0], duration, fine_dt));
  const sf::ErrorMetrics m = sf::flow_error(snap, truths, flow);
  std::cout << "max deviation  = " << sf::detail::format_double(m.max_deviation) << " cm\n"
            << "rms deviation  = " << sf::detail::format_double(m.rms_deviation) << " cm\n"
            << "mean chord     = " << sf::detail::format_double(m.mean_chord) << " cm\n"
            << "rms/mean_chord = " << sf::detail::format_double(m.rms_deviation / m.mean_chord)
            << "\n";
  if (!metrics_path.empty()) {
    std::ofstream out(metrics_path);
    if (!out) throw std::invalid_argument("cannot open '" + metrics_path + "' for writing");
    out << "metric,value,units\n";
    sf::io::write_metric(out, "max_deviation", m.max_deviation, "cm");
    sf::io::write_metric(out, "rms_deviation", m.rms_deviation, "cm");
    sf::io::write_metric(out, "mean_chord", m.mean_chord, "cm");
    sf::io::write_metric(out, "rms_over_mean_chord", m.rms_deviation / m.mean_chord, "1");
  }
  if (!pairs_path.empty()) {
    std::ofstream out(pairs_path);
    if (!out) throw std::invalid_argument("cannot open '" + pairs_path + "' for writing");
    sf::io::write_pairs_csv(out, truths, snap);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Batched cubic-spline trajectory interpolation engine"};
  app.require_subcommand(1);
  app.fallthrough();

  CliState st;
  bool strict_flag = false;

  app.add_option("--config", st.config_path, "key=value config file applied before other flags");
  app.add_option("--seed", st.cfg.seed, "RNG seed for reproducible perturbations");
  app.add_flag("--strict", strict_flag, "require (S-1) mod 3 = 0 (default)");
  app.add_flag("--relaxed", st.relaxed, "truncate trailing samples instead of erroring");
  app.add_option("--convention", st.cfg.convention, "fifth-element convention")
      ->check(CLI::IsMember({"bezier-A", "paper-literal"}));
  app.add_option("--alpha", st.cfg.alpha, "blend weight of the control-polygon curve");
  app.add_option("--beta", st.cfg.beta, "blend weight of the fitted spline");
  app.add_option("--format", st.cfg.format, "output format")->check(CLI::IsMember({"csv", "bin"}));

  // gen -----------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "generate a synthetic flow file");
  std::string out_path, in_path, coeffs_path;
  gen->add_option("--field", st.cfg.field, "uniform | vortex | hill")
      ->check(CLI::IsMember({"uniform", "vortex", "hill"}));
  gen->add_option("--M", st.cfg.M, "number of trajectories");
  gen->add_option("--S", st.cfg.S, "samples per trajectory");
  gen->add_option("--dt", st.cfg.dt, "sample interval, seconds");
  gen->add_option("--speed", st.cfg.speed, "flow speed, cm/s");
  gen->add_option("--radius", st.cfg.radius, "vortex seed-ring radius, cm");
  gen->add_option("--hill-height", st.cfg.hill_height, "hill height, cm");
  gen->add_option("--hill-width", st.cfg.hill_width, "hill width, cm");
  gen->add_option("--jitter", st.cfg.jitter, "seed-point jitter amplitude, cm");
  gen->add_option("--out", out_path, "output flow file")->required();

  // fit -----------------------------------------------------------------
  auto* fit = app.add_subcommand("fit", "compute spline coefficients from a flow file");
  fit->add_option("--in", in_path, "input flow file")->required();
  fit->add_option("--out", out_path, "output coefficient file")->required();
  fit->add_flag("--raw-u", st.cfg.raw_u, "export the unblended spline u instead of v");

  // eval ----------------------------------------------------------------
  auto* eval = app.add_subcommand("eval", "evaluate coefficients at V+1 ticks per segment");
  eval->add_option("--in", in_path, "input coefficient file")->required();
  eval->add_option("--V", st.cfg.V, "subdivisions per segment");
  eval->add_option("--out", out_path, "output snapshot file")->required();

  // pipeline --------------------------------------------------------------
  auto* pipe = app.add_subcommand("pipeline", "gen (or read) + fit + eval in one run");
  pipe->add_option("--in", in_path, "input flow file (omit to generate)");
  pipe->add_option("--field", st.cfg.field, "uniform | vortex | hill")
      ->check(CLI::IsMember({"uniform", "vortex", "hill"}));
  pipe->add_option("--M", st.cfg.M, "number of trajectories");
  pipe->add_option("--S", st.cfg.S, "samples per trajectory");
  pipe->add_option("--dt", st.cfg.dt, "sample interval, seconds");
  pipe->add_option("--speed", st.cfg.speed, "flow speed, cm/s");
  pipe->add_option("--radius", st.cfg.radius, "vortex seed-ring radius, cm");
  pipe->add_option("--V", st.cfg.V, "subdivisions per segment");
  pipe->add_flag("--raw-u", st.cfg.raw_u, "export the unblended spline u instead of v");
  pipe->add_option("--coeffs-out", coeffs_path, "also write the coefficient file");
  pipe->add_option("--out", out_path, "output snapshot file")->required();

  // bench ---------------------------------------------------------------
  auto* bench = app.add_subcommand("bench", "timing and scaling report");
  std::vector<std::size_t> m_list{1024};
  std::vector<unsigned> p_list{1};
  std::size_t bench_n = 100;
  std::vector<std::string> stages{"fit", "eval", "pipeline"};
  bench->add_option("--M", m_list, "trajectory counts to bench");
  bench->add_option("--p", p_list, "worker counts to bench");
  bench->add_option("--N", bench_n, "groups per trajectory");
  bench->add_option("--V", st.cfg.V, "subdivisions per segment");
  bench->add_option("--stage", stages, "stages: fit eval pipeline");
  bench->add_option("--out", out_path, "output report CSV")->required();

  // cfl -------------------------------------------------------------------
  auto* cfl = app.add_subcommand("cfl", "stability-condition calculator");
  double space_step = 0.0, time_step = 0.0, speed = 0.0;
  std::string csv_path;
  cfl->add_option("--space-step", space_step, "grid spacing, cm");
  cfl->add_option("--time-step", time_step, "output cadence, s");
  cfl->add_option("--speed", speed, "flow speed, cm/s")->required();
  cfl->add_option("--csv", csv_path, "also write metric,value,units CSV");

  // equiv -----------------------------------------------------------------
  auto* equiv = app.add_subcommand("equiv", "virtual grid-refinement equivalence calculator");
  double equiv_l = 0.0;
  std::size_t equiv_n = 0;
  equiv->add_option("--L", equiv_l, "linear flow length, cm")->required();
  equiv->add_option("--N", equiv_n, "groups per trajectory")->required();
  equiv->add_option("--V", st.cfg.V, "subdivisions per segment");
  equiv->add_option("--s", speed, "scalar flow speed, cm/s")->required();
  equiv->add_option("--csv", csv_path, "also write metric,value,units CSV");

  // compare ---------------------------------------------------------------
  auto* compare = app.add_subcommand("compare", "reconstruction error against fine ground truth");
  std::size_t fine_div = 20;
  std::string metrics_path, pairs_path;
  compare->add_option("--field", st.cfg.field, "uniform | vortex | hill")
      ->check(CLI::IsMember({"uniform", "vortex", "hill"}));
  compare->add_option("--M", st.cfg.M, "number of trajectories");
  compare->add_option("--S", st.cfg.S, "samples per trajectory");
  compare->add_option("--dt", st.cfg.dt, "sample interval, seconds");
  compare->add_option("--speed", st.cfg.speed, "flow speed, cm/s");
  compare->add_option("--radius", st.cfg.radius, "vortex seed-ring radius, cm");
  compare->add_option("--V", st.cfg.V, "subdivisions per segment");
  compare->add_option("--fine-div", fine_div, "ground-truth steps per coarse interval");
  compare->add_option("--out-metrics", metrics_path, "metric,value,units CSV");
  compare->add_option("--out-pairs", pairs_path, "paired truth/spline polylines CSV");

  try {
    // --config must be applied before the remaining flags override it, so
    // pre-scan for it.
    for (int i = 1; i + 1 < argc; ++i)
      if (std::string(argv[i]) == "--config") st.cfg = sf::RunConfig::load(argv[i + 1]);

    app.parse(argc, argv);
    if (st.relaxed) st.cfg.strict = false;
    if (strict_flag) st.cfg.strict = true;

    if (gen->parsed()) cmd_gen(st, out_path);
    else if (fit->parsed()) cmd_fit(st, in_path, out_path);
    else if (eval->parsed()) cmd_eval(st, in_path, out_path);
    else if (pipe->parsed()) cmd_pipeline(st, in_path, out_path, coeffs_path);
    else if (bench->parsed()) cmd_bench(st, m_list, p_list, bench_n, stages, out_path);
    else if (cfl->parsed()) cmd_cfl(space_step, time_step, speed, csv_path);
    else if (equiv->parsed()) cmd_equiv(equiv_l, equiv_n, st.cfg.V, speed, csv_path);
    else if (compare->parsed()) cmd_compare(st, fine_div, metrics_path, pairs_path);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  } catch (const sf::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const sf::ShapeError& e) {
    std::cerr << "shape error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const sf::IncompleteInputError& e) {
    std::cerr << "incomplete input: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const sf::DivisibilityError& e) {
    std::cerr << "partition error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::out_of_range& e) {
    std::cerr << "range error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
}
