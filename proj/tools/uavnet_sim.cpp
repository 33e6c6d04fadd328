#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "uavnet/config.hpp"
#include "uavnet/error.hpp"
#include "uavnet/experiment.hpp"
#include "uavnet/predictor.hpp"
#include "uavnet/simulation.hpp"

namespace fs = std::filesystem;
using namespace uavnet;
using nlohmann::json;

namespace {

struct Options {
  std::string config_path;
  std::uint64_t seed = 1;
  std::string out;
  std::string algorithm = "all";
  int iterations = 0;
  int parallel = 1;
  // sweep
  std::string axis = "uavs";
  std::string values;
  int seeds = 1;
  // verification campaigns
  long instances = 0;
  int max_users = 8;
};

void write_atomic(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
    f << content;
    if (!f) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

SimConfig effective_config(const Options& o) {
  SimConfig c = o.config_path.empty() ? SimConfig{} : load_config(o.config_path);
  if (o.iterations > 0) c.iterations = o.iterations;
  c.validate();
  return c;
}

fs::path output_dir(const Options& o, const std::string& command) {
  if (!o.out.empty()) return o.out;
  const char* env = std::getenv("UAVNET_OUT");
  const fs::path root = env && *env ? env : "runs";
  return root / fmt::format("{}-{}", command, o.seed);
}

std::vector<sim::Algorithm> algorithms(const Options& o) {
  if (o.algorithm == "all") {
    return {sim::Algorithm::lsm, sim::Algorithm::q_cache, sim::Algorithm::q_nocache};
  }
  return {sim::parse_algorithm(o.algorithm)};
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw InvalidArgument("bad sweep value " + item);
    out.push_back(v);
  }
  if (out.empty()) throw InvalidArgument("--values needs at least one value");
  return out;
}

std::string config_text(const SimConfig& c) {
  std::ostringstream s;
  write_config(s, c);
  return s.str();
}

void cmd_run(const Options& o) {
  const SimConfig c = effective_config(o);
  const fs::path dir = output_dir(o, "run");
  const auto scenario = sim::build_scenario(c, o.seed);
  std::ostringstream csv;
  json summary{{"seed", o.seed}, {"runs", json::array()}};
  std::map<std::string, double> converged;
  bool header = true;
  for (auto a : algorithms(o)) {
    const auto r = sim::run_episode(scenario, a);
    sim::write_iterations_csv(csv, r, header);
    header = false;
    summary["runs"].push_back(sim::episode_summary(r));
    converged[sim::algorithm_name(a)] = r.converged;
    std::ostringstream cdf;
    sim::write_rate_cdf_csv(cdf, sim::rate_cdf(r.delivered_rates));
    write_atomic(dir / fmt::format("rate_cdf_{}.csv", sim::algorithm_name(a)), cdf.str());
  }
  if (converged.count("lsm")) {
    for (const char* base : {"q_cache", "q_nocache"}) {
      if (converged.count(base) && converged[base] > 0.0) {
        summary["gain_vs_" + std::string(base)] =
            converged["lsm"] / converged[base] - 1.0;
      }
    }
  }
  write_atomic(dir / "config.ini", config_text(c));
  write_atomic(dir / "iterations.csv", csv.str());
  write_atomic(dir / "seed", fmt::format("{}\n", o.seed));
  write_atomic(dir / "summary.json", summary.dump(2) + "\n");
  std::cout << summary.dump() << "\n";
}

void cmd_sweep(const Options& o) {
  const SimConfig c = effective_config(o);
  const auto axis = sim::parse_axis(o.axis);
  const auto values = parse_values(o.values);
  if (o.seeds < 1) throw InvalidArgument("--seeds must be positive");
  std::vector<std::uint64_t> seeds;
  for (int s = 0; s < o.seeds; ++s) seeds.push_back(o.seed + s);
  const fs::path dir = output_dir(o, fmt::format("sweep-{}", o.axis));
  const auto report = sim::run_sweep(c, axis, values, algorithms(o), seeds, o.parallel);

  std::ostringstream table;
  report.write_csv(table);
  std::ostringstream cells;
  cells << fmt::format("{},algorithm,seed,converged,convergence_iteration\n", o.axis);
  for (const auto& cell : report.cells) {
    cells << fmt::format("{},{},{},{},{}\n", cell.value, sim::algorithm_name(cell.algorithm),
                         cell.seed, cell.converged, cell.convergence_iteration);
  }
  if (axis == sim::SweepAxis::fronthaul) {
    std::ostringstream links;
    links << "fronthaul,a,b,c,d\n";
    for (double v : values) {
      const auto sc = sim::build_scenario(sim::apply_axis(c, axis, v), o.seed, false);
      sim::LinkKindRates mean;
      int n = 0;
      for (int k = 0; k < sc.uav_count(); ++k) {
        for (int i = 0; i < sc.user_count(); ++i, ++n) {
          const auto r = sim::link_kind_rates(sc.rates, k, i, sc.user_count());
          mean.a += r.a;
          mean.b += r.b;
          mean.c += r.c;
          mean.d += r.d;
        }
      }
      links << fmt::format("{},{},{},{},{}\n", v, mean.a / n, mean.b / n, mean.c / n,
                           mean.d / n);
    }
    write_atomic(dir / "link_rates.csv", links.str());
  }
  if (axis == sim::SweepAxis::users) {
    std::vector<int> users;
    for (double v : values) {
      if (v <= 12) users.push_back(static_cast<int>(v));
    }
    if (!users.empty()) {
      std::ostringstream sc;
      sim::write_search_count_csv(
          sc, sim::search_count_report(users, o.instances > 0 ? o.instances : 200, o.seed));
      write_atomic(dir / "search_counts.csv", sc.str());
    }
  }
  write_atomic(dir / "config.ini", config_text(c));
  write_atomic(dir / "cells.csv", cells.str());
  write_atomic(dir / fmt::format("sweep_{}.csv", o.axis), table.str());
  std::cout << table.str();
}

void cmd_predict_bench(const Options& o) {
  const SimConfig c = effective_config(o);
  const fs::path dir = output_dir(o, "predict-bench");
  const auto bench = sim::bench_params(c);
  std::vector<predictor::BenchResult> results(o.seeds);
  sim::parallel_for(o.seeds, o.parallel, [&](int s) {
    results[s] = predictor::run_prediction_benchmark(bench, c.lsm_predictor(),
                                                     c.esn_predictor(), o.seed + s);
  });
  std::ostringstream csv;
  csv << "seed,lsm_mse,esn_mse,lsm_cells_within,esn_cells_within,lsm_topc_users,"
         "esn_topc_users\n";
  int lsm_wins = 0;
  for (int s = 0; s < o.seeds; ++s) {
    const auto& r = results[s];
    csv << fmt::format("{},{},{},{},{},{},{}\n", o.seed + s, r.lsm_mse, r.esn_mse,
                       r.lsm_cells_within, r.esn_cells_within, r.lsm_topc_users,
                       r.esn_topc_users);
    if (r.lsm_mse <= r.esn_mse) ++lsm_wins;
  }
  const json summary{{"seed", o.seed},
                     {"runs", o.seeds},
                     {"lsm_not_worse_fraction", double(lsm_wins) / o.seeds}};
  write_atomic(dir / "config.ini", config_text(c));
  write_atomic(dir / "bench.csv", csv.str());
  write_atomic(dir / "summary.json", summary.dump(2) + "\n");
  std::cout << summary.dump() << "\n";
}

void cmd_alloc_verify(const Options& o) {
  const fs::path dir = output_dir(o, "alloc-verify");
  const auto r = sim::alloc_verify(o.instances > 0 ? o.instances : 10000, o.max_users, o.seed);
  json summary{{"seed", o.seed}, {"instances", r.instances}, {"cases", json::array()}};
  const char* names[] = {"all_fit", "licensed_traversal", "unlicensed_traversal",
                         "both_unique"};
  for (int k = 0; k < 4; ++k) {
    summary["cases"].push_back({{"case", names[k]},
                                {"instances", r.per_case[k]},
                                {"mismatches", r.mismatches[k]}});
  }
  for (std::size_t i = 0; i < r.counterexamples.size(); ++i) {
    write_atomic(dir / "counterexamples" / fmt::format("{:05}.json", i),
                 r.counterexamples[i].dump(2) + "\n");
  }
  write_atomic(dir / "summary.json", summary.dump(2) + "\n");
  std::cout << summary.dump() << "\n";
}

void cmd_cache_verify(const Options& o) {
  const fs::path dir = output_dir(o, "cache-verify");
  const auto r = sim::cache_verify(o.instances > 0 ? o.instances : 1000, o.seed);
  for (std::size_t i = 0; i < r.counterexamples.size(); ++i) {
    write_atomic(dir / "counterexamples" / fmt::format("{:05}.json", i),
                 r.counterexamples[i].dump(2) + "\n");
  }
  const json summary{{"seed", o.seed}, {"instances", r.instances},
                     {"mismatches", r.mismatches}};
  write_atomic(dir / "summary.json", summary.dump(2) + "\n");
  std::cout << summary.dump() << "\n";
}

int fail(const std::string& kind, const std::string& message, int code) {
  std::cerr << json{{"error", message}, {"kind", kind}}.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cache-enabled LTE-U UAV network simulator"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config_path, "INI file with overrides")->check(CLI::ExistingFile);
  app.add_option("--seed", o.seed, "base seed");
  app.add_option("--out", o.out, "output directory (default $UAVNET_OUT/<command>-<seed>)");
  app.add_option("--algorithm", o.algorithm, "lsm, q_cache, q_nocache or all");
  app.add_option("--iterations", o.iterations, "override run.iterations");
  app.add_option("--parallel", o.parallel, "worker threads")->check(CLI::PositiveNumber);

  auto* run = app.add_subcommand("run", "one episode per algorithm on one seed");
  auto* sweep = app.add_subcommand("sweep", "parameter sweep over seeds");
  sweep->add_option("--axis", o.axis, "uavs, cache_size, theta, fronthaul or users");
  sweep->add_option("--values", o.values, "comma-separated axis values")->required();
  sweep->add_option("--seeds", o.seeds, "number of seeds starting at --seed");
  sweep->add_option("--instances", o.instances, "random instances per user count");
  auto* bench = app.add_subcommand("predict-bench", "LSM vs ESN request prediction");
  bench->add_option("--seeds", o.seeds, "number of seeds starting at --seed");
  auto* alloc = app.add_subcommand("alloc-verify", "search allocator against the exhaustive oracle");
  alloc->add_option("--instances", o.instances, "random instances");
  alloc->add_option("--max-users", o.max_users, "largest instance");
  auto* cache = app.add_subcommand("cache-verify", "cache planner against the exhaustive oracle");
  cache->add_option("--instances", o.instances, "random instances");
  for (auto* sub : {run, sweep, bench, alloc, cache}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), 2);
  }
  try {
    if (*run) cmd_run(o);
    if (*sweep) cmd_sweep(o);
    if (*bench) cmd_predict_bench(o);
    if (*alloc) cmd_alloc_verify(o);
    if (*cache) cmd_cache_verify(o);
  } catch (const InvalidArgument& e) {
    return fail("invalid_argument", e.what(), 2);
  } catch (const std::exception& e) {
    return fail("runtime", e.what(), 1);
  }
  return 0;
}
