#include "crowdcharge/cli.hpp"

#include <CLI11.hpp>
#include <fmt/core.h>

#include <algorithm>
#include <fstream>
#include <memory>
#include <system_error>

#include "crowdcharge/engine.hpp"
#include "crowdcharge/social.hpp"

namespace crowdcharge {

namespace {

constexpr StrategyKind kDefaultMethods[] = {StrategyKind::MoSaBa, StrategyKind::MobiWeb,
                                            StrategyKind::GreedyOptimal,
                                            StrategyKind::FriendTransfer};

std::string join(const auto& items, auto&& fmt_item) {
  std::string out;
  for (const auto& item : items) {
    if (!out.empty()) out += ", ";
    out += fmt_item(item);
  }
  return out;
}

// "beta: must lie in [0, 1)" -> ConfigError("beta", ...)
ConfigError as_config_error(const std::invalid_argument& e) {
  const std::string what = e.what();
  const auto colon = what.find(':');
  if (colon == std::string::npos) return {"config", what};
  return {what.substr(0, colon), what.substr(colon + 2 <= what.size() ? colon + 2 : colon)};
}

std::string format_beta(double beta) { return fmt::format("{:g}", beta); }

std::filesystem::path sweep_path(const std::filesystem::path& base, double beta,
                                 std::size_t users) {
  std::filesystem::path p = base;
  const std::string ext = base.has_extension() ? base.extension().string() : ".csv";
  p.replace_filename(
      fmt::format("{}_b{}_m{}{}", base.stem().string(), format_beta(beta), users, ext));
  return p;
}

std::shared_ptr<const SocialGraph> load_graph(const std::filesystem::path& path,
                                              std::size_t users) {
  if (path.empty()) return nullptr;
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot read social graph {}", path.string()));
  try {
    return std::make_shared<const SocialGraph>(SocialGraph::load(in, users));
  } catch (const std::runtime_error& e) {
    throw ConfigError("social-graph", e.what());
  }
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot write {}", path.string()));
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError(fmt::format("failed while writing {}", path.string()));
}

struct Group {
  std::filesystem::path path;
  SimParams params;
  std::vector<StrategyKind> methods;
};

void print_summary(std::ostream& console, const Group& group,
                   std::span<const MetricsTrace> traces) {
  console << fmt::format("{} (beta={}, users={})\n", group.path.string(),
                         format_beta(group.params.loss), group.params.users);
  for (const auto& t : traces) {
    if (t.records.empty()) {
      console << fmt::format("  {:<11} no iterations\n", t.method);
      continue;
    }
    const IterationRecord& last = t.records.back();
    const auto reached = iteration_reaching(t, group.params.users, 0.7);
    console << fmt::format("  {:<11} final energy {:>10.3f}  variation {:.4f}  70% balanced at {}\n",
                           t.method, last.total_energy, last.variation_distance,
                           reached ? fmt::format("iteration {}", *reached) : "never");
  }
}

void run_group(const ExperimentSpec& spec, const Group& group, std::ostream& console) {
  RunConfig config;
  config.params = group.params;
  config.graph = load_graph(spec.social_graph, group.params.users);

  // Fail on an unwritable path before spending time on the runs.
  std::ofstream csv = open_output(group.path);

  std::vector<MetricsTrace> traces;
  for (StrategyKind kind : group.methods) {
    config.strategy = kind;
    traces.push_back(run_experiment(config, spec.reps, spec.threads));
  }
  write_csv(csv, traces);
  finish(csv, group.path);

  ExperimentSpec resolved = spec;
  resolved.params = group.params;
  resolved.methods = group.methods;
  resolved.betas = {group.params.loss};
  resolved.user_counts = {group.params.users};
  resolved.output = group.path;
  std::filesystem::path sidecar = group.path;
  sidecar += ".config.ini";
  std::ofstream side = open_output(sidecar);
  write_resolved_config(resolved, side);
  finish(side, sidecar);

  print_summary(console, group, traces);
}

void dump_mobility_trace(const ExperimentSpec& spec, const SimParams& params) {
  if (spec.mobility_trace.empty()) return;
  std::ofstream out = open_output(spec.mobility_trace);
  RunConfig config;
  config.params = params;
  config.strategy = spec.methods.front();
  config.graph = load_graph(spec.social_graph, params.users);
  RunObservers observers;
  observers.iteration = [&](std::size_t t, const World& world) {
    if (t != params.iterations) return;
    out << "user,location,arrival,stay\n";
    for (std::size_t u = 0; u < world.histories.size(); ++u) {
      for (const Visit& v : world.histories[u].visits()) {
        out << fmt::format("{},{},{:.6f},{:.6f}\n", u, index(v.location), v.arrival, v.stay);
      }
    }
  };
  run_simulation(config, observers);
  finish(out, spec.mobility_trace);
}

}  // namespace

ExperimentSpec parse_config(std::span<const std::string> args,
                            std::optional<std::string> seed_override) {
  ExperimentSpec spec;
  SimParams& p = spec.params;

  CLI::App app{"Peer-to-peer wireless crowd charging simulator", "crowdcharge"};
  app.set_config("--config", "", "Read options from a key = value file; flags take precedence");

  std::vector<std::string> methods;
  std::string output = spec.output.string();
  std::string social_graph;
  std::string trace;
  app.add_option("--method", methods,
                 "Strategies to run: mosaba, mosaba-sc, mosaba-mob, mobiweb, pgo, pft")
      ->delimiter(',');
  app.add_option("--users", spec.user_counts, "Number of users; several values sweep")
      ->delimiter(',');
  app.add_option("--locations", p.locations, "Number of locations");
  app.add_option("--beta", spec.betas, "Energy loss factor in [0, 1); several values sweep")
      ->delimiter(',');
  app.add_option("--alpha", p.charge_rate, "Charging rate, energy units per minute");
  app.add_option("--iterations", p.iterations, "Iterations per run");
  app.add_option("--iteration-minutes", p.iteration_minutes, "Length of one iteration");
  app.add_option("--reps", spec.reps, "Repetitions per method");
  app.add_option("--seed", p.seed, "Base seed; repetition r uses seed + r");
  app.add_option("--k", p.markov_order, "Markov predictor order");
  app.add_option("--wl", p.weights.location, "Location attachment weight");
  app.add_option("--ws", p.weights.social, "Social attachment weight");
  app.add_option("--we", p.weights.energy, "Energy weight");
  app.add_option("--social-p", p.social_p, "Edge probability of the random social graph");
  app.add_option("--social-graph", social_graph, "Edge list file (\"i j\" per line)");
  app.add_option("--t-min", p.min_contact_minutes, "Minimum contact duration, minutes");
  app.add_option("--epsilon", p.balance_tolerance, "Balance tolerance, energy units");
  app.add_option("--threads", spec.threads, "Worker threads for repetitions");
  app.add_option("--output", output, "CSV path (directory with --paper-suite)");
  app.add_option("--trace", trace, "Also dump one run's visits to this CSV");
  app.add_flag("--paper-suite", spec.paper_suite, "Run the full reproduction suite");

  std::vector<const char*> argv{"crowdcharge"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::ParseError& e) {
    throw ConfigError("arguments", e.what());
  }

  if (methods.empty()) {
    spec.methods.assign(std::begin(kDefaultMethods), std::end(kDefaultMethods));
  }
  for (const auto& tag : methods) {
    const auto kind = parse_strategy_tag(tag);
    if (!kind) throw ConfigError("method", fmt::format("unknown strategy \"{}\"", tag));
    spec.methods.push_back(*kind);
  }
  if (spec.betas.empty()) spec.betas = {p.loss};
  if (spec.user_counts.empty()) spec.user_counts = {p.users};
  for (double beta : spec.betas) {
    if (!(beta >= 0.0 && beta < 1.0)) {
      throw ConfigError("beta", fmt::format("{} outside [0, 1)", beta));
    }
  }
  if (spec.reps < 1) throw ConfigError("reps", "need at least one repetition");
  if (spec.threads < 1) spec.threads = 1;
  if (seed_override) {
    try {
      std::size_t used = 0;
      p.seed = std::stoull(*seed_override, &used);
      if (used != seed_override->size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw ConfigError("CROWDCHARGE_SEED", fmt::format("not an integer: \"{}\"", *seed_override));
    }
  }
  p.loss = spec.betas.front();
  p.users = spec.user_counts.front();
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw as_config_error(e);
  }
  spec.output = output;
  spec.social_graph = social_graph;
  spec.mobility_trace = trace;
  return spec;
}

void write_resolved_config(const ExperimentSpec& spec, std::ostream& out) {
  const SimParams& p = spec.params;
  out << "# resolved crowdcharge configuration\n";
  out << fmt::format("method = [{}]\n", join(spec.methods, [](StrategyKind k) {
                       return fmt::format("\"{}\"", strategy_tag(k));
                     }));
  out << fmt::format("users = [{}]\n",
                     join(spec.user_counts, [](std::size_t u) { return std::to_string(u); }));
  out << fmt::format("beta = [{}]\n", join(spec.betas, format_beta));
  out << fmt::format("locations = {}\n", p.locations);
  out << fmt::format("alpha = {:g}\n", p.charge_rate);
  out << fmt::format("iterations = {}\n", p.iterations);
  out << fmt::format("iteration-minutes = {:g}\n", p.iteration_minutes);
  out << fmt::format("reps = {}\n", spec.reps);
  out << fmt::format("seed = {}\n", p.seed);
  out << fmt::format("k = {}\n", p.markov_order);
  out << fmt::format("wl = {:g}\n", p.weights.location);
  out << fmt::format("ws = {:g}\n", p.weights.social);
  out << fmt::format("we = {:g}\n", p.weights.energy);
  out << fmt::format("social-p = {:g}\n", p.social_p);
  out << fmt::format("t-min = {:g}\n", p.min_contact_minutes);
  out << fmt::format("epsilon = {:g}\n", p.balance_tolerance);
  if (!spec.social_graph.empty()) {
    out << fmt::format("social-graph = \"{}\"\n", spec.social_graph.string());
  }
  out << fmt::format("output = \"{}\"\n", spec.output.string());
}

void write_csv(std::ostream& out, std::span<const MetricsTrace> traces) {
  out << kCsvHeader << '\n';
  for (const auto& t : traces) {
    for (const auto& r : t.records) {
      out << fmt::format("{},{},{},{:.6f},{:.6f},{:.6f},{:.6f},{:.3f}\n", t.method, t.rep_count,
                         r.iteration, r.total_energy, r.variation_distance, r.meetings,
                         r.balanced_count, r.exec_time_us);
    }
  }
}

std::optional<std::size_t> iteration_reaching(const MetricsTrace& trace, std::size_t users,
                                              double fraction) {
  for (const auto& r : trace.records) {
    if (r.balanced_count >= fraction * static_cast<double>(users)) return r.iteration;
  }
  return std::nullopt;
}

std::vector<std::filesystem::path> run_and_emit(const ExperimentSpec& spec,
                                                std::ostream& console) {
  if (spec.paper_suite) return paper_suite(spec, console);

  for (const auto& w : spec.params.warnings()) console << "warning: " << w << '\n';
  const bool sweep = spec.betas.size() * spec.user_counts.size() > 1;
  std::vector<std::filesystem::path> written;
  for (double beta : spec.betas) {
    for (std::size_t users : spec.user_counts) {
      Group group;
      group.params = spec.params;
      group.params.loss = beta;
      group.params.users = users;
      group.methods = spec.methods;
      group.path = sweep ? sweep_path(spec.output, beta, users) : spec.output;
      run_group(spec, group, console);
      written.push_back(group.path);
    }
  }
  SimParams first = spec.params;
  first.loss = spec.betas.front();
  first.users = spec.user_counts.front();
  dump_mobility_trace(spec, first);
  return written;
}

std::vector<std::filesystem::path> paper_suite(const ExperimentSpec& spec,
                                               std::ostream& console) {
  const std::filesystem::path dir = spec.output.has_extension()
                                        ? spec.output.parent_path() / spec.output.stem()
                                        : spec.output;
  std::vector<Group> groups;

  Group context;
  context.path = dir / "ablation_social_context.csv";
  context.params = spec.params;
  context.params.loss = 0.2;
  context.params.users = 100;
  context.params.weights = {0.5, 0.0, 0.5};
  context.methods = {StrategyKind::MoSaBaMobility, StrategyKind::MoSaBaSocialContext};
  groups.push_back(context);

  Group relations = context;
  relations.path = dir / "ablation_social_relations.csv";
  relations.params.weights = {0.33, 0.33, 0.33};
  relations.methods = {StrategyKind::MoSaBaSocialContext, StrategyKind::MoSaBa};
  groups.push_back(relations);

  const std::pair<double, std::size_t> grid[] = {
      {0.2, 100}, {0.2, 125}, {0.2, 150}, {0.3, 100}, {0.4, 100}};
  for (const auto& [beta, users] : grid) {
    Group g;
    g.params = spec.params;
    g.params.loss = beta;
    g.params.users = users;
    g.params.weights = {0.33, 0.33, 0.33};
    g.methods.assign(std::begin(kDefaultMethods), std::end(kDefaultMethods));
    g.path = dir / fmt::format("comparison_b{}_m{}.csv", format_beta(beta), users);
    groups.push_back(g);
  }

  std::vector<std::filesystem::path> written;
  for (const auto& g : groups) {
    run_group(spec, g, console);
    written.push_back(g.path);
  }
  return written;
}

int run_cli(std::span<const std::string> args, std::optional<std::string> seed_override,
            std::ostream& out, std::ostream& err) {
  ExperimentSpec spec;
  try {
    spec = parse_config(args, std::move(seed_override));
  } catch (const HelpRequested& help) {
    out << help.what();
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  try {
    run_and_emit(spec, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitOk;
}

}  // namespace crowdcharge
