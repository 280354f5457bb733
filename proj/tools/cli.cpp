#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "nbp/bernoulli_sources.hpp"
#include "nbp/errors.hpp"
#include "nbp/jsonl.hpp"
#include "nbp/nb_construct.hpp"
#include "nbp/validation.hpp"

namespace nbp::cli {

namespace {

const std::map<std::string, Mode> kModes = {{"bep", Mode::Bep},
                                            {"nbp-known", Mode::NbpKnown},
                                            {"nbp-ibp", Mode::NbpIbp},
                                            {"nbp-hier", Mode::NbpHier}};

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

bool known_base(Mode mode) { return mode == Mode::Bep || mode == Mode::NbpKnown; }

BaseMeasureSpec known_base_measure(const RunConfig& config) {
  return BaseMeasureSpec(config.atoms, config.gamma.value_or(0.0));
}

FactoryConfig factory_config(const RunConfig& config) {
  return FactoryConfig{*config.r, config.max_coins, config.max_proposals};
}

std::unique_ptr<BernoulliSequenceSource> make_source(const RunConfig& config, const Rng& root) {
  switch (config.mode) {
    case Mode::Bep:
    case Mode::NbpKnown:
      return std::make_unique<IidBernoulliSource>(known_base_measure(config), root.substream("source"));
    case Mode::NbpIbp:
      return make_hierarchy_source(*config.c, *config.gamma, 0, root.substream("source"));
    case Mode::NbpHier:
      return make_hierarchy_source(*config.c, *config.gamma, *config.depth, root.substream("source"));
  }
  throw std::logic_error("unhandled mode");
}

/// Drives one configured run, handing each row to `emit`.
struct RunTotals {
  std::uint64_t rows = 0;
  RowStats stats;
};

template <typename Emit>
RunTotals drive(const RunConfig& config, Emit&& emit) {
  const Rng root(config.seed);
  RunTotals totals;
  if (config.mode == Mode::Bep) {
    auto source = make_source(config, root);
    for (std::uint64_t n = 1; n <= config.rows; ++n) {
      emit(to_jsonl(n, source->next()));
      ++totals.rows;
    }
    return totals;
  }
  NegativeBinomialSequence seq(make_source(config, root), factory_config(config),
                               root.substream("factory"));
  for (std::uint64_t n = 1; n <= config.rows; ++n) {
    try {
      emit(to_jsonl(n, seq.next(&totals.stats)));
    } catch (const BudgetExceeded& e) {
      throw BudgetExceeded(std::string(e.what()) + " while building row " + std::to_string(n));
    }
    ++totals.rows;
  }
  return totals;
}

std::string config_echo(const RunConfig& config) {
  std::ostringstream os;
  os << "mode=" << mode_name(config.mode);
  if (config.r) os << " r=" << *config.r;
  if (config.c) os << " c=" << *config.c;
  if (config.gamma) os << " gamma=" << *config.gamma;
  if (config.depth) os << " depth=" << *config.depth;
  os << " rows=" << config.rows << " seed=" << config.seed;
  if (!config.atoms.empty()) {
    os << " atoms=";
    for (std::size_t i = 0; i < config.atoms.size(); ++i) {
      os << (i ? "," : "") << config.atoms[i].location.value << ":" << config.atoms[i].mass;
    }
  }
  return os.str();
}

std::uint64_t seed_from_env(std::uint64_t fallback) {
  const char* env = std::getenv("NBP_SEED");
  if (!env || !*env) return fallback;
  try {
    std::size_t used = 0;
    const auto value = std::stoull(env, &used);
    if (used != std::string(env).size()) throw std::invalid_argument("trailing characters");
    return value;
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string("NBP_SEED is not an unsigned integer: ") + env);
  }
}

}  // namespace

const char* mode_name(Mode mode) {
  for (const auto& [name, m] : kModes) {
    if (m == mode) return name.c_str();
  }
  return "?";
}

std::vector<FixedAtom> parse_atoms(const std::string& text) {
  std::vector<FixedAtom> atoms;
  if (text.empty()) return atoms;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    require(colon != std::string::npos, "--atoms entries must look like loc:mass, got '" + item + "'");
    try {
      std::size_t used_loc = 0;
      std::size_t used_mass = 0;
      const auto loc_text = item.substr(0, colon);
      const auto mass_text = item.substr(colon + 1);
      const double loc = std::stod(loc_text, &used_loc);
      const double mass = std::stod(mass_text, &used_mass);
      require(used_loc == loc_text.size() && used_mass == mass_text.size(), "trailing characters");
      atoms.push_back({Location{loc}, mass});
    } catch (const std::exception&) {
      throw std::invalid_argument("--atoms: cannot parse '" + item + "'");
    }
  }
  return atoms;
}

void validate_config(const RunConfig& config, bool require_rows) {
  require(!require_rows || config.rows >= 1, "--rows must be at least 1");
  if (config.mode != Mode::Bep) {
    require(config.r.has_value(), std::string("--r is required for mode ") + mode_name(config.mode));
    require(std::isfinite(*config.r) && *config.r > 0.0, "--r must be positive");
    require(config.max_coins > 0 && config.max_proposals > 0, "budgets must be positive");
  }
  if (known_base(config.mode)) {
    require(!config.depth.has_value(), "--depth only applies to nbp-hier");
    if (config.gamma) require(std::isfinite(*config.gamma) && *config.gamma >= 0.0, "--gamma must be >= 0");
    known_base_measure(config);  // throws on invalid atoms
    return;
  }
  require(config.atoms.empty(), "--atoms only applies to bep and nbp-known");
  require(config.c.has_value() && std::isfinite(*config.c) && *config.c > 0.0,
          std::string("--c > 0 is required for mode ") + mode_name(config.mode));
  require(config.gamma.has_value() && std::isfinite(*config.gamma) && *config.gamma > 0.0,
          std::string("--gamma > 0 is required for mode ") + mode_name(config.mode));
  if (config.mode == Mode::NbpHier) {
    require(config.depth.has_value() && *config.depth >= 1, "--depth >= 1 is required for nbp-hier");
  } else {
    require(!config.depth.has_value(), "--depth only applies to nbp-hier");
  }
}

int cmd_sample(const RunConfig& config, std::ostream& err) {
  try {
    validate_config(config);
    require(!config.out.empty(), "--out is required");
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  std::ofstream file(config.out, std::ios::binary | std::ios::trunc);
  if (!file) {
    err << "error: cannot open " << config.out << " for writing\n";
    return kExitFailure;
  }
  try {
    drive(config, [&](const std::string& line) { file << line << '\n'; });
  } catch (const BudgetExceeded& e) {
    err << "budget exceeded: " << e.what() << "\n";
    return kExitBudget;
  }
  file.close();
  if (!file) {
    err << "error: failed writing " << config.out << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

int cmd_validate(const std::string& suite, std::uint64_t seed, std::uint64_t samples,
                 const std::string& report_path, std::ostream& out, std::ostream& err) {
  const SuiteOptions options{seed, samples};
  std::vector<TestRecord> records;
  try {
    records = run_suite(suite, options);
  } catch (const UnknownSuite& e) {
    err << "error: " << e.what() << "; known suites: all";
    for (const auto& name : suite_names()) err << ", " << name;
    err << "\n";
    return kExitUsage;
  } catch (const BudgetExceeded& e) {
    err << "budget exceeded: " << e.what() << "\n";
    return kExitBudget;
  }
  const auto report = report_json(suite, options, records);
  if (report_path.empty()) {
    out << report << "\n";
  } else {
    std::ofstream file(report_path, std::ios::trunc);
    if (!file) {
      err << "error: cannot open " << report_path << " for writing\n";
      return kExitFailure;
    }
    file << report << "\n";
  }
  bool all_passed = true;
  for (const auto& rec : records) {
    if (rec.skipped) err << "warning: " << rec.name << " " << rec.detail << "\n";
    all_passed = all_passed && rec.passed;
  }
  return all_passed ? kExitOk : kExitFailure;
}

int cmd_bench(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    validate_config(config, /*require_rows=*/false);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  out << "# config: " << config_echo(config) << "\n";
  out << "mode\trows\tseconds\trows_per_sec\tcoins_per_row\tproposals_per_row\n";
  if (config.rows == 0) return kExitOk;
  const auto start = std::chrono::steady_clock::now();
  RunTotals totals;
  try {
    totals = drive(config, [](const std::string&) {});
  } catch (const BudgetExceeded& e) {
    err << "budget exceeded: " << e.what() << "\n";
    return kExitBudget;
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const double rows = static_cast<double>(totals.rows);
  char line[256];
  std::snprintf(line, sizeof line, "%s\t%llu\t%.6f\t%.1f\t%.3f\t%.3f\n", mode_name(config.mode),
                static_cast<unsigned long long>(totals.rows), seconds,
                seconds > 0.0 ? rows / seconds : 0.0,
                static_cast<double>(totals.stats.coins) / rows,
                static_cast<double>(totals.stats.proposals) / rows);
  out << line;
  return kExitOk;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Negative binomial processes from exchangeable Bernoulli processes"};
  app.require_subcommand(1);

  RunConfig config;
  std::string mode_text;
  std::string atoms_text;
  std::uint64_t seed = kDefaultSeed;
  double r = 0.0;
  double c = 0.0;
  double gamma = 0.0;
  unsigned depth = 0;

  std::vector<CLI::Option*> seed_options;
  std::map<std::string, CLI::Option*> run_options;
  auto add_run_flags = [&](CLI::App* sub, bool with_out) {
    sub->add_option("--mode", mode_text, "bep | nbp-known | nbp-ibp | nbp-hier")
        ->required()
        ->check(CLI::IsMember({"bep", "nbp-known", "nbp-ibp", "nbp-hier"}));
    run_options[sub->get_name() + "r"] = sub->add_option("--r", r, "negative binomial parameter r > 0");
    run_options[sub->get_name() + "c"] = sub->add_option("--c", c, "concentration c > 0");
    run_options[sub->get_name() + "gamma"] = sub->add_option("--gamma", gamma, "diffuse mass");
    run_options[sub->get_name() + "depth"] = sub->add_option("--depth", depth, "hierarchy levels (nbp-hier)");
    sub->add_option("--rows", config.rows, "number of rows");
    sub->add_option("--atoms", atoms_text, "fixed atoms loc:mass,...");
    sub->add_option("--max-coins", config.max_coins, "coin budget per atom");
    sub->add_option("--max-proposals", config.max_proposals, "factory proposal budget");
    seed_options.push_back(sub->add_option("--seed", seed, "seed (falls back to $NBP_SEED)"));
    if (with_out) sub->add_option("--out", config.out, "output JSONL path");
  };

  auto* sample = app.add_subcommand("sample", "write rows as JSONL");
  add_run_flags(sample, true);
  auto* bench = app.add_subcommand("bench", "time a run and report coin usage");
  add_run_flags(bench, false);

  auto* validate = app.add_subcommand("validate", "run statistical validation suites");
  std::string suite = "all";
  std::uint64_t samples = SuiteOptions{}.samples;
  std::string report_path;
  validate->add_option("--suite", suite, "suite name or 'all'");
  validate->add_option("--samples", samples, "base sample size");
  validate->add_option("--report", report_path, "write the JSON report here instead of stdout");
  seed_options.push_back(validate->add_option("--seed", seed, "seed (falls back to $NBP_SEED)"));

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    bool seed_given = false;
    for (auto* opt : seed_options) seed_given = seed_given || opt->count() > 0;
    if (!seed_given) seed = seed_from_env(kDefaultSeed);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  if (validate->parsed()) return cmd_validate(suite, seed, samples, report_path, out, err);

  auto* sub = sample->parsed() ? sample : bench;
  const auto& name = sub->get_name();
  config.mode = kModes.at(mode_text);
  config.seed = seed;
  if (run_options[name + "r"]->count()) config.r = r;
  if (run_options[name + "c"]->count()) config.c = c;
  if (run_options[name + "gamma"]->count()) config.gamma = gamma;
  if (run_options[name + "depth"]->count()) config.depth = depth;
  try {
    config.atoms = parse_atoms(atoms_text);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return sample->parsed() ? cmd_sample(config, err) : cmd_bench(config, out, err);
}

}  // namespace nbp::cli
