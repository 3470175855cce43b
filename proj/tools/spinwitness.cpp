// spinwitness: command-line front end for the experiment runners.
//
//   spinwitness <table1|table2|ratios|noise|bound|verify> [options]
//
// Exit codes: 0 all checks pass, 2 a value misses its target, 3 bad input.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>

#include "spinwitness/experiments.hpp"
#include "spinwitness/report_io.hpp"

namespace sw = spinwitness;

namespace {

constexpr int kExitMiss = 2;
constexpr int kExitInvalid = 3;

struct CommonFlags {
  int spin_two_j = 1;
  std::optional<std::size_t> sites;
  std::string ordering;
  std::string partition;
  int restarts = -1;
  std::optional<std::uint64_t> seed;
  double tol = 1e-9;
  unsigned threads = 1;
  std::string format = "json";
  std::string out;
  std::string state_path;
  std::string witness = "dot";
  bool stretch = false;
  bool timing = false;
  bool with_mk = false;
};

sw::QuantumState load_state(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open state file '" + path + "'");
  return sw::read_state(in);
}

sw::OptConfig make_config(const CommonFlags& f, int default_restarts) {
  sw::OptConfig cfg;
  cfg.restarts = f.restarts > 0 ? f.restarts : default_restarts;
  cfg.tolerance = f.tol;
  cfg.threads = f.threads;
  if (f.seed) {
    cfg.seed = *f.seed;
  } else if (const char* env = std::getenv("SPINWITNESS_SEED")) {
    try {
      cfg.seed = std::stoull(env);
    } catch (const std::exception&) {
      throw std::invalid_argument("SPINWITNESS_SEED is not an unsigned integer");
    }
  }
  if (!(cfg.tolerance > 0.0)) throw std::invalid_argument("--tol must be positive");
  return cfg;
}

sw::WitnessKind parse_kind(const std::string& s) {
  if (s == "dot") return sw::WitnessKind::dot;
  if (s == "cross") return sw::WitnessKind::cross;
  if (s == "mk") return sw::WitnessKind::mk;
  throw std::invalid_argument("--witness must be dot, cross or mk");
}

sw::RunReport run(const std::string& cmd, const CommonFlags& f) {
  const sw::SpinQuantum spin(f.spin_two_j);
  std::optional<sw::OrderingSpec> ordering;
  if (!f.ordering.empty()) ordering = sw::OrderingSpec::parse(f.ordering);

  if (cmd == "table1") {
    return sw::cmd_table1({spin, f.sites.value_or(6), f.stretch, sw::kDefaultDimensionCap});
  }
  if (cmd == "table2") {
    sw::Table2Options opt;
    opt.cfg = make_config(f, 256);
    if (!f.partition.empty()) opt.only = sw::PartitionSpec::parse(f.partition);
    opt.ordering = ordering;
    return sw::cmd_table2(opt);
  }
  if (cmd == "ratios") {
    return sw::cmd_ratios({spin, f.sites.value_or(6), sw::kDefaultDimensionCap});
  }
  if (cmd == "noise") {
    sw::NoiseOptions opt;
    opt.cfg = make_config(f, 64);
    if (!f.state_path.empty()) opt.state = load_state(f.state_path);
    opt.witness = parse_kind(f.witness);
    opt.ordering = ordering;
    return sw::cmd_noise(opt);
  }
  if (cmd == "bound") {
    sw::BoundOptions opt;
    opt.cfg = make_config(f, 64);
    opt.sites = f.sites.value_or(4);
    if (!f.state_path.empty()) opt.state = load_state(f.state_path);
    opt.ordering = ordering;
    opt.with_mk = f.with_mk;
    return sw::cmd_bound(opt);
  }
  // verify
  sw::VerifyOptions opt;
  opt.seed = make_config(f, 1).seed;
  return sw::cmd_verify(opt);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spin-geometry entanglement witnesses: maximal violations, partition bounds and noise thresholds"};
  app.set_config("--config", "", "key=value file; flags given on the command line win");
  app.require_subcommand(1);
  app.fallthrough();

  CommonFlags f;
  app.add_option("--spin", f.spin_two_j, "Twice the site spin (1 = qubit, 2 = qutrit)")->check(CLI::Range(1, 16));
  app.add_option("--sites", f.sites, "Number of sites (largest N for table1/ratios)");
  app.add_option("--ordering", f.ordering, "Nesting order as 1-based site labels, e.g. 2,1,3,4");
  app.add_option("--partition", f.partition, "Entanglement partition, e.g. \"12|34\"");
  app.add_option("--restarts", f.restarts, "Optimizer restarts")->check(CLI::PositiveNumber);
  app.add_option("--seed", f.seed, "RNG seed (fallback: SPINWITNESS_SEED)");
  app.add_option("--tol", f.tol, "Optimizer tolerance");
  app.add_option("--threads", f.threads, "Threads for optimizer restarts")->check(CLI::Range(1u, 256u));
  app.add_option("--format", f.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--out", f.out, "Write output here instead of stdout");
  app.add_option("--state", f.state_path, "State file (noise, bound)");
  app.add_option("--witness", f.witness, "dot, cross or mk (noise with --state)")
      ->check(CLI::IsMember({"dot", "cross", "mk"}));
  app.add_flag("--stretch", f.stretch, "table1: include the 11-qubit dot entry");
  app.add_flag("--timing", f.timing, "Record wall-clock runtime in the report");
  app.add_flag("--mk", f.with_mk, "bound: also optimize the MK operator");

  std::string command;
  const std::pair<const char*, const char*> commands[] = {
      {"table1", "Spectral maxima of the cross and dot witnesses per N"},
      {"table2", "Partition bounds for four qubits over all orderings"},
      {"ratios", "Growth ratios of consecutive maxima"},
      {"noise", "White-noise thresholds by bisection"},
      {"bound", "Bound-entangled state: witness values and PT cuts"},
      {"verify", "Randomized property checks of the operator algebra"},
  };
  for (const auto& [name, help] : commands)
    app.add_subcommand(name, help)->callback([&command, name] { command = name; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInvalid;
  }

  try {
    const auto start = std::chrono::steady_clock::now();
    sw::RunReport rep = run(command, f);
    rep.seed = make_config(f, 1).seed;  // deterministic commands still report the resolved seed
    if (f.timing)
      rep.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::ofstream file;
    if (!f.out.empty()) {
      file.open(f.out);
      if (!file) throw std::invalid_argument("cannot open output file '" + f.out + "'");
    }
    std::ostream& os = f.out.empty() ? std::cout : file;
    if (f.format == "csv")
      sw::write_csv(os, rep);
    else
      sw::write_json(os, rep);
    return rep.passed() ? 0 : kExitMiss;
  } catch (const std::invalid_argument& e) {
    std::cerr << "spinwitness: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::domain_error& e) {
    std::cerr << "spinwitness: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::length_error& e) {
    std::cerr << "spinwitness: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::out_of_range& e) {
    std::cerr << "spinwitness: " << e.what() << '\n';
    return kExitInvalid;
  }
}
