// scsynth: command-line front end for synthesis, simulation, enumeration,
// benchmarks and SN-length sweeps.

#include "scsynth/scsynth.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace scsynth;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw error("cannot read '" + path + "'");
  }
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw error("cannot write '" + path.string() + "'");
  }
  out << text;
}

RunSpec load_spec(const std::string& path) {
  try {
    return parse_run_spec(read_file(path));
  } catch (const parse_error& e) {
    throw error(path + ": " + e.what());
  }
}

Program load_netlist(const std::string& path) {
  try {
    return parse_netlist(read_file(path));
  } catch (const parse_error& e) {
    throw error(path + ": " + e.what());
  }
}

template <class T>
std::vector<T> expand(const std::vector<T>& given, std::size_t n, T fallback, const char* what) {
  if (given.empty()) return std::vector<T>(n, fallback);
  if (given.size() == 1) return std::vector<T>(n, given[0]);
  if (given.size() != n) {
    throw error(std::string("expected 1 or ") + std::to_string(n) + " " + what + " values, got " +
                std::to_string(given.size()));
  }
  return given;
}

// -- synth --------------------------------------------------------------------

struct SynthArgs {
  std::string spec;
  std::optional<std::uint64_t> seed, budget;
  std::optional<double> beta;
  std::optional<std::size_t> chains;
  std::string out = "scsynth_out";
  bool dump_config = false;
};

int cmd_synth(const SynthArgs& a) {
  auto spec = load_spec(a.spec);
  if (a.seed) spec.synth.seed = *a.seed;
  if (a.budget) spec.synth.budget = *a.budget;
  if (a.beta) spec.synth.beta = *a.beta;
  if (a.chains) spec.synth.chains = *a.chains;
  if (a.dump_config) {
    std::cout << format_run_spec(spec);
    return 0;
  }
  if (!spec.length) {
    throw error(a.spec + ": missing required field 'length'");
  }
  const auto suite = make_test_suite(spec.target);
  std::vector<SynthesisResult> chains;
  const auto res = synthesize(spec.synth, suite, &chains);

  fs::create_directories(a.out);
  const Program best = validate(res.best).valid ? strip_dead(res.best) : res.best;
  write_file(fs::path(a.out) / "best.net", format_netlist(best) + "\n");

  std::string log = "chain,proposals,accepted,acceptance_rate,restarts,best_cost,terminated_by\n";
  std::string traj = "chain,proposal,best_cost\n";
  for (const auto& r : chains) {
    log += std::to_string(r.chain) + "," + std::to_string(r.proposals_evaluated) + "," +
           std::to_string(r.accepted) + "," + format_double(r.acceptance_rate()) + "," +
           std::to_string(r.restarts) + "," + format_double(r.best_cost) + "," +
           std::string(to_string(r.terminated_by)) + "\n";
    for (const auto& pt : r.trajectory) {
      traj += std::to_string(r.chain) + "," + std::to_string(pt.proposal) + "," + format_double(pt.best_cost) + "\n";
    }
  }
  write_file(fs::path(a.out) / "log.csv", log);
  write_file(fs::path(a.out) / "trajectory.csv", traj);
  write_file(fs::path(a.out) / "config.spec", format_run_spec(spec));

  std::cout << "best_cost " << format_double(res.best_cost) << "\n";
  std::cout << "chain " << res.chain << ", " << res.proposals_evaluated << " proposals, acceptance "
            << format_double(res.acceptance_rate()) << ", restarts " << res.restarts << ", "
            << to_string(res.terminated_by) << "\n";
  std::cout << format_netlist(best) << "\n";
  return 0;
}

// -- simulate -----------------------------------------------------------------

struct SimulateArgs {
  std::string netlist;
  std::vector<std::string> values;
  std::vector<std::string> kinds;
  std::vector<std::uint32_t> classes;
  std::size_t length = 256;
  bool dump = false;
};

int cmd_simulate(const SimulateArgs& a) {
  const auto p = load_netlist(a.netlist);
  if (a.values.size() != p.n_inputs()) {
    throw error("netlist has " + std::to_string(p.n_inputs()) + " inputs but " + std::to_string(a.values.size()) +
                " values were given");
  }
  std::vector<SequenceKind> kinds;
  for (const auto& k : expand(a.kinds, p.n_inputs(), std::string("vdc"), "--kind")) {
    auto kind = sequence_kind_from_string(k);
    if (!kind) throw error("unknown sequence kind '" + k + "'");
    kinds.push_back(*kind);
  }
  const auto classes = expand(a.classes, p.n_inputs(), std::uint32_t{0}, "--class");

  // Literal streams (0b...) fix N; otherwise --N applies.
  std::optional<std::size_t> length;
  for (const auto& v : a.values) {
    if (v.rfind("0b", 0) == 0) {
      const auto n = v.size() - 2;
      if (length && *length != n) throw error("literal bitstreams have different lengths");
      length = n;
    }
  }
  const std::size_t n = length.value_or(a.length);

  std::vector<Bitstream> inputs;
  for (std::size_t i = 0; i < p.n_inputs(); ++i) {
    const auto& v = a.values[i];
    if (v.rfind("0b", 0) == 0) {
      inputs.push_back(Bitstream::from_string(std::string_view(v).substr(2)));
    } else {
      double x = 0.0;
      std::istringstream is(v);
      if (!(is >> x) || !is.eof()) throw error("bad input value '" + v + "'");
      inputs.push_back(generate_sn(x, n, kinds[i], CorrelationClass{classes[i]}));
    }
  }
  const auto out = simulate(p, inputs, n);
  std::cout << format_double(decode_unipolar(out)) << "\n";
  if (a.dump) {
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      std::cout << "r" << i << " " << inputs[i].to_string() << "\n";
    }
    std::cout << to_string(p.output()) << " " << out.to_string() << "\n";
  }
  return 0;
}

// -- bench --------------------------------------------------------------------

struct BenchArgs {
  std::vector<std::string> names;
  bool all = false;
  std::uint64_t budget = 1'000'000;
  std::uint64_t seed = 1;
  double beta = 2.0;
  std::size_t chains = 1;
  std::string out;
};

int cmd_bench(const BenchArgs& a) {
  std::vector<std::string> names;
  bool unknown = false;
  if (a.all) {
    for (const auto& b : benchmark_registry()) names.push_back(b.name);
  } else {
    for (const auto& n : a.names) {
      if (find_benchmark(n)) {
        names.push_back(n);
      } else {
        std::cerr << "warning: unknown benchmark '" << n << "' skipped\n";
        unknown = true;
      }
    }
  }
  if (names.empty() && !a.all && !unknown) {
    throw error("no benchmarks named (use --all or list names)");
  }
  std::vector<BenchReport> reports;
  for (const auto& n : names) {
    SynthConfig cfg;
    cfg.program_length = 0;
    cfg.budget = a.budget;
    cfg.seed = a.seed;
    cfg.beta = a.beta;
    cfg.chains = a.chains;
    reports.push_back(run_benchmark(n, cfg));
  }
  const auto csv = bench_csv(reports);
  if (a.out.empty()) {
    std::cout << csv;
  } else {
    fs::create_directories(a.out);
    write_file(fs::path(a.out) / "bench.csv", csv);
    for (const auto& r : reports) {
      write_file(fs::path(a.out) / (r.name + ".net"), format_netlist(r.best) + "\n");
    }
    std::cout << csv;
  }
  return unknown ? 1 : 0;
}

// -- sweep --------------------------------------------------------------------

std::vector<std::size_t> parse_lengths(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t v = 0;
    std::istringstream is(tok);
    if (!(is >> v) || !is.eof()) throw error("bad length '" + tok + "' in --lengths");
    out.push_back(v);
  }
  if (out.empty()) throw error("--lengths is empty");
  return out;
}

int cmd_sweep(const std::string& netlist, const std::string& specfile, const std::string& lengths,
              const std::string& out) {
  const auto p = load_netlist(netlist);
  const auto spec = load_spec(specfile);
  if (spec.target.inputs.size() != p.n_inputs()) {
    throw error("netlist and spec disagree on input count");
  }
  const auto csv = sweep_csv(sweep_lengths(p, spec.target, parse_lengths(lengths)));
  if (!out.empty()) write_file(out, csv);
  std::cout << csv;
  return 0;
}

// -- enum ---------------------------------------------------------------------

int cmd_enum(const std::string& specfile, std::optional<std::size_t> length, std::uint64_t limit) {
  const auto spec = load_spec(specfile);
  const std::size_t k = length ? *length : spec.length.value_or(0);
  if (k == 0) throw error("enumeration length missing: pass --length or set 'length'");
  const auto n_in = spec.target.inputs.size();
  std::cout << "candidates " << count_candidates(n_in, k).str() << "\n";
  const auto suite = make_test_suite(spec.target);
  const auto r = enumerate_best(suite, n_in, k, limit);
  std::cout << "cost " << format_double(r.cost) << "\n";
  std::cout << format_netlist(r.best) << "\n";
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic-computing circuit synthesizer"};
  app.require_subcommand(1);

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "search for a circuit matching a spec file");
  synth->add_option("spec", sa.spec, "run spec file")->required();
  synth->add_option("--seed", sa.seed, "RNG seed");
  synth->add_option("--budget", sa.budget, "proposals per chain");
  synth->add_option("--beta", sa.beta, "Metropolis inverse temperature");
  synth->add_option("--chains", sa.chains, "independent chains");
  synth->add_option("--out", sa.out, "output directory")->capture_default_str();
  synth->add_flag("--dump-config", sa.dump_config, "print the resolved spec and exit");

  SimulateArgs ma;
  auto* sim = app.add_subcommand("simulate", "simulate a netlist on given input values");
  sim->add_option("netlist", ma.netlist, "netlist file")->required();
  sim->add_option("values", ma.values, "input probabilities, or literal streams as 0b0110...")->required();
  sim->add_option("--kind", ma.kinds, "sequence kind(s): lfsr, vdc, halton3")->delimiter(',');
  sim->add_option("--class", ma.classes, "correlation class(es)")->delimiter(',');
  sim->add_option("--N", ma.length, "SN length")->capture_default_str();
  sim->add_flag("--dump", ma.dump, "print the raw bitstreams");

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "run registry benchmarks and emit a CSV report");
  bench->add_option("names", ba.names, "benchmark names");
  bench->add_flag("--all", ba.all, "run every benchmark");
  bench->add_option("--budget", ba.budget, "proposals per chain")->capture_default_str();
  bench->add_option("--seed", ba.seed, "RNG seed")->capture_default_str();
  bench->add_option("--beta", ba.beta, "Metropolis inverse temperature")->capture_default_str();
  bench->add_option("--chains", ba.chains, "independent chains")->capture_default_str();
  bench->add_option("--out", ba.out, "output directory for bench.csv and netlists");

  std::string sw_net, sw_spec, sw_lengths = "64,256,1024", sw_out;
  auto* sweep = app.add_subcommand("sweep", "re-evaluate a netlist at several SN lengths");
  sweep->add_option("netlist", sw_net, "netlist file")->required();
  sweep->add_option("spec", sw_spec, "run spec file")->required();
  sweep->add_option("--lengths", sw_lengths, "comma-separated SN lengths")->capture_default_str();
  sweep->add_option("--out", sw_out, "CSV output file");

  std::string en_spec;
  std::optional<std::size_t> en_length;
  std::uint64_t en_limit = 1'000'000;
  auto* en = app.add_subcommand("enum", "exhaustively search all programs of one length");
  en->add_option("spec", en_spec, "run spec file")->required();
  en->add_option("--length", en_length, "program length");
  en->add_option("--limit", en_limit, "largest candidate count to attempt")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) return cmd_synth(sa);
    if (*sim) return cmd_simulate(ma);
    if (*bench) return cmd_bench(ba);
    if (*sweep) return cmd_sweep(sw_net, sw_spec, sw_lengths, sw_out);
    if (*en) return cmd_enum(en_spec, en_length, en_limit);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
