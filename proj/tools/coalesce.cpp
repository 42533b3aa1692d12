// coalesce: command-line front end for the verification suite and the
// block-model experiments. Output is CSV (default) or JSON; every row carries
// seed, stream_id and trials. Exit codes: 0 pass, 1 check failure, 2 usage.

#include <cstdint>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "coalesce/coalescent.hpp"
#include "coalesce/error.hpp"
#include "coalesce/exact_oracle.hpp"
#include "coalesce/experiments.hpp"
#include "coalesce/io.hpp"
#include "coalesce/parallel.hpp"
#include "coalesce/relation.hpp"
#include "coalesce/rmm.hpp"
#include "coalesce/sbm.hpp"
#include "coalesce/verify.hpp"

using namespace coalesce;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct Global {
  std::string seed_text = "42";
  unsigned threads = default_threads();
  std::string out;
  std::string format = "csv";

  std::uint64_t seed() const {
    const std::string& s = seed_text;
    const bool hex = s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X');
    const std::string digits = hex ? s.substr(2) : s;
    if (digits.empty() || digits.find_first_not_of(hex ? "0123456789abcdefABCDEF" : "0123456789") != std::string::npos)
      throw UsageError("--seed: expected a decimal or 0x-prefixed hex integer, got '" + s + "'");
    try {
      return std::stoull(digits, nullptr, hex ? 16 : 10);
    } catch (const std::out_of_range&) {
      throw UsageError("--seed: value does not fit in 64 bits");
    }
  }
};

std::ostream& output(const Global& g, std::ofstream& file) {
  if (g.out.empty()) return std::cout;
  file.open(g.out);
  if (!file) throw UsageError("cannot open output file '" + g.out + "'");
  return file;
}

void emit(const Global& g, const Table& table) {
  std::ofstream file;
  auto& out = output(g, file);
  if (g.format == "json")
    table.write_json(out);
  else
    table.write_csv(out);
}

void require_trials(std::size_t trials) {
  if (trials == 0) throw UsageError("--trials must be positive");
}

SampleMode parse_mode(const std::string& s) {
  if (s == "coupled") return SampleMode::kCoupled;
  if (s == "fast") return SampleMode::kFast;
  throw UsageError("--mode: expected coupled or fast");
}

std::string join(std::span<const double> v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? " " : "") + format_double(v[k]);
  return s;
}

// Subcommand options. Defaults reproduce the desk-scale fixtures.
struct VerifyArgs {
  std::vector<std::string> only;
  std::string corrupt;
  bool list = false;
};

struct SbmArgs {
  std::size_t m = 2;
  double t = 0.0;
  double u = 1.0;
  std::vector<std::size_t> ns;
  std::size_t trials = 2000;
  std::string mode = "fast";
};

struct SweepArgs {
  std::string regime = "i";
  std::size_t m = 2;
  double t = -1.0;
  double u = 1.0;
  std::vector<std::size_t> ns = {200, 800, 3200};
  std::size_t trials = 2000;
  double level = 1.0;
  double gap = 1.2;
};

struct MomentsArgs {
  std::vector<double> x;
  double t = 1.0;
  std::size_t trials = 100000;
};

struct OracleArgs {
  std::vector<double> x;
  std::string relation = "maximal";
  double t = 1.0;
};

struct SampleArgs {
  std::string model = "rmm";
  std::vector<double> x;
  std::string relation = "maximal";
  double t = 1.0;
  double u = 1.0;
  std::size_t n = 100;
  std::size_t m = 2;
  std::string mode = "fast";
  std::size_t trials = 1;
  bool trajectory = false;
};

int run_verify(const Global& g, const VerifyArgs& a) {
  if (a.list) {
    for (const auto& name : check_names()) std::cout << name << '\n';
    return kExitPass;
  }
  VerifyOptions options;
  options.seed = g.seed();
  options.threads = g.threads;
  options.only = a.only;
  options.corrupt = a.corrupt;
  const auto rows = run_verification(options);
  emit(g, report_table(rows));
  bool pass = true;
  for (const auto& r : rows)
    if (!r.satisfied) {
      pass = false;
      std::cerr << "FAILED " << r.name << ": lhs " << format_double(r.lhs) << " > rhs " << format_double(r.rhs) << '\n';
    }
  return pass ? kExitPass : kExitFail;
}

int run_convergence(const Global& g, SbmArgs a) {
  require_trials(a.trials);
  if (a.ns.empty()) a.ns = {100, 400, 1600};
  const std::uint64_t seed = g.seed();
  const auto r = convergence_experiment(a.m, a.t, a.u, a.ns, a.trials, parse_mode(a.mode), seed, 0, g.threads);
  const char* trend = r.decreasing() ? "decreasing" : "not-decreasing";
  Table table({"n_from", "n_to", "ks_distance", "ks_threshold", "mean_from", "mean_to", "trend", "m", "t", "u",
               "trials", "seed", "stream_id"});
  for (std::size_t k = 0; k < r.steps.size(); ++k) {
    const auto& s = r.steps[k];
    table.add_row({Table::num(std::uint64_t{s.n_from}), Table::num(std::uint64_t{s.n_to}),
                   Table::num(s.ks.statistic), Table::num(s.ks.threshold), Table::num(r.points[k].largest.mean),
                   Table::num(r.points[k + 1].largest.mean), Table::str(trend), Table::num(std::uint64_t{a.m}),
                   Table::num(a.t), Table::num(a.u), Table::num(std::uint64_t{a.trials}), Table::num(seed),
                   Table::num(r.points[k].stream_id)});
  }
  emit(g, table);
  return kExitPass;
}

int run_phase_sweep(const Global& g, const SweepArgs& a) {
  require_trials(a.trials);
  const auto regime = parse_regime(a.regime);
  const std::uint64_t seed = g.seed();
  const auto points = phase_sweep(regime, a.m, a.t, a.u, a.ns, a.level, a.trials, seed, 0, g.threads, a.gap);
  const char* trend = trend_name(sweep_trend(points));
  Table table({"regime", "n", "p", "q", "level", "estimate", "ci_lower", "ci_upper", "mean_scaled", "trend",
               "trials", "seed", "stream_id"});
  for (const auto& p : points)
    table.add_row({Table::str(regime_name(regime)), Table::num(std::uint64_t{p.n}), Table::num(p.p), Table::num(p.q),
                   Table::num(a.level), Table::num(p.exceedance.estimate), Table::num(p.exceedance.lower),
                   Table::num(p.exceedance.upper), Table::num(p.mean_scaled), Table::str(trend),
                   Table::num(std::uint64_t{a.trials}), Table::num(seed), Table::num(p.stream_id)});
  emit(g, table);
  return kExitPass;
}

int run_moments(const Global& g, const MomentsArgs& a) {
  require_trials(a.trials);
  const MassVector x(a.x);
  const std::uint64_t seed = g.seed();
  const auto r = moments_experiment(x, a.t, a.trials, seed, 0, g.threads);
  Table table({"quantity", "estimate", "ci_lower", "ci_upper", "bound", "below_bound", "t", "trials", "seed",
               "stream_id"});
  auto row = [&](const char* name, const MeanEstimate& e, std::optional<double> bound) {
    table.add_row({Table::str(name), Table::num(e.mean), Table::num(e.lower()), Table::num(e.upper()),
                   bound ? Table::num(*bound) : Table::str(""), bound ? Table::flag(e.mean <= *bound) : Table::str(""),
                   Table::num(a.t), Table::num(std::uint64_t{a.trials}), Table::num(seed), Table::num(r.stream_id)});
  };
  row("norm_fourth", r.norm_fourth, r.bound);
  row("sum_fourth", r.sum_fourth, std::nullopt);
  emit(g, table);
  return r.bound && r.norm_fourth.mean > *r.bound ? kExitFail : kExitPass;
}

int run_oracle(const Global& g, const OracleArgs& a) {
  const MassVector x(a.x);
  const auto law = enumerate_law(x, parse_relation(a.relation), a.t);
  if (g.format == "json") {
    std::ofstream file;
    output(g, file) << to_json(law).dump(2) << '\n';
    return kExitPass;
  }
  Table table({"outcome", "probability", "trials", "seed", "stream_id"});
  for (const auto& [v, p] : law.outcomes)
    table.add_row({Table::str(join(v.values())), Table::num(p), Table::num(std::uint64_t{0}),
                   Table::num(std::uint64_t{0}), Table::num(std::uint64_t{0})});
  emit(g, table);
  return kExitPass;
}

int run_sample(const Global& g, const SampleArgs& a) {
  require_trials(a.trials);
  const std::uint64_t seed = g.seed();
  if (a.model == "jump" && a.trajectory) {
    if (a.trials != 1) throw UsageError("--trajectory writes a single path; use --trials 1");
    StreamRng rng(seed, 0);
    const auto path = simulate_jump_process(MassVector(a.x), a.t, rng);
    std::ofstream file;
    write_trajectory_csv(output(g, file), path);
    return kExitPass;
  }
  std::function<ComponentVector(std::uint64_t)> draw;
  if (a.model == "rmm") {
    const MassVector x(a.x);
    const auto r = parse_relation(a.relation);
    draw = [=](std::uint64_t stream) { return rmm(x, ThresholdField(seed, stream), r, a.t); };
  } else if (a.model == "jump") {
    const MassVector x(a.x);
    draw = [=](std::uint64_t stream) {
      StreamRng rng(seed, stream);
      return simulate_jump_process(x, a.t, rng).state_at(a.t);
    };
  } else if (a.model == "zeta") {
    const auto mode = parse_mode(a.mode);
    critical_times(a.n, a.t, a.u);
    draw = [=](std::uint64_t stream) { return zeta_n(a.n, a.m, a.t, a.u, mode, seed, stream); };
  } else {
    throw UsageError("--model: expected rmm, jump or zeta");
  }
  const auto samples =
      parallel_map(a.trials, g.threads, [&](std::size_t k) { return draw(trial_stream(0, k)).trimmed(); });
  Table table({"trial", "components", "block_count", "norm_sq", "largest", "trials", "seed", "stream_id"});
  for (std::size_t k = 0; k < samples.size(); ++k)
    table.add_row({Table::num(std::uint64_t{k}), Table::str(join(samples[k].values())),
                   Table::num(std::uint64_t{samples[k].block_count()}), Table::num(samples[k].norm_sq()),
                   Table::num(samples[k].largest()), Table::num(std::uint64_t{a.trials}), Table::num(seed),
                   Table::num(trial_stream(0, k))});
  emit(g, table);
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Restricted multiplicative merging: verification suite and block-model experiments"};
  app.require_subcommand(1);

  Global g;
  app.add_option("--seed", g.seed_text, "Master seed, decimal or 0x hex")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "Output file (default stdout)");
  app.add_option("--format", g.format, "Output format")->capture_default_str()->check(CLI::IsMember({"csv", "json"}));

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Run the property and bound verification suite");
  verify->add_option("--only", va.only, "Run only these checks")->delimiter(',');
  verify->add_option("--corrupt", va.corrupt, "Negative control: sabotage this check's bound");
  verify->add_flag("--list", va.list, "List check names and exit");

  SbmArgs ca;
  auto* convergence = app.add_subcommand("convergence", "KS distances of the rescaled largest component along n");
  convergence->add_option("--classes,-m", ca.m, "Number of classes")->capture_default_str();
  convergence->add_option("--t", ca.t, "Intra-class time parameter")->capture_default_str();
  convergence->add_option("--u", ca.u, "Inter-class time parameter")->capture_default_str();
  convergence->add_option("--n", ca.ns, "Class sizes, comma separated (default 100,400,1600)")->delimiter(',');
  convergence->add_option("--trials", ca.trials, "Trials per n")->capture_default_str();
  convergence->add_option("--mode", ca.mode, "coupled or fast")->capture_default_str();

  SweepArgs sa;
  auto* sweep = app.add_subcommand("phase-sweep", "Estimate P{n^{-2/3} C > M} along n for a regime schedule");
  sweep->add_option("--regime", sa.regime, "i, ii, iii or dense")->capture_default_str();
  sweep->add_option("--classes,-m", sa.m, "Number of classes")->capture_default_str();
  sweep->add_option("--t", sa.t, "Intra-class parameter (regime i, dense)")->capture_default_str();
  sweep->add_option("--u", sa.u, "Inter-class parameter")->capture_default_str();
  sweep->add_option("--n", sa.ns, "Class sizes, comma separated")->delimiter(',')->capture_default_str();
  sweep->add_option("--trials", sa.trials, "Trials per n")->capture_default_str();
  sweep->add_option("--level,-M", sa.level, "Threshold M")->capture_default_str();
  sweep->add_option("--gap", sa.gap, "Exponent of |p - 1/n| in regimes ii and iii")->capture_default_str();

  MomentsArgs ma;
  auto* moments = app.add_subcommand("moments", "Fourth moments of X(t) against the fourth-norm bound");
  moments->add_option("--x", ma.x, "Initial masses, comma separated")->delimiter(',')->required();
  moments->add_option("--t", ma.t, "Time")->capture_default_str();
  moments->add_option("--trials", ma.trials, "Trials")->capture_default_str();

  OracleArgs oa;
  auto* oracle = app.add_subcommand("oracle", "Exact law of RMM_t(x; R) by enumeration");
  oracle->add_option("--x", oa.x, "Masses, comma separated")->delimiter(',')->required();
  oracle->add_option("--relation", oa.relation, "Relation expression")->capture_default_str();
  oracle->add_option("--t", oa.t, "Time")->capture_default_str();

  SampleArgs pa;
  auto* sample = app.add_subcommand("sample", "Draw samples of RMM, the jump process, or zeta^(n)");
  sample->add_option("--model", pa.model, "rmm, jump or zeta")->capture_default_str();
  sample->add_option("--x", pa.x, "Masses, comma separated (rmm, jump)")->delimiter(',');
  sample->add_option("--relation", pa.relation, "Relation expression (rmm)")->capture_default_str();
  sample->add_option("--t", pa.t, "Time")->capture_default_str();
  sample->add_option("--u", pa.u, "Inter-class parameter (zeta)")->capture_default_str();
  sample->add_option("--n", pa.n, "Class size (zeta)")->capture_default_str();
  sample->add_option("--classes,-m", pa.m, "Number of classes (zeta)")->capture_default_str();
  sample->add_option("--mode", pa.mode, "coupled or fast (zeta)")->capture_default_str();
  sample->add_option("--trials", pa.trials, "Number of samples")->capture_default_str();
  sample->add_flag("--trajectory", pa.trajectory, "Jump model: write the whole path as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*verify) return run_verify(g, va);
    if (*convergence) return run_convergence(g, ca);
    if (*sweep) return run_phase_sweep(g, sa);
    if (*moments) return run_moments(g, ma);
    if (*oracle) return run_oracle(g, oa);
    if (*sample) return run_sample(g, pa);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const CapacityError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
