// Acceptance gate: one PASS/FAIL line per criterion. Usage:
//   acceptance <path-to-coalesce-cli>
// The CLI path is needed for the reproducibility criterion, which compares
// the bytes of two `verify` reports produced with different thread counts.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "coalesce/experiments.hpp"
#include "coalesce/io.hpp"
#include "coalesce/verify.hpp"

using namespace coalesce;

namespace {

constexpr std::uint64_t kSeed = 42;

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  std::cout << (pass ? "PASS" : "FAIL") << " criterion " << id << ": " << detail << std::endl;
  if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

struct Suite {
  std::vector<BoundReport> rows;
  double seconds = 0.0;
};

Suite run_checks(std::vector<std::string> names, unsigned threads) {
  VerifyOptions options;
  options.seed = kSeed;
  options.threads = threads;
  options.only = std::move(names);
  const auto start = std::chrono::steady_clock::now();
  Suite out{run_verification(options), 0.0};
  out.seconds = seconds_since(start);
  return out;
}

std::string describe(const std::vector<BoundReport>& rows) {
  std::ostringstream s;
  for (std::size_t k = 0; k < rows.size(); ++k)
    s << (k ? "; " : "") << rows[k].name << " " << format_double(rows[k].lhs) << " <= "
      << format_double(rows[k].rhs) << (rows[k].satisfied ? "" : " VIOLATED");
  return s.str();
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string quote(const std::string& s) { return "'" + s + "'"; }

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: acceptance <coalesce-cli>\n";
    return 2;
  }
  const std::string cli = argv[1];
  const unsigned threads = default_threads();
  std::cout.setf(std::ios::unitbuf);

  // 1. Monte Carlo law of rmm against the enumerated law, >= 20 instances.
  {
    const auto s = run_checks({"oracle-equivalence"}, threads);
    const auto& r = s.rows.front();
    const bool pass = all_satisfied(s.rows) && r.cases >= 20 && s.seconds < 60.0;
    report(1, pass,
           "oracle equivalence over " + std::to_string(r.cases) + " instances, worst chi2 " + format_double(r.lhs) +
               " vs " + format_double(r.rhs) + ", " + format_double(s.seconds) + " s");
  }

  // 2-3. Exact per-seed inequalities.
  {
    const auto s = run_checks({"monotone-coupling"}, threads);
    const auto& r = s.rows.front();
    report(2, r.satisfied && r.lhs == 0.0 && r.trials >= 10000,
           std::to_string(static_cast<long>(r.lhs)) + " violations in " + std::to_string(r.trials) + " seeds");
  }
  {
    const auto s = run_checks({"shift-inequality"}, threads);
    const auto& r = s.rows.front();
    report(3, r.satisfied && r.lhs == 0.0 && r.trials >= 10000,
           std::to_string(static_cast<long>(r.lhs)) + " violations in " + std::to_string(r.trials) +
               " seeds, m in {1,2,5}");
  }

  // 4. Exact bounds on the fixture set.
  {
    const auto s = run_checks({"pair-connection", "straddling-connection", "straddling-growth", "disjoint-occurrence",
                               "tuple-connection", "fourth-moment"},
                              threads);
    std::size_t cases = 0;
    for (const auto& r : s.rows) cases += r.cases;
    report(4, all_satisfied(s.rows), std::to_string(cases) + " exact cases; " + describe(s.rows));
  }

  // 5-7. Statistical agreement checks.
  {
    const auto s = run_checks({"glue"}, threads);
    report(5, all_satisfied(s.rows), "KS " + describe(s.rows));
  }
  {
    const auto s = run_checks({"jump-vs-graphical"}, threads);
    report(6, all_satisfied(s.rows), "KS " + describe(s.rows));
  }
  {
    const auto s = run_checks({"martingale"}, threads);
    report(7, all_satisfied(s.rows), "|mean - ||x||^2| vs 3 SE: " + describe(s.rows));
  }

  // 8. KS distance between consecutive n shrinks.
  {
    const auto start = std::chrono::steady_clock::now();
    const auto r = convergence_experiment(2, 0.0, 1.0, {100, 400, 1600}, 2000, SampleMode::kFast, kSeed, 0, threads);
    const double secs = seconds_since(start);
    std::ostringstream d;
    for (const auto& step : r.steps)
      d << "D(" << step.n_from << "," << step.n_to << ")=" << format_double(step.ks.statistic) << " ";
    d << format_double(secs) << " s";
    report(8, r.decreasing() && secs < 600.0, d.str());
  }

  // 9. Exceedance P{n^{-2/3} C > 1} along n in the three regimes, m = 2.
  {
    const std::vector<std::size_t> ns = {200, 800, 3200};
    const std::size_t trials = 2000;
    const auto crit = phase_sweep(Regime::kCritical, 2, -1.0, 1.0, ns, 1.0, trials, kSeed, 0, threads);
    const auto super = phase_sweep(Regime::kSupercritical, 2, 0.0, 1.0, ns, 1.0, trials, kSeed, 1ULL << 40, threads);
    const auto sub = phase_sweep(Regime::kSubcritical, 2, 0.0, 1.0, ns, 1.0, trials, kSeed, 2ULL << 40, threads);

    const bool ii = nondecreasing(super) && super.back().exceedance.estimate >= 0.95;
    const bool iii = nonincreasing(sub) && sub.back().exceedance.estimate <= 0.05;
    bool i = true;
    for (const auto& p : crit) i = i && p.exceedance.estimate > 0.05 && p.exceedance.estimate < 0.95;
    const bool separated = sub.back().exceedance.upper < super.back().exceedance.lower;

    std::ostringstream d;
    auto list = [&](const char* name, const std::vector<PhasePoint>& pts) {
      d << name << " [";
      for (std::size_t k = 0; k < pts.size(); ++k) d << (k ? " " : "") << format_double(pts[k].exceedance.estimate);
      d << "] ";
    };
    list("i", crit);
    list("ii", super);
    list("iii", sub);
    d << "99% CI at n=3200: ii [" << format_double(super.back().exceedance.lower) << ","
      << format_double(super.back().exceedance.upper) << "] iii [" << format_double(sub.back().exceedance.lower) << ","
      << format_double(sub.back().exceedance.upper) << "]";
    report(9, i && ii && iii && separated, d.str());
  }

  // 10. Byte-identical verify reports across thread counts.
  {
    const auto dir = std::filesystem::temp_directory_path() / ("coalesce-acceptance-" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    const auto a = dir / "threads1.csv";
    const auto b = dir / "threads4.csv";
    const int ca = std::system((quote(cli) + " --seed 42 --threads 1 --out " + quote(a.string()) + " verify").c_str());
    const int cb = std::system((quote(cli) + " --seed 42 --threads 4 --out " + quote(b.string()) + " verify").c_str());
    const std::string ra = read_file(a);
    const std::string rb = read_file(b);
    const bool pass = ca == 0 && cb == 0 && !ra.empty() && ra == rb;
    report(10, pass,
           "verify --seed 42 with --threads 1 and 4: exit " + std::to_string(ca) + "/" + std::to_string(cb) + ", " +
               std::to_string(ra.size()) + " bytes, " + (ra == rb ? "identical" : "DIFFERENT"));
    std::filesystem::remove_all(dir);
  }

  std::cout << (failures == 0 ? "ALL CRITERIA PASS" : std::to_string(failures) + " CRITERIA FAILED") << std::endl;
  return failures == 0 ? 0 : 1;
}
