#pragma once

// The standard verification suite: a fixed list of named checks, each run on
// its own block of streams so that results depend only on the seed.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "coalesce/bounds.hpp"
#include "coalesce/checks.hpp"
#include "coalesce/error.hpp"

namespace coalesce {

struct VerifyOptions {
  std::uint64_t seed = 42;
  unsigned threads = 1;
  std::vector<std::string> only;  // check names; empty runs all
  std::string corrupt;            // negative control: check whose bound is sabotaged
};

struct CheckContext {
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::uint64_t stream_base = 0;
};

struct CheckDefinition {
  std::string name;
  bool statistical = false;  // a failure is retried once on fresh streams
  std::function<std::vector<BoundReport>(const CheckContext&)> run;
};

namespace detail {

inline BoundReport per_sample_row(std::string name, const PerSampleResult& r, const CheckContext& ctx) {
  auto row = make_report(std::move(name), static_cast<double>(r.violations), 0.0, r.trials, ctx.seed);
  row.stream_id = ctx.stream_base;
  return row;
}

inline BoundReport two_sample_row(std::string name, const TwoSampleResult& r, const CheckContext& ctx) {
  auto row = make_report(std::move(name), r.statistic, r.threshold, std::min(r.size_a, r.size_b), ctx.seed);
  row.stream_id = ctx.stream_base;
  return row;
}

inline BoundReport exact_row(std::string name, const ExactSummary& s) { return s.report(std::move(name)); }

inline const std::vector<ExactFixture>& fixtures_up_to(std::size_t n) {
  static const std::vector<ExactFixture> six = exact_fixtures(6);
  static const std::vector<ExactFixture> five = exact_fixtures(5);
  return n >= 6 ? six : five;
}

}  // namespace detail

inline std::vector<CheckDefinition> standard_checks() {
  std::vector<CheckDefinition> checks;

  checks.push_back({"monotone-coupling", false, [](const CheckContext& ctx) {
                      const auto r = monotone_coupling_check(10000, ctx.seed, ctx.stream_base, ctx.threads);
                      return std::vector{detail::per_sample_row("monotone-coupling", r, ctx)};
                    }});

  checks.push_back({"shift-inequality", false, [](const CheckContext& ctx) {
                      const std::vector<std::size_t> ms = {1, 2, 5};
                      const auto r = shift_inequality_check(10000, ms, ctx.seed, ctx.stream_base, ctx.threads);
                      return std::vector{detail::per_sample_row("shift-inequality", r, ctx)};
                    }});

  checks.push_back({"pair-connection", false, [](const CheckContext&) {
                      return std::vector{
                          detail::exact_row("pair-connection", pair_connection_check(detail::fixtures_up_to(6)))};
                    }});

  checks.push_back({"straddling-connection", false, [](const CheckContext&) {
                      const auto s = straddling_connection_check(detail::fixtures_up_to(6));
                      return std::vector{detail::exact_row("straddling-connection:inner", s[0]),
                                         detail::exact_row("straddling-connection:outer", s[1]),
                                         detail::exact_row("straddling-connection:cross", s[2])};
                    }});

  checks.push_back({"straddling-growth", false, [](const CheckContext&) {
                      const std::vector<double> eps = {0.05, 0.25, 1.0};
                      return std::vector{detail::exact_row("straddling-growth",
                                                           straddling_growth_check(detail::fixtures_up_to(6), eps))};
                    }});

  checks.push_back({"disjoint-occurrence", false, [](const CheckContext&) {
                      return std::vector{detail::exact_row("disjoint-occurrence",
                                                           disjoint_occurrence_check(detail::fixtures_up_to(5)))};
                    }});

  checks.push_back({"tuple-connection", false, [](const CheckContext&) {
                      const auto s = tuple_connection_check(detail::fixtures_up_to(6));
                      return std::vector{detail::exact_row("tuple-connection:triple", s[0]),
                                         detail::exact_row("tuple-connection:quadruple", s[1])};
                    }});

  checks.push_back({"fourth-moment", false, [](const CheckContext&) {
                      return std::vector{
                          detail::exact_row("fourth-moment", fourth_moment_check(detail::fixtures_up_to(6)))};
                    }});

  checks.push_back({"glue", true, [](const CheckContext& ctx) {
                      const GlueSetup s{MassVector{1.0, 0.8, 0.6, 0.5, 0.4, 0.3},
                                        parse_relation("union(intra:2,1,edges(2-5))"), 3, 0.9};
                      const auto r = glue_property_check(s, 10000, ctx.seed, ctx.stream_base, ctx.threads);
                      return std::vector{detail::two_sample_row("glue", r, ctx)};
                    }});

  checks.push_back({"growth-chain", true, [](const CheckContext& ctx) {
                      const GlueSetup s{MassVector{1.0, 0.7, 0.5, 0.3, 0.2, 0.1, 0.1, 0.05}, Relation::maximal(), 3,
                                        0.5};
                      const auto r = growth_chain_check(s, 0.1, 10000, ctx.seed, ctx.stream_base, ctx.threads);
                      auto row = make_report("growth-chain", r.probability.upper(), r.rhs, r.probability.trials,
                                             ctx.seed);
                      row.stream_id = ctx.stream_base;
                      return std::vector{row};
                    }});

  checks.push_back({"tail-uniformity", true, [](const CheckContext& ctx) {
                      std::vector<MassVector> family;
                      for (std::size_t n : {20, 40, 80}) {
                        std::vector<double> xs(n);
                        for (std::size_t k = 0; k < n; ++k)
                          xs[k] = (1.0 + 1.0 / static_cast<double>(n)) / static_cast<double>(k + 1);
                        family.emplace_back(std::move(xs));
                      }
                      const auto r =
                          tail_uniformity_check(family, 1.0, 0.3, 2000, ctx.seed, ctx.stream_base, ctx.threads);
                      auto row = make_report("tail-uniformity", r.worst_upper(), r.epsilon, 2000, ctx.seed);
                      row.stream_id = ctx.stream_base;
                      row.cases = family.size();
                      return std::vector{row};
                    }});

  checks.push_back({"martingale", true, [](const CheckContext& ctx) {
                      struct Fixture {
                        const char* name;
                        MassVector x;
                        double t;
                      };
                      const std::vector<Fixture> fixtures = {
                          {"martingale:pair", MassVector{1.0, 1.0}, 0.5},
                          {"martingale:triple", MassVector{0.5, 0.5, 0.5}, 1.0},
                          {"martingale:mixed", MassVector{1.0, 0.8, 0.6, 0.4, 0.2}, 0.7},
                      };
                      std::vector<BoundReport> rows;
                      for (std::size_t f = 0; f < fixtures.size(); ++f) {
                        const auto base = ctx.stream_base + f * kSideOffset;
                        const auto r = martingale_check(fixtures[f].x, fixtures[f].t, 100000, ctx.seed, base,
                                                        ctx.threads);
                        auto row = make_report(fixtures[f].name, r.deviation(), 3.0 * r.estimate.std_error,
                                               r.estimate.trials, ctx.seed);
                        row.stream_id = base;
                        rows.push_back(row);
                      }
                      return rows;
                    }});

  checks.push_back({"jump-vs-graphical", true, [](const CheckContext& ctx) {
                      const MassVector x{1.0, 0.8, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1};
                      std::vector<BoundReport> rows;
                      const std::vector<std::pair<const char*, double>> times = {{"0.2", 0.2}, {"0.5", 0.5}};
                      for (std::size_t f = 0; f < times.size(); ++f) {
                        CheckContext sub = ctx;
                        sub.stream_base = ctx.stream_base + 2 * f * kSideOffset;
                        const auto r = jump_vs_graphical_check(x, times[f].second, 10000, ctx.seed,
                                                               sub.stream_base, ctx.threads);
                        const std::string tag = std::string("jump-vs-graphical:t=") + times[f].first;
                        rows.push_back(detail::two_sample_row(tag + ":largest", r.largest, sub));
                        rows.push_back(detail::two_sample_row(tag + ":blocks", r.blocks, sub));
                      }
                      return rows;
                    }});

  checks.push_back({"grinding", true, [](const CheckContext& ctx) {
                      const auto r =
                          grinding_check(MassVector{2.0, 1.0}, 1, 2, 0.5, 10000, ctx.seed, ctx.stream_base, ctx.threads);
                      auto ks = detail::two_sample_row("grinding:law", r.ks, ctx);
                      auto acc = make_report("grinding:acceptance", std::fabs(r.acceptance - r.exact_acceptance),
                                             r.acceptance_half_width, r.proposals, ctx.seed);
                      acc.stream_id = ctx.stream_base;
                      return std::vector{ks, acc};
                    }});

  checks.push_back({"oracle-equivalence", true, [](const CheckContext& ctx) {
                      const auto fixtures = oracle_fixtures();
                      // Worst instance by statistic / threshold.
                      BoundReport worst;
                      double worst_ratio = -1.0;
                      bool all = true;
                      for (std::size_t f = 0; f < fixtures.size(); ++f) {
                        const auto base = ctx.stream_base + f * kSideOffset;
                        const auto r = oracle_equivalence_check(fixtures[f], 100000, ctx.seed, base, ctx.threads);
                        all = all && !r.rejected;
                        const double ratio = r.threshold > 0.0 ? r.statistic / r.threshold : r.statistic;
                        if (ratio > worst_ratio) {
                          worst_ratio = ratio;
                          worst = make_report("oracle-equivalence", r.statistic, r.threshold, 100000, ctx.seed);
                          worst.stream_id = base;
                        }
                      }
                      worst.satisfied = all;
                      worst.cases = fixtures.size();
                      return std::vector{worst};
                    }});

  return checks;
}

// Stream block of check `index` on attempt `attempt`.
inline constexpr std::uint64_t check_stream_base(std::size_t index, unsigned attempt) {
  return (static_cast<std::uint64_t>(index + 1) << 40) | (static_cast<std::uint64_t>(attempt) << 36);
}

inline constexpr double kCorruptionFactor = 1e-3;

inline std::vector<std::string> check_names() {
  std::vector<std::string> out;
  for (const auto& c : standard_checks()) out.push_back(c.name);
  return out;
}

// Runs the selected checks in suite order. Rows of a statistical check that
// fails are replaced by a rerun on fresh streams.
inline std::vector<BoundReport> run_verification(const VerifyOptions& options) {
  const auto checks = standard_checks();
  for (const auto& name : options.only)
    if (std::none_of(checks.begin(), checks.end(), [&](const auto& c) { return c.name == name; }))
      throw UsageError("unknown check '" + name + "'");
  if (!options.corrupt.empty() &&
      std::none_of(checks.begin(), checks.end(), [&](const auto& c) { return c.name == options.corrupt; }))
    throw UsageError("unknown check '" + options.corrupt + "'");

  std::vector<BoundReport> rows;
  for (std::size_t index = 0; index < checks.size(); ++index) {
    const auto& check = checks[index];
    if (!options.only.empty() &&
        std::find(options.only.begin(), options.only.end(), check.name) == options.only.end())
      continue;
    auto run = [&](unsigned attempt) {
      auto out = check.run({options.seed, options.threads, check_stream_base(index, attempt)});
      for (auto& r : out) r.seed = options.seed;
      if (check.name == options.corrupt)
        for (auto& r : out) {
          r.rhs = r.rhs > 0.0 ? r.rhs * kCorruptionFactor : -1.0;
          r.slack = r.rhs - r.lhs;
          r.satisfied = r.lhs <= r.rhs;
        }
      return out;
    };
    auto out = run(0);
    const bool failed = std::any_of(out.begin(), out.end(), [](const auto& r) { return !r.satisfied; });
    if (failed && check.statistical) out = run(1);
    rows.insert(rows.end(), out.begin(), out.end());
  }
  return rows;
}

inline bool all_satisfied(const std::vector<BoundReport>& rows) {
  return std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.satisfied; });
}

}  // namespace coalesce
