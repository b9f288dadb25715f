#include "etlab/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "etlab/generators.hpp"
#include "etlab/json_io.hpp"
#include "etlab/numeric.hpp"

namespace etlab {

namespace {

// Human-facing reports carry 12 significant digits; traces stay full
// precision so a recheck can compare byte for byte.
json rounded(const json& j) {
  if (j.is_number_float()) return round_sig12(j.get<double>());
  if (j.is_object()) {
    json o = json::object();
    for (const auto& [k, v] : j.items()) o[k] = rounded(v);
    return o;
  }
  if (j.is_array()) {
    json a = json::array();
    for (const json& v : j) a.push_back(rounded(v));
    return a;
  }
  return j;
}

std::string fmt12(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

Family load_family(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open family file: " + path);
  return family_from_json(json::parse(in));
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write file: " + path);
  out << text;
}

int resolve_threads(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("THRESHOLD_LAB_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

// Evidence gathered while walking a trace, folded into the exit code.
struct Evidence {
  bool certified_fail = false;
  bool sampled_only = false;

  int exit_code() const { return certified_fail ? 1 : (sampled_only ? 3 : 0); }
};

void collect_evidence(const TraceNode& n, Evidence& ev) {
  if (!n.f_certified) ev.sampled_only = true;
  if (n.dcl) {
    if (!n.dcl->sum2_holds) ev.certified_fail = true;  // pure arithmetic
    if (n.dcl->exhaustive) {
      if (!n.dcl->holds) ev.certified_fail = true;
    } else {
      ev.sampled_only = true;
    }
  }
  if (n.bad) {
    if (n.bad->exhaustive) {
      if (!n.bad->within_budget) ev.certified_fail = true;
    } else {
      ev.sampled_only = true;
    }
  }
  if (n.step && !n.step->step_holds()) ev.certified_fail = true;
  if (n.child) collect_evidence(*n.child, ev);
}

struct SweepJob {
  std::string descriptor;
  Family family;
};

struct SweepRow {
  std::string descriptor;
  int n = 0;
  int l = 0;
  ThresholdReport report;
  std::vector<std::string> flags;
  bool skipped = false;
  std::string skip_reason;
};

SweepRow compute_row(const SweepJob& job, double tol, int exact_cap) {
  SweepRow row;
  row.descriptor = job.descriptor;
  row.n = job.family.ground.size;
  row.l = job.family.bound_l;
  row.report = full_thresholds(job.family, tol, exact_cap);
  auto flag_status = [&](const RootResult& r, const char* name) {
    if (r.status != RootStatus::ok)
      row.flags.push_back(std::string(name) + "_" + to_string(r.status));
  };
  flag_status(row.report.p_e, "p_E");
  flag_status(row.report.q, "q");
  flag_status(row.report.p_c, "p_c");
  const double slack = 10.0 * tol;
  if (row.report.p_e.defined() && row.report.q.defined() &&
      row.report.p_c.defined() &&
      !(row.report.p_e.value <= row.report.q.value + slack &&
        row.report.q.value <= row.report.p_c.value + slack))
    row.flags.push_back("sandwich_violation");
  return row;
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"expectation-threshold laboratory for monotone set systems"};
  app.require_subcommand(1);

  double tol = kDefaultTol;
  std::uint64_t seed = 0;
  int threads = 0;
  int exact_cap = kDefaultExactCap;
  app.add_option("--tol", tol, "root-finding tolerance")->capture_default_str();
  app.add_option("--seed", seed, "RNG seed for anything sampled")->capture_default_str();
  app.add_option("--threads", threads,
                 "worker threads (default: THRESHOLD_LAB_THREADS or hardware)");
  app.add_option("--exact-cap", exact_cap, "largest N for 2^N exact enumeration")
      ->capture_default_str();

  auto* gen = app.add_subcommand("generate", "emit a family as JSON");
  std::string gen_kind;
  int gen_n = 4, gen_k = 3, gen_ground = 8, gen_l = 3, gen_count = 4;
  std::string gen_out;
  gen->add_option("--kind", gen_kind, "hamiltonian | cliques | matchings | random")
      ->required();
  gen->add_option("--n", gen_n, "vertex count for graph kinds")->capture_default_str();
  gen->add_option("--k", gen_k, "clique size for kind=cliques")->capture_default_str();
  gen->add_option("--ground", gen_ground, "ground size for kind=random")
      ->capture_default_str();
  gen->add_option("--l", gen_l, "member size bound for kind=random")
      ->capture_default_str();
  gen->add_option("--count", gen_count, "member count for kind=random")
      ->capture_default_str();
  gen->add_option("--out", gen_out, "write to file instead of stdout");

  auto* thr = app.add_subcommand("thresholds", "p_E, q and p_c of a family");
  std::string thr_family;
  thr->add_option("--family", thr_family, "family JSON file")->required();

  auto* cov = app.add_subcommand("cover", "optimal-cost cover at a fixed p");
  std::string cov_family;
  double cov_p = 0.5;
  cov->add_option("--family", cov_family, "family JSON file")->required();
  cov->add_option("--p", cov_p, "bias")->required();

  auto* qv = app.add_subcommand("qvalue", "the cover threshold q with witness");
  std::string qv_family;
  qv->add_option("--family", qv_family, "family JSON file")->required();

  auto* cst = app.add_subcommand("constants", "optimized split constants");
  int cst_grid = 100000;
  cst->add_option("--grid", cst_grid, "grid resolution")->capture_default_str();

  const std::string mode_help = "main3 | main4 | bell";
  auto* frg = app.add_subcommand("fragment", "run the recorded induction");
  std::string frg_family, frg_mode = "main4", frg_out;
  std::optional<double> frg_L;
  double frg_delta = 0.5, frg_p = 0.0;
  std::optional<double> frg_eps1;
  int frg_l = 0, frg_depth = 3;
  std::uint64_t frg_record_cap = 10'000, frg_samples = 10'000,
                frg_exhaustive_cap = 1'000'000;
  bool frg_sampled = false;
  frg->add_option("--family", frg_family, "family JSON file")->required();
  frg->add_option("--mode", frg_mode, mode_help)->capture_default_str();
  frg->add_option("--L", frg_L, "spread constant (default 4.2; main3 default 1000)");
  frg->add_option("--delta", frg_delta, "size-cut exponent (main4/bell)")
      ->capture_default_str();
  frg->add_option("--epsilon1", frg_eps1, "bell failure budget");
  frg->add_option("--p", frg_p, "bias")->required();
  frg->add_option("--l", frg_l, "member size bound")->required();
  frg->add_option("--depth", frg_depth, "recursion depth cap")->capture_default_str();
  frg->add_option("--record-cap", frg_record_cap, "per-node W records kept")
      ->capture_default_str();
  frg->add_option("--samples", frg_samples, "W samples when sampling")
      ->capture_default_str();
  frg->add_option("--exhaustive-cap", frg_exhaustive_cap,
                  "largest C(N,w) scanned exhaustively")
      ->capture_default_str();
  frg->add_flag("--sampled", frg_sampled, "force sampling even below the cap");
  frg->add_option("--out", frg_out, "trace file (stdout otherwise)");

  auto* ver = app.add_subcommand("verify", "covering verdict, or recheck a trace");
  std::string ver_family, ver_mode = "main3", ver_recheck, ver_out_verdict,
              ver_out_trace;
  std::optional<double> ver_L;
  double ver_delta = 0.5, ver_p = 0.0;
  std::optional<double> ver_eps1;
  int ver_l = 0, ver_depth = 3;
  ver->add_option("--recheck", ver_recheck, "trace JSON to reproduce and compare");
  ver->add_option("--family", ver_family, "family JSON file");
  ver->add_option("--mode", ver_mode, mode_help)->capture_default_str();
  ver->add_option("--L", ver_L, "spread constant (default: mode's default)");
  ver->add_option("--delta", ver_delta, "size-cut exponent (main4/bell)")
      ->capture_default_str();
  ver->add_option("--epsilon1", ver_eps1, "bell failure budget");
  ver->add_option("--p", ver_p, "bias");
  ver->add_option("--l", ver_l, "member size bound");
  ver->add_option("--depth", ver_depth, "trace depth cap")->capture_default_str();
  ver->add_option("--out-verdict", ver_out_verdict, "write the verdict JSON here");
  ver->add_option("--out-trace", ver_out_trace, "also record the induction here");

  auto* swp = app.add_subcommand("kk-sweep", "threshold sweep over generator families");
  std::string swp_kinds = "hamiltonian,cliques,matchings", swp_out;
  int swp_nmin = 3, swp_nmax = 6, swp_kmax = 3;
  swp->add_option("--kinds", swp_kinds, "comma list of generator kinds")
      ->capture_default_str();
  swp->add_option("--n-min", swp_nmin, "smallest vertex count")->capture_default_str();
  swp->add_option("--n-max", swp_nmax, "largest vertex count")->capture_default_str();
  swp->add_option("--clique-k-max", swp_kmax, "largest clique size")
      ->capture_default_str();
  swp->add_option("--out", swp_out, "CSV file (stdout otherwise)");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    if (gen->parsed()) {
      Family fam;
      if (gen_kind == "hamiltonian") {
        fam = hamiltonian_cycles(gen_n);
      } else if (gen_kind == "cliques") {
        fam = cliques(gen_n, gen_k);
      } else if (gen_kind == "matchings") {
        fam = perfect_matchings(gen_n);
      } else if (gen_kind == "random") {
        fam = random_family(gen_ground, gen_l, gen_count, seed);
      } else {
        throw std::invalid_argument("unknown kind: " + gen_kind);
      }
      const std::string text = family_to_json(fam).dump(2) + "\n";
      if (gen_out.empty())
        out << text;
      else
        write_text(gen_out, text);
      return 0;
    }

    if (thr->parsed()) {
      const Family fam = load_family(thr_family);
      const ThresholdReport rep = full_thresholds(fam, tol, exact_cap);
      out << rounded(to_json(rep)).dump(2) << "\n";
      return 0;
    }

    if (cov->parsed()) {
      const Family fam = load_family(cov_family);
      const CoverSolution sol = cover_cost(fam, Probability(cov_p));
      out << rounded(to_json(sol)).dump(2) << "\n";
      return sol.optimal ? 0 : 3;
    }

    if (qv->parsed()) {
      const Family fam = load_family(qv_family);
      const QValue q = q_value(fam, tol);
      out << rounded(to_json(q)).dump(2) << "\n";
      return q.q.defined() && !q.witness.optimal ? 3 : 0;
    }

    if (cst->parsed()) {
      const OptimizedConstants oc = optimize_constants(cst_grid);
      const json j{{"L_star", oc.L_star},
                   {"delta_star", oc.delta_star},
                   {"g_half", cost_rate(0.5)}};
      out << rounded(j).dump(2) << "\n";
      return 0;
    }

    if (frg->parsed()) {
      const Family fam = load_family(frg_family);
      const Mode mode = mode_from_string(frg_mode);
      const double L = frg_L.value_or(mode == Mode::main3 ? 1000.0 : 4.2);
      const ConstantsProfile prof = build_profile(mode, L, frg_delta, frg_eps1);
      Sampling sampling;
      sampling.exhaustive = !frg_sampled;
      sampling.exhaustive_cap = frg_exhaustive_cap;
      sampling.count = frg_samples;
      sampling.seed = seed;
      const FragmentationTrace tr =
          run_induction(fam, Probability(frg_p), prof, frg_l, frg_depth, sampling,
                        exact_cap, CoverOptions{}, frg_record_cap);
      Evidence ev;
      if (tr.root) collect_evidence(*tr.root, ev);
      const json jt = trace_to_json(tr);
      if (frg_out.empty()) {
        out << jt.dump(2) << "\n";
      } else {
        write_text(frg_out, jt.dump() + "\n");
        json statuses = json::array();
        for (const TraceNode* n = tr.root.get(); n; n = n->child.get())
          statuses.push_back(n->status);
        out << json{{"trace_file", frg_out},
                    {"statuses", std::move(statuses)},
                    {"certified_fail", ev.certified_fail},
                    {"sampled_only", ev.sampled_only}}
                   .dump(2)
            << "\n";
      }
      return ev.exit_code();
    }

    if (ver->parsed()) {
      if (!ver_recheck.empty()) {
        std::ifstream in(ver_recheck);
        if (!in) throw std::invalid_argument("cannot open trace: " + ver_recheck);
        const RecheckResult rr = recheck_trace(json::parse(in));
        out << json{{"match", rr.match}, {"detail", rr.detail}}.dump(2) << "\n";
        return rr.match ? 0 : 1;
      }
      if (ver_family.empty())
        throw std::invalid_argument("verify needs --family (or --recheck)");
      const Family fam = load_family(ver_family);
      const Mode mode = mode_from_string(ver_mode);
      const double L = ver_L.value_or(mode == Mode::main3 ? 1000.0 : 4.2);
      const ConstantsProfile prof = build_profile(mode, L, ver_delta, ver_eps1);
      LevelOptions lopt;
      lopt.seed = seed;
      const TheoremVerdict v =
          verify_covering_theorem(fam, Probability(ver_p), prof, ver_l, lopt,
                                  CoverOptions{}, exact_cap);
      const std::string verdict_text = rounded(to_json(v)).dump(2) + "\n";
      out << verdict_text;
      if (!ver_out_verdict.empty()) write_text(ver_out_verdict, verdict_text);
      Evidence ev;
      if (v.certified) {
        if (!v.pass) ev.certified_fail = true;
      } else {
        ev.sampled_only = true;
      }
      if (!ver_out_trace.empty()) {
        Sampling sampling;
        sampling.seed = seed;
        const FragmentationTrace tr =
            run_induction(fam, Probability(ver_p), prof, ver_l, ver_depth, sampling,
                          exact_cap, CoverOptions{}, 10'000);
        write_text(ver_out_trace, trace_to_json(tr).dump() + "\n");
        if (tr.root) collect_evidence(*tr.root, ev);
      }
      return ev.exit_code();
    }

    if (swp->parsed()) {
      std::vector<SweepJob> jobs;
      std::stringstream kinds(swp_kinds);
      std::string kind;
      while (std::getline(kinds, kind, ',')) {
        for (int n = swp_nmin; n <= swp_nmax; ++n) {
          try {
            if (kind == "hamiltonian") {
              jobs.push_back({"hamiltonian-" + std::to_string(n), hamiltonian_cycles(n)});
            } else if (kind == "cliques") {
              for (int k = 2; k <= std::min(swp_kmax, n); ++k)
                jobs.push_back({"clique-" + std::to_string(n) + "-" + std::to_string(k),
                                cliques(n, k)});
            } else if (kind == "matchings") {
              if (n % 2 != 0) {
                err << "skip matchings n=" << n << ": odd vertex count\n";
                continue;
              }
              jobs.push_back({"matching-" + std::to_string(n), perfect_matchings(n)});
            } else {
              throw std::invalid_argument("unknown kind: " + kind);
            }
          } catch (const std::invalid_argument& e) {
            err << "skip " << kind << " n=" << n << ": " << e.what() << "\n";
          }
        }
      }

      std::vector<SweepRow> rows(jobs.size());
      std::atomic<std::size_t> next{0};
      const int nthreads =
          std::max(1, std::min<int>(resolve_threads(threads),
                                    static_cast<int>(jobs.size() ? jobs.size() : 1)));
      auto worker = [&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= jobs.size()) return;
          try {
            rows[i] = compute_row(jobs[i], tol, exact_cap);
          } catch (const std::exception& e) {
            rows[i].descriptor = jobs[i].descriptor;
            rows[i].skipped = true;
            rows[i].skip_reason = e.what();
          }
        }
      };
      std::vector<std::thread> pool;
      for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
      for (std::thread& t : pool) t.join();

      std::ostringstream csv;
      csv << "family,N,l,p_E,q,p_c,ratio,flags\n";
      bool certified_fail = false;
      for (const SweepRow& row : rows) {
        if (row.skipped) {
          err << "skip " << row.descriptor << ": " << row.skip_reason << "\n";
          continue;
        }
        csv << row.descriptor << "," << row.n << "," << row.l << ",";
        auto cell = [&](const RootResult& r) {
          if (r.defined()) csv << fmt12(r.value);
          csv << ",";
        };
        cell(row.report.p_e);
        cell(row.report.q);
        cell(row.report.p_c);
        if (row.report.q.defined() && row.report.p_c.defined() &&
            row.report.q.value > 0.0 && row.l >= 1)
          csv << fmt12(row.report.p_c.value /
                       (row.report.q.value * std::log2(static_cast<double>(row.l) + 1.0)));
        csv << ",";
        if (row.flags.empty()) {
          csv << "-";
        } else {
          for (std::size_t i = 0; i < row.flags.size(); ++i)
            csv << (i ? ";" : "") << row.flags[i];
          certified_fail = certified_fail ||
                           std::find(row.flags.begin(), row.flags.end(),
                                     "sandwich_violation") != row.flags.end();
        }
        csv << "\n";
      }
      if (swp_out.empty())
        out << csv.str();
      else
        write_text(swp_out, csv.str());
      return certified_fail ? 1 : 0;
    }
  } catch (const json::parse_error& e) {
    err << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace etlab
