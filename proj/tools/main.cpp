// coulomb: s_k tables, certified branch continuation, plot data, re-audit.

#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "coulomb/errors.hpp"
#include "coulomb/orchestrator.hpp"

using namespace coulomb;

int main(int argc, char** argv) {
  CLI::App app{"Rigorous relative equilibria of the Coulomb (n+1)-body problem"};
  app.require_subcommand(1);
  std::string out_dir = ".";
  app.add_option("-o,--output-dir", out_dir,
                 std::string("Output directory (overridden by $") + kOutputDirEnv + ")");

  auto* sk = app.add_subcommand("sk", "Certified s_k enclosures and s_1(n) vs n");
  int n_lo = 3, n_hi = 12;
  bool k1_only = false;
  sk->add_option("--n-min", n_lo, "Smallest n")->check(CLI::Range(2, 100000));
  sk->add_option("--n-max", n_hi, "Largest n")->check(CLI::Range(2, 100000));
  sk->add_flag("--k1-only", k1_only, "Only k = 1 rows");

  auto* cont = app.add_subcommand("continue", "Trace, certify and validate the spectrum of one branch");
  RunConfig cfg;
  cfg.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::string family = "1", direction = "plus";
  bool no_spectra = false;
  cont->add_option("-n", cfg.n, "Number of charges on the polygon")->required();
  cont->add_option("-k", cfg.k, "Bifurcating mode, 2 <= k <= n/2")->required();
  cont->add_option("--family", family, "1 or 2")->check(CLI::IsMember({"1", "2"}));
  cont->add_option("--direction", direction, "plus or minus")->check(CLI::IsMember({"plus", "minus"}));
  cont->add_option("--max-points", cfg.policy.max_points, "Points including the seed");
  cont->add_option("--initial-step", cfg.policy.initial_step);
  cont->add_option("--min-step", cfg.policy.min_step);
  cont->add_option("--max-step", cfg.policy.max_step);
  cont->add_option("--eps0", cfg.policy.eps0, "First step off the polygon");
  cont->add_option("--collision-distance", cfg.policy.collision_distance);
  cont->add_option("--mu-bound-factor", cfg.policy.mu_bound_factor, "Stop when mu > factor * n");
  cont->add_option("--newton-iter", cfg.policy.newton_max_iter);
  cont->add_option("--newton-tol", cfg.policy.newton_tol);
  cont->add_option("-j,--threads", cfg.threads, "Worker threads for certification and spectra");
  cont->add_flag("--no-spectra", no_spectra, "Skip eigenvalue validation");
  cont->add_option("--spectra-every", cfg.spectra_every, "Validate spectra on every m-th certified point");

  auto* plot = app.add_subcommand("plotdata", "CSV exports from a branch file");
  std::string plot_file;
  PlotOptions popts;
  plot->add_option("branch", plot_file, "Branch file")->required()->check(CLI::ExistingFile);
  plot->add_option("--samples", popts.samples, "Samples per trajectory period");
  plot->add_option("--amplitude", popts.amplitude, "Normal-mode amplitude");
  plot->add_option("--max-trajectories", popts.max_trajectory_points, "Points with trajectory exports");

  auto* verify = app.add_subcommand("verify", "Re-audit stored certificates");
  std::vector<std::string> verify_files;
  verify->add_option("branch", verify_files, "Branch files")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sk) {
      const SkTable t = cmd_sk(n_lo, n_hi, k1_only);
      const auto path = resolve_output_dir(out_dir) / "sk_table.csv";
      const std::string csv = sk_csv(t);
      std::ofstream(path) << csv;
      std::cout << csv;
      for (const auto& [n, c] : t.s1_vs_n)
        if (c != Comparison::Less) std::cerr << "s_1(" << n << ") vs " << n << ": " << to_string(c) << "\n";
      std::cerr << "wrote " << path.string() << "\n";
    } else if (*cont) {
      cfg.family = family_from_string(family);
      cfg.direction = direction_from_string(direction);
      cfg.spectra = !no_spectra;
      cfg.output_dir = out_dir;
      const RunResult r = cmd_continue(cfg);
      std::cout << "points " << r.file.branch.points.size() << ", termination "
                << to_string(r.file.branch.termination) << "\n";
      for (const auto& [st, c] : r.report.counts) std::cout << to_string(st) << " " << c << "\n";
      std::cout << "branch " << r.report.branch_path.string() << "\nreport " << r.report.report_path.string()
                << "\n";
    } else if (*plot) {
      popts.output_dir = out_dir;
      const PlotSummary s = cmd_plotdata(plot_file, popts);
      for (const auto& n : s.notices) std::cerr << "notice: " << n << "\n";
      for (const auto& f : s.files) std::cout << f.string() << "\n";
    } else if (*verify) {
      for (const auto& f : verify_files) {
        const AuditReport rep = cmd_verify(f);
        std::cout << f << ": " << rep.checked << " certificates re-audited, all pass\n";
      }
    }
  } catch (const IntegrityError& e) {
    std::cerr << "integrity error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
