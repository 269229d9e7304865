#pragma once

// Pipeline driver behind the command-line tool: s_k tables, branch runs,
// plot exports and re-audits of stored branch files.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "coulomb/branch_io.hpp"
#include "coulomb/continuation.hpp"
#include "coulomb/spectra.hpp"

namespace coulomb {

// Environment variable that, when set and non-empty, replaces every output
// directory.
inline constexpr const char* kOutputDirEnv = "COULOMB_OUTPUT_DIR";
std::filesystem::path resolve_output_dir(const std::filesystem::path& requested);

// ---------------------------------------------------------------------------
// sk

enum class Comparison { Less, Greater, Undecided };
std::string to_string(Comparison c);

struct SkRow {
  int n = 0;
  int k = 0;
  Interval s{0.0};
  // s_k and s_{n-k} enclosures intersect.
  bool mirror_overlap = false;
};

struct SkTable {
  std::vector<SkRow> rows;
  // Certified comparison of s_1(n) with n, one entry per n.
  std::map<int, Comparison> s1_vs_n;
};

// All k in 0..n-1 for n in [n_lo, n_hi], or only k = 1 when `k1_only`.
SkTable cmd_sk(int n_lo, int n_hi, bool k1_only = false);
// CSV: n,k,s_lo,s_hi,mirror_overlap,s1_vs_n (last column only on k = 1 rows).
std::string sk_csv(const SkTable& t);

// ---------------------------------------------------------------------------
// continue

struct RunConfig {
  int n = 5;
  int k = 2;
  Family family = Family::One;
  Direction direction = Direction::Plus;
  StepPolicy policy;
  std::filesystem::path output_dir = ".";
  int threads = 1;
  bool spectra = true;
  // Spectra on every spectra_every-th certified point; the rest are reported
  // as eig_unverified with "not attempted".
  int spectra_every = 1;

  // Throws DomainError for out-of-range settings.
  void validate() const;
  ProblemSpec spec() const { return ProblemSpec::make(n, k, family); }
  // Stem shared by the branch and report files, e.g. "n8_k4_f1_plus".
  std::string stem() const;
};

struct PointReport {
  std::size_t index = 0;
  double mu = 0.0;
  PointStatus status = PointStatus::EquilibriumUnverified;
  std::string detail;
};

struct RunReport {
  ProblemSpec spec;
  Direction direction = Direction::Plus;
  Termination termination = Termination::MaxPoints;
  std::vector<PointReport> points;
  std::map<PointStatus, int> counts;
  std::vector<std::size_t> secondary;  // indices of points flagged as secondary
  double trace_seconds = 0.0;
  double certify_seconds = 0.0;
  double spectra_seconds = 0.0;
  double total_seconds = 0.0;
  std::filesystem::path branch_path;
  std::filesystem::path report_path;

  std::string to_json() const;
};

// Status of one point in the four-class taxonomy.
PointStatus classify(const BranchPoint& p, const std::optional<SpectralResult>& s);
RunReport summarize(const BranchFile& f);

struct RunResult {
  BranchFile file;
  RunReport report;
};

// Seed, trace, certify, spectra; writes branch_<stem>.txt and
// report_<stem>.json. Point failures are data and never abort the run.
RunResult cmd_continue(const RunConfig& config);

// ---------------------------------------------------------------------------
// plotdata

struct PlotOptions {
  std::filesystem::path output_dir = ".";
  int samples = 200;
  double amplitude = 1e-2;
  // Trajectories are exported for at most this many nonresonant points,
  // spread evenly along the branch.
  int max_trajectory_points = 4;
};

struct PlotSummary {
  std::vector<std::filesystem::path> files;
  std::vector<std::string> notices;
};

// Writes <stem>_coords.csv (point,mu,body,x,y,z), <stem>_diagram.csv
// (point,mu,deviation,max_abs_z,status) and <stem>_traj_p<i>_c<j>.csv (x,y,z;
// samples * n rows, bodies inner) for every nonresonant nu0 at the chosen points.
PlotSummary cmd_plotdata(const std::filesystem::path& branch_file, const PlotOptions& options);

// ---------------------------------------------------------------------------
// verify

struct AuditEntry {
  std::size_t index = 0;
  bool ok = false;
  std::string reason;
};

struct AuditReport {
  std::size_t checked = 0;
  std::vector<AuditEntry> failures;
  bool ok() const { return failures.empty(); }
};

// Recomputes Y and Z for every successful stored certificate from the stored
// point and r*, demands bit-equality with the stored values and p(r0) < 0.
AuditReport audit_branch(const BranchFile& f);
// Reads and audits; throws IntegrityError on any failure or a corrupt file.
AuditReport cmd_verify(const std::filesystem::path& branch_file);

}  // namespace coulomb
