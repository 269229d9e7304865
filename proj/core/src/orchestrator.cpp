#include "coulomb/orchestrator.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "coulomb/errors.hpp"
#include "json.hpp"

namespace coulomb {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IntegrityError("cannot write " + path.string());
  out << text;
}

std::string file_stem(const Branch& b) {
  return "n" + std::to_string(b.spec.n) + "_k" + std::to_string(b.spec.k) + "_f" +
         std::to_string(static_cast<int>(b.spec.family)) + "_" + to_string(b.direction);
}

}  // namespace

std::filesystem::path resolve_output_dir(const std::filesystem::path& requested) {
  const char* env = std::getenv(kOutputDirEnv);
  std::filesystem::path dir = env && *env ? std::filesystem::path(env) : requested;
  if (dir.empty()) dir = ".";
  std::filesystem::create_directories(dir);
  return dir;
}

// ---------------------------------------------------------------------------

std::string to_string(Comparison c) {
  switch (c) {
    case Comparison::Less: return "less";
    case Comparison::Greater: return "greater";
    case Comparison::Undecided: return "undecided";
  }
  return "undecided";
}

SkTable cmd_sk(int n_lo, int n_hi, bool k1_only) {
  if (n_lo < 2 || n_hi < n_lo) throw DomainError("sk needs 2 <= n_lo <= n_hi");
  SkTable t;
  for (int n = n_lo; n <= n_hi; ++n) {
    std::vector<Interval> s(static_cast<std::size_t>(n), Interval(0.0));
    const int k_lo = k1_only ? 1 : 0, k_hi = k1_only ? 1 : n - 1;
    for (int k = 0; k < n; ++k)
      if (k1_only ? (k == 1 || k == n - 1) : true) s[static_cast<std::size_t>(k)] = s_value_interval(n, k);
    for (int k = k_lo; k <= k_hi; ++k) {
      const Interval& sk = s[static_cast<std::size_t>(k)];
      const Interval& mirror = s[static_cast<std::size_t>((n - k) % n)];
      t.rows.push_back({n, k, sk, sk.intersects(mirror)});
    }
    const Interval s1 = s1_enclosure(n);
    const Interval nn(static_cast<double>(n));
    t.s1_vs_n[n] = s1.certainly_less(nn) ? Comparison::Less
                   : s1.certainly_greater(nn) ? Comparison::Greater
                                              : Comparison::Undecided;
  }
  return t;
}

std::string sk_csv(const SkTable& t) {
  std::string out = "n,k,s_lo,s_hi,mirror_overlap,s1_vs_n\n";
  for (const SkRow& r : t.rows) {
    out += std::to_string(r.n) + "," + std::to_string(r.k) + "," + format_double(r.s.lo()) + "," +
           format_double(r.s.hi()) + "," + (r.mirror_overlap ? "1" : "0") + ",";
    if (r.k == 1) out += to_string(t.s1_vs_n.at(r.n));
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------

void RunConfig::validate() const {
  (void)spec();
  const StepPolicy& p = policy;
  if (!(p.min_step > 0.0 && p.min_step <= p.initial_step && p.initial_step <= p.max_step && p.max_step <= 1.0))
    throw DomainError("step sizes must satisfy 0 < min <= initial <= max <= 1");
  if (!(p.eps0 > 0.0 && p.eps0 <= 1.0)) throw DomainError("eps0 must lie in (0, 1]");
  if (p.max_points < 1 || p.max_points > 100000) throw DomainError("max_points must lie in [1, 100000]");
  if (p.grow_after < 1) throw DomainError("grow_after must be positive");
  if (!(p.collision_distance > 0.0 && p.collision_distance < 1.0))
    throw DomainError("collision distance must lie in (0, 1)");
  if (!(p.mu_bound_factor > 0.0)) throw DomainError("mu bound factor must be positive");
  if (p.newton_max_iter < 1 || p.newton_max_iter > 100) throw DomainError("newton iterations must lie in [1, 100]");
  if (!(p.newton_tol > 0.0 && p.newton_tol < 1e-6)) throw DomainError("newton tolerance must lie in (0, 1e-6)");
  if (threads < 1 || threads > 256) throw DomainError("threads must lie in [1, 256]");
  if (spectra_every < 1) throw DomainError("spectra_every must be positive");
}

std::string RunConfig::stem() const { return file_stem(Branch{spec(), direction, {}, Termination::MaxPoints}); }

PointStatus classify(const BranchPoint& p, const std::optional<SpectralResult>& s) {
  if (!p.certified()) return PointStatus::EquilibriumUnverified;
  if (!s) return PointStatus::EigUnverified;
  return s->status == PointStatus::EquilibriumUnverified ? PointStatus::EigUnverified : s->status;
}

RunReport summarize(const BranchFile& f) {
  RunReport r;
  r.spec = f.branch.spec;
  r.direction = f.branch.direction;
  r.termination = f.branch.termination;
  for (auto st : {PointStatus::CertifiedNonresonant, PointStatus::EigUnverified, PointStatus::NonresonanceUnverified,
                  PointStatus::EquilibriumUnverified})
    r.counts[st] = 0;
  for (std::size_t i = 0; i < f.branch.points.size(); ++i) {
    const BranchPoint& p = f.branch.points[i];
    const std::optional<SpectralResult> none;
    const auto& s = f.spectra.empty() ? none : f.spectra[i];
    PointReport pr{i, p.mu(), classify(p, s), ""};
    if (!p.certified())
      pr.detail = p.cert ? p.cert->diagnostics : "not certified";
    else
      pr.detail = s ? s->diagnostics : "spectra not attempted";
    ++r.counts[pr.status];
    if (p.flags & kFlagSecondary) r.secondary.push_back(i);
    r.points.push_back(std::move(pr));
  }
  return r;
}

std::string RunReport::to_json() const {
  nlohmann::ordered_json j;
  j["n"] = spec.n;
  j["k"] = spec.k;
  j["family"] = static_cast<int>(spec.family);
  j["direction"] = to_string(direction);
  j["termination"] = to_string(termination);
  j["branch_file"] = branch_path.filename().string();
  nlohmann::ordered_json counts_json;
  for (const auto& [st, c] : counts) counts_json[to_string(st)] = c;
  j["counts"] = counts_json;
  j["secondary"] = secondary;
  j["timing_seconds"] = {{"trace", trace_seconds},
                         {"certify", certify_seconds},
                         {"spectra", spectra_seconds},
                         {"total", total_seconds}};
  auto& pts = j["points"] = nlohmann::ordered_json::array();
  for (const PointReport& p : points)
    pts.push_back({{"index", p.index}, {"mu", p.mu}, {"status", to_string(p.status)}, {"detail", p.detail}});
  return j.dump(2) + "\n";
}

RunResult cmd_continue(const RunConfig& config) {
  config.validate();
  const auto start = Clock::now();
  const ProblemSpec spec = config.spec();
  const auto dir = resolve_output_dir(config.output_dir);

  auto t0 = Clock::now();
  RunResult res;
  res.file.branch = trace_branch(spec, config.direction, config.policy);
  const double trace_s = seconds_since(t0);

  Branch& branch = res.file.branch;
  t0 = Clock::now();
  certify_branch(branch, config.threads);
  detect_secondary(branch);
  const double certify_s = seconds_since(t0);

  t0 = Clock::now();
  if (config.spectra) {
    res.file.spectra.assign(branch.points.size(), std::nullopt);
    int certified = 0;
    for (std::size_t i = 0; i < branch.points.size(); ++i) {
      if (!branch.points[i].certified()) continue;
      if (certified++ % config.spectra_every != 0) continue;
      res.file.spectra[i] = spectral_pipeline(spec, branch.points[i], config.threads);
    }
  }
  const double spectra_s = seconds_since(t0);

  res.report = summarize(res.file);
  res.report.trace_seconds = trace_s;
  res.report.certify_seconds = certify_s;
  res.report.spectra_seconds = spectra_s;
  res.report.branch_path = dir / ("branch_" + config.stem() + ".txt");
  res.report.report_path = dir / ("report_" + config.stem() + ".json");
  write_branch_file(res.report.branch_path, res.file);
  res.report.total_seconds = seconds_since(start);
  write_text(res.report.report_path, res.report.to_json());
  return res;
}

// ---------------------------------------------------------------------------

PlotSummary cmd_plotdata(const std::filesystem::path& branch_file, const PlotOptions& options) {
  if (options.samples < 2) throw DomainError("need at least two trajectory samples");
  if (options.max_trajectory_points < 0) throw DomainError("max_trajectory_points must be non-negative");
  const BranchFile f = read_branch_file(branch_file);
  const Branch& b = f.branch;
  const ReducedLayout layout(b.spec.n, b.spec.family);
  const auto dir = resolve_output_dir(options.output_dir);
  const std::string stem = file_stem(b);
  const Eigen::VectorXd poly = polygon(b.spec.n, 0.0).u;
  const RunReport report = summarize(f);
  PlotSummary out;

  std::string coords = "point,mu,body,x,y,z\n";
  std::string diagram = "point,mu,deviation,max_abs_z,status\n";
  for (std::size_t i = 0; i < b.points.size(); ++i) {
    const BranchPoint& p = b.points[i];
    const Eigen::VectorXd u = layout.lift(p.x());
    const std::string pi = std::to_string(i), mu = format_double(p.mu());
    double zmax = 0.0;
    for (int j = 0; j < b.spec.n; ++j) {
      coords += pi + "," + mu + "," + std::to_string(j) + "," + format_double(u(3 * j)) + "," +
                format_double(u(3 * j + 1)) + "," + format_double(u(3 * j + 2)) + "\n";
      zmax = std::max(zmax, std::abs(u(3 * j + 2)));
    }
    diagram += pi + "," + mu + "," + format_double((u - poly).lpNorm<Eigen::Infinity>()) + "," +
               format_double(zmax) + "," + to_string(report.points[i].status) + "\n";
  }
  out.files.push_back(dir / (stem + "_coords.csv"));
  write_text(out.files.back(), coords);
  out.files.push_back(dir / (stem + "_diagram.csv"));
  write_text(out.files.back(), diagram);

  std::vector<std::size_t> nonres;
  for (std::size_t i = 0; i < f.spectra.size(); ++i)
    if (f.spectra[i] && f.spectra[i]->best()) nonres.push_back(i);
  if (nonres.empty()) {
    out.notices.push_back("no point carries a nonresonant spectral certificate; trajectory export skipped");
    return out;
  }
  const auto want = std::min<std::size_t>(nonres.size(), static_cast<std::size_t>(options.max_trajectory_points));
  std::vector<std::size_t> chosen;
  for (std::size_t j = 0; j < want; ++j) {
    const std::size_t at = want == 1 ? 0 : j * (nonres.size() - 1) / (want - 1);
    if (chosen.empty() || chosen.back() != nonres[at]) chosen.push_back(nonres[at]);
  }
  const auto d = static_cast<Eigen::Index>(3 * b.spec.n);
  for (std::size_t i : chosen) {
    const BranchPoint& p = b.points[i];
    const Configuration c{layout.lift(p.x()), p.mu()};
    const auto pairs = numeric_spectrum(linearization(c));
    const auto& cands = f.spectra[i]->candidates;
    for (std::size_t ci = 0; ci < cands.size(); ++ci) {
      if (!cands[ci].nonresonant) continue;
      const double nu0 = cands[ci].nu0.mid();
      const EigenPair* best = nullptr;
      for (const auto& e : pairs)
        if (!e.zero_mode && (!best || std::abs(e.lambda - std::complex<double>(0.0, nu0)) <
                                          std::abs(best->lambda - std::complex<double>(0.0, nu0))))
          best = &e;
      const Eigen::VectorXcd w = best->v.head(d);
      const auto traj = normal_mode_expansion(c, nu0, w / w.cwiseAbs().maxCoeff(), options.amplitude, options.samples);
      std::string csv = "x,y,z\n";
      for (const auto& cfg : traj)
        for (int j = 0; j < b.spec.n; ++j)
          csv += format_double(cfg.u(3 * j)) + "," + format_double(cfg.u(3 * j + 1)) + "," +
                 format_double(cfg.u(3 * j + 2)) + "\n";
      out.files.push_back(dir / (stem + "_traj_p" + std::to_string(i) + "_c" + std::to_string(ci) + ".csv"));
      write_text(out.files.back(), csv);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

AuditReport audit_branch(const BranchFile& f) {
  AuditReport rep;
  const ReducedLayout layout(f.branch.spec.n, f.branch.spec.family);
  for (std::size_t i = 0; i < f.branch.points.size(); ++i) {
    const BranchPoint& p = f.branch.points[i];
    if (!p.certified()) continue;
    ++rep.checked;
    const Certificate& stored = *p.cert;
    AuditEntry e{i, false, ""};
    try {
      CertificationProblem prob = equilibrium_problem(layout, p.x(), p.mu());
      prob.r_star = stored.r_star;
      const double y = bound_Y(prob);
      const double z = bound_Z(prob);
      if (y != stored.Y)
        e.reason = "Y mismatch: stored " + format_double(stored.Y) + ", recomputed " + format_double(y);
      else if (z != stored.Z)
        e.reason = "Z mismatch: stored " + format_double(stored.Z) + ", recomputed " + format_double(z);
      else if (!stored.r0 || !radii_polynomial_negative(y, z, *stored.r0, stored.r_star))
        e.reason = "p(r0) < 0 does not hold";
      else
        e.ok = true;
    } catch (const std::exception& ex) {
      e.reason = ex.what();
    }
    if (!e.ok) rep.failures.push_back(std::move(e));
  }
  return rep;
}

AuditReport cmd_verify(const std::filesystem::path& branch_file) {
  const AuditReport rep = audit_branch(read_branch_file(branch_file));
  if (!rep.ok()) {
    std::string msg = std::to_string(rep.failures.size()) + " of " + std::to_string(rep.checked) +
                      " certificates failed re-audit in " + branch_file.string();
    for (const auto& e : rep.failures) msg += "\n  point " + std::to_string(e.index) + ": " + e.reason;
    throw IntegrityError(msg);
  }
  return rep;
}

}  // namespace coulomb
