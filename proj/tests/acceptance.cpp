// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "coulomb/orchestrator.hpp"
#include "oracle.hpp"

using namespace coulomb;
using oracle::Big;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Panel {
  int n, k;
  Family family;
};

const std::vector<Panel> kPanels = {
    {5, 2, Family::One}, {7, 2, Family::One}, {7, 3, Family::One}, {8, 3, Family::One},
    {8, 4, Family::One}, {9, 3, Family::One}, {9, 4, Family::One}, {10, 2, Family::One},
    {5, 2, Family::Two}, {7, 2, Family::Two}, {7, 3, Family::Two}, {8, 2, Family::Two},
    {8, 3, Family::Two}, {9, 3, Family::Two}, {9, 4, Family::Two}, {10, 2, Family::Two},
};

std::string name(const Panel& p) {
  return "(" + std::to_string(p.n) + "," + std::to_string(p.k) + ",F" + std::to_string(static_cast<int>(p.family)) +
         ")";
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

// Traced and certified branches of every panel, both directions.
struct PanelRun {
  Panel panel;
  Branch plus, minus;
};

std::vector<PanelRun>& panel_runs() {
  static std::vector<PanelRun> runs = [] {
    std::vector<PanelRun> out;
    for (const Panel& p : kPanels) {
      const auto spec = ProblemSpec::make(p.n, p.k, p.family);
      PanelRun r{p, trace_branch(spec, Direction::Plus), trace_branch(spec, Direction::Minus)};
      certify_branch(r.plus, 2);
      certify_branch(r.minus, 2);
      out.push_back(std::move(r));
    }
    return out;
  }();
  return runs;
}

double max_abs_z(const Branch& b, const BranchPoint& p) {
  const Eigen::VectorXd u = ReducedLayout(b.spec.n, b.spec.family).lift(p.x());
  double z = 0.0;
  for (int j = 0; j < b.spec.n; ++j) z = std::max(z, std::abs(u(3 * j + 2)));
  return z;
}

// ---------------------------------------------------------------------------

Outcome threshold() {
  const SkTable t = cmd_sk(3, 473, true);
  int bad = 0;
  for (int n = 3; n <= 472; ++n) bad += t.s1_vs_n.at(n) != Comparison::Less;
  const bool top = t.s1_vs_n.at(473) == Comparison::Greater;
  const Interval s472 = s1_enclosure(472), s473 = s1_enclosure(473);
  return {bad == 0 && top, std::to_string(470 - bad) + "/470 certified s1(n) < n for n<=472; s1(473) in [" +
                               fmt(s473.lo()) + ", " + fmt(s473.hi()) + "] " + (top ? ">" : "not >") +
                               " 473; s1(472) <= " + fmt(s472.hi())};
}

Outcome polygon_identity() {
  int cases = 0, bad = 0;
  for (int n = 3; n <= 12; ++n)
    for (double mu : {0.5, 1.0, 2.5, 7.0, 40.0}) {
      ++cases;
      bad += !grad_V(polygon_enclosure(n), mu).contains_zero();
    }
  return {bad == 0, std::to_string(cases - bad) + "/" + std::to_string(cases) + " enclosures contain 0"};
}

Outcome hessian_structure() {
  double worst = 0.0, worst_kernel = 0.0;
  for (int n = 3; n <= 12; ++n)
    for (double mu : {0.8, 3.0}) {
      const Eigen::MatrixXd h = hess_V(polygon(n, mu));
      for (int k = 0; k < n; ++k)
        for (bool sine : {false, true}) {
          const Eigen::VectorXd v = mode_vector(n, k, sine);
          worst = std::max(worst, (h * v - (-mu + s_value(n, k)) * v).lpNorm<Eigen::Infinity>());
        }
      worst_kernel =
          std::max(worst_kernel, (h * symmetry::orbit_generator(polygon(n, mu).u)).lpNorm<Eigen::Infinity>());
    }
  return {worst <= 1e-10 && worst_kernel <= 1e-10,
          "max mode residual " + fmt(worst) + ", orbit residual " + fmt(worst_kernel) + " (tol 1e-10)"};
}

// F_i(x) = sum_j M_ij d_j + B_i d_i^2, d = x - root.
Outcome certifier_soundness() {
  const double ubar = 1.41421356;
  CertificationProblem sq;
  sq.f_point = [](const Eigen::VectorXd& x) { return Eigen::VectorXd::Constant(1, x(0) * x(0) - 2.0); };
  sq.f_interval = [](const IntervalVector& x) { return IntervalVector{sqr(x[0]) - Interval(2.0)}; };
  sq.df_interval = [](const IntervalVector& x) {
    IntervalMatrix m(1, 1);
    m(0, 0) = Interval(2.0) * x[0];
    return m;
  };
  sq.ubar = Eigen::VectorXd::Constant(1, ubar);
  sq.A = Eigen::MatrixXd::Constant(1, 1, 1.0 / (2.0 * ubar));
  sq.r_star = 1e-6;
  const Certificate c = certify(sq);
  const bool sqrt_ok = c.success && *c.r0 <= 1e-7 && abs(sqrt(Big(2.0)) - Big(ubar)).le(*c.r0);

  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int successes = 0, misses = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + trial % 4;
    Eigen::MatrixXd M = 3.0 * Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd B(n), root(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) M(i, j) += u(rng);
      B(i) = 2.0 * u(rng);
      root(i) = 5.0 * u(rng);
    }
    CertificationProblem p;
    p.f_point = [M, B, root](const Eigen::VectorXd& x) {
      const Eigen::VectorXd d = x - root;
      return Eigen::VectorXd(M * d + B.cwiseProduct(d.cwiseProduct(d)));
    };
    p.f_interval = [M, B, root, n](const IntervalVector& x) {
      IntervalVector d(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) d[i] = x[i] - Interval(root(i));
      IntervalVector f = M * d;
      for (int i = 0; i < n; ++i) f[i] = f[i] + Interval(B(i)) * sqr(d[i]);
      return f;
    };
    p.df_interval = [M, B, root, n](const IntervalVector& x) {
      IntervalMatrix m(M);
      for (int i = 0; i < n; ++i) m(i, i) = m(i, i) + Interval(2.0 * B(i)) * (x[i] - Interval(root(i)));
      return m;
    };
    p.ubar = root;
    const double scale = std::pow(10.0, -3 - trial % 9);
    for (int i = 0; i < n; ++i) p.ubar(i) += scale * u(rng);
    p.A = approx_inverse(M);
    p.r_star = default_r_star(scale);
    const Certificate cert = certify(p);
    if (!cert.success) continue;
    ++successes;
    for (int i = 0; i < n; ++i) misses += !abs(Big(p.ubar(i)) - Big(root(i))).le(*cert.r0);
  }
  return {sqrt_ok && misses == 0 && successes >= 900,
          "sqrt2 r0 = " + (c.r0 ? fmt(*c.r0) : std::string("none")) + (sqrt_ok ? " encloses" : " FAILS") +
              "; planted roots: " + std::to_string(successes) + " certified, " + std::to_string(misses) +
              " not enclosed"};
}

Outcome branch_reproduction() {
  std::string bad;
  int min_good = 1 << 30;
  for (const PanelRun& r : panel_runs())
    for (const Branch* b : {&r.plus, &r.minus}) {
      int good = 0;
      for (std::size_t i = 1; i < b->points.size(); ++i) {
        const BranchPoint& p = b->points[i];
        if (p.certified() && *p.cert->r0 < 1e-6 && max_abs_z(*b, p) > 1e-8) ++good;
      }
      min_good = std::min(min_good, good);
      if (good < 20) bad += " " + name(r.panel) + to_string(b->direction) + "=" + std::to_string(good);
    }
  return {bad.empty(), "32 branches, fewest spatial certified points with r0<1e-6: " + std::to_string(min_good) +
                           (bad.empty() ? "" : "; short:" + bad)};
}

Outcome group_structure() {
  std::size_t points = 0, bad = 0;
  double worst_ratio = 0.0;
  for (const PanelRun& r : panel_runs())
    for (const Branch* b : {&r.plus, &r.minus})
      for (const BranchPoint& p : b->points) {
        if (!p.certified()) continue;
        ++points;
        const double d = polygon_group_defect(b->spec, p);
        worst_ratio = std::max(worst_ratio, d / *p.cert->r0);
        bad += d > 2.0 * *p.cert->r0;
      }

  // (8, 4): bodies {0,2,4,6} and {1,3,5,7} form squares at two z-levels.
  std::size_t squares = 0, square_bad = 0;
  for (const PanelRun& r : panel_runs()) {
    if (r.panel.n != 8 || r.panel.k != 4 || r.panel.family != Family::One) continue;
    const ReducedLayout layout(8, Family::One);
    for (const Branch* b : {&r.plus, &r.minus})
      for (std::size_t i = 1; i < b->points.size(); ++i) {
        const BranchPoint& p = b->points[i];
        if (!p.certified()) continue;
        const Eigen::VectorXd u = layout.lift(p.x());
        const double tol = 2.0 * *p.cert->r0;
        bool ok = std::abs(u(2) - u(5)) > tol;
        for (int g = 0; g < 2; ++g) {
          const double rho = u.segment<2>(3 * g).norm(), z = u(3 * g + 2);
          for (int m = 1; m < 4; ++m) {
            const int j = g + 2 * m;
            ok = ok && std::abs(u.segment<2>(3 * j).norm() - rho) <= tol && std::abs(u(3 * j + 2) - z) <= tol;
          }
        }
        ++squares;
        square_bad += !ok;
      }
  }
  return {bad == 0 && square_bad == 0 && squares > 0,
          std::to_string(points - bad) + "/" + std::to_string(points) + " points within 2r0 (max defect/r0 " +
              fmt(worst_ratio) + "); (8,4) two-square structure at " + std::to_string(squares - square_bad) + "/" +
              std::to_string(squares) + " points"};
}

bool closed(const std::vector<Disk>& disks, const std::function<Disk(const Disk&)>& map) {
  for (const Disk& d : disks) {
    const Disk image = map(d);
    bool hit = false;
    for (const Disk& e : disks) hit = hit || (e.multiplicity == image.multiplicity && !certainly_disjoint(image, e));
    if (!hit) return false;
  }
  return true;
}

Outcome spectral_symmetry() {
  std::string short_panels;
  int points = 0, open = 0;
  for (const PanelRun& r : panel_runs()) {
    const Branch& b = r.plus;
    std::vector<std::size_t> certified;
    for (std::size_t i = 1; i < b.points.size(); ++i)
      if (b.points[i].certified()) certified.push_back(i);
    // Walk evenly spaced certified points until ten carry a complete disk set.
    const std::size_t stride = std::max<std::size_t>(1, certified.size() / 25);
    int found = 0;
    for (std::size_t at = stride / 2; at < certified.size() && found < 10; at += stride) {
      const SpectralResult s = spectral_pipeline(b.spec, b.points[certified[at]], 2);
      if (s.status == PointStatus::EigUnverified) continue;
      ++found;
      ++points;
      open += !closed(s.disks, [](const Disk& d) { return d.negated(); }) ||
              !closed(s.disks, [](const Disk& d) { return d.conjugated(); });
    }
    if (found < 10) short_panels += " " + name(r.panel) + "=" + std::to_string(found);
  }
  return {short_panels.empty() && open == 0,
          std::to_string(points - open) + "/" + std::to_string(points) +
              " fully validated points closed under -z and conj(z)" +
              (short_panels.empty() ? "" : "; panels short of 10 points:" + short_panels)};
}

Outcome nonresonance() {
  std::string detail;
  bool pass = true;
  for (const Panel& target : {Panel{8, 4, Family::One}, Panel{9, 3, Family::One}}) {
    const PanelRun* run = nullptr;
    for (const PanelRun& r : panel_runs())
      if (r.panel.n == target.n && r.panel.k == target.k && r.panel.family == target.family) run = &r;
    const Branch& b = run->plus;
    std::optional<std::size_t> hit;
    Interval nu(0.0);
    int tried = 0;
    for (std::size_t i = b.points.size() / 10; i < b.points.size() && !hit && tried < 12; i += b.points.size() / 12) {
      if (!b.points[i].certified()) continue;
      ++tried;
      const SpectralResult s = spectral_pipeline(b.spec, b.points[i], 2);
      const SpectralCandidate* best = s.best();
      if (!best) continue;
      SpectralCertificate cert = certificate_for(s, *best);
      int accounted = 0;
      for (const Disk& d : cert.others) accounted += d.multiplicity;
      if (check_nonresonance(cert) && accounted == 6 * b.spec.n - 4) {
        hit = i;
        nu = cert.nu0;
      }
    }
    pass = pass && hit.has_value();
    detail += name(target) + (hit ? " point " + std::to_string(*hit) + " nu0 in [" + fmt(nu.lo()) + ", " +
                                        fmt(nu.hi()) + "]"
                                  : " none in " + std::to_string(tried) + " tries") +
              "; ";
  }
  return {pass, detail};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome reaudit() {
  const fs::path root = fs::temp_directory_path() / "coulomb_acceptance";
  fs::remove_all(root);
  std::size_t files = 0, audited = 0;
  std::string failures;
  for (const PanelRun& r : panel_runs())
    for (const Branch* b : {&r.plus, &r.minus}) {
      BranchFile f{*b, {}};
      const fs::path path = root / ("branch_" + std::to_string(files++) + ".txt");
      fs::create_directories(root);
      write_branch_file(path, f);
      try {
        audited += cmd_verify(path).checked;
      } catch (const std::exception& e) {
        failures += " " + name(r.panel) + to_string(b->direction);
      }
    }

  int identical = 0, runs = 0;
  for (const Panel& p : {Panel{5, 2, Family::One}, Panel{7, 3, Family::Two}}) {
    RunConfig c;
    c.n = p.n;
    c.k = p.k;
    c.family = p.family;
    c.policy.max_points = 40;
    c.spectra_every = 15;
    c.output_dir = root / "first";
    const RunResult a = cmd_continue(c);
    c.output_dir = root / "second";
    c.threads = 3;
    const RunResult b = cmd_continue(c);
    ++runs;
    identical += slurp(a.report.branch_path) == slurp(b.report.branch_path);
    for (const auto& path : {a.report.branch_path, b.report.branch_path}) {
      ++files;
      try {
        audited += cmd_verify(path).checked;
      } catch (const std::exception& e) {
        failures += " " + path.filename().string();
      }
    }
  }
  fs::remove_all(root);
  return {failures.empty() && identical == runs,
          std::to_string(files) + " branch files, " + std::to_string(audited) + " certificates re-audited" +
              (failures.empty() ? "" : ", failing:" + failures) + "; " + std::to_string(identical) + "/" +
              std::to_string(runs) + " reruns byte-identical"};
}

Outcome isotonicity() {
  std::mt19937_64 rng(2718);
  std::uniform_real_distribution<double> mant(1.0, 2.0), unit(0.0, 1.0);
  std::uniform_int_distribution<int> ex(-8, 8);
  auto scalar = [&] { return (unit(rng) < 0.5 ? -1.0 : 1.0) * std::ldexp(mant(rng), ex(rng)); };
  auto interval = [&] {
    const double a = scalar();
    return Interval(a, a + std::abs(a) * std::pow(unit(rng), 4));
  };
  auto positive = [&] {
    const Interval x = interval();
    return x.lo() > 0 ? x : -x;
  };
  auto inside = [&](const Interval& x) { return std::min(x.hi(), x.lo() + unit(rng) * (x.hi() - x.lo())); };

  const int samples = 10000;
  int violations = 0, ops = 0;
  auto binary = [&](const std::function<Interval(Interval, Interval)>& f, const std::function<Big(Big, Big)>& g,
                    bool nonzero) {
    ++ops;
    for (int i = 0; i < samples; ++i) {
      const Interval a = interval(), b = nonzero ? positive() : interval();
      const Interval r = f(a, b);
      for (const auto& [x, y] : {std::pair{inside(a), inside(b)}, std::pair{a.lo(), b.hi()}, std::pair{a.hi(), b.lo()}})
        violations += !g(Big(x), Big(y)).within(r.lo(), r.hi());
    }
  };
  auto unary = [&](const std::function<Interval(Interval)>& f, const std::function<Big(Big)>& g, bool pos) {
    ++ops;
    for (int i = 0; i < samples; ++i) {
      const Interval a = pos ? positive() : interval();
      const Interval r = f(a);
      for (double x : {inside(a), a.lo(), a.hi()}) violations += !g(Big(x)).within(r.lo(), r.hi());
    }
  };
  binary([](Interval a, Interval b) { return a + b; }, [](Big a, Big b) { return a + b; }, false);
  binary([](Interval a, Interval b) { return a - b; }, [](Big a, Big b) { return a - b; }, false);
  binary([](Interval a, Interval b) { return a * b; }, [](Big a, Big b) { return a * b; }, false);
  binary([](Interval a, Interval b) { return a / b; }, [](Big a, Big b) { return a / b; }, true);
  unary([](Interval a) { return sqr(a); }, [](Big a) { return a * a; }, false);
  unary([](Interval a) { return sqrt(a); }, [](Big a) { return sqrt(a); }, true);
  unary([](Interval a) { return abs(a); }, [](Big a) { return abs(a); }, false);
  unary([](Interval a) { return sin(a); }, [](Big a) { return sin(a); }, false);
  unary([](Interval a) { return cos(a); }, [](Big a) { return cos(a); }, false);
  unary([](Interval a) { return inv_pow3_2(a); }, [](Big a) { return Big(1.0) / (a * sqrt(a)); }, true);
  return {violations == 0, std::to_string(ops) + " operations x " + std::to_string(samples) + " samples, " +
                               std::to_string(violations) + " violations"};
}

}  // namespace

int main() {
  struct Criterion {
    const char* title;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"s1(n) < n for 3 <= n <= 472 and s1(473) > 473", threshold},
      {"grad V at the polygon encloses 0", polygon_identity},
      {"Hessian eigenstructure at the polygon", hessian_structure},
      {"certifier soundness", certifier_soundness},
      {"branch reproduction, 16 panels x 2 directions", branch_reproduction},
      {"polygon-group structure", group_structure},
      {"spectral symmetry of certified disks", spectral_symmetry},
      {"nonresonance on (8,4,F1) and (9,3,F1)", nonresonance},
      {"re-audit and deterministic reruns", reaudit},
      {"interval inclusion isotonicity", isotonicity},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::printf("%s criterion %zu: %s -- %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].title,
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
