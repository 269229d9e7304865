#include "coulomb/spectra.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

#include "coulomb/certifier.hpp"
#include "coulomb/errors.hpp"

namespace coulomb {
namespace {

Interval dist(std::complex<double> a, std::complex<double> b) {
  const Interval dx = Interval(a.real()) - Interval(b.real());
  const Interval dy = Interval(a.imag()) - Interval(b.imag());
  return sqrt(sqr(dx) + sqr(dy));
}

// Realified eigenproblem: unknowns X = (a, b, alpha, beta).
struct EigSystem {
  const IntervalMatrix& L;
  Eigen::MatrixXd Lmid;
  int anchor;
  double cre, cim;
  std::size_t m;

  IntervalVector f(const IntervalVector& x) const {
    IntervalVector a(m), b(m);
    for (std::size_t i = 0; i < m; ++i) {
      a[i] = x[i];
      b[i] = x[m + i];
    }
    const Interval& alpha = x[2 * m];
    const Interval& beta = x[2 * m + 1];
    const IntervalVector la = L * a;
    const IntervalVector lb = L * b;
    IntervalVector out(2 * m + 2);
    for (std::size_t i = 0; i < m; ++i) {
      out[i] = la[i] - alpha * a[i] + beta * b[i];
      out[m + i] = lb[i] - alpha * b[i] - beta * a[i];
    }
    const auto k = static_cast<std::size_t>(anchor);
    out[2 * m] = a[k] - Interval(cre);
    out[2 * m + 1] = b[k] - Interval(cim);
    return out;
  }

  Eigen::VectorXd f(const Eigen::VectorXd& x) const {
    const auto n = static_cast<Eigen::Index>(m);
    const Eigen::VectorXd a = x.head(n), b = x.segment(n, n);
    const double alpha = x(2 * n), beta = x(2 * n + 1);
    Eigen::VectorXd out(2 * n + 2);
    out.head(n) = Lmid * a - alpha * a + beta * b;
    out.segment(n, n) = Lmid * b - alpha * b - beta * a;
    out(2 * n) = a(anchor) - cre;
    out(2 * n + 1) = b(anchor) - cim;
    return out;
  }

  template <class M, class Entry, class V>
  void fill_jacobian(M& j, const Entry& l, const V& x) const {
    const std::size_t two = 2 * m;
    const auto alpha = x(two), beta = x(two + 1);
    for (std::size_t r = 0; r < m; ++r) {
      for (std::size_t c = 0; c < m; ++c) {
        j(r, c) = l(r, c);
        j(m + r, m + c) = l(r, c);
      }
      j(r, r) = j(r, r) - alpha;
      j(m + r, m + r) = j(m + r, m + r) - alpha;
      j(r, m + r) = beta;
      j(m + r, r) = -beta;
      j(r, two) = -x(r);
      j(r, two + 1) = x(m + r);
      j(m + r, two) = -x(m + r);
      j(m + r, two + 1) = -x(r);
    }
    const auto k = static_cast<std::size_t>(anchor);
    j(two, k) = 1.0;
    j(two + 1, m + k) = 1.0;
  }

  IntervalMatrix df(const IntervalVector& x) const {
    IntervalMatrix j(2 * m + 2, 2 * m + 2);
    for (std::size_t r = 0; r < 2 * m + 2; ++r)
      for (std::size_t c = 0; c < 2 * m + 2; ++c) j(r, c) = Interval(0.0);
    fill_jacobian(j, [this](std::size_t r, std::size_t c) { return L(r, c); }, x);
    return j;
  }

  Eigen::MatrixXd df(const Eigen::VectorXd& x) const {
    const auto n = static_cast<Eigen::Index>(2 * m + 2);
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
    auto idx = [&j](std::size_t r, std::size_t c) -> double& {
      return j(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    };
    auto xi = [&x](std::size_t i) { return x(static_cast<Eigen::Index>(i)); };
    fill_jacobian(idx, [this](std::size_t r, std::size_t c) {
      return Lmid(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }, xi);
    return j;
  }
};

double default_eig_r_star(double residual) { return default_r_star(residual); }

}  // namespace

EigenPair EigenPair::make(std::complex<double> lambda, Eigen::VectorXcd v) {
  if (v.size() == 0 || !v.allFinite() || !std::isfinite(lambda.real()) || !std::isfinite(lambda.imag()))
    throw DomainError("eigenpair must be finite and non-empty");
  Eigen::Index k = 0;
  v.cwiseAbs().maxCoeff(&k);
  if (std::abs(v(k)) == 0.0) throw DomainError("eigenvector is zero");
  EigenPair p;
  p.lambda = lambda;
  p.anchor = static_cast<int>(k);
  p.anchor_value = v(k);
  p.v = std::move(v);
  return p;
}

Disk::Disk(std::complex<double> c, double r, int mult) : center(c), radius(r), multiplicity(mult) {
  if (!(r > 0.0) || !std::isfinite(r) || !std::isfinite(c.real()) || !std::isfinite(c.imag()))
    throw DomainError("disk needs a finite centre and a positive radius");
  if (mult < 1) throw DomainError("disk multiplicity must be positive");
}

bool certainly_disjoint(const Disk& a, const Disk& b) {
  return dist(a.center, b.center).lo() > (Interval(a.radius) + Interval(b.radius)).hi();
}

bool certainly_excludes(const Disk& d, std::complex<double> z) { return dist(d.center, z).lo() > d.radius; }

bool certainly_misses_imaginary(const Disk& d, const Interval& t) {
  const double y = d.center.imag();
  double dy = 0.0;
  if (y < t.lo())
    dy = (Interval(t.lo()) - Interval(y)).lo();
  else if (y > t.hi())
    dy = (Interval(y) - Interval(t.hi())).lo();
  const Interval dx(std::abs(d.center.real()));
  return sqrt(sqr(dx) + sqr(Interval(std::max(dy, 0.0)))).lo() > d.radius;
}

std::vector<EigenPair> numeric_spectrum(const Eigen::MatrixXd& L) {
  if (L.rows() != L.cols() || L.rows() == 0) throw ShapeError("numeric_spectrum needs a square matrix");
  if (!L.allFinite()) throw DomainError("matrix is not finite");
  const Eigen::EigenSolver<Eigen::MatrixXd> es(L, true);
  if (es.info() != Eigen::Success) throw NumericsError("eigensolver did not converge");
  const Eigen::VectorXcd vals = es.eigenvalues();
  const Eigen::MatrixXcd vecs = es.eigenvectors();
  std::vector<EigenPair> pairs;
  pairs.reserve(static_cast<std::size_t>(vals.size()));
  for (Eigen::Index i = 0; i < vals.size(); ++i) pairs.push_back(EigenPair::make(vals(i), vecs.col(i)));

  std::vector<std::size_t> by_mag(pairs.size());
  for (std::size_t i = 0; i < by_mag.size(); ++i) by_mag[i] = i;
  std::stable_sort(by_mag.begin(), by_mag.end(),
                   [&](std::size_t a, std::size_t b) { return std::abs(pairs[a].lambda) < std::abs(pairs[b].lambda); });
  for (std::size_t i = 0; i < std::min<std::size_t>(2, by_mag.size()); ++i) pairs[by_mag[i]].zero_mode = true;

  std::stable_sort(pairs.begin(), pairs.end(), [](const EigenPair& a, const EigenPair& b) {
    const double ia = std::abs(a.lambda.imag()), ib = std::abs(b.lambda.imag());
    if (ia != ib) return ia < ib;
    if (a.lambda.real() != b.lambda.real()) return a.lambda.real() < b.lambda.real();
    return a.lambda.imag() < b.lambda.imag();
  });
  return pairs;
}

Disk validate_eigenpair(const IntervalMatrix& L, const EigenPair& pair, double r_star) {
  const std::size_t m = L.rows();
  if (L.cols() != m || static_cast<std::size_t>(pair.v.size()) != m) throw ShapeError("eigenpair size mismatch");
  if (pair.anchor < 0 || static_cast<std::size_t>(pair.anchor) >= m) throw ShapeError("anchor out of range");
  const EigSystem sys{L, L.mid(), pair.anchor, pair.anchor_value.real(), pair.anchor_value.imag(), m};

  const auto n = static_cast<Eigen::Index>(m);
  Eigen::VectorXd x(2 * n + 2);
  x.head(n) = pair.v.real();
  x.segment(n, n) = pair.v.imag();
  x(2 * n) = pair.lambda.real();
  x(2 * n + 1) = pair.lambda.imag();

  CertificationProblem prob;
  prob.f_point = [&sys](const Eigen::VectorXd& y) { return sys.f(y); };
  prob.f_interval = [&sys](const IntervalVector& y) { return sys.f(y); };
  prob.df_interval = [&sys](const IntervalVector& y) { return sys.df(y); };
  prob.ubar = x;
  try {
    prob.A = approx_inverse(sys.df(x));
  } catch (const NumericsError& e) {
    throw EigValidationFailed(std::string("eigenpair Jacobian: ") + e.what());
  }
  prob.r_star = r_star > 0.0 ? r_star : default_eig_r_star(sys.f(x).lpNorm<Eigen::Infinity>());
  const Certificate cert = certify_with_retry(std::move(prob));
  if (!cert.success) throw EigValidationFailed("eigenvalue " + std::to_string(pair.lambda.real()) + "+" +
                                               std::to_string(pair.lambda.imag()) + "i: " + cert.diagnostics);
  // The infinity-norm ball bounds real and imaginary parts separately.
  const double radius = (sqrt(Interval(2.0)) * Interval(*cert.r0)).hi();
  return Disk(pair.lambda, radius);
}

Disk validate_eigenpair(const Eigen::MatrixXd& L, const EigenPair& pair, double r_star) {
  return validate_eigenpair(IntervalMatrix(L), pair, r_star);
}

std::optional<GershgorinEnclosure> gershgorin_enclosure(const IntervalMatrix& L, const std::vector<EigenPair>& pairs) {
  const std::size_t m = L.rows();
  if (L.cols() != m || pairs.size() != m) throw ShapeError("gershgorin_enclosure: size mismatch");
  std::vector<std::size_t> zeros;
  for (std::size_t i = 0; i < m; ++i) {
    if (static_cast<std::size_t>(pairs[i].v.size()) != m) throw ShapeError("gershgorin_enclosure: vector size");
    if (pairs[i].zero_mode) zeros.push_back(i);
  }
  if (zeros.size() != 2) throw ShapeError("gershgorin_enclosure: expected two zero modes");

  const auto n = static_cast<Eigen::Index>(m);
  auto at = [](std::size_t i) { return static_cast<Eigen::Index>(i); };
  Eigen::MatrixXcd X(n, n);
  for (std::size_t i = 0; i < m; ++i) X.col(at(i)) = pairs[i].v;

  // The numerical zero-mode vectors are nearly parallel (Jordan block), so
  // use the kernel vector x1 and a solution of L x2 = x1 instead.
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(L.mid(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd x1 = svd.matrixV().col(n - 1);
  Eigen::VectorXd x2 = Eigen::VectorXd::Zero(n);
  for (Eigen::Index k = 0; k + 1 < n; ++k)
    if (svd.singularValues()(k) > 0.0)
      x2 += svd.matrixV().col(k) * (svd.matrixU().col(k).dot(x1) / svd.singularValues()(k));
  x2 -= x1.dot(x2) * x1;
  if (!(x2.norm() > 0.0) || !x2.allFinite()) x2 = svd.matrixV().col(n - 2);
  x2.normalize();
  X.col(at(zeros[0])) = x1.cast<std::complex<double>>();
  X.col(at(zeros[1])) = x2.cast<std::complex<double>>();

  const Eigen::FullPivLU<Eigen::MatrixXcd> lu(X);
  if (!lu.isInvertible()) return std::nullopt;
  const Eigen::MatrixXcd Y = lu.inverse();
  if (!Y.allFinite()) return std::nullopt;

  const Eigen::MatrixXd Xr = X.real(), Xi = X.imag(), Yr = Y.real(), Yi = Y.imag();
  const IntervalMatrix Xr_i(Xr), Xi_i(Xi);
  const IntervalMatrix P = L * Xr_i, Q = L * Xi_i;
  // B = Y L X and E = I - Y X, real and imaginary parts.
  const IntervalMatrix Br = mul_midrad(Yr, P) - mul_midrad(Yi, Q);
  const IntervalMatrix Bi = mul_midrad(Yr, Q) + mul_midrad(Yi, P);
  const IntervalMatrix Er = IntervalMatrix::identity(m) - (mul_midrad(Yr, Xr_i) - mul_midrad(Yi, Xi_i));
  const IntervalMatrix Ei = IntervalMatrix(Eigen::MatrixXd::Zero(n, n)) - (mul_midrad(Yr, Xi_i) + mul_midrad(Yi, Xr_i));

  auto mag = [](const Interval& re, const Interval& im) { return abs(ComplexInterval{re, im}).hi(); };
  double eta = 0.0, beta = 0.0;
  Eigen::MatrixXd G(n, n);
  for (std::size_t i = 0; i < m; ++i) {
    Interval se(0.0), sb(0.0);
    for (std::size_t j = 0; j < m; ++j) {
      se = se + Interval(mag(Er(i, j), Ei(i, j)));
      G(at(i), at(j)) = mag(Br(i, j), Bi(i, j));
      sb = sb + Interval(G(at(i), at(j)));
    }
    eta = std::max(eta, se.hi());
    beta = std::max(beta, sb.hi());
  }
  if (!(eta < 1.0)) return std::nullopt;
  // X^-1 L X = (I - E)^-1 B differs from B by at most delta in row sums.
  const double delta = (Interval(eta) * Interval(beta) / (Interval(1.0) - Interval(eta))).hi();

  std::vector<std::complex<double>> centre(m);
  std::vector<double> own(m);
  for (std::size_t i = 0; i < m; ++i) {
    centre[i] = {Br(i, i).mid(), Bi(i, i).mid()};
    own[i] = mag(Br(i, i) - Interval(centre[i].real()), Bi(i, i) - Interval(centre[i].imag()));
  }

  // Diagonal scaling of the generalized kernel column balances the two
  // zero-mode rows: eps |c| against (row sum of z2) / eps.
  const std::size_t z1 = zeros[0], z2 = zeros[1];
  std::vector<double> d(m, 1.0);
  {
    double rest = own[z2] + delta;
    for (std::size_t j = 0; j < m; ++j)
      if (j != z2) rest += G(at(z2), at(j));
    const double coupling = G(at(z1), at(z2));
    if (coupling > 0.0) d[z2] = std::clamp(std::sqrt(rest / coupling), 1e-150, 1.0);
  }

  std::vector<Disk> discs;
  discs.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    Interval r = Interval(own[i]) + Interval(delta) / Interval(d[i]);
    for (std::size_t j = 0; j < m; ++j)
      if (j != i) r = r + Interval(G(at(i), at(j))) * Interval(d[j]) / Interval(d[i]);
    if (!std::isfinite(r.hi()) || !std::isfinite(centre[i].real()) || !std::isfinite(centre[i].imag()))
      return std::nullopt;
    discs.emplace_back(centre[i], std::max(r.hi(), std::numeric_limits<double>::denorm_min()));
  }

  std::vector<std::size_t> root(m);
  for (std::size_t i = 0; i < m; ++i) root[i] = i;
  auto find = [&root](std::size_t i) {
    while (root[i] != i) i = root[i] = root[root[i]];
    return i;
  };
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      if (!certainly_disjoint(discs[i], discs[j])) root[std::max(find(i), find(j))] = std::min(find(i), find(j));

  GershgorinEnclosure out;
  std::vector<std::ptrdiff_t> slot(m, -1);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t r = find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<std::ptrdiff_t>(out.clusters.size());
      out.clusters.emplace_back();
    }
    auto& c = out.clusters[static_cast<std::size_t>(slot[r])];
    c.members.push_back(i);
    c.discs.push_back(discs[i]);
  }
  for (auto& c : out.clusters) {
    if (c.members.size() == 1) {
      c.disk = c.discs.front();
      continue;
    }
    std::complex<double> mean = 0.0;
    for (const Disk& q : c.discs) mean += q.center;
    mean /= static_cast<double>(c.discs.size());
    double rad = 0.0;
    for (const Disk& q : c.discs) rad = std::max(rad, (dist(mean, q.center) + Interval(q.radius)).hi());
    c.disk = Disk(mean, rad, static_cast<int>(c.members.size()));
  }
  out.zero_cluster = static_cast<std::size_t>(slot[find(z1)]);
  const auto& zc = out.clusters[out.zero_cluster].members;
  if (zc.size() != 2 || find(z2) != find(z1)) return std::nullopt;
  return out;
}

Interval purely_imaginary_promotion(const Disk& d_pos, const Disk& d_neg, const std::vector<Disk>& others) {
  if (!certainly_excludes(d_pos, 0.0)) throw PromotionFailed("disk contains 0");
  if (!(d_pos.center.imag() > 0.0) || !((Interval(d_pos.center.imag()) - Interval(d_pos.radius)).lo() > 0.0))
    throw PromotionFailed("disk meets the real axis");
  if (certainly_disjoint(d_pos, d_pos.reflected())) throw PromotionFailed("disk misses its reflection");
  if (certainly_disjoint(d_neg, d_pos.conjugated())) throw PromotionFailed("negative disk does not mirror the positive one");
  if (!certainly_disjoint(d_pos, d_neg)) throw PromotionFailed("disk meets its conjugate partner");
  const Disk refl = d_pos.reflected();
  if (!certainly_disjoint(refl, d_neg)) throw PromotionFailed("reflected disk meets another disk");
  for (const Disk& o : others) {
    if (!certainly_disjoint(d_pos, o)) throw PromotionFailed("disk meets another disk");
    if (!certainly_disjoint(refl, o)) throw PromotionFailed("reflected disk meets another disk");
  }
  return Interval(d_pos.center.imag()) + Interval(-d_pos.radius, d_pos.radius);
}

bool check_nonresonance(SpectralCertificate& cert) {
  cert.nonresonant = false;
  cert.max_multiple_checked = 0;
  if (!(cert.nu0.lo() > 0.0)) return false;
  if (!certainly_disjoint(cert.disk_pos, cert.disk_neg)) return false;
  for (const Disk& o : cert.others)
    if (!certainly_disjoint(cert.disk_pos, o)) return false;

  Interval reach(0.0);
  auto extend = [&reach](const Disk& d) {
    reach = Interval(std::max(reach.hi(), (abs(ComplexInterval{Interval(d.center.real()), Interval(d.center.imag())}) +
                                           Interval(d.radius)).hi()));
  };
  extend(cert.disk_pos);
  extend(cert.disk_neg);
  for (const Disk& o : cert.others) extend(o);
  const double bound = std::ceil((reach / Interval(cert.nu0.lo())).hi()) + 1.0;
  if (!(bound < 1e7)) return false;
  const int l_max = std::max(2, static_cast<int>(bound));

  for (int l = 2; l <= l_max; ++l) {
    const Interval t = Interval(static_cast<double>(l)) * cert.nu0;
    cert.max_multiple_checked = l;
    if (!certainly_misses_imaginary(cert.disk_pos, t) || !certainly_misses_imaginary(cert.disk_neg, t)) return false;
    for (const Disk& o : cert.others)
      if (!certainly_misses_imaginary(o, t)) return false;
  }
  cert.nonresonant = true;
  return true;
}

std::string to_string(PointStatus s) {
  switch (s) {
    case PointStatus::CertifiedNonresonant: return "certified_nonresonant";
    case PointStatus::EigUnverified: return "eig_unverified";
    case PointStatus::NonresonanceUnverified: return "nonresonance_unverified";
    case PointStatus::EquilibriumUnverified: return "equilibrium_unverified";
  }
  return "equilibrium_unverified";
}

PointStatus point_status_from_string(const std::string& s) {
  for (auto st : {PointStatus::CertifiedNonresonant, PointStatus::EigUnverified, PointStatus::NonresonanceUnverified,
                  PointStatus::EquilibriumUnverified})
    if (to_string(st) == s) return st;
  throw DomainError("unknown point status '" + s + "'");
}

const SpectralCandidate* SpectralResult::best() const {
  for (const auto& c : candidates)
    if (c.nonresonant) return &c;
  return nullptr;
}

SpectralCertificate certificate_for(const SpectralResult& r, const SpectralCandidate& c) {
  SpectralCertificate cert;
  cert.nu0 = c.nu0;
  cert.disk_pos = r.disks.at(c.pos);
  cert.disk_neg = r.disks.at(c.neg);
  for (std::size_t i = 0; i < r.disks.size(); ++i)
    if (i != c.pos && i != c.neg) cert.others.push_back(r.disks[i]);
  cert.nonresonant = c.nonresonant;
  cert.max_multiple_checked = c.max_multiple_checked;
  return cert;
}

SpectralResult spectral_pipeline(const IntervalVector& u_box, const Eigen::VectorXd& u_mid, double mu, int threads) {
  SpectralResult res;
  res.status = PointStatus::EigUnverified;
  IntervalMatrix L;
  std::vector<EigenPair> pairs;
  try {
    L = linearization(u_box, mu);
    pairs = numeric_spectrum(linearization(Configuration{u_mid, mu}));
    res.kernel_ok = (hess_V(u_box, mu) * symmetry::orbit_generator(u_box)).contains_zero();
  } catch (const std::exception& e) {
    res.diagnostics = e.what();
    return res;
  }

  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < pairs.size(); ++i)
    if (!pairs[i].zero_mode) todo.push_back(i);

  // Clustered eigenvalues get a radius well below their separation.
  std::vector<double> r_star(todo.size(), 0.0);
  for (std::size_t a = 0; a < todo.size(); ++a) {
    double sep = std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < pairs.size(); ++b)
      if (b != todo[a]) sep = std::min(sep, std::abs(pairs[todo[a]].lambda - pairs[b].lambda));
    if (sep < 4.0e-6) r_star[a] = std::max(sep / 8.0, 1e-14);
  }

  std::vector<std::optional<Disk>> disks(todo.size());
  std::vector<std::string> errors(todo.size());
  auto work = [&](std::size_t a) {
    try {
      disks[a] = validate_eigenpair(L, pairs[todo[a]], r_star[a]);
    } catch (const std::exception& e) {
      errors[a] = e.what();
    }
  };
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1) {
    for (std::size_t a = 0; a < todo.size(); ++a) work(a);
  } else {
    std::vector<std::future<void>> jobs;
    for (std::size_t w = 0; w < workers; ++w)
      jobs.push_back(std::async(std::launch::async, [&, w] {
        for (std::size_t a = w; a < todo.size(); a += workers) work(a);
      }));
    for (auto& j : jobs) j.get();
  }

  std::size_t failed = 0;
  std::string first_error;
  for (std::size_t a = 0; a < todo.size(); ++a)
    if (!disks[a] && failed++ == 0) first_error = errors[a];

  std::optional<GershgorinEnclosure> gersh;
  try {
    gersh = gershgorin_enclosure(L, pairs);
  } catch (const std::exception&) {
  }

  if (gersh) {
    // Within a component of k discs the k Newton-Kantorovich disks are kept
    // when they are pairwise disjoint and miss every other component: each
    // then holds exactly one eigenvalue. Otherwise the component disk is used.
    std::vector<std::ptrdiff_t> slot(pairs.size(), -1);
    for (std::size_t a = 0; a < todo.size(); ++a) slot[todo[a]] = static_cast<std::ptrdiff_t>(a);
    const auto& clusters = gersh->clusters;
    for (std::size_t c = 0; c < clusters.size(); ++c) {
      if (c == gersh->zero_cluster) continue;
      std::vector<Disk> sharp;
      for (std::size_t idx : clusters[c].members) {
        const std::ptrdiff_t a = slot[idx];
        if (a < 0 || !disks[static_cast<std::size_t>(a)]) break;
        sharp.push_back(*disks[static_cast<std::size_t>(a)]);
      }
      bool usable = sharp.size() == clusters[c].members.size();
      for (std::size_t i = 0; usable && i < sharp.size(); ++i) {
        for (std::size_t j = i + 1; j < sharp.size(); ++j) usable = usable && certainly_disjoint(sharp[i], sharp[j]);
        for (std::size_t o = 0; usable && o < clusters.size(); ++o)
          if (o != c)
            for (const Disk& q : clusters[o].discs) usable = usable && certainly_disjoint(sharp[i], q);
      }
      if (usable)
        res.disks.insert(res.disks.end(), sharp.begin(), sharp.end());
      else
        res.disks.push_back(clusters[c].disk);
    }
  } else {
    for (std::size_t a = 0; a < todo.size(); ++a)
      if (disks[a]) res.disks.push_back(*disks[a]);
  }
  for (const Disk& d : res.disks)
    if ((Interval(d.center.real()) - Interval(d.radius)).lo() > 0.0) res.unstable_count += d.multiplicity;
  if (!gersh && failed > 0) {
    res.diagnostics = std::to_string(failed) + " eigenpair(s) not validated; first: " + first_error;
    return res;
  }
  if (!res.kernel_ok) {
    res.diagnostics = "orbit direction not in the kernel enclosure";
    return res;
  }
  // Counting: disjoint disks away from 0 whose multiplicities add up to
  // 6n - 2, plus the double zero, account for the whole spectrum.
  std::size_t total = 0;
  for (const Disk& d : res.disks) total += static_cast<std::size_t>(d.multiplicity);
  if (total != todo.size()) {
    res.diagnostics = "disks account for " + std::to_string(total) + " of " + std::to_string(todo.size()) +
                      " eigenvalues";
    return res;
  }
  for (std::size_t i = 0; i < res.disks.size(); ++i) {
    if (!certainly_excludes(res.disks[i], 0.0)) {
      res.diagnostics = "a disk contains 0";
      return res;
    }
    for (std::size_t j = i + 1; j < res.disks.size(); ++j)
      if (!certainly_disjoint(res.disks[i], res.disks[j])) {
        res.diagnostics = "disks overlap";
        return res;
      }
  }

  // Only disks holding a single eigenvalue can carry the imaginary pair.
  for (std::size_t i = 0; i < res.disks.size(); ++i) {
    const Disk& d = res.disks[i];
    if (d.multiplicity != 1 || !(d.center.imag() > 0.0) || std::abs(d.center.real()) > d.radius) continue;
    std::size_t neg = i;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < res.disks.size(); ++j) {
      const double e = std::abs(res.disks[j].center - std::conj(d.center));
      if (j != i && res.disks[j].multiplicity == 1 && e < best) {
        best = e;
        neg = j;
      }
    }
    if (neg == i) continue;
    std::vector<Disk> others;
    for (std::size_t j = 0; j < res.disks.size(); ++j)
      if (j != i && j != neg) others.push_back(res.disks[j]);
    SpectralCandidate cand{i, neg};
    try {
      cand.nu0 = purely_imaginary_promotion(d, res.disks[neg], others);
    } catch (const PromotionFailed&) {
      continue;
    }
    SpectralCertificate cert{cand.nu0, d, res.disks[neg], std::move(others)};
    check_nonresonance(cert);
    cand.nonresonant = cert.nonresonant;
    cand.max_multiple_checked = cert.max_multiple_checked;
    res.candidates.push_back(cand);
  }
  if (res.best()) {
    res.status = PointStatus::CertifiedNonresonant;
    res.diagnostics = "ok";
  } else {
    res.status = PointStatus::NonresonanceUnverified;
    res.diagnostics = res.candidates.empty() ? "no certified imaginary pair" : "every imaginary pair is resonant";
  }
  return res;
}

SpectralResult spectral_pipeline(const ProblemSpec& spec, const BranchPoint& p, int threads) {
  if (!p.certified()) {
    SpectralResult res;
    res.diagnostics = "equilibrium not certified";
    return res;
  }
  const ReducedLayout layout(spec.n, spec.family);
  const IntervalVector box = layout.lift(IntervalVector::ball(p.x(), *p.cert->r0));
  return spectral_pipeline(box, layout.lift(p.x()), p.mu(), threads);
}

}  // namespace coulomb
