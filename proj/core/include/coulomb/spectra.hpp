#pragma once

// Certified eigenvalue disks for the linearization L at a certified
// equilibrium, the imaginary pair +-i nu0 and the nonresonance test
// {i l nu0 : l >= 2} missing every disk.

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "coulomb/continuation.hpp"
#include "coulomb/interval_linalg.hpp"

namespace coulomb {

struct EigenPair {
  std::complex<double> lambda;
  Eigen::VectorXcd v;
  int anchor = 0;  // index of the largest-magnitude entry of v
  std::complex<double> anchor_value;
  bool zero_mode = false;

  // Picks the anchor; throws DomainError on a zero or non-finite vector.
  static EigenPair make(std::complex<double> lambda, Eigen::VectorXcd v);
};

struct Disk {
  std::complex<double> center;
  double radius = 0.0;
  // Number of eigenvalues (with algebraic multiplicity) inside.
  int multiplicity = 1;

  Disk() = default;
  // Throws DomainError unless radius > 0, multiplicity >= 1 and everything is finite.
  Disk(std::complex<double> c, double r, int multiplicity = 1);

  Disk negated() const { return {-center, radius, multiplicity}; }
  Disk conjugated() const { return {std::conj(center), radius, multiplicity}; }
  // z -> -conj(z), the reflection through the imaginary axis.
  Disk reflected() const { return {-std::conj(center), radius, multiplicity}; }
};

// Rigorous geometry: "certainly" predicates never err on the unsafe side.
bool certainly_disjoint(const Disk& a, const Disk& b);
bool certainly_excludes(const Disk& d, std::complex<double> z);
// Does the disk certainly miss the set i * [t.lo, t.hi]?
bool certainly_misses_imaginary(const Disk& d, const Interval& t);

struct SpectralCertificate {
  Interval nu0{0.0};
  Disk disk_pos;
  Disk disk_neg;
  std::vector<Disk> others;
  int zero_count = 2;
  bool nonresonant = false;
  int max_multiple_checked = 0;
};

// Dense eigendecomposition; pairs sorted by |Im| then Re, with the two
// smallest-magnitude eigenvalues flagged as the rotational zero modes.
std::vector<EigenPair> numeric_spectrum(const Eigen::MatrixXd& L);

// Certifies the realified map F(a, b, alpha, beta) = (L v - lambda v,
// v_anchor - anchor_value) with v = a + ib, lambda = alpha + i beta.
// r_star <= 0 selects the default radius policy. Every matrix in the interval
// L has exactly one eigenvalue in the returned disk whose eigenvector matches
// the phase condition. Throws EigValidationFailed.
Disk validate_eigenpair(const IntervalMatrix& L, const EigenPair& pair, double r_star = 0.0);
Disk validate_eigenpair(const Eigen::MatrixXd& L, const EigenPair& pair, double r_star = 0.0);

// Gershgorin discs of X^-1 L X, X the numerical eigenvector basis with the two
// zero-mode columns replaced by a kernel vector and a scaled generalized
// kernel vector. A connected component of k discs holds exactly k eigenvalues
// of every matrix in L.
struct GershgorinCluster {
  std::vector<std::size_t> members;  // indices into the pairs
  Disk disk;                         // encloses the component, multiplicity k
  std::vector<Disk> discs;           // the member discs, same order
};
struct GershgorinEnclosure {
  std::vector<GershgorinCluster> clusters;
  std::size_t zero_cluster = 0;  // holds exactly the two zero modes
};
// Empty if X is not shown invertible or the zero modes do not form their
// own component.
std::optional<GershgorinEnclosure> gershgorin_enclosure(const IntervalMatrix& L, const std::vector<EigenPair>& pairs);

// Given the unique eigenvalue in d_pos and the symmetry lambda -> -conj(lambda)
// of the spectrum, shows it lies on the imaginary axis. `others` must hold the
// remaining certified disks so that -conj(d_pos) can be shown to hit nothing
// else. Returns the enclosure of nu0. Throws PromotionFailed.
Interval purely_imaginary_promotion(const Disk& d_pos, const Disk& d_neg, const std::vector<Disk>& others = {});

// Sets nonresonant and max_multiple_checked; returns nonresonant.
bool check_nonresonance(SpectralCertificate& cert);

enum class PointStatus { CertifiedNonresonant, EigUnverified, NonresonanceUnverified, EquilibriumUnverified };
std::string to_string(PointStatus s);
PointStatus point_status_from_string(const std::string& s);

struct SpectralCandidate {
  std::size_t pos = 0;  // indices into SpectralResult::disks
  std::size_t neg = 0;
  Interval nu0{0.0};
  bool nonresonant = false;
  int max_multiple_checked = 0;
};

struct SpectralResult {
  PointStatus status = PointStatus::EquilibriumUnverified;
  // Validated disks in numeric_spectrum order, zero modes excluded.
  std::vector<Disk> disks;
  bool kernel_ok = false;
  std::vector<SpectralCandidate> candidates;
  // Disks certainly in the open right half plane (diagnostic only).
  int unstable_count = 0;
  std::string diagnostics;

  const SpectralCandidate* best() const;
};

SpectralCertificate certificate_for(const SpectralResult& r, const SpectralCandidate& c);

// Full procedure for a configuration box u_box containing the equilibrium,
// with u_mid its numerical centre.
SpectralResult spectral_pipeline(const IntervalVector& u_box, const Eigen::VectorXd& u_mid, double mu,
                                 int threads = 1);
// Uses the point's certificate; an uncertified point gives EquilibriumUnverified.
SpectralResult spectral_pipeline(const ProblemSpec& spec, const BranchPoint& p, int threads = 1);

}  // namespace coulomb
