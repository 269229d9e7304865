#pragma once

// Versioned text format for traced branches. Every double is written in its
// shortest round-trip decimal form, so parse(serialize(b)) reproduces the
// exact bits and serialize(parse(text)) == text for files we wrote.
//
//   coulomb-branch 1
//   n <n> k <k> family <1|2> direction <plus|minus>
//   termination <name>
//   points <count>
//   point <i>
//   U <values...>
//   tangent <values...>
//   step <ds> flags <bits>
//   cert none | cert <Y> <Z> <r0|none> <r_star> <0|1>
//   diag <text to end of line>
//   spectral none | spectral <status> <kernel_ok> <unstable_count>
//   disks <count> <re im radius multiplicity>...
//   candidates <count> <pos neg nu0_lo nu0_hi nonresonant max_l>...
//   sdiag <text to end of line>
//   end

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "coulomb/continuation.hpp"
#include "coulomb/spectra.hpp"

namespace coulomb {

inline constexpr int kBranchFormatVersion = 1;

struct BranchFile {
  Branch branch;
  // One entry per branch point; empty when spectra were not computed.
  std::vector<std::optional<SpectralResult>> spectra;
};

std::string serialize(const BranchFile& f);
// Throws IntegrityError on malformed or truncated input.
BranchFile parse_branch(const std::string& text);

void write_branch_file(const std::filesystem::path& path, const BranchFile& f);
BranchFile read_branch_file(const std::filesystem::path& path);

// Configuration record:
//   coulomb-configuration 1
//   n <n> family <1|2> mu <mu>
//   u <3n values>
std::string serialize(const ReducedPoint& p);
// Throws IntegrityError on malformed input, SymmetryError if the coordinates
// leave the family's fixed-point space.
ReducedPoint parse_configuration(const std::string& text);

// Shortest round-trip decimal.
std::string format_double(double x);
// Throws IntegrityError unless the whole token is a number.
double parse_double(const std::string& token);

}  // namespace coulomb
