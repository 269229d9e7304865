#include "coulomb/branch_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "coulomb/errors.hpp"

namespace coulomb {
namespace {

std::string one_line(std::string s) {
  for (char& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  return s;
}

void put_vector(std::string& out, const char* key, const Eigen::VectorXd& v) {
  out += key;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out += ' ';
    out += format_double(v(i));
  }
  out += '\n';
}

class Reader {
 public:
  explicit Reader(const std::string& text) : in_(text) {}

  // Next line split into whitespace tokens; the first must equal `key`.
  std::vector<std::string> expect(const std::string& key) {
    std::string line;
    if (!std::getline(in_, line)) fail("unexpected end of file, wanted '" + key + "'");
    ++line_no_;
    last_ = line;
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty() || tok[0] != key) fail("expected '" + key + "'");
    return tok;
  }

  // Text after "key " on the next line.
  std::string rest(const std::string& key) {
    expect(key);
    return last_.size() > key.size() ? last_.substr(key.size() + 1) : std::string();
  }

  bool at_end() {
    std::string tail;
    std::getline(in_, tail, '\0');
    return tail.empty();
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw IntegrityError("record line " + std::to_string(line_no_) + ": " + what);
  }

  long integer(const std::string& t) const {
    long v = 0;
    const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
    if (r.ec != std::errc() || r.ptr != t.data() + t.size()) fail("bad integer '" + t + "'");
    return v;
  }

 private:
  std::istringstream in_;
  std::string last_;
  int line_no_ = 0;
};

Eigen::VectorXd get_vector(Reader& r, const char* key, Eigen::Index size) {
  const auto tok = r.expect(key);
  if (static_cast<Eigen::Index>(tok.size()) != size + 1) r.fail(std::string("wrong length for ") + key);
  Eigen::VectorXd v(size);
  for (Eigen::Index i = 0; i < size; ++i) v(i) = parse_double(tok[static_cast<std::size_t>(i + 1)]);
  return v;
}

template <class F>
auto guarded(Reader& r, F&& f) {
  try {
    return f();
  } catch (const IntegrityError&) {
    throw;
  } catch (const std::exception& e) {
    r.fail(e.what());
  }
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

double parse_double(const std::string& token) {
  double v = 0.0;
  const auto r = std::from_chars(token.data(), token.data() + token.size(), v);
  if (r.ec != std::errc() || r.ptr != token.data() + token.size())
    throw IntegrityError("bad number '" + token + "'");
  return v;
}

std::string serialize(const BranchFile& f) {
  const Branch& b = f.branch;
  if (!f.spectra.empty() && f.spectra.size() != b.points.size())
    throw ShapeError("spectra must be empty or match the point count");
  std::string out = "coulomb-branch " + std::to_string(kBranchFormatVersion) + "\n";
  out += "n " + std::to_string(b.spec.n) + " k " + std::to_string(b.spec.k) + " family " +
         std::to_string(static_cast<int>(b.spec.family)) + " direction " + to_string(b.direction) + "\n";
  out += "termination " + to_string(b.termination) + "\n";
  out += "points " + std::to_string(b.points.size()) + "\n";
  for (std::size_t i = 0; i < b.points.size(); ++i) {
    const BranchPoint& p = b.points[i];
    out += "point " + std::to_string(i) + "\n";
    put_vector(out, "U", p.U);
    put_vector(out, "tangent", p.tangent);
    out += "step " + format_double(p.step) + " flags " + std::to_string(p.flags) + "\n";
    if (p.cert) {
      const Certificate& c = *p.cert;
      out += "cert " + format_double(c.Y) + " " + format_double(c.Z) + " " +
             (c.r0 ? format_double(*c.r0) : std::string("none")) + " " + format_double(c.r_star) + " " +
             (c.success ? "1" : "0") + "\n";
      out += "diag " + one_line(c.diagnostics) + "\n";
    } else {
      out += "cert none\n";
    }
    const SpectralResult* s = f.spectra.empty() || !f.spectra[i] ? nullptr : &*f.spectra[i];
    if (!s) {
      out += "spectral none\n";
    } else {
      out += "spectral " + to_string(s->status) + " " + (s->kernel_ok ? "1" : "0") + " " +
             std::to_string(s->unstable_count) + "\n";
      out += "disks " + std::to_string(s->disks.size());
      for (const Disk& d : s->disks)
        out += " " + format_double(d.center.real()) + " " + format_double(d.center.imag()) + " " +
               format_double(d.radius) + " " + std::to_string(d.multiplicity);
      out += "\ncandidates " + std::to_string(s->candidates.size());
      for (const SpectralCandidate& c : s->candidates)
        out += " " + std::to_string(c.pos) + " " + std::to_string(c.neg) + " " + format_double(c.nu0.lo()) + " " +
               format_double(c.nu0.hi()) + " " + (c.nonresonant ? "1" : "0") + " " +
               std::to_string(c.max_multiple_checked);
      out += "\nsdiag " + one_line(s->diagnostics) + "\n";
    }
  }
  out += "end\n";
  return out;
}

BranchFile parse_branch(const std::string& text) {
  Reader r(text);
  const auto head = r.expect("coulomb-branch");
  if (head.size() != 2 || r.integer(head[1]) != kBranchFormatVersion) r.fail("unsupported format version");

  const auto meta = r.expect("n");
  if (meta.size() != 8 || meta[2] != "k" || meta[4] != "family" || meta[6] != "direction") r.fail("bad header");
  BranchFile f;
  Branch& b = f.branch;
  guarded(r, [&] {
    b.spec = ProblemSpec::make(static_cast<int>(r.integer(meta[1])), static_cast<int>(r.integer(meta[3])),
                               family_from_string(meta[5]));
    b.direction = direction_from_string(meta[7]);
    return 0;
  });
  const auto term = r.expect("termination");
  if (term.size() != 2) r.fail("bad termination line");
  b.termination = guarded(r, [&] { return termination_from_string(term[1]); });
  const auto count_tok = r.expect("points");
  if (count_tok.size() != 2) r.fail("bad point count");
  const long count = r.integer(count_tok[1]);
  if (count < 0) r.fail("negative point count");

  const Eigen::Index dim = ReducedLayout(b.spec.n, b.spec.family).dim() + 1;
  bool any_spectra = false;
  for (long i = 0; i < count; ++i) {
    const auto pt = r.expect("point");
    if (pt.size() != 2 || r.integer(pt[1]) != i) r.fail("point index out of sequence");
    BranchPoint p;
    p.U = get_vector(r, "U", dim);
    p.tangent = get_vector(r, "tangent", dim);
    const auto st = r.expect("step");
    if (st.size() != 4 || st[2] != "flags") r.fail("bad step line");
    p.step = parse_double(st[1]);
    const long flags = r.integer(st[3]);
    if (flags < 0 || flags > 0xffffffffL) r.fail("flags out of range");
    p.flags = static_cast<std::uint32_t>(flags);

    const auto ct = r.expect("cert");
    if (ct.size() == 2 && ct[1] == "none") {
    } else if (ct.size() == 6) {
      Certificate c;
      c.Y = parse_double(ct[1]);
      c.Z = parse_double(ct[2]);
      if (ct[3] != "none") c.r0 = parse_double(ct[3]);
      c.r_star = parse_double(ct[4]);
      if (ct[5] != "0" && ct[5] != "1") r.fail("bad success flag");
      c.success = ct[5] == "1";
      c.diagnostics = r.rest("diag");
      p.cert = c;
    } else {
      r.fail("bad cert line");
    }

    const auto sp = r.expect("spectral");
    std::optional<SpectralResult> spec_result;
    if (sp.size() == 2 && sp[1] == "none") {
    } else if (sp.size() == 4) {
      SpectralResult s;
      s.status = guarded(r, [&] { return point_status_from_string(sp[1]); });
      s.kernel_ok = sp[2] == "1";
      s.unstable_count = static_cast<int>(r.integer(sp[3]));
      const auto dk = r.expect("disks");
      if (dk.size() < 2) r.fail("bad disks line");
      const long nd = r.integer(dk[1]);
      if (nd < 0 || static_cast<long>(dk.size()) != 2 + 4 * nd) r.fail("wrong disk count");
      for (long d = 0; d < nd; ++d) {
        const auto at = static_cast<std::size_t>(2 + 4 * d);
        const double re = parse_double(dk[at]), im = parse_double(dk[at + 1]), rad = parse_double(dk[at + 2]);
        const long mult = r.integer(dk[at + 3]);
        s.disks.push_back(guarded(r, [&] { return Disk({re, im}, rad, static_cast<int>(mult)); }));
      }
      const auto cd = r.expect("candidates");
      if (cd.size() < 2) r.fail("bad candidates line");
      const long nc = r.integer(cd[1]);
      if (nc < 0 || static_cast<long>(cd.size()) != 2 + 6 * nc) r.fail("wrong candidate count");
      for (long c = 0; c < nc; ++c) {
        const auto at = static_cast<std::size_t>(2 + 6 * c);
        SpectralCandidate cand;
        const long pos = r.integer(cd[at]), neg = r.integer(cd[at + 1]);
        if (pos < 0 || neg < 0 || pos >= nd || neg >= nd) r.fail("candidate disk index out of range");
        cand.pos = static_cast<std::size_t>(pos);
        cand.neg = static_cast<std::size_t>(neg);
        const double lo = parse_double(cd[at + 2]), hi = parse_double(cd[at + 3]);
        cand.nu0 = guarded(r, [&] { return Interval(lo, hi); });
        cand.nonresonant = cd[at + 4] == "1";
        cand.max_multiple_checked = static_cast<int>(r.integer(cd[at + 5]));
        s.candidates.push_back(cand);
      }
      s.diagnostics = r.rest("sdiag");
      spec_result = std::move(s);
      any_spectra = true;
    } else {
      r.fail("bad spectral line");
    }
    b.points.push_back(std::move(p));
    f.spectra.push_back(std::move(spec_result));
  }
  if (!any_spectra) f.spectra.clear();
  r.expect("end");
  if (!r.at_end()) r.fail("trailing content after end");
  return f;
}

std::string serialize(const ReducedPoint& p) {
  const Configuration c = lift(p);
  std::string out = "coulomb-configuration 1\n";
  out += "n " + std::to_string(p.n) + " family " + std::to_string(static_cast<int>(p.family)) + " mu " +
         format_double(p.mu) + "\n";
  put_vector(out, "u", c.u);
  return out;
}

ReducedPoint parse_configuration(const std::string& text) {
  Reader r(text);
  const auto head = r.expect("coulomb-configuration");
  if (head.size() != 2 || r.integer(head[1]) != 1) r.fail("unsupported configuration version");
  const auto meta = r.expect("n");
  if (meta.size() != 6 || meta[2] != "family" || meta[4] != "mu") r.fail("bad configuration header");
  const long n = r.integer(meta[1]);
  if (n < 2 || n > 1000000) r.fail("n out of range");
  const Family family = guarded(r, [&] { return family_from_string(meta[3]); });
  Configuration c;
  c.mu = parse_double(meta[5]);
  c.u = get_vector(r, "u", 3 * n);
  if (!r.at_end()) r.fail("trailing content");
  return project(c, family);
}

void write_branch_file(const std::filesystem::path& path, const BranchFile& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IntegrityError("cannot write " + path.string());
  out << serialize(f);
  if (!out) throw IntegrityError("write failed for " + path.string());
}

BranchFile read_branch_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IntegrityError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_branch(ss.str());
}

}  // namespace coulomb
