#include "pepkit/sdpa.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <sstream>

#include "pepkit/error.hpp"

namespace pepkit {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> tokens(std::string line) {
  for (char& ch : line)
    if (ch == ',' || ch == '(' || ch == ')' || ch == '{' || ch == '}' || ch == '\t' || ch == '\r')
      ch = ' ';
  std::istringstream is(line);
  std::vector<std::string> out;
  for (std::string t; is >> t;) out.push_back(t);
  return out;
}

double to_double(const std::string& t, int line) {
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end == t.c_str() || *end != '\0') throw ParseError("expected a number, got '" + t + "'", line);
  if (!std::isfinite(v)) throw ParseError("non-finite value '" + t + "'", line);
  return v;
}

int to_int(const std::string& t, int line) {
  const double v = to_double(t, line);
  if (v != std::floor(v) || std::abs(v) > 1e9)
    throw ParseError("expected an integer, got '" + t + "'", line);
  return static_cast<int>(v);
}

bool is_comment(const std::string& line) {
  for (char ch : line) {
    if (ch == ' ' || ch == '\t') continue;
    return ch == '"' || ch == '*';
  }
  return false;
}

std::string strip_marker(const std::string& line) {
  std::size_t p = line.find_first_not_of(" \t");
  std::string s = line.substr(p + 1);
  if (!s.empty() && s.back() == '\r') s.pop_back();
  if (!s.empty() && s.front() == ' ') s.erase(0, 1);
  return s;
}

}  // namespace

std::string write_sdpa(const SdpaProblem& p) {
  std::ostringstream os;
  for (const auto& c : p.comments) os << "* " << c << "\n";
  os << p.m << " = mDIM\n" << p.blocks.size() << " = nBLOCK\n";
  for (std::size_t k = 0; k < p.blocks.size(); ++k) os << (k ? " " : "") << p.blocks[k];
  os << " = bLOCKsTRUCT\n";
  for (int i = 0; i < p.c.size(); ++i) os << (i ? " " : "") << num(p.c(i));
  os << "\n";
  for (const auto& e : p.entries)
    os << e.matrix << " " << e.block + 1 << " " << e.row + 1 << " " << e.col + 1 << " "
       << num(e.value) << "\n";
  return os.str();
}

SdpaProblem parse_sdpa(const std::string& text) {
  SdpaProblem p;
  std::istringstream is(text);
  std::string raw;
  int line = 0;
  int stage = 0;  // 0 m, 1 nblocks, 2 block sizes, 3 c, 4 entries
  int nblocks = 0;
  std::vector<double> c;
  while (std::getline(is, raw)) {
    ++line;
    if (is_comment(raw)) {
      p.comments.push_back(strip_marker(raw));
      continue;
    }
    auto tok = tokens(raw);
    if (tok.empty()) continue;
    if (stage == 0) {
      p.m = to_int(tok[0], line);
      if (p.m < 0) throw ParseError("negative number of constraints", line);
      stage = 1;
    } else if (stage == 1) {
      nblocks = to_int(tok[0], line);
      if (nblocks < 1) throw ParseError("number of blocks must be positive", line);
      stage = 2;
    } else if (stage == 2) {
      p.blocks_line = line;
      for (const auto& t : tok) {
        if (static_cast<int>(p.blocks.size()) == nblocks) break;  // trailing "= bLOCKsTRUCT"
        if (t[0] == '=') break;
        const int b = to_int(t, line);
        if (b == 0) throw ParseError("block size 0", line);
        p.blocks.push_back(b);
      }
      if (static_cast<int>(p.blocks.size()) == nblocks) stage = p.m > 0 ? 3 : 4;
    } else if (stage == 3) {
      for (const auto& t : tok) {
        if (static_cast<int>(c.size()) == p.m) throw ParseError("too many objective entries", line);
        c.push_back(to_double(t, line));
      }
      if (static_cast<int>(c.size()) == p.m) stage = 4;
    } else {
      if (tok.size() != 5)
        throw ParseError("expected 'matrix block row col value', got " +
                             std::to_string(tok.size()) + " fields",
                         line);
      SdpaEntry e;
      e.matrix = to_int(tok[0], line);
      e.block = to_int(tok[1], line) - 1;
      e.row = to_int(tok[2], line) - 1;
      e.col = to_int(tok[3], line) - 1;
      e.value = to_double(tok[4], line);
      e.line = line;
      if (e.matrix < 0 || e.matrix > p.m) throw ParseError("matrix index out of range", line);
      if (e.block < 0 || e.block >= nblocks) throw ParseError("block index out of range", line);
      const int n = std::abs(p.blocks[e.block]);
      if (e.row < 0 || e.row >= n || e.col < 0 || e.col >= n)
        throw ParseError("entry index out of range for block " + std::to_string(e.block + 1), line);
      if (e.row > e.col) std::swap(e.row, e.col);
      if (p.blocks[e.block] < 0 && e.row != e.col)
        throw ParseError("off-diagonal entry in a diagonal block", line);
      p.entries.push_back(e);
    }
  }
  if (stage < 4) throw ParseError("unexpected end of file in the header", line + 1);
  p.c = Eigen::Map<Vector>(c.data(), static_cast<Eigen::Index>(c.size()));
  return p;
}

BlockSdp sdpa_to_block_sdp(const SdpaProblem& p) {
  BlockSdp sdp;
  sdp.blocks = p.blocks;
  sdp.b = p.c;
  sdp.A.assign(p.m, {});
  for (const auto& e : p.entries) {
    const SymEntry s{e.block, e.row, e.col, e.value};
    if (e.matrix == 0)
      sdp.C.push_back({e.block, e.row, e.col, -e.value});
    else
      sdp.A[e.matrix - 1].push_back(s);
  }
  sdp.validate();
  return sdp;
}

std::string export_sdpa(const ConicProgram& cp) {
  cp.validate();
  const int m = static_cast<int>(cp.rows.size());
  const int nf = cp.num_free;
  SdpaProblem p;
  p.m = m;
  p.comments.push_back("pepkit conic psd_order=" + std::to_string(cp.psd_order) +
                       " num_free=" + std::to_string(nf) + " rows=" + std::to_string(m));
  p.comments.push_back("pepkit layout: G, free+ (diag), free- (diag), slack (diag); maximize F0.Y");
  for (int r = 0; r < m; ++r)
    if (!cp.rows[r].label.empty())
      p.comments.push_back("pepkit label " + std::to_string(r + 1) + " " + cp.rows[r].label);
  p.blocks.push_back(cp.psd_order);
  const int pblk = nf > 0 ? 1 : -1, qblk = nf > 0 ? 2 : -1, sblk = nf > 0 ? 3 : 1;
  if (nf > 0) {
    p.blocks.push_back(-nf);
    p.blocks.push_back(-nf);
  }
  if (m > 0) p.blocks.push_back(-m);
  p.c = Vector::Zero(m);

  auto add_free = [&](int mat, int k, double v) {
    p.entries.push_back({mat, pblk, k, k, v});
    p.entries.push_back({mat, qblk, k, k, -v});
  };
  for (const auto& e : cp.objective_psd) p.entries.push_back({0, 0, e.row, e.col, e.value});
  for (int k = 0; k < cp.objective_free.size(); ++k)
    if (cp.objective_free(k) != 0.0) add_free(0, k, cp.objective_free(k));
  for (int r = 0; r < m; ++r) {
    const auto& row = cp.rows[r];
    p.c(r) = row.bound;
    for (const auto& e : row.psd_coeffs) p.entries.push_back({r + 1, 0, e.row, e.col, e.value});
    for (const auto& [k, v] : row.free_coeffs) add_free(r + 1, k, v);
    p.entries.push_back({r + 1, sblk, r, r, 1.0});
  }
  return write_sdpa(p);
}

ConicProgram import_sdpa(const std::string& text) {
  const SdpaProblem p = parse_sdpa(text);
  ConicProgram cp;
  int declared_free = -1;
  std::map<int, std::string> labels;
  for (const auto& c : p.comments) {
    std::istringstream is(c);
    std::string tag, kind;
    is >> tag >> kind;
    if (tag != "pepkit") continue;
    if (kind == "conic") {
      for (std::string kv; is >> kv;) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = kv.substr(0, eq);
        const int val = std::atoi(kv.c_str() + eq + 1);
        if (key == "num_free") declared_free = val;
      }
    } else if (kind == "label") {
      int r = 0;
      is >> r;
      std::string rest;
      std::getline(is, rest);
      if (!rest.empty() && rest.front() == ' ') rest.erase(0, 1);
      labels[r] = rest;
    }
  }

  const int m = p.m;
  const int nb = static_cast<int>(p.blocks.size());
  if (p.blocks[0] <= 0) throw ParseError("first block must be the PSD matrix", p.blocks_line);
  int nf = 0;
  if (nb == 4 || (nb == 3 && m == 0)) {
    nf = -p.blocks[1];
    if (p.blocks[1] >= 0 || p.blocks[2] != p.blocks[1])
      throw ParseError("free-variable blocks must be two diagonal blocks of equal size", p.blocks_line);
  } else if (!(nb == 2 || (nb == 1 && m == 0))) {
    throw ParseError("unexpected block layout for a conic program", p.blocks_line);
  }
  const int sblk = nf > 0 ? 3 : 1;
  if (m > 0 && p.blocks[sblk] != -m)
    throw ParseError("slack block must be diagonal with one entry per constraint", p.blocks_line);
  if (declared_free >= 0 && declared_free != nf)
    throw ParseError("num_free in the header comment disagrees with the block layout", p.blocks_line);

  cp.psd_order = p.blocks[0];
  cp.num_free = nf;
  cp.objective_free = Vector::Zero(nf);
  cp.rows.resize(m);
  for (int r = 0; r < m; ++r) {
    cp.rows[r].bound = p.c(r);
    auto it = labels.find(r + 1);
    if (it != labels.end()) cp.rows[r].label = it->second;
  }
  // Sum of the q-block entries per (matrix, k); must mirror the p-block.
  std::map<std::pair<int, int>, double> pos, neg;
  std::vector<int> slack_seen(m, 0);
  for (const auto& e : p.entries) {
    if (e.block == 0) {
      const SymEntry s{0, e.row, e.col, e.value};
      if (e.matrix == 0)
        cp.objective_psd.push_back(s);
      else
        cp.rows[e.matrix - 1].psd_coeffs.push_back(s);
    } else if (nf > 0 && e.block == 1) {
      pos[{e.matrix, e.row}] += e.value;
      if (e.matrix == 0)
        cp.objective_free(e.row) += e.value;
      else
        cp.rows[e.matrix - 1].free_coeffs.emplace_back(e.row, e.value);
    } else if (nf > 0 && e.block == 2) {
      neg[{e.matrix, e.row}] += e.value;
    } else {
      if (e.matrix == 0 || e.row != e.matrix - 1 || e.value != 1.0)
        throw ParseError("slack block entries must be unit diagonal entries of their own row",
                         e.line);
      ++slack_seen[e.row];
    }
  }
  for (const auto& [key, v] : pos) {
    auto it = neg.find(key);
    if (it == neg.end() ? v != 0.0 : it->second != -v)
      throw ParseError("free variable split is not antisymmetric for matrix " +
                           std::to_string(key.first),
                       0);
  }
  for (const auto& [key, v] : neg)
    if (!pos.count(key) && v != 0.0)
      throw ParseError("free variable split is not antisymmetric for matrix " +
                           std::to_string(key.first),
                       0);
  for (int r = 0; r < m; ++r)
    if (slack_seen[r] != 1) throw ParseError("missing slack for constraint " + std::to_string(r + 1), 0);
  cp.validate();
  return cp;
}

}  // namespace pepkit
