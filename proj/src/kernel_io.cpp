#include "wchaos/kernel_io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "wchaos/errors.hpp"

namespace wchaos {

namespace {

bool next_content_line(std::istream& in, std::string& line, std::size_t& lineno) {
  while (std::getline(in, line)) {
    ++lineno;
    const auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '#') continue;
    return true;
  }
  return false;
}

[[noreturn]] void fail(std::size_t lineno, const std::string& what) {
  throw ParseError("kernel parse error at line " + std::to_string(lineno) + ": " + what);
}

}  // namespace

SymmetricKernel read_kernel(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  if (!next_content_line(in, line, lineno)) throw ParseError("empty kernel file");

  std::istringstream header(line);
  std::string order_tag, dim_tag;
  long long q = 0, n = 0;
  if (!(header >> order_tag >> q >> dim_tag >> n) || order_tag != "order" ||
      dim_tag != "dim")
    fail(lineno, "expected header 'order q dim N'");
  if (q < 1 || q > kMaxKernelOrder || n < 1 || n > 65535)
    fail(lineno, "order/dim out of range");

  SymmetricKernel kernel(static_cast<int>(q), static_cast<int>(n));
  while (next_content_line(in, line, lineno)) {
    std::istringstream row(line);
    IndexTuple idx(q);
    for (long long i = 0; i < q; ++i) {
      long long v = 0;
      if (!(row >> v)) fail(lineno, "expected " + std::to_string(q) + " indices");
      if (v < 1 || v > n) fail(lineno, "index out of range 1..N");
      idx[i] = static_cast<std::uint16_t>(v - 1);
    }
    double value = 0.0;
    if (!(row >> value)) fail(lineno, "expected coefficient value");
    std::string trailing;
    if (row >> trailing) fail(lineno, "trailing content '" + trailing + "'");
    kernel.set(std::move(idx), value);
  }
  return kernel;
}

SymmetricKernel read_kernel_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open kernel file: " + path);
  return read_kernel(in);
}

void write_kernel(std::ostream& out, const SymmetricKernel& h) {
  out << "order " << h.order() << " dim " << h.dim() << "\n";
  char buf[64];
  for (const auto& [key, v] : h.entries()) {
    for (auto i : key) out << (i + 1) << ' ';
    // %.17g guarantees the exact double round-trips through the text form
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf << "\n";
  }
}

void write_kernel_file(const std::string& path, const SymmetricKernel& h) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open output file: " + path);
  write_kernel(out, h);
}

}  // namespace wchaos
