#include "psscf/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace psscf {

namespace {

[[noreturn]] void fail_at(const std::filesystem::path& path, std::size_t line,
                          const std::string& what) {
  throw std::runtime_error(path.string() + ":" + std::to_string(line) + ": " + what);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

SparseMatrix read_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  std::size_t lineno = 0;

  if (!std::getline(in, line)) fail_at(path, 1, "empty file");
  ++lineno;
  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket" || lower(object) != "matrix") {
    fail_at(path, lineno, "not a MatrixMarket matrix header");
  }
  if (lower(format) != "coordinate") fail_at(path, lineno, "only coordinate format supported");
  if (lower(field) != "real" && lower(field) != "integer") {
    fail_at(path, lineno, "only real-valued matrices supported");
  }
  const std::string sym = lower(symmetry);
  bool symmetric = false;
  if (sym == "symmetric") {
    symmetric = true;
  } else if (sym != "general") {
    fail_at(path, lineno, "symmetry '" + symmetry + "' not supported");
  }

  std::size_t rows = 0, cols = 0, entries = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '%') continue;
    std::istringstream size_line(t);
    if (!(size_line >> rows >> cols >> entries)) fail_at(path, lineno, "malformed size line");
    break;
  }
  if (rows == 0 && cols == 0) fail_at(path, lineno, "missing size line");
  if (rows != cols) {
    fail_at(path, lineno, "matrix is not square (" + std::to_string(rows) + "x" +
                              std::to_string(cols) + ")");
  }

  std::vector<Triplet> triplets;
  triplets.reserve(symmetric ? 2 * entries : entries);
  std::size_t seen = 0;
  while (seen < entries) {
    if (!std::getline(in, line)) fail_at(path, lineno + 1, "unexpected end of file");
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '%') continue;
    std::istringstream entry(t);
    std::size_t i = 0, j = 0;
    double v = 0.0;
    if (!(entry >> i >> j >> v)) fail_at(path, lineno, "malformed entry");
    if (i < 1 || i > rows || j < 1 || j > cols) {
      fail_at(path, lineno, "index out of range: (" + std::to_string(i) + ", " +
                                std::to_string(j) + ")");
    }
    triplets.push_back({i - 1, j - 1, v});
    if (symmetric && i != j) triplets.push_back({j - 1, i - 1, v});
    ++seen;
  }
  return SparseMatrix::from_triplets(rows, triplets);
}

void write_matrix_market(const SparseMatrix& a, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.dim() << ' ' << a.dim() << ' ' << a.nnz() << '\n';
  const auto rp = a.row_ptr();
  const auto cols = a.cols();
  const auto vals = a.vals();
  for (std::size_t i = 0; i < a.dim(); ++i) {
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) {
      out << i + 1 << ' ' << cols[k] + 1 << ' ' << format_value(vals[k]) << '\n';
    }
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void write_bench_csv(std::span<const BenchRow> rows, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "method,n,bandwidth,trial,time_seconds,sparsity,rel_error,certified_bound,N,q,b\n";
  for (const BenchRow& r : rows) {
    out << r.method << ',' << r.n << ',' << r.bandwidth << ',' << r.trial << ','
        << format_value(r.time_seconds) << ',' << format_value(r.sparsity) << ','
        << format_value(r.rel_error) << ',' << format_value(r.certified_bound) << ','
        << r.term_count << ',' << r.block_size << ',' << r.block_count << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<double> read_coefficients(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<double> coeffs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    try {
      std::size_t pos = 0;
      const double v = std::stod(t, &pos);
      if (pos != t.size()) throw std::invalid_argument("trailing characters");
      coeffs.push_back(v);
    } catch (const std::exception&) {
      fail_at(path, lineno, "not a real number: '" + t + "'");
    }
  }
  if (coeffs.empty()) throw std::runtime_error(path.string() + ": no coefficients");
  return coeffs;
}

BenchConfig parse_bench_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  BenchConfig config;
  std::string line;
  std::size_t lineno = 0;

  auto parse_size_list = [&](const std::string& value, std::size_t line_no) {
    std::vector<std::size_t> out;
    std::istringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const std::string t = trim(item);
      if (t.empty()) continue;
      try {
        out.push_back(std::stoul(t));
      } catch (const std::exception&) {
        fail_at(path, line_no, "not an integer: '" + t + "'");
      }
    }
    return out;
  };

  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) fail_at(path, lineno, "expected key=value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key == "function") {
      if (value == "exp") {
        config.function = BenchFunction::exp;
      } else if (value == "cos") {
        config.function = BenchFunction::cos;
      } else if (value == "poly") {
        config.function = BenchFunction::poly;
      } else {
        fail_at(path, lineno, "unknown function '" + value + "'");
      }
    } else if (key == "sizes") {
      config.sizes = parse_size_list(value, lineno);
    } else if (key == "bandwidths") {
      config.bandwidths = parse_size_list(value, lineno);
    } else if (key == "trials_per_bandwidth") {
      config.trials_per_bandwidth = std::stoul(value);
    } else if (key == "eps_tol") {
      config.eps_tol = std::stod(value);
    } else if (key == "seed") {
      config.seed = std::stoull(value);
    } else if (key == "scale_target") {
      config.scale_target = std::stod(value);
    } else if (key == "coeffs_file") {
      config.poly_coeffs = read_coefficients(path.parent_path() / value);
    } else {
      fail_at(path, lineno, "unknown key '" + key + "'");
    }
  }
  if (config.sizes.empty()) throw std::runtime_error(path.string() + ": sizes missing");
  if (config.bandwidths.empty()) throw std::runtime_error(path.string() + ": bandwidths missing");
  return config;
}

}  // namespace psscf
