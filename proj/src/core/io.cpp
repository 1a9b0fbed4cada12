#include "core/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "core/errors.hpp"

namespace spm::io {

namespace {

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ostream& os, double v) {
  std::uint64_t u;
  std::memcpy(&u, &v, 8);
  put_u64(os, u);
}

std::uint32_t get_u32(std::istream& is, const std::string& path) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4))
    throw DataError(path + ": truncated file");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t(b[i]) << (8 * i);
  return v;
}

std::uint64_t get_u64(std::istream& is, const std::string& path) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8))
    throw DataError(path + ": truncated file");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& is, const std::string& path) {
  const std::uint64_t u = get_u64(is, path);
  double v;
  std::memcpy(&v, &u, 8);
  return v;
}

void write_magic(std::ostream& os, const char m[4]) { os.write(m, 4); }

void expect_magic(std::istream& is, const char* want, const std::string& path) {
  char m[5] = {0, 0, 0, 0, 0};
  if (!is.read(m, 4) || std::strncmp(m, want, 4) != 0)
    throw DataError(path + ": bad magic, expected \"" + want + "\"");
}

// Trailer is optional; a clean EOF right here is fine.
std::optional<std::uint64_t> try_read_meta(std::istream& is) {
  char m[4];
  if (!is.read(m, 4)) return std::nullopt;
  if (std::strncmp(m, "META", 4) != 0) return std::nullopt;
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) return std::nullopt;
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t(b[i]) << (8 * i);
  return v;
}

void write_meta(std::ostream& os, std::optional<std::uint64_t> hash) {
  if (!hash) return;
  write_magic(os, "META");
  put_u64(os, *hash);
}

std::ofstream open_out(const std::string& path, bool binary) {
  std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
  if (!os) throw DataError(path + ": cannot open for writing");
  os.precision(17);
  return os;
}

std::ifstream open_in(const std::string& path, bool binary) {
  std::ifstream is(path, binary ? std::ios::binary : std::ios::in);
  if (!is) throw DataError(path + ": cannot open for reading");
  return is;
}

void write_grid_comment(std::ostream& os, const char* name,
                        const FrequencyGrid& g) {
  os << "# " << name << " center=" << g.center() << " dw=" << g.spacing()
     << " n=" << g.n_bins() << "\n";
}

struct CsvHeader {
  std::string kind;
  std::vector<FrequencyGrid> grids;
};

FrequencyGrid parse_grid_line(const std::string& line, const std::string& path) {
  double center = 0, dw = 0;
  int n = 0;
  const char* s = line.c_str();
  const char* c = std::strstr(s, "center=");
  const char* d = std::strstr(s, "dw=");
  const char* nn = std::strstr(s, "n=");
  if (!c || !d || !nn || std::sscanf(c, "center=%lf", &center) != 1 ||
      std::sscanf(d, "dw=%lf", &dw) != 1 || std::sscanf(nn, "n=%d", &n) != 1)
    throw DataError(path + ": malformed grid header line: " + line);
  return FrequencyGrid(center, dw * (n - 1), n);
}

CsvHeader read_csv_header(std::istream& is, const std::string& path) {
  CsvHeader h;
  while (is.peek() == '#') {
    std::string line;
    std::getline(is, line);
    if (h.kind.empty()) h.kind = line;
    if (line.find("center=") != std::string::npos)
      h.grids.push_back(parse_grid_line(line, path));
  }
  return h;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void write_jsa_binary(const std::string& path, const Jsa& jsa,
                      std::optional<std::uint64_t> config_hash) {
  auto os = open_out(path, true);
  write_magic(os, "JSAB");
  put_u32(os, 1);
  put_u32(os, static_cast<std::uint32_t>(jsa.grid1().n_bins()));
  put_u32(os, static_cast<std::uint32_t>(jsa.grid2().n_bins()));
  put_f64(os, jsa.grid1().center());
  put_f64(os, jsa.grid1().spacing());
  put_f64(os, jsa.grid2().center());
  put_f64(os, jsa.grid2().spacing());
  for (int i = 0; i < jsa.grid1().n_bins(); ++i)
    for (int j = 0; j < jsa.grid2().n_bins(); ++j) {
      put_f64(os, jsa.f()(i, j).real());
      put_f64(os, jsa.f()(i, j).imag());
    }
  write_meta(os, config_hash);
  if (!os) throw DataError(path + ": write failed");
}

Jsa read_jsa_binary(const std::string& path,
                    std::optional<std::uint64_t>* config_hash) {
  auto is = open_in(path, true);
  expect_magic(is, "JSAB", path);
  const std::uint32_t version = get_u32(is, path);
  if (version != 1)
    throw DataError(path + ": unsupported JSAB version " + std::to_string(version));
  const std::uint32_t n1 = get_u32(is, path);
  const std::uint32_t n2 = get_u32(is, path);
  if (n1 < 8 || n2 < 8 || n1 > (1u << 20) || n2 > (1u << 20))
    throw DataError(path + ": implausible matrix dimensions");
  const double c1 = get_f64(is, path), dw1 = get_f64(is, path);
  const double c2 = get_f64(is, path), dw2 = get_f64(is, path);
  FrequencyGrid g1(c1, dw1 * (n1 - 1), static_cast<int>(n1));
  FrequencyGrid g2(c2, dw2 * (n2 - 1), static_cast<int>(n2));
  Eigen::MatrixXcd f(n1, n2);
  for (std::uint32_t i = 0; i < n1; ++i)
    for (std::uint32_t j = 0; j < n2; ++j) {
      const double re = get_f64(is, path);
      const double im = get_f64(is, path);
      f(i, j) = {re, im};
    }
  const auto meta = try_read_meta(is);
  if (config_hash) *config_hash = meta;
  return Jsa(g1, g2, std::move(f));
}

void write_jsa_csv(const std::string& path, const Jsa& jsa,
                   std::optional<std::uint64_t> config_hash) {
  auto os = open_out(path, false);
  os << "# JSA CSV v1 (rows: grid1 bins; columns alternate re,im per grid2 bin)\n";
  if (config_hash) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(*config_hash));
    os << "# config_hash=" << buf << "\n";
  }
  write_grid_comment(os, "grid1", jsa.grid1());
  write_grid_comment(os, "grid2", jsa.grid2());
  for (int i = 0; i < jsa.grid1().n_bins(); ++i) {
    for (int j = 0; j < jsa.grid2().n_bins(); ++j) {
      if (j) os << ",";
      os << jsa.f()(i, j).real() << "," << jsa.f()(i, j).imag();
    }
    os << "\n";
  }
  if (!os) throw DataError(path + ": write failed");
}

Jsa read_jsa_csv(const std::string& path) {
  auto is = open_in(path, false);
  const auto h = read_csv_header(is, path);
  if (h.grids.size() != 2) throw DataError(path + ": expected two grid header lines");
  const int n1 = h.grids[0].n_bins(), n2 = h.grids[1].n_bins();
  Eigen::MatrixXcd f(n1, n2);
  std::string line;
  for (int i = 0; i < n1; ++i) {
    if (!std::getline(is, line)) throw DataError(path + ": truncated data rows");
    std::stringstream ss(line);
    for (int j = 0; j < n2; ++j) {
      double re, im;
      char comma;
      if (!(ss >> re >> comma >> im)) throw DataError(path + ": malformed row");
      if (j + 1 < n2 && !(ss >> comma)) throw DataError(path + ": malformed row");
      f(i, j) = {re, im};
    }
  }
  return Jsa(h.grids[0], h.grids[1], std::move(f));
}

void write_interferogram_csv(const std::string& path, const Interferogram& h,
                             std::optional<std::uint64_t> config_hash) {
  auto os = open_out(path, false);
  os << "# INTERFEROGRAM CSV v1\n";
  if (config_hash) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(*config_hash));
    os << "# config_hash=" << buf << "\n";
  }
  write_grid_comment(os, "grid1", h.grid1());
  write_grid_comment(os, "grid2", h.grid2());
  const Eigen::ArrayXXd c = h.counts();
  for (int i = 0; i < h.grid1().n_bins(); ++i) {
    for (int j = 0; j < h.grid2().n_bins(); ++j) {
      if (j) os << ",";
      os << c(i, j);
    }
    os << "\n";
  }
  if (!os) throw DataError(path + ": write failed");
}

Interferogram read_interferogram_csv(const std::string& path) {
  auto is = open_in(path, false);
  const auto h = read_csv_header(is, path);
  if (h.grids.size() != 2) throw DataError(path + ": expected two grid header lines");
  const int n1 = h.grids[0].n_bins(), n2 = h.grids[1].n_bins();
  Eigen::ArrayXXd c(n1, n2);
  std::string line;
  for (int i = 0; i < n1; ++i) {
    if (!std::getline(is, line)) throw DataError(path + ": truncated data rows");
    std::stringstream ss(line);
    for (int j = 0; j < n2; ++j) {
      double v;
      char comma;
      if (!(ss >> v)) throw DataError(path + ": malformed row");
      if (j + 1 < n2 && !(ss >> comma)) throw DataError(path + ": malformed row");
      c(i, j) = v;
    }
  }
  return Interferogram(h.grids[0], h.grids[1], std::move(c));
}

void write_histogram3(const std::string& path, const Interferogram& h,
                      std::optional<std::uint64_t> config_hash) {
  if (!h.has_herald_axis())
    throw ConfigError(path + ": write_histogram3 requires a herald axis");
  auto os = open_out(path, true);
  write_magic(os, "HS3B");
  put_u32(os, 1);
  put_u32(os, static_cast<std::uint32_t>(h.grid1().n_bins()));
  put_u32(os, static_cast<std::uint32_t>(h.grid2().n_bins()));
  put_u32(os, static_cast<std::uint32_t>(h.herald_grid().n_bins()));
  for (const auto* g : {&h.grid1(), &h.grid2(), &h.herald_grid()}) {
    put_f64(os, g->center());
    put_f64(os, g->spacing());
  }
  for (int k = 0; k < h.n_planes(); ++k) {
    const auto& p = h.plane(k);
    for (int i = 0; i < p.rows(); ++i)
      for (int j = 0; j < p.cols(); ++j) put_f64(os, p(i, j));
  }
  write_meta(os, config_hash);
  if (!os) throw DataError(path + ": write failed");
}

Interferogram read_histogram3(const std::string& path,
                              std::optional<std::uint64_t>* config_hash) {
  auto is = open_in(path, true);
  expect_magic(is, "HS3B", path);
  const std::uint32_t version = get_u32(is, path);
  if (version != 1)
    throw DataError(path + ": unsupported HS3B version " + std::to_string(version));
  const std::uint32_t n1 = get_u32(is, path);
  const std::uint32_t n2 = get_u32(is, path);
  const std::uint32_t nh = get_u32(is, path);
  if (n1 < 8 || n2 < 8 || nh < 8 || double(n1) * n2 * nh > 1e9)
    throw DataError(path + ": implausible histogram dimensions");
  FrequencyGrid grids[3];
  const std::uint32_t ns[3] = {n1, n2, nh};
  for (int a = 0; a < 3; ++a) {
    const double c = get_f64(is, path), dw = get_f64(is, path);
    grids[a] = FrequencyGrid(c, dw * (ns[a] - 1), static_cast<int>(ns[a]));
  }
  std::vector<Eigen::ArrayXXd> planes(nh);
  for (std::uint32_t k = 0; k < nh; ++k) {
    planes[k].resize(n1, n2);
    for (std::uint32_t i = 0; i < n1; ++i)
      for (std::uint32_t j = 0; j < n2; ++j) planes[k](i, j) = get_f64(is, path);
  }
  const auto meta = try_read_meta(is);
  if (config_hash) *config_hash = meta;
  return Interferogram(grids[0], grids[1], grids[2], std::move(planes));
}

void write_mode_csv(const std::string& path, const SpectralMode& m,
                    std::optional<std::uint64_t> config_hash) {
  auto os = open_out(path, false);
  os << "# MODE CSV v1 (rows: detuning,re,im)\n";
  if (config_hash) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(*config_hash));
    os << "# config_hash=" << buf << "\n";
  }
  write_grid_comment(os, "grid", m.grid());
  for (int k = 0; k < m.grid().n_bins(); ++k)
    os << m.grid().detuning(k) << "," << m.amp()[k].real() << ","
       << m.amp()[k].imag() << "\n";
  if (!os) throw DataError(path + ": write failed");
}

SpectralMode read_mode_csv(const std::string& path) {
  auto is = open_in(path, false);
  const auto h = read_csv_header(is, path);
  if (h.grids.size() != 1) throw DataError(path + ": expected one grid header line");
  const int n = h.grids[0].n_bins();
  Eigen::ArrayXcd amp(n);
  std::string line;
  for (int k = 0; k < n; ++k) {
    if (!std::getline(is, line)) throw DataError(path + ": truncated data rows");
    double w, re, im;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &w, &re, &im) != 3)
      throw DataError(path + ": malformed row: " + line);
    amp[k] = {re, im};
  }
  return SpectralMode(h.grids[0], std::move(amp));
}

}  // namespace spm::io
