#include "efk/io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "efk/errors.hpp"

namespace efk {

namespace {

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

void put_f64(std::ostream& os, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(b), 8);
}

double get_f64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream os(path, mode);
  if (!os) throw IoError("cannot write " + path.string());
  return os;
}

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode) {
  std::ifstream is(path, mode);
  if (!is) throw IoError("cannot read " + path.string());
  return is;
}

}  // namespace

void write_profile_binary(const std::filesystem::path& path, const Profile1D& p) {
  std::ofstream os = open_out(path, std::ios::binary);
  os.write("EFK1", 4);
  put_u32(os, 1);
  put_u32(os, static_cast<std::uint32_t>(p.n()));
  put_u32(os, static_cast<std::uint32_t>(p.m()));
  put_f64(os, p.grid.half_length);
  put_f64(os, p.beta);
  for (Index i = 0; i < p.n(); ++i) {
    for (Index c = 0; c < p.m(); ++c) put_f64(os, p.values(i, c));
  }
  if (!os) throw IoError("short write: " + path.string());
}

Profile1D read_profile_binary(const std::filesystem::path& path, PotentialPtr pot) {
  std::ifstream is = open_in(path, std::ios::binary);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::string(magic, 4) != "EFK1") {
    throw FormatError("not an EFK1 file: " + path.string());
  }
  const std::uint32_t version = get_u32(is);
  if (version != 1) throw FormatError("unsupported EFK1 version");
  const std::uint32_t n = get_u32(is);
  const std::uint32_t m = get_u32(is);
  const double L = get_f64(is);
  const double beta = get_f64(is);
  if (!is || n < 5 || m < 1 || m > kMaxComponents || !(L > 0.0)) {
    throw FormatError("corrupt EFK1 header: " + path.string());
  }
  if (pot && pot->dim() != static_cast<int>(m)) {
    throw FormatError("EFK1 component count does not match the potential");
  }
  Profile1D p;
  p.grid = Grid1D::make(L, static_cast<Index>(n));
  p.potential = std::move(pot);
  p.beta = beta;
  p.values.resize(n, m);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t c = 0; c < m; ++c) p.values(i, c) = get_f64(is);
  }
  if (!is) throw FormatError("truncated EFK1 payload: " + path.string());
  return p;
}

void write_field_binary(const std::filesystem::path& path, const Field2D& f) {
  std::ofstream os = open_out(path, std::ios::binary);
  os.write("EFK2", 4);
  put_u32(os, 1);
  put_u32(os, static_cast<std::uint32_t>(f.nt()));
  put_u32(os, static_cast<std::uint32_t>(f.nx()));
  put_u32(os, static_cast<std::uint32_t>(f.m()));
  put_f64(os, f.grid.t_half_length);
  put_f64(os, f.grid.x_half_length);
  put_f64(os, f.beta);
  for (Index i = 0; i < f.nt(); ++i) {
    for (Index j = 0; j < f.nx(); ++j) {
      for (Index c = 0; c < f.m(); ++c) put_f64(os, f.comps[c](i, j));
    }
  }
  if (!os) throw IoError("short write: " + path.string());
}

Field2D read_field_binary(const std::filesystem::path& path, PotentialPtr pot,
                          OperatorVariant variant) {
  std::ifstream is = open_in(path, std::ios::binary);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::string(magic, 4) != "EFK2") {
    throw FormatError("not an EFK2 file: " + path.string());
  }
  if (get_u32(is) != 1) throw FormatError("unsupported EFK2 version");
  const std::uint32_t nt = get_u32(is);
  const std::uint32_t nx = get_u32(is);
  const std::uint32_t m = get_u32(is);
  const double T = get_f64(is);
  const double L = get_f64(is);
  const double beta = get_f64(is);
  if (!is || nt < 5 || nx < 5 || m < 1 || m > kMaxComponents || !(T > 0.0) || !(L > 0.0)) {
    throw FormatError("corrupt EFK2 header: " + path.string());
  }
  if (pot && pot->dim() != static_cast<int>(m)) {
    throw FormatError("EFK2 component count does not match the potential");
  }
  Field2D f = make_field(Grid2D::make(T, L, nt, nx), std::move(pot), beta, variant);
  for (std::uint32_t i = 0; i < nt; ++i) {
    for (std::uint32_t j = 0; j < nx; ++j) {
      for (std::uint32_t c = 0; c < m; ++c) f.comps[c](i, j) = get_f64(is);
    }
  }
  if (!is) throw FormatError("truncated EFK2 payload: " + path.string());
  return f;
}

void write_profile_csv(const std::filesystem::path& path, const Profile1D& p) {
  std::ostringstream os;
  os.precision(17);
  os << "x";
  for (Index c = 0; c < p.m(); ++c) os << ",u_" << (c + 1);
  os << "\n";
  for (Index i = 0; i < p.n(); ++i) {
    os << p.grid.x(i);
    for (Index c = 0; c < p.m(); ++c) os << "," << p.values(i, c);
    os << "\n";
  }
  write_text(path, os.str());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os = open_out(path, std::ios::out | std::ios::trunc);
  os << text;
  if (!os) throw IoError("short write: " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream is = open_in(path, std::ios::in);
  std::ostringstream buf;
  buf << is.rdbuf();
  return buf.str();
}

}  // namespace efk
