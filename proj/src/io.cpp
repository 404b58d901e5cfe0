#include "eprbound/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>

namespace eprbound {

namespace fs = std::filesystem;

std::string csv_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, mode);
  if (!out) throw ConfigError("cannot open output file " + path.string());
  return out;
}

}  // namespace

void write_rho_csv(const fs::path& path, const ScalarField& rho) {
  std::ofstream out = open_out(path);
  out << "i,j,x,y,rho\n";
  const Grid& g = rho.grid;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      out << i << ',' << j << ',' << csv_double(g.x_center(i)) << ','
          << csv_double(g.y_center(j)) << ',' << csv_double(rho.at(i, j)) << '\n';
}

void write_fields_csv(const fs::path& path,
                      const std::vector<std::pair<std::string, const ScalarField*>>& fields) {
  if (fields.empty()) throw ConfigError("no fields to write");
  std::ofstream out = open_out(path);
  const Grid& g = fields.front().second->grid;
  out << "i,j,x,y";
  for (const auto& [name, f] : fields) out << ',' << name;
  out << '\n';
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      out << i << ',' << j << ',' << csv_double(g.x_center(i)) << ','
          << csv_double(g.y_center(j));
      for (const auto& [name, f] : fields) out << ',' << csv_double(f->at(i, j));
      out << '\n';
    }
}

void write_rho_binary(const fs::path& path, const ScalarField& rho) {
  std::ofstream out = open_out(path, std::ios::binary);
  const Grid& g = rho.grid;
  out.write("EPRS", 4);
  std::uint32_t nx = static_cast<std::uint32_t>(g.nx), ny = static_cast<std::uint32_t>(g.ny);
  out.write(reinterpret_cast<const char*>(&nx), 4);
  out.write(reinterpret_cast<const char*>(&ny), 4);
  double bounds[4] = {g.domain.x_min, g.domain.x_max, g.domain.y_min, g.domain.y_max};
  out.write(reinterpret_cast<const char*>(bounds), sizeof(bounds));
  out.write(reinterpret_cast<const char*>(rho.v.data()),
            static_cast<std::streamsize>(rho.v.size() * sizeof(double)));
}

ScalarField read_rho_binary(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "EPRS", 4) != 0)
    throw ConfigError(path.string() + " is not an EPRS density file");
  std::uint32_t nx = 0, ny = 0;
  in.read(reinterpret_cast<char*>(&nx), 4);
  in.read(reinterpret_cast<char*>(&ny), 4);
  double bounds[4];
  in.read(reinterpret_cast<char*>(bounds), sizeof(bounds));
  if (!in || nx < 2 || ny < 2) throw ConfigError("corrupt EPRS header in " + path.string());
  Grid g(Domain{bounds[0], bounds[1], bounds[2], bounds[3]}, static_cast<int>(nx),
         static_cast<int>(ny));
  ScalarField rho(g);
  in.read(reinterpret_cast<char*>(rho.v.data()),
          static_cast<std::streamsize>(rho.v.size() * sizeof(double)));
  if (!in) throw ConfigError("truncated EPRS payload in " + path.string());
  return rho;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out = open_out(path, std::ios::binary);  // keep LF endings
  out << content;
}

}  // namespace eprbound
