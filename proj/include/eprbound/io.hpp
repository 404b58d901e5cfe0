#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "eprbound/grid.hpp"

namespace eprbound {

/// 17-significant-digit float formatting shared by every CSV writer
/// ('.' decimal point, unaffected by locale).
std::string csv_double(double v);

/// Density table with columns i, j, x, y, rho ('.' decimal, ',' separator,
/// LF line endings, header row).
void write_rho_csv(const std::filesystem::path& path, const ScalarField& rho);

/// Cell table with columns i, j, x, y and one column per named field.
void write_fields_csv(const std::filesystem::path& path,
                      const std::vector<std::pair<std::string, const ScalarField*>>& fields);

/// Flat binary layout: magic "EPRS", uint32 nx, uint32 ny, four float64
/// domain bounds (x_min, x_max, y_min, y_max), then nx*ny float64 values
/// row-major (j outer, i inner). Little-endian.
void write_rho_binary(const std::filesystem::path& path, const ScalarField& rho);
ScalarField read_rho_binary(const std::filesystem::path& path);

/// FNV-1a 64-bit content hash, hex-encoded; used for config provenance.
std::string fnv1a_hex(const std::string& bytes);

void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace eprbound
