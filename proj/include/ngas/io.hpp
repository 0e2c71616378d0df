#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "ngas/estimation.hpp"
#include "ngas/point_cloud.hpp"
#include "ngas/report.hpp"

namespace ngas {

enum class CloudFormat { Xyz, Ply };

/// ".ply" (any case) selects PLY, anything else XYZ.
CloudFormat format_from_path(const std::filesystem::path& path);

/// Locale-independent shortest-round-trip rendering with 17 significant digits.
std::string format_double(double v);

/// Reads an ASCII XYZ or PLY cloud. XYZ allows '#' comments and blank lines.
/// Throws ParseError (with line number) on malformed rows, ragged rows,
/// non-finite values or a dimension other than expected_dim.
PointCloud read_cloud(const std::filesystem::path& path,
                      std::optional<std::size_t> expected_dim = std::nullopt);

PointCloud parse_xyz(std::istream& in, const std::string& name,
                     std::optional<std::size_t> expected_dim = std::nullopt);
/// ASCII PLY; only the x, y (and z) properties of the vertex element are read.
PointCloud parse_ply(std::istream& in, const std::string& name,
                     std::optional<std::size_t> expected_dim = std::nullopt);

std::string format_cloud(const PointCloud& cloud, CloudFormat format,
                         const std::string& comment = {});
/// Throws InvalidInput for an empty cloud, IoError when the file can't be written.
void write_cloud(const PointCloud& cloud, const std::filesystem::path& path,
                 CloudFormat format, const std::string& comment = {});

/// "unit_index,x,y[,z],p_hat,rho_hat,log10_p,log10_rho" (c0..cN above 3D).
std::string density_table_header(std::size_t dim);
std::string format_density_table(const DensityTable& table);
void write_density_table(const DensityTable& table, const std::filesystem::path& path);

void write_report(const RunReport& report, const std::filesystem::path& path);
RunReport read_report(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace ngas
