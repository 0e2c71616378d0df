#include "ngas/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "ngas/error.hpp"

namespace ngas {

namespace fs = std::filesystem;

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

bool parse_number(std::string_view tok, double& out) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size();
}

double parse_coordinate(std::string_view tok, const std::string& name, std::size_t line_no) {
  double v = 0.0;
  if (!parse_number(tok, v))
    throw ParseError(name, line_no, "cannot parse '" + std::string(tok) + "' as a number");
  if (!std::isfinite(v)) throw ParseError(name, line_no, "non-finite coordinate");
  return v;
}

void check_dim(std::size_t found, std::optional<std::size_t> expected, const std::string& name) {
  if (expected && *expected != found)
    throw ParseError(name, 0,
                     "expected dimension " + std::to_string(*expected) + ", found " +
                         std::to_string(found));
}

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\r' || std::isspace(static_cast<unsigned char>(s.back()))))
    s.pop_back();
  return s;
}

}  // namespace

CloudFormat format_from_path(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".ply" ? CloudFormat::Ply : CloudFormat::Xyz;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

PointCloud parse_xyz(std::istream& in, const std::string& name,
                     std::optional<std::size_t> expected_dim) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  std::vector<double> coords;
  while (std::getline(in, line)) {
    ++line_no;
    const auto toks = split_ws(line);
    if (toks.empty() || toks.front().front() == '#') continue;
    if (dim == 0) {
      dim = toks.size();
      if (expected_dim && *expected_dim != dim)
        throw ParseError(name, line_no,
                         "expected dimension " + std::to_string(*expected_dim) + ", found " +
                             std::to_string(dim));
    } else if (toks.size() != dim) {
      throw ParseError(name, line_no,
                       "row has " + std::to_string(toks.size()) + " columns, expected " +
                           std::to_string(dim));
    }
    for (auto tok : toks) coords.push_back(parse_coordinate(tok, name, line_no));
  }
  if (dim == 0) throw ParseError(name, 0, "no points");
  return PointCloud(dim, std::move(coords));
}

PointCloud parse_ply(std::istream& in, const std::string& name,
                     std::optional<std::size_t> expected_dim) {
  struct Element {
    std::string name;
    std::size_t count = 0;
    std::vector<std::string> props;
  };
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++line_no;
    line = trim(line);
    return true;
  };

  if (!next_line() || line != "ply") throw ParseError(name, 1, "missing 'ply' magic");
  std::vector<Element> elements;
  bool ascii = false;
  for (;;) {
    if (!next_line()) throw ParseError(name, line_no, "header without end_header");
    const auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (toks[0] == "end_header") break;
    if (toks[0] == "comment" || toks[0] == "obj_info") continue;
    if (toks[0] == "format") {
      if (toks.size() < 2 || toks[1] != "ascii")
        throw ParseError(name, line_no, "only ASCII PLY is supported");
      ascii = true;
    } else if (toks[0] == "element") {
      if (toks.size() != 3) throw ParseError(name, line_no, "malformed element line");
      Element e;
      e.name = std::string(toks[1]);
      double count = 0;
      if (!parse_number(toks[2], count) || count < 0)
        throw ParseError(name, line_no, "bad element count");
      e.count = static_cast<std::size_t>(count);
      elements.push_back(std::move(e));
    } else if (toks[0] == "property") {
      if (elements.empty()) throw ParseError(name, line_no, "property before any element");
      elements.back().props.emplace_back(toks.back());
    } else {
      throw ParseError(name, line_no, "unknown header keyword '" + std::string(toks[0]) + "'");
    }
  }
  if (!ascii) throw ParseError(name, line_no, "missing format line");

  std::optional<PointCloud> cloud;
  for (const auto& e : elements) {
    if (e.name != "vertex") {
      for (std::size_t i = 0; i < e.count; ++i)
        if (!next_line()) throw ParseError(name, line_no, "truncated '" + e.name + "' element");
      continue;
    }
    std::vector<std::size_t> cols;
    for (const char* axis : {"x", "y", "z"}) {
      auto it = std::find(e.props.begin(), e.props.end(), axis);
      if (it != e.props.end()) cols.push_back(static_cast<std::size_t>(it - e.props.begin()));
    }
    if (cols.size() < 2) throw ParseError(name, line_no, "vertex element lacks x/y properties");
    check_dim(cols.size(), expected_dim, name);
    std::vector<double> coords;
    coords.reserve(e.count * cols.size());
    for (std::size_t i = 0; i < e.count; ++i) {
      if (!next_line()) throw ParseError(name, line_no, "truncated vertex element");
      const auto toks = split_ws(line);
      if (toks.size() != e.props.size())
        throw ParseError(name, line_no,
                         "vertex row has " + std::to_string(toks.size()) + " values, expected " +
                             std::to_string(e.props.size()));
      for (auto c : cols) coords.push_back(parse_coordinate(toks[c], name, line_no));
    }
    cloud = PointCloud(cols.size(), std::move(coords));
  }
  if (!cloud || cloud->empty()) throw ParseError(name, 0, "no vertices");
  return std::move(*cloud);
}

PointCloud read_cloud(const fs::path& path, std::optional<std::size_t> expected_dim) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  // Sniff the magic rather than trusting the extension.
  std::string first;
  std::getline(in, first);
  in.clear();
  in.seekg(0);
  if (trim(first) == "ply") return parse_ply(in, path.string(), expected_dim);
  return parse_xyz(in, path.string(), expected_dim);
}

std::string format_cloud(const PointCloud& cloud, CloudFormat format, const std::string& comment) {
  if (cloud.empty()) throw InvalidInput("refusing to write an empty cloud");
  std::string out;
  out.reserve(cloud.size() * cloud.dim() * 24);
  if (format == CloudFormat::Ply) {
    out += "ply\nformat ascii 1.0\n";
    if (!comment.empty()) out += "comment " + comment + "\n";
    out += "element vertex " + std::to_string(cloud.size()) + "\n";
    static const char* axes[] = {"x", "y", "z"};
    if (cloud.dim() > 3) throw InvalidInput("PLY output supports 2D and 3D clouds only");
    for (std::size_t j = 0; j < cloud.dim(); ++j) out += std::string("property double ") + axes[j] + "\n";
    out += "end_header\n";
  } else if (!comment.empty()) {
    out += "# " + comment + "\n";
  }
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto p = cloud[i];
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (j) out += ' ';
      out += format_double(p[j]);
    }
    out += '\n';
  }
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_cloud(const PointCloud& cloud, const fs::path& path, CloudFormat format,
                 const std::string& comment) {
  write_text(path, format_cloud(cloud, format, comment));
}

std::string density_table_header(std::size_t dim) {
  std::string h = "unit_index";
  static const char* axes[] = {"x", "y", "z"};
  for (std::size_t j = 0; j < dim; ++j)
    h += dim <= 3 ? std::string(",") + axes[j] : ",c" + std::to_string(j);
  h += ",p_hat,rho_hat,log10_p,log10_rho";
  return h;
}

std::string format_density_table(const DensityTable& table) {
  std::string out = density_table_header(table.dim) + "\n";
  for (const auto& r : table.rows) {
    out += std::to_string(r.unit);
    for (double c : r.position) out += "," + format_double(c);
    out += "," + format_double(r.p_hat) + "," + format_double(r.rho_hat) + "," +
           format_double(r.log10_p) + "," + format_double(r.log10_rho) + "\n";
  }
  return out;
}

void write_density_table(const DensityTable& table, const fs::path& path) {
  write_text(path, format_density_table(table));
}

void write_report(const RunReport& report, const fs::path& path) {
  write_text(path, to_json(report).dump(2) + "\n");
}

RunReport read_report(const fs::path& path) {
  try {
    return report_from_json(nlohmann::json::parse(read_text(path)));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string(), 0, e.what());
  }
}

}  // namespace ngas
