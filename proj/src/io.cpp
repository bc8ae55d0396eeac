#include "rdpg/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace rdpg {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

bool parse_double(std::string_view s, double& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  const char* first = t.data();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), out);
  return ec == std::errc() && ptr == t.data() + t.size();
}

bool parse_int(std::string_view s, long long& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

SymMatrixd checked_symmetric(const Eigen::MatrixXd& m, double sym_tol, int line) {
  if (m.rows() != m.cols()) throw ParseError("matrix is not square", line);
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < m.cols(); ++j) {
      if (std::abs(m(i, j) - m(j, i)) > sym_tol * scale) {
        throw InputError("matrix is not symmetric at (" + std::to_string(i) + "," +
                         std::to_string(j) + ")");
      }
    }
  }
  return SymMatrixd::symmetrize(m);
}

// 1-based line of a byte offset, for JSON diagnostics.
int line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n'));
}

nlohmann::json parse_json(const std::string& text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), line_of_offset(text, e.byte));
  }
}

}  // namespace

FileFormat format_from_path(const std::string& path) {
  auto ends_with = [&](std::string_view ext) {
    if (path.size() < ext.size()) return false;
    std::string tail = path.substr(path.size() - ext.size());
    std::transform(tail.begin(), tail.end(), tail.begin(), ::tolower);
    return tail == ext;
  };
  if (ends_with(".json")) return FileFormat::Json;
  if (ends_with(".csv")) return FileFormat::Csv;
  return FileFormat::EdgeList;
}

FileFormat parse_format(const std::string& name) {
  if (name == "edges" || name == "edgelist") return FileFormat::EdgeList;
  if (name == "csv") return FileFormat::Csv;
  if (name == "json") return FileFormat::Json;
  throw InputError("unknown format '" + name + "'");
}

Graph parse_edge_list(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<Edge> edges;
  long long declared = -1;
  long long max_index = -1;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string body = line;
    if (const auto hash = body.find('#'); hash != std::string::npos) {
      std::istringstream comment(body.substr(hash + 1));
      std::string key;
      long long value = 0;
      if (comment >> key && key == "nodes") {
        if (!(comment >> value) || value < 1) throw ParseError("bad node count directive", lineno);
        declared = value;
      }
      body.resize(hash);
    }
    std::istringstream fields(body);
    std::vector<std::string> tok;
    for (std::string t; fields >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    long long i = 0;
    long long j = 0;
    if (tok.size() != 2 || !parse_int(tok[0], i) || !parse_int(tok[1], j)) {
      throw ParseError("expected two integer node indices", lineno);
    }
    if (i < 0 || j < 0) throw ParseError("negative node index", lineno);
    if (i == j) throw ParseError("self-loop", lineno);
    if (std::max(i, j) > 10'000'000) throw ParseError("node index too large", lineno);
    max_index = std::max({max_index, i, j});
    edges.emplace_back(static_cast<int>(i), static_cast<int>(j));
  }
  long long n = declared > 0 ? declared : max_index + 1;
  if (declared > 0 && max_index >= declared) {
    throw ParseError("edge index exceeds declared node count", lineno);
  }
  if (n < 1) throw ParseError("edge list defines no nodes", lineno);
  return Graph(static_cast<int>(n), edges);
}

std::string format_edge_list(const Graph& g) {
  std::ostringstream out;
  out << "# nodes " << g.n() << "\n";
  for (auto [i, j] : g.edges()) out << i << ' ' << j << '\n';
  return out.str();
}

SymMatrixd parse_matrix_csv(const std::string& text, double sym_tol) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<double>> rows;
  int lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto fields = split(line, ',');
    std::vector<double> row;
    row.reserve(fields.size());
    bool numeric = true;
    for (const auto& f : fields) {
      double v = 0;
      if (!parse_double(f, v)) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (first) {
        first = false;
        continue;  // header
      }
      throw ParseError("non-numeric field", lineno);
    }
    first = false;
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError("row has " + std::to_string(row.size()) + " fields, expected " +
                           std::to_string(rows.front().size()),
                       lineno);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("no matrix rows", lineno);
  const auto n = static_cast<Eigen::Index>(rows.size());
  if (static_cast<Eigen::Index>(rows.front().size()) != n) {
    throw ParseError("matrix is not square (" + std::to_string(n) + " rows, " +
                         std::to_string(rows.front().size()) + " columns)",
                     lineno);
  }
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  if (!m.allFinite()) throw InputError("matrix has non-finite entries");
  return checked_symmetric(m, sym_tol, lineno);
}

std::string format_matrix_csv(const Eigen::MatrixXd& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

Graph parse_graph_json(const std::string& text) {
  const auto j = parse_json(text);
  try {
    const int n = j.at("n").get<int>();
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 2) throw InputError("edge entries must be [i, j] pairs");
      edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
    return Graph(n, edges);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed graph JSON: ") + e.what(), 1);
  }
}

std::string format_graph_json(const Graph& g) {
  nlohmann::json j;
  j["n"] = g.n();
  j["edges"] = nlohmann::json::array();
  for (auto [a, b] : g.edges()) j["edges"].push_back({a, b});
  return j.dump() + "\n";
}

SymMatrixd parse_matrix_json(const std::string& text, double sym_tol) {
  const auto j = parse_json(text);
  try {
    const auto& rows = j.at("matrix");
    const auto n = static_cast<Eigen::Index>(rows.size());
    if (j.contains("n") && j["n"].get<Eigen::Index>() != n) {
      throw ParseError("\"n\" disagrees with the matrix size", 1);
    }
    if (n == 0) throw ParseError("empty matrix", 1);
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& row = rows[static_cast<std::size_t>(i)];
      if (static_cast<Eigen::Index>(row.size()) != n) throw ParseError("matrix is not square", 1);
      for (Eigen::Index k = 0; k < n; ++k) m(i, k) = row[static_cast<std::size_t>(k)].get<double>();
    }
    if (!m.allFinite()) throw InputError("matrix has non-finite entries");
    return checked_symmetric(m, sym_tol, 1);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed matrix JSON: ") + e.what(), 1);
  }
}

std::string format_matrix_json(const Eigen::MatrixXd& m) {
  nlohmann::json j;
  j["n"] = m.rows();
  j["matrix"] = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    auto row = nlohmann::json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    j["matrix"].push_back(std::move(row));
  }
  return j.dump() + "\n";
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed for '" + path + "'");
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("write failed for '" + path + "'");
}

Graph read_graph(const std::string& path) { return read_graph(path, format_from_path(path)); }

Graph read_graph(const std::string& path, FileFormat format) {
  const std::string text = read_text(path);
  switch (format) {
    case FileFormat::Json:
      return parse_graph_json(text);
    case FileFormat::Csv:
      return Graph::from_adjacency(parse_matrix_csv(text).dense());
    case FileFormat::EdgeList:
      break;
  }
  return parse_edge_list(text);
}

void write_graph(const Graph& g, const std::string& path) {
  write_graph(g, path, format_from_path(path));
}

void write_graph(const Graph& g, const std::string& path, FileFormat format) {
  switch (format) {
    case FileFormat::Json:
      return write_text(path, format_graph_json(g));
    case FileFormat::Csv:
      return write_text(path, format_matrix_csv(g.adjacency()));
    case FileFormat::EdgeList:
      break;
  }
  write_text(path, format_edge_list(g));
}

SymMatrixd read_matrix(const std::string& path) {
  const auto f = format_from_path(path);
  return read_matrix(path, f == FileFormat::Json ? f : FileFormat::Csv);
}

SymMatrixd read_matrix(const std::string& path, FileFormat format) {
  const std::string text = read_text(path);
  if (format == FileFormat::EdgeList) throw InputError("matrices are stored as CSV or JSON");
  return format == FileFormat::Json ? parse_matrix_json(text) : parse_matrix_csv(text);
}

void write_matrix(const Eigen::MatrixXd& m, const std::string& path) {
  const auto f = format_from_path(path);
  write_matrix(m, path, f == FileFormat::Json ? f : FileFormat::Csv);
}

void write_matrix(const Eigen::MatrixXd& m, const std::string& path, FileFormat format) {
  if (format == FileFormat::EdgeList) throw InputError("matrices are stored as CSV or JSON");
  write_text(path, format == FileFormat::Json ? format_matrix_json(m) : format_matrix_csv(m));
}

}  // namespace rdpg
