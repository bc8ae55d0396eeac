#pragma once

// File formats for graphs and symmetric matrices.
//
//   edge list   one "i j" pair per line, 0-indexed; '#' starts a comment.
//               A "# nodes <n>" comment fixes n (otherwise max index + 1),
//               so isolated trailing nodes survive a round trip.
//   CSV         n rows of n comma-separated reals; an optional first row
//               containing a non-numeric field is treated as a header.
//   JSON        {"n": n, "edges": [[i, j], ...]} or {"n": n, "matrix": [[...], ...]}.
//
// Malformed input throws ParseError carrying the 1-based line number;
// unreadable or unwritable paths throw IoError.

#include <string>

#include "rdpg/graph.hpp"

namespace rdpg {

enum class FileFormat { EdgeList, Csv, Json };

/// From the extension: .json -> Json, .csv -> Csv, anything else -> EdgeList.
FileFormat format_from_path(const std::string& path);
/// Accepts "edges", "edgelist", "csv", "json"; throws InputError otherwise.
FileFormat parse_format(const std::string& name);

Graph parse_edge_list(const std::string& text);
std::string format_edge_list(const Graph& g);

/// Symmetry is checked to `sym_tol` relative to the largest entry.
SymMatrixd parse_matrix_csv(const std::string& text, double sym_tol = 1e-9);
std::string format_matrix_csv(const Eigen::MatrixXd& m);

Graph parse_graph_json(const std::string& text);
std::string format_graph_json(const Graph& g);
SymMatrixd parse_matrix_json(const std::string& text, double sym_tol = 1e-9);
std::string format_matrix_json(const Eigen::MatrixXd& m);

/// Graphs: edge list, JSON, or a CSV 0/1 adjacency matrix.
Graph read_graph(const std::string& path);
Graph read_graph(const std::string& path, FileFormat format);
void write_graph(const Graph& g, const std::string& path);
void write_graph(const Graph& g, const std::string& path, FileFormat format);

/// Matrices: CSV or JSON.
SymMatrixd read_matrix(const std::string& path);
SymMatrixd read_matrix(const std::string& path, FileFormat format);
void write_matrix(const Eigen::MatrixXd& m, const std::string& path);
void write_matrix(const Eigen::MatrixXd& m, const std::string& path, FileFormat format);

std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);

}  // namespace rdpg
