#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "netinfer/datalog/ast.hpp"
#include "netinfer/inference/network.hpp"
#include "netinfer/sim/landscape.hpp"

namespace netinfer::io {

/// A file could not be read or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Well-formed text that does not describe a valid document.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr const char* kSchemaVersion = "1";

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

/// Parses and concatenates fact files. ParseError messages name the file.
std::vector<dl::Literal> read_fact_files(const std::vector<std::filesystem::path>& paths);

/// One `fact.` per line, in the given order.
std::string format_facts(const std::vector<dl::Literal>& facts);

/// JSON document with schema_version "1". Keys are sorted; output is stable.
std::string export_network(const infer::NetworkGraph& graph);
/// Inverse of export_network. Throws FormatError.
infer::NetworkGraph import_network(const std::string& json);

std::string export_truth(const sim::GroundTruth& truth);
sim::GroundTruth import_truth(const std::string& json);

/// Systems as boxes, groups as labeled edges, hosts as dashed references.
std::string to_dot(const infer::NetworkGraph& graph);

/// Human-readable summary. With `score`, the category rows are appended.
std::string format_report(const infer::NetworkGraph& graph, const sim::ScoreReport* score = nullptr);

}  // namespace netinfer::io
