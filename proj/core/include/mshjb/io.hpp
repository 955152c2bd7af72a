#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mshjb/diagnostics.hpp"
#include "mshjb/hjb.hpp"
#include "mshjb/lagrangian.hpp"
#include "mshjb/model.hpp"

namespace mshjb {

/// Parses a model document (UTF-8 JSON). Throws ParseError with the full
/// violation list, each entry tagged with its reaction index.
MultiScaleNetwork parse_model(const std::string& text);

/// Inverse of parse_model: parse_model(serialize_model(net)) == net.
std::string serialize_model(const MultiScaleNetwork& net);

/// Control-family document {"controls": [{label, drift, cost}, ...]}.
ControlHamiltonian parse_control(const std::string& text);
std::string serialize_control(const ControlHamiltonian& ch);

/// Streaming JSON writer with deterministic output: doubles carry 17
/// significant digits so binary64 payloads round-trip and repeated runs are
/// byte-identical. Non-finite values serialize as null.
class JsonWriter {
 public:
  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array();
  JsonWriter& end_array();
  JsonWriter& key(const std::string& k);
  JsonWriter& value(double v);
  JsonWriter& value(long v);
  JsonWriter& value(int v) { return value(static_cast<long>(v)); }
  JsonWriter& value(std::uint64_t v);
  JsonWriter& value(bool v);
  JsonWriter& value(const std::string& v);
  JsonWriter& value(const char* v) { return value(std::string(v)); }
  JsonWriter& value(const std::vector<double>& v);
  JsonWriter& value(const std::vector<std::string>& v);
  JsonWriter& null_value();

  const std::string& str() const { return out_; }

 private:
  void separator();
  std::string out_;
  std::vector<bool> needs_comma_;
  bool pending_key_ = false;
};

/// Formats one double exactly as the JSON/CSV writers do (%.17g).
std::string format_double(double v);

/// GridFunction CSV: header x_1..x_l,value, row-major lexicographic nodes.
std::string write_grid_function_csv(const GridFunction& gf);
GridFunction read_grid_function_csv(const std::string& text);

/// Path CSV: header t,x_1..x_l.
std::string write_path_csv(const PathSample& path);
PathSample read_path_csv(const std::string& text);

/// Doubling report CSV: eps,alpha,x_1..x_l,y_1..y_l,penalty,H_diff.
std::string write_doubling_csv(const std::vector<DoublingRow>& rows,
                               int slow_dim);

/// FNV-1a 64-bit content hash, hex-encoded; used for manifest model hashes.
std::string fnv1a_hex(const std::string& bytes);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace mshjb
