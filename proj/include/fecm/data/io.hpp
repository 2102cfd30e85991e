#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <boost/tokenizer.hpp>

#include "fecm/data/panel.hpp"
#include "fecm/error.hpp"

namespace fecm::io {

/// Shortest decimal text that reads back to the same double.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "NA";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// Fixed-point text with `digits` decimals, never "-0.00".
inline std::string format_fixed(double v, int digits) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, digits);
  std::string s(buf, res.ptr);
  if (!s.empty() && s[0] == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

inline char detect_delimiter(const std::string& header) {
  if (header.find('\t') != std::string::npos) return '\t';
  if (header.find(';') != std::string::npos && header.find(',') == std::string::npos) return ';';
  return ',';
}

inline std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

/// Splits one delimited line, honouring double-quoted fields.
inline std::vector<std::string> split_line(const std::string& line, char delim) {
  using Sep = boost::escaped_list_separator<char>;
  boost::tokenizer<Sep> tok(line, Sep('\0', delim, '"'));
  std::vector<std::string> out;
  for (const auto& field : tok) out.push_back(trim(field));
  return out;
}

inline std::string quote_if_needed(const std::string& s, char delim) {
  if (s.find(delim) == std::string::npos && s.find('"') == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

inline double parse_value(const std::string& field, const std::string& where) {
  if (field.empty() || field == "NA" || field == "NaN" || field == "nan" || field == ".")
    return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size())
    throw ConfigError("cannot parse number '" + field + "' at " + where);
  return v;
}

inline bool parse_bool(const std::string& field, const std::string& where) {
  std::string s;
  for (char c : field) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (s == "1" || s == "true" || s == "yes" || s == "y") return true;
  if (s == "0" || s == "false" || s == "no" || s == "n" || s.empty()) return false;
  throw ConfigError("cannot parse boolean '" + field + "' at " + where);
}

inline std::vector<SeriesMeta> read_metadata(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("metadata file is empty");
  const char delim = detect_delimiter(line);
  const auto header = split_line(line, delim);
  auto col = [&](const std::string& name, bool required) -> int {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    if (required) throw ConfigError("metadata file lacks column '" + name + "'");
    return -1;
  };
  const int c_id = col("id", false);
  const int c_mn = col("mnemonic", true);
  const int c_desc = col("description", false);
  const int c_tc = col("tc", true);
  const int c_ir = col("is_interest_rate", false);
  const int c_io = col("integration_order", false);

  std::vector<SeriesMeta> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split_line(line, delim);
    const std::string where = "metadata line " + std::to_string(line_no);
    auto get = [&](int c) { return c >= 0 && static_cast<std::size_t>(c) < f.size() ? f[static_cast<std::size_t>(c)] : std::string(); };
    SeriesMeta m;
    m.id = c_id >= 0 ? std::stoi(get(c_id)) : static_cast<int>(out.size()) + 1;
    m.mnemonic = get(c_mn);
    m.description = get(c_desc);
    int tc = 0;
    const std::string tcs = get(c_tc);
    auto r = std::from_chars(tcs.data(), tcs.data() + tcs.size(), tc);
    if (r.ec != std::errc()) throw ConfigError("bad transformation code '" + tcs + "' at " + where);
    m.tc = transform_code_from_int(tc);
    m.is_interest_rate = c_ir >= 0 && parse_bool(get(c_ir), where);
    const std::string io = get(c_io);
    if (io == "I1" || io == "1") m.integration_order = IntegrationOrder::I1;
    else if (io == "I0" || io == "0") m.integration_order = IntegrationOrder::I0;
    else if (!io.empty()) throw ConfigError("bad integration order '" + io + "' at " + where);
    if (m.mnemonic.empty()) throw ConfigError("empty mnemonic at " + where);
    out.push_back(std::move(m));
  }
  return out;
}

inline void write_metadata(std::ostream& out, const std::vector<SeriesMeta>& meta) {
  out << "id,mnemonic,description,tc,is_interest_rate,integration_order\n";
  for (const auto& m : meta) {
    out << m.id << ',' << quote_if_needed(m.mnemonic, ',') << ',' << quote_if_needed(m.description, ',') << ','
        << to_int(m.tc) << ',' << (m.is_interest_rate ? "true" : "false") << ',';
    if (m.integration_order) out << (*m.integration_order == IntegrationOrder::I1 ? "I1" : "I0");
    out << '\n';
  }
}

/// Reads `date,<mnemonic>...` rows and attaches metadata by mnemonic. Missing
/// values become NaN; balancing is left to balance_panel.
inline Panel read_panel(std::istream& in, const std::vector<SeriesMeta>& meta) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("panel file is empty");
  const char delim = detect_delimiter(line);
  const auto header = split_line(line, delim);
  if (header.empty() || header[0] != "date") throw ConfigError("panel file must start with a 'date' column");

  std::map<std::string, const SeriesMeta*> by_name;
  for (const auto& m : meta) by_name[m.mnemonic] = &m;

  Panel p;
  for (std::size_t j = 1; j < header.size(); ++j) {
    auto it = by_name.find(header[j]);
    if (it == by_name.end()) throw ConfigError("panel column '" + header[j] + "' has no metadata entry");
    p.meta.push_back(*it->second);
  }
  std::vector<std::vector<double>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split_line(line, delim);
    const std::string where = "panel line " + std::to_string(line_no);
    if (f.size() != header.size())
      throw ConfigError(where + " has " + std::to_string(f.size()) + " fields, expected " +
                        std::to_string(header.size()));
    p.time_index.push_back(Quarter::parse(f[0]));
    std::vector<double> row;
    for (std::size_t j = 1; j < f.size(); ++j) row.push_back(parse_value(f[j], where + ", column " + header[j]));
    rows.push_back(std::move(row));
  }
  p.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(p.meta.size()));
  for (std::size_t t = 0; t < rows.size(); ++t)
    for (std::size_t j = 0; j < rows[t].size(); ++j) p.values(static_cast<Index>(t), static_cast<Index>(j)) = rows[t][j];
  p.validate();
  return p;
}

/// Writes a matrix with a leading date column.
inline void write_dated_matrix(std::ostream& out, const std::vector<Quarter>& dates, const std::vector<std::string>& names,
                               const Matrix& values) {
  if (static_cast<std::size_t>(values.rows()) != dates.size() || static_cast<std::size_t>(values.cols()) != names.size())
    throw ContractError("write_dated_matrix: shape mismatch");
  out << "date";
  for (const auto& n : names) out << ',' << quote_if_needed(n, ',');
  out << '\n';
  for (Index t = 0; t < values.rows(); ++t) {
    out << dates[static_cast<std::size_t>(t)].to_string();
    for (Index j = 0; j < values.cols(); ++j) out << ',' << format_double(values(t, j));
    out << '\n';
  }
}

inline void write_panel(std::ostream& out, const Panel& p) {
  std::vector<std::string> names;
  for (const auto& m : p.meta) names.push_back(m.mnemonic);
  write_dated_matrix(out, p.time_index, names, p.values);
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  return out;
}

inline std::vector<SeriesMeta> load_metadata(const std::string& path) {
  auto in = open_input(path);
  return read_metadata(in);
}

inline Panel load_panel(const std::string& data_path, const std::string& meta_path) {
  const auto meta = load_metadata(meta_path);
  auto in = open_input(data_path);
  return balance_panel(read_panel(in, meta));
}

}  // namespace fecm::io
