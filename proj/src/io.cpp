#include "pennmm/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "pennmm/errors.hpp"

namespace pennmm::io {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_field(const std::string& field, std::size_t line_no) {
  std::size_t pos = 0;
  double v;
  try {
    v = std::stod(field, &pos);
  } catch (const std::exception&) {
    throw CsvError("cannot parse numeric field '" + field + "'", line_no);
  }
  while (pos < field.size() && std::isspace(static_cast<unsigned char>(field[pos]))) ++pos;
  if (pos != field.size())
    throw CsvError("trailing characters in numeric field '" + field + "'", line_no);
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Dataset read_csv(const std::string& path, Family family) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open '" + path + "'", 0);

  std::string line;
  if (!std::getline(in, line)) throw CsvError("missing header row", 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_line(line);

  const std::size_t meta = family == Family::Cox ? 2 : 1;
  if (header.size() < meta + 1)
    throw CsvError("header needs a response and at least one covariate", 1);
  if (family == Family::Cox && (header[0] != "time" || header[1] != "status"))
    throw CsvError("Cox input must start with columns 'time,status'", 1);

  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_line(line);
    if (fields.size() != header.size())
      throw CsvError("expected " + std::to_string(header.size()) + " fields, found " +
                         std::to_string(fields.size()),
                     line_no);
    std::vector<double> row(fields.size());
    for (std::size_t j = 0; j < fields.size(); ++j) row[j] = parse_field(fields[j], line_no);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw CsvError("no data rows", line_no);

  Dataset data;
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto d = static_cast<Eigen::Index>(header.size() - meta);
  data.design.resize(n, d);
  data.response.resize(n);
  if (family == Family::Cox) data.status = Eigen::VectorXd(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    data.response[i] = row[0];
    if (family == Family::Cox) {
      (*data.status)[i] = row[1];
    }
    for (Eigen::Index j = 0; j < d; ++j)
      data.design(i, j) = row[meta + static_cast<std::size_t>(j)];
  }
  data.column_names.assign(header.begin() + static_cast<std::ptrdiff_t>(meta),
                           header.end());
  return data;
}

void write_csv(const Dataset& data, Family family, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  if (family == Family::Cox)
    out << "time,status";
  else
    out << "y";
  for (Eigen::Index j = 0; j < data.d(); ++j) out << ',' << data.column_name(j);
  out << '\n';
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    out << format_double(data.response[i]);
    if (family == Family::Cox) out << ',' << format_double((*data.status)[i]);
    for (Eigen::Index j = 0; j < data.d(); ++j)
      out << ',' << format_double(data.design(i, j));
    out << '\n';
  }
}

}  // namespace pennmm::io
