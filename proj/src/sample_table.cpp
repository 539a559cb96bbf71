#include "fdcate/sample_table.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>

namespace fdcate {

namespace {

std::string row_col(std::size_t row, const std::string& col) {
  return "row " + std::to_string(row) + ", column '" + col + "'";
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur.push_back('"');
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (quoted) throw DataError("unterminated quoted field");
  out.push_back(cur);
  return out;
}

std::string trim(std::string s) {
  auto not_space = [](unsigned char ch) { return !std::isspace(ch); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

double parse_cell(const std::string& raw, std::size_t row, const std::string& col) {
  const std::string cell = trim(raw);
  if (cell.empty()) throw DataError("missing value at " + row_col(row, col));
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec == std::errc::result_out_of_range) {
    throw DataError("non-finite value '" + cell + "' at " + row_col(row, col));
  }
  if (ec != std::errc() || ptr != last) {
    throw DataError("non-numeric value '" + cell + "' at " + row_col(row, col));
  }
  if (!std::isfinite(v)) throw DataError("non-finite value '" + cell + "' at " + row_col(row, col));
  return v;
}

int parse_binary(const std::string& raw, std::size_t row, const std::string& col) {
  const double v = parse_cell(raw, row, col);
  if (v != 0.0 && v != 1.0) {
    std::ostringstream os;
    os << "value " << v << " is not binary at " << row_col(row, col);
    throw DataError(os.str());
  }
  return static_cast<int>(v);
}

}  // namespace

SampleTable::SampleTable(RowMatrix c, std::vector<int> x, std::vector<int> z, std::vector<double> y,
                         std::vector<std::string> covariate_names)
    : c_(std::move(c)), x_(std::move(x)), z_(std::move(z)), y_(std::move(y)),
      names_(std::move(covariate_names)) {
  const std::size_t n = y_.size();
  if (n == 0) throw DataError("sample table needs at least one row");
  if (x_.size() != n || z_.size() != n || static_cast<std::size_t>(c_.rows()) != n) {
    throw DataError("sample table columns differ in length");
  }
  if (c_.cols() == 0) throw DataError("sample table needs at least one covariate column");
  if (!names_.empty() && names_.size() != static_cast<std::size_t>(c_.cols())) {
    throw DataError("covariate name count does not match covariate columns");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (x_[i] != 0 && x_[i] != 1) throw DataError("x is not binary at row " + std::to_string(i + 1));
    if (z_[i] != 0 && z_[i] != 1) throw DataError("z is not binary at row " + std::to_string(i + 1));
    if (!std::isfinite(y_[i])) throw DataError("y is not finite at row " + std::to_string(i + 1));
  }
  if (!c_.allFinite()) {
    for (Eigen::Index i = 0; i < c_.rows(); ++i) {
      for (Eigen::Index j = 0; j < c_.cols(); ++j) {
        if (!std::isfinite(c_(i, j))) {
          throw DataError("covariate " + std::to_string(j + 1) + " is not finite at row " +
                          std::to_string(i + 1));
        }
      }
    }
  }
}

SampleTable SampleTable::subset(std::span<const std::size_t> indices) const {
  RowMatrix c(static_cast<Eigen::Index>(indices.size()), c_.cols());
  std::vector<int> x(indices.size()), z(indices.size());
  std::vector<double> y(indices.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const std::size_t i = indices[k];
    if (i >= rows()) throw std::out_of_range("subset index out of range");
    c.row(static_cast<Eigen::Index>(k)) = c_.row(static_cast<Eigen::Index>(i));
    x[k] = x_[i];
    z[k] = z_[i];
    y[k] = y_[i];
  }
  return SampleTable(std::move(c), std::move(x), std::move(z), std::move(y), names_);
}

std::vector<std::size_t> FoldPlan::rows_in(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldPlan::rows_not_in(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] != fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldPlan::fold_sizes() const {
  std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
  for (int a : assignments) ++sizes[static_cast<std::size_t>(a)];
  return sizes;
}

FoldPlan make_folds(std::size_t n, int k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("fold count must be at least 2");
  if (n < static_cast<std::size_t>(k)) {
    throw std::invalid_argument("cannot split " + std::to_string(n) + " rows into " +
                                std::to_string(k) + " folds");
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.assignments.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) plan.assignments[perm[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
  return plan;
}

SampleTable load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  if (schema.c_cols.empty()) throw DataError("schema needs at least one covariate column");
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw DataError("missing header row in " + path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header = split_fields(line);
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t j = 0; j < header.size(); ++j) index.emplace(trim(header[j]), j);

  auto locate = [&](const std::string& name) {
    auto it = index.find(name);
    if (it == index.end()) throw DataError("column '" + name + "' not found in header");
    return it->second;
  };
  const std::size_t xj = locate(schema.x_col);
  const std::size_t zj = locate(schema.z_col);
  const std::size_t yj = locate(schema.y_col);
  std::vector<std::size_t> cj;
  for (const auto& name : schema.c_cols) cj.push_back(locate(name));

  std::vector<double> cvals;
  std::vector<int> x, z;
  std::vector<double> y;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    ++row;
    std::vector<std::string> fields;
    try {
      fields = split_fields(line);
    } catch (const DataError& e) {
      throw DataError(std::string(e.what()) + " at row " + std::to_string(row));
    }
    if (fields.size() != header.size()) {
      throw DataError("row " + std::to_string(row) + " has " + std::to_string(fields.size()) +
                      " fields, header has " + std::to_string(header.size()));
    }
    x.push_back(parse_binary(fields[xj], row, schema.x_col));
    z.push_back(parse_binary(fields[zj], row, schema.z_col));
    y.push_back(parse_cell(fields[yj], row, schema.y_col));
    for (std::size_t k = 0; k < cj.size(); ++k) cvals.push_back(parse_cell(fields[cj[k]], row, schema.c_cols[k]));
  }
  if (row == 0) throw DataError("no data rows in " + path.string());

  RowMatrix c = Eigen::Map<RowMatrix>(cvals.data(), static_cast<Eigen::Index>(row),
                                      static_cast<Eigen::Index>(cj.size()));
  return SampleTable(std::move(c), std::move(x), std::move(z), std::move(y), schema.c_cols);
}

CsvSchema default_schema(const SampleTable& table) {
  CsvSchema schema;
  if (!table.covariate_names().empty()) {
    schema.c_cols = table.covariate_names();
  } else {
    for (std::size_t j = 0; j < table.covariate_dim(); ++j) schema.c_cols.push_back("c" + std::to_string(j + 1));
  }
  return schema;
}

void write_csv(const SampleTable& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  const CsvSchema schema = default_schema(table);
  for (const auto& name : schema.c_cols) out << name << ',';
  out << schema.x_col << ',' << schema.z_col << ',' << schema.y_col << '\n';
  char buf[40];
  for (std::size_t i = 0; i < table.rows(); ++i) {
    for (double v : table.covariates(i)) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << buf << ',';
    }
    std::snprintf(buf, sizeof buf, "%.17g", table.y()[i]);
    out << table.x()[i] << ',' << table.z()[i] << ',' << buf << '\n';
  }
  if (!out) throw DataError("failed while writing " + path.string());
}

}  // namespace fdcate
