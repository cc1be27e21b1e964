#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "eazy/harness.hpp"

namespace eazy {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

bool parse_bool(const std::string& value, std::size_t line_no) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw FormatError("line " + std::to_string(line_no) + ": expected true/false, got '" +
                    value + "'");
}

std::string resolve_path(const std::string& path, const std::string& base_dir) {
  if (base_dir.empty() || path.empty() || path.front() == '/') return path;
  return base_dir + "/" + path;
}

}  // namespace

MatrixConfig parse_matrix_config(std::istream& in, const std::string& base_dir) {
  MatrixConfig config;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    std::size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      throw FormatError("line " + std::to_string(line_no) + ": expected key = value");
    std::string key = trim(stripped.substr(0, eq));
    std::string value = trim(stripped.substr(eq + 1));
    if (key.empty() || value.empty())
      throw FormatError("line " + std::to_string(line_no) + ": empty key or value");

    try {
      if (key == "pair") {
        std::istringstream ss(value);
        std::string train_path, test_path, extra;
        ss >> train_path >> test_path;
        if (train_path.empty() || test_path.empty() || (ss >> extra))
          throw FormatError("pair needs exactly two paths");
        config.pairs.emplace_back(resolve_path(train_path, base_dir),
                                  resolve_path(test_path, base_dir));
      } else if (key == "method") {
        config.methods.push_back(parse_method_token(value));
      } else if (key == "repeats") {
        config.repeats = std::stoull(value);
      } else if (key == "master_seed") {
        config.master_seed = std::stoull(value);
      } else if (key == "validation_fraction") {
        config.validation_fraction = std::stod(value);
      } else if (key == "redraw_split_per_repeat") {
        config.redraw_split_per_repeat = parse_bool(value, line_no);
      } else if (key == "standardize") {
        config.standardize = parse_bool(value, line_no);
      } else if (key == "threads") {
        config.threads = static_cast<unsigned>(std::stoul(value));
      } else if (key.rfind("param.", 0) == 0) {
        std::string rest = key.substr(6);
        std::size_t dot = rest.find('.');
        if (dot == std::string::npos || dot == 0 || dot + 1 >= rest.size())
          throw FormatError("parameter keys look like param.<method>.<name>");
        Method method = parse_method_token(rest.substr(0, dot));
        config.params[method][rest.substr(dot + 1)] = value;
      } else {
        throw FormatError("unknown key '" + key + "'");
      }
    } catch (const FormatError&) {
      throw;
    } catch (const std::exception& e) {
      throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (config.pairs.empty())
    throw FormatError("matrix config needs at least one 'pair' entry");
  if (config.methods.empty())
    throw FormatError("matrix config needs at least one 'method' entry");
  return config;
}

MatrixConfig load_matrix_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open matrix config '" + path + "'");
  std::string base_dir;
  if (std::size_t slash = path.find_last_of('/'); slash != std::string::npos)
    base_dir = path.substr(0, slash);
  try {
    return parse_matrix_config(in, base_dir);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

ReportFormat parse_report_format(const std::string& token) {
  if (token == "csv") return ReportFormat::Csv;
  if (token == "markdown") return ReportFormat::Markdown;
  throw DataError("unknown report format '" + token + "' (expected csv or markdown)");
}

namespace {

std::string fixed2(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string accuracy_cell(const ExperimentReport& report) {
  std::string cell = fixed2(report.mean_accuracy * 100.0);
  if (report.method == Method::EaZy && report.mean_cluster_count)
    cell += "(" + std::to_string(std::llround(*report.mean_cluster_count)) + ")";
  return cell;
}

std::string emit_csv(const MatrixResult& result) {
  std::ostringstream out;
  out << "train,test,method,acc_mean,apcer_mean,clusters_mean,repeats\n";
  for (const auto& cell : result.cells) {
    if (cell.report) {
      const auto& r = *cell.report;
      out << r.train_name << ',' << r.test_name << ',' << method_token(cell.method) << ','
          << fixed2(r.mean_accuracy * 100.0) << ','
          << (r.mean_apcer ? fixed2(*r.mean_apcer) : "") << ','
          << (r.mean_cluster_count ? fixed2(*r.mean_cluster_count) : "") << ','
          << r.repeats << '\n';
    } else {
      out << cell.train_path << ',' << cell.test_path << ',' << method_token(cell.method)
          << ",,,," << 0 << '\n';
    }
  }
  return out.str();
}

std::string emit_markdown(const MatrixResult& result) {
  std::ostringstream out;
  out << "| Dataset |";
  for (Method m : result.methods)
    out << ' ' << method_display_name(m) << " Acc. | " << method_display_name(m)
        << " APCER |";
  out << '\n';
  out << "|---|";
  for (std::size_t j = 0; j < result.methods.size(); ++j) out << "---|---|";
  out << '\n';

  const std::size_t k = result.methods.size();
  std::vector<double> acc_sums(k, 0.0);
  std::vector<double> apcer_sums(k, 0.0);
  std::vector<std::size_t> acc_counts(k, 0), apcer_counts(k, 0);

  for (std::size_t p = 0; p < result.pair_count; ++p) {
    const auto& first = result.cells[p * k];
    std::string row_name =
        first.report ? first.report->train_name + "-" + first.report->test_name
                     : first.train_path + "-" + first.test_path;
    out << "| " << row_name << " |";
    for (std::size_t j = 0; j < k; ++j) {
      const auto& cell = result.cells[p * k + j];
      if (cell.report) {
        out << ' ' << accuracy_cell(*cell.report) << " | "
            << (cell.report->mean_apcer ? fixed2(*cell.report->mean_apcer) : "-") << " |";
        acc_sums[j] += cell.report->mean_accuracy * 100.0;
        ++acc_counts[j];
        if (cell.report->mean_apcer) {
          apcer_sums[j] += *cell.report->mean_apcer;
          ++apcer_counts[j];
        }
      } else {
        out << " error | error |";
      }
    }
    out << '\n';
  }

  out << "| Average |";
  for (std::size_t j = 0; j < k; ++j) {
    out << ' '
        << (acc_counts[j] ? fixed2(acc_sums[j] / static_cast<double>(acc_counts[j])) : "-")
        << " | "
        << (apcer_counts[j] ? fixed2(apcer_sums[j] / static_cast<double>(apcer_counts[j]))
                            : "-")
        << " |";
  }
  out << '\n';
  return out.str();
}

}  // namespace

std::string emit_report(const MatrixResult& result, ReportFormat format) {
  if (result.cells.empty()) throw DataError("emit_report: no cells to report");
  return format == ReportFormat::Csv ? emit_csv(result) : emit_markdown(result);
}

}  // namespace eazy
