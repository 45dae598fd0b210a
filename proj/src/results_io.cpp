#include "bdris/results_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "bdris/types.hpp"

namespace bdris {

namespace {

using nlohmann::json;

bool same_double(double a, double b) {
  return (std::isnan(a) && std::isnan(b)) || a == b;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument(s);
  return v;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

std::vector<std::string> row_fields(const ResultRow& r) {
  std::vector<std::string> f = {r.sweep_kind,
                                r.sweep_value,
                                std::to_string(r.trial),
                                std::to_string(r.seed),
                                r.stage1,
                                r.stage2,
                                std::to_string(r.m),
                                std::to_string(r.mg),
                                format_double(r.pt_dbm),
                                format_double(r.il),
                                format_double(r.delta_inr_db),
                                format_double(r.sum_rate)};
  for (double rate : r.rates) f.push_back(format_double(rate));
  f.push_back(std::to_string(r.iters_stage1));
  f.push_back(format_double(r.wall_ms_stage1));
  f.push_back(format_double(r.wall_ms_stage2));
  f.push_back(r.status);
  return f;
}

ResultRow row_from_fields(const std::vector<std::string>& f, int users) {
  ResultRow r;
  std::size_t i = 0;
  r.sweep_kind = f[i++];
  r.sweep_value = f[i++];
  r.trial = std::stoi(f[i++]);
  r.seed = std::stoull(f[i++]);
  r.stage1 = f[i++];
  r.stage2 = f[i++];
  r.m = std::stoi(f[i++]);
  r.mg = std::stoi(f[i++]);
  r.pt_dbm = parse_double(f[i++]);
  r.il = parse_double(f[i++]);
  r.delta_inr_db = parse_double(f[i++]);
  r.sum_rate = parse_double(f[i++]);
  for (int k = 0; k < users; ++k) r.rates.push_back(parse_double(f[i++]));
  r.iters_stage1 = std::stoi(f[i++]);
  r.wall_ms_stage1 = parse_double(f[i++]);
  r.wall_ms_stage2 = parse_double(f[i++]);
  r.status = f[i++];
  return r;
}

// JSON has no NaN; non-finite values travel as strings.
json json_number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

double from_json_number(const json& j) {
  return j.is_string() ? parse_double(j.get<std::string>()) : j.get<double>();
}

}  // namespace

bool ResultRow::operator==(const ResultRow& o) const {
  if (rates.size() != o.rates.size()) return false;
  for (std::size_t i = 0; i < rates.size(); ++i) {
    if (!same_double(rates[i], o.rates[i])) return false;
  }
  return sweep_kind == o.sweep_kind && sweep_value == o.sweep_value && trial == o.trial &&
         seed == o.seed && stage1 == o.stage1 && stage2 == o.stage2 && m == o.m &&
         mg == o.mg && same_double(pt_dbm, o.pt_dbm) && same_double(il, o.il) &&
         same_double(delta_inr_db, o.delta_inr_db) && same_double(sum_rate, o.sum_rate) &&
         iters_stage1 == o.iters_stage1 && same_double(wall_ms_stage1, o.wall_ms_stage1) &&
         same_double(wall_ms_stage2, o.wall_ms_stage2) && status == o.status;
}

ResultFormat parse_format(const std::string& text) {
  if (text == "csv") return ResultFormat::csv;
  if (text == "jsonl") return ResultFormat::jsonl;
  throw InvalidConfig("unknown output format '" + text + "' (csv|jsonl)");
}

std::vector<std::string> result_columns(int users) {
  std::vector<std::string> cols = {"sweep_kind", "sweep_value", "trial",  "seed",
                                   "stage1",     "stage2",      "M",      "Mg",
                                   "pt_dbm",     "il",          "delta_inr_db", "sum_rate"};
  for (int k = 1; k <= users; ++k) cols.push_back("rate_" + std::to_string(k));
  cols.insert(cols.end(), {"iters_stage1", "wall_ms_stage1", "wall_ms_stage2", "status"});
  return cols;
}

void write_results(const ResultTable& table, const std::string& path, ResultFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  const auto cols = result_columns(table.users);
  for (const auto& r : table.rows) {
    if (static_cast<int>(r.rates.size()) != table.users) {
      throw InvalidDimension("write_results: row rate count differs from table users");
    }
  }
  if (format == ResultFormat::csv) {
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << '\n';
    for (const auto& r : table.rows) {
      const auto f = row_fields(r);
      for (std::size_t i = 0; i < f.size(); ++i) out << (i ? "," : "") << csv_field(f[i]);
      out << '\n';
    }
  } else {
    // Header line names the columns so an empty table still carries its schema.
    out << json{{"columns", cols}}.dump() << '\n';
    for (const auto& r : table.rows) {
      json j = json::object();
      j["sweep_kind"] = r.sweep_kind;
      j["sweep_value"] = r.sweep_value;
      j["trial"] = r.trial;
      j["seed"] = r.seed;
      j["stage1"] = r.stage1;
      j["stage2"] = r.stage2;
      j["M"] = r.m;
      j["Mg"] = r.mg;
      j["pt_dbm"] = json_number(r.pt_dbm);
      j["il"] = json_number(r.il);
      j["delta_inr_db"] = json_number(r.delta_inr_db);
      j["sum_rate"] = json_number(r.sum_rate);
      for (std::size_t k = 0; k < r.rates.size(); ++k) {
        j["rate_" + std::to_string(k + 1)] = json_number(r.rates[k]);
      }
      j["iters_stage1"] = r.iters_stage1;
      j["wall_ms_stage1"] = json_number(r.wall_ms_stage1);
      j["wall_ms_stage2"] = json_number(r.wall_ms_stage2);
      j["status"] = r.status;
      out << j.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
    }
  }
  out.flush();
  if (!out) throw IoError("write failed for '" + path + "'");
}

ResultTable read_results(const std::string& path, ResultFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  ResultTable table;
  std::string line;
  int line_no = 0;
  try {
    if (format == ResultFormat::csv) {
      if (!std::getline(in, line)) throw IoError("'" + path + "': missing header");
      ++line_no;
      const auto header = split_csv(line);
      table.users = static_cast<int>(header.size()) - 16;
      if (table.users < 0 || header != result_columns(table.users)) {
        throw IoError("'" + path + "': unexpected header");
      }
      while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != header.size()) {
          throw IoError("'" + path + "':" + std::to_string(line_no) + ": wrong field count");
        }
        table.rows.push_back(row_from_fields(f, table.users));
      }
    } else {
      if (!std::getline(in, line)) throw IoError("'" + path + "': missing header");
      ++line_no;
      const auto cols = json::parse(line).at("columns").get<std::vector<std::string>>();
      table.users = static_cast<int>(cols.size()) - 16;
      if (table.users < 0 || cols != result_columns(table.users)) {
        throw IoError("'" + path + "': unexpected header");
      }
      while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const json j = json::parse(line);
        ResultRow r;
        r.sweep_kind = j.at("sweep_kind").get<std::string>();
        r.sweep_value = j.at("sweep_value").get<std::string>();
        r.trial = j.at("trial").get<int>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.stage1 = j.at("stage1").get<std::string>();
        r.stage2 = j.at("stage2").get<std::string>();
        r.m = j.at("M").get<int>();
        r.mg = j.at("Mg").get<int>();
        r.pt_dbm = from_json_number(j.at("pt_dbm"));
        r.il = from_json_number(j.at("il"));
        r.delta_inr_db = from_json_number(j.at("delta_inr_db"));
        r.sum_rate = from_json_number(j.at("sum_rate"));
        for (int k = 1; k <= table.users; ++k) {
          r.rates.push_back(from_json_number(j.at("rate_" + std::to_string(k))));
        }
        r.iters_stage1 = j.at("iters_stage1").get<int>();
        r.wall_ms_stage1 = from_json_number(j.at("wall_ms_stage1"));
        r.wall_ms_stage2 = from_json_number(j.at("wall_ms_stage2"));
        r.status = j.at("status").get<std::string>();
        table.rows.push_back(std::move(r));
      }
    }
  } catch (const IoError&) {
    throw;
  } catch (const std::exception& e) {
    throw IoError("'" + path + "':" + std::to_string(line_no) + ": " + e.what());
  }
  return table;
}

}  // namespace bdris
