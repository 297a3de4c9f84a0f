// csv_io.cpp
#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <tuple>

#include "phase_bandit/harness.hpp"

namespace phase_bandit {

namespace {

// Shortest representation that round-trips exactly.
void put_number(std::string& out, double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

template <typename Int>
void put_int(std::string& out, Int v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

void put_optional(std::string& out, const std::optional<double>& v) {
  if (v) put_number(out, *v);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

template <typename T>
T field_number(std::string_view text, std::size_t line_no, std::string_view column) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError("line " + std::to_string(line_no) + ": bad value '" + std::string(text) + "' in column " +
                     std::string(column));
  }
  return value;
}

std::optional<double> field_optional(std::string_view text, std::size_t line_no, std::string_view column) {
  if (text.empty()) return std::nullopt;
  return field_number<double>(text, line_no, column);
}

}  // namespace

std::string format_csv(const RegretSummary& summary) {
  std::vector<const CellSummary*> rows;
  for (const auto& c : summary.cells) rows.push_back(&c);
  std::stable_sort(rows.begin(), rows.end(), [](const CellSummary* a, const CellSummary* b) {
    return std::tie(a->policy, a->d, a->n) < std::tie(b->policy, b->d, b->n);
  });

  std::string out(kCsvHeader);
  out += '\n';
  for (const CellSummary* c : rows) {
    out += c->policy;
    out += ',';
    put_int(out, c->d);
    out += ',';
    put_int(out, c->n);
    out += ',';
    put_number(out, c->r);
    out += ',';
    put_number(out, c->sigma);
    out += ',';
    put_number(out, c->scale);
    out += ',';
    put_int(out, c->seeds);
    out += ',';
    put_number(out, c->mean_cum_regret);
    out += ',';
    put_optional(out, c->se_cum_regret);
    out += ',';
    put_number(out, c->mean_simple_regret);
    out += ',';
    put_optional(out, c->se_simple_regret);
    out += ',';
    put_optional(out, c->mean_warm_rounds);
    out += ',';
    put_optional(out, c->warm_success_rate);
    out += '\n';
  }
  return out;
}

RegretSummary parse_csv(std::string_view text) {
  RegretSummary summary;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool header_seen = false;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!header_seen) {
      if (line != kCsvHeader) throw ParseError("line 1: unexpected header '" + std::string(line) + "'");
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 13) {
      throw ParseError("line " + std::to_string(line_no) + ": expected 13 fields, found " +
                       std::to_string(f.size()));
    }
    if (f[0].empty()) throw ParseError("line " + std::to_string(line_no) + ": empty policy name");
    CellSummary c;
    c.policy = std::string(f[0]);
    c.d = field_number<int>(f[1], line_no, "d");
    c.n = field_number<std::int64_t>(f[2], line_no, "n");
    c.r = field_number<double>(f[3], line_no, "r");
    c.sigma = field_number<double>(f[4], line_no, "sigma");
    c.scale = field_number<double>(f[5], line_no, "scale");
    c.seeds = field_number<int>(f[6], line_no, "seeds");
    c.mean_cum_regret = field_number<double>(f[7], line_no, "mean_cum_regret");
    c.se_cum_regret = field_optional(f[8], line_no, "se_cum_regret");
    c.mean_simple_regret = field_number<double>(f[9], line_no, "mean_simple_regret");
    c.se_simple_regret = field_optional(f[10], line_no, "se_simple_regret");
    c.mean_warm_rounds = field_optional(f[11], line_no, "mean_warm_rounds");
    c.warm_success_rate = field_optional(f[12], line_no, "warm_success_rate");
    summary.cells.push_back(std::move(c));
  }
  if (!header_seen) throw ParseError("line 1: missing header");
  return summary;
}

void emit_csv(const RegretSummary& summary, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << format_csv(summary);
  if (!out.flush()) throw IoError("failed writing '" + path + "'");
}

RegretSummary read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

}  // namespace phase_bandit
