#include "osmot/mot_format.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <utility>

#include "osmot/errors.hpp"

namespace osmot {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

double parse_real(std::string_view field, std::size_t line, int column) {
  field = trim(field);
  double v = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size() ||
      !std::isfinite(v)) {
    throw ParseError("field " + std::to_string(column) + " is not a number: '" +
                         std::string(field) + "'",
                     line);
  }
  return v;
}

long parse_integral(std::string_view field, std::size_t line, int column) {
  const double v = parse_real(field, line, column);
  if (v != std::floor(v) || std::abs(v) > 1e15) {
    throw ParseError("field " + std::to_string(column) + " must be an integer", line);
  }
  return static_cast<long>(v);
}

MotRecord parse_row(std::string_view row, std::size_t line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = row.find(',', start);
    fields.push_back(row.substr(start, comma == std::string_view::npos ? row.npos
                                                                        : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (fields.size() < 6 || fields.size() > 10) {
    throw ParseError("expected 6 to 10 fields, got " + std::to_string(fields.size()), line);
  }
  MotRecord r;
  r.frame = parse_integral(fields[0], line, 1);
  r.id = parse_integral(fields[1], line, 2);
  r.left = parse_real(fields[2], line, 3);
  r.top = parse_real(fields[3], line, 4);
  r.width = parse_real(fields[4], line, 5);
  r.height = parse_real(fields[5], line, 6);
  if (fields.size() > 6) r.conf = parse_real(fields[6], line, 7);
  for (std::size_t i = 7; i < fields.size(); ++i) {
    r.extra[i - 7] = parse_real(fields[i], line, static_cast<int>(i + 1));
  }
  if (r.frame < 1) throw ParseError("frame must be >= 1", line);
  if (r.id < 1 && r.id != -1) throw ParseError("id must be positive or -1", line);
  if (!(r.width > 0) || !(r.height > 0)) {
    throw ParseError("box width and height must be positive", line);
  }
  return r;
}

void append_real(std::string& out, double v) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.6g", v);
  out.append(buf, static_cast<std::size_t>(n));
}

}  // namespace

SequenceResult SequenceResult::from_records(std::vector<MotRecord> records) {
  std::stable_sort(records.begin(), records.end(),
                   [](const MotRecord& a, const MotRecord& b) { return a.frame < b.frame; });
  std::set<std::pair<long, long>> seen;
  for (const MotRecord& r : records) {
    if (r.id == -1) continue;
    if (!seen.insert({r.frame, r.id}).second) {
      throw InvalidInputError("duplicate record for frame " + std::to_string(r.frame) +
                              ", id " + std::to_string(r.id));
    }
  }
  SequenceResult s;
  s.records_ = std::move(records);
  return s;
}

std::vector<SequenceResult::Frame> SequenceResult::frames() const {
  std::vector<Frame> out;
  std::size_t i = 0;
  while (i < records_.size()) {
    std::size_t j = i;
    while (j < records_.size() && records_[j].frame == records_[i].frame) ++j;
    out.push_back({records_[i].frame, std::span<const MotRecord>(records_).subspan(i, j - i)});
    i = j;
  }
  return out;
}

std::vector<MotRecord> parse_mot_rows(std::istream& in) {
  std::vector<MotRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = trim(line);
    if (row.empty()) continue;
    records.push_back(parse_row(row, line_no));
  }
  return records;
}

std::vector<MotRecord> parse_mot_rows_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return parse_mot_rows(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string(), e.detail(), e.line());
  }
}

SequenceResult parse_mot(std::istream& in) {
  return SequenceResult::from_records(parse_mot_rows(in));
}

SequenceResult parse_mot_file(const std::filesystem::path& path) {
  return SequenceResult::from_records(parse_mot_rows_file(path));
}

void write_mot(std::ostream& out, const SequenceResult& r) {
  std::string row;
  for (const MotRecord& rec : r.records()) {
    row.clear();
    row += std::to_string(rec.frame);
    row += ',';
    row += std::to_string(rec.id);
    for (double v : {rec.left, rec.top, rec.width, rec.height, rec.conf, rec.extra[0],
                     rec.extra[1], rec.extra[2]}) {
      row += ',';
      append_real(row, v);
    }
    row += '\n';
    out << row;
  }
}

void write_mot_file(const std::filesystem::path& path, const SequenceResult& r) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  write_mot(out, r);
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace osmot
