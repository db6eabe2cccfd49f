#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "osmot/box.hpp"

namespace osmot {

/// One MOT Challenge row:
///   frame, id, left, top, width, height, conf, x, y, z
/// id is −1 for raw detections; unused reals are −1. Ground-truth files use
/// the trailing fields as (class, visibility, unused).
struct MotRecord {
  long frame = 1;
  long id = -1;
  double left = 0;
  double top = 0;
  double width = 1;
  double height = 1;
  double conf = -1;
  std::array<double, 3> extra = {-1, -1, -1};

  Box box() const { return Box::from_tlwh(left, top, width, height); }

  bool operator==(const MotRecord&) const = default;
};

/// Records of one sequence, grouped by frame.
class SequenceResult {
 public:
  struct Frame {
    long frame;
    std::span<const MotRecord> records;
  };

  SequenceResult() = default;

  /// Stable-sorts by frame and rejects duplicate (frame, id) pairs among
  /// identified records (id != −1) with InvalidInputError.
  static SequenceResult from_records(std::vector<MotRecord> records);

  const std::vector<MotRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  /// Consecutive runs of equal frame number, ascending.
  std::vector<Frame> frames() const;

  long last_frame() const { return records_.empty() ? 0 : records_.back().frame; }

  bool operator==(const SequenceResult&) const = default;

 private:
  std::vector<MotRecord> records_;
};

/// Comma-separated rows with 6 to 10 fields; blank lines are skipped and
/// absent trailing fields read as −1. Errors carry the 1-based line.
SequenceResult parse_mot(std::istream& in);
SequenceResult parse_mot_file(const std::filesystem::path& path);

/// Validated rows in file order, without grouping.
std::vector<MotRecord> parse_mot_rows(std::istream& in);
std::vector<MotRecord> parse_mot_rows_file(const std::filesystem::path& path);

/// Ten fields per row, reals with up to 6 significant digits.
void write_mot(std::ostream& out, const SequenceResult& r);
void write_mot_file(const std::filesystem::path& path, const SequenceResult& r);

}  // namespace osmot
