#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace facekit {

enum class AttendanceEvent { Entry, Exit };
const char* event_name(AttendanceEvent e);
AttendanceEvent event_from_name(const std::string& s);

struct AttendanceRecord {
    long seq = 0;  // assigned by the log, strictly increasing
    std::string source_image;
    std::string name;
    std::string enrollment_no;
    int64_t timestamp_ms = 0;  // UTC epoch milliseconds
    double detection_ms = 0.0;
    AttendanceEvent event = AttendanceEvent::Entry;

    bool operator==(const AttendanceRecord&) const = default;
};

// Append-only store over newline-delimited JSON; every append is flushed to
// disk before returning. Timestamps must be non-decreasing and detection
// times non-negative.
class AttendanceLog {
  public:
    explicit AttendanceLog(std::filesystem::path store, int64_t cooldown_ms = 60'000);

    // Unconditional append (validates, assigns seq).
    long append(AttendanceRecord rec);

    // Suppresses a repeat of the same subject + same event type inside the
    // cool-down window; returns the assigned seq when logged.
    std::optional<long> log_event(AttendanceRecord rec);

    // Pipeline entry point: any sighting of a subject inside the cool-down
    // window is the same sighting (no row). Otherwise the event alternates
    // per subject, starting each day with Entry.
    std::optional<long> log_sighting(AttendanceRecord rec);

    const std::vector<AttendanceRecord>& records() const { return records_; }
    int64_t cooldown_ms() const { return cooldown_ms_; }
    const std::filesystem::path& path() const { return store_; }

  private:
    std::filesystem::path store_;
    int64_t cooldown_ms_;
    std::vector<AttendanceRecord> records_;
};

// Header: seq,source_image,name,enrollment_no,date,time,detection_ms,event
// RFC-4180 quoting, ISO-8601 date/time (UTC, millisecond precision).
void export_csv(const std::vector<AttendanceRecord>& records,
                const std::filesystem::path& path);
std::vector<AttendanceRecord> import_csv(const std::filesystem::path& path);

}  // namespace facekit
