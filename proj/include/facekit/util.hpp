#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace facekit {

std::string base64_encode(const unsigned char* data, size_t len);
std::vector<unsigned char> base64_decode(const std::string& text);

// RFC-4180: quote fields containing comma, quote or newline; double embedded quotes.
std::string csv_escape(const std::string& field);
// Parses one CSV record starting at *pos in text; advances *pos past the record
// (including its terminating newline). Quoted fields may span lines.
std::vector<std::string> csv_parse_record(const std::string& text, size_t* pos);

// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double v);
double parse_double(const std::string& s);

// Civil <-> epoch conversions, UTC, no timezone dependence.
struct CivilTime {
    int year, month, day;        // month 1-12, day 1-31
    int hour, minute, second;    // 24h clock
    int millisecond;
};
CivilTime civil_from_epoch_ms(int64_t ms);
int64_t epoch_ms_from_civil(const CivilTime& c);

// ISO-8601 pieces used by the CSV log: "YYYY-MM-DD" and "HH:MM:SS.mmm".
std::string iso_date(int64_t epoch_ms);
std::string iso_time(int64_t epoch_ms);
int64_t parse_iso_datetime(const std::string& date, const std::string& time);

// Files named "<number>.<ext>" in dir, sorted by numeric value of the stem.
struct NumberedFile {
    long number;
    std::filesystem::path path;
};
std::vector<NumberedFile> numbered_files(const std::filesystem::path& dir,
                                         const std::vector<std::string>& extensions);
// Highest numeric stem in dir (0 when none), for continuing chip sequences.
long highest_numbered_file(const std::filesystem::path& dir);

}  // namespace facekit
