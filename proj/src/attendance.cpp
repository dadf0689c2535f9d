#include "facekit/attendance.hpp"

#include <fstream>
#include <limits>

#include "facekit/errors.hpp"
#include "facekit/util.hpp"
#include "json.hpp"

namespace facekit {

const char* event_name(AttendanceEvent e) {
    return e == AttendanceEvent::Entry ? "Entry" : "Exit";
}

AttendanceEvent event_from_name(const std::string& s) {
    if (s == "Entry") return AttendanceEvent::Entry;
    if (s == "Exit") return AttendanceEvent::Exit;
    throw FormatError("unknown attendance event: " + s);
}

namespace {

void validate(const AttendanceRecord& r, int64_t last_ts) {
    if (r.detection_ms < 0) throw ValueError("detection time must be non-negative");
    if (r.timestamp_ms < last_ts)
        throw ValueError("timestamps must be non-decreasing in log order");
    if (r.enrollment_no.empty()) throw ValueError("enrollment number is required");
}

nlohmann::json to_json(const AttendanceRecord& r) {
    return {{"seq", r.seq},
            {"source_image", r.source_image},
            {"name", r.name},
            {"enrollment_no", r.enrollment_no},
            {"ts_ms", r.timestamp_ms},
            {"detection_ms", r.detection_ms},
            {"event", event_name(r.event)}};
}

AttendanceRecord from_json(const nlohmann::json& j) {
    AttendanceRecord r;
    r.seq = j.at("seq").get<long>();
    r.source_image = j.at("source_image").get<std::string>();
    r.name = j.at("name").get<std::string>();
    r.enrollment_no = j.at("enrollment_no").get<std::string>();
    r.timestamp_ms = j.at("ts_ms").get<int64_t>();
    r.detection_ms = j.at("detection_ms").get<double>();
    r.event = event_from_name(j.at("event").get<std::string>());
    return r;
}

}  // namespace

AttendanceLog::AttendanceLog(std::filesystem::path store, int64_t cooldown_ms)
    : store_(std::move(store)), cooldown_ms_(cooldown_ms) {
    std::ifstream in(store_, std::ios::binary);
    if (!in) return;  // fresh log
    std::string line;
    long last_seq = 0;
    int64_t last_ts = std::numeric_limits<int64_t>::min();
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        AttendanceRecord r;
        try {
            r = from_json(nlohmann::json::parse(line));
        } catch (const nlohmann::json::exception& e) {
            throw FormatError("corrupt attendance log line: " + std::string(e.what()));
        }
        if (r.seq <= last_seq) throw FormatError("attendance log seq not increasing");
        if (r.timestamp_ms < last_ts)
            throw FormatError("attendance log timestamps decrease");
        last_seq = r.seq;
        last_ts = r.timestamp_ms;
        records_.push_back(std::move(r));
    }
}

long AttendanceLog::append(AttendanceRecord rec) {
    validate(rec, records_.empty() ? std::numeric_limits<int64_t>::min()
                                   : records_.back().timestamp_ms);
    rec.seq = records_.empty() ? 1 : records_.back().seq + 1;
    std::ofstream out(store_, std::ios::binary | std::ios::app);
    if (!out) throw IoError("cannot open attendance log: " + store_.string());
    out << to_json(rec).dump() << '\n';
    if (!out.flush()) throw IoError("failed appending to attendance log");
    records_.push_back(std::move(rec));
    return records_.back().seq;
}

std::optional<long> AttendanceLog::log_event(AttendanceRecord rec) {
    for (auto it = records_.rbegin(); it != records_.rend(); ++it) {
        if (it->enrollment_no != rec.enrollment_no || it->event != rec.event) continue;
        if (rec.timestamp_ms - it->timestamp_ms < cooldown_ms_) return std::nullopt;
        break;
    }
    return append(std::move(rec));
}

std::optional<long> AttendanceLog::log_sighting(AttendanceRecord rec) {
    const AttendanceRecord* last = nullptr;
    for (auto it = records_.rbegin(); it != records_.rend(); ++it)
        if (it->enrollment_no == rec.enrollment_no) {
            last = &*it;
            break;
        }
    if (last) {
        if (rec.timestamp_ms - last->timestamp_ms < cooldown_ms_) return std::nullopt;
        // A new day resets the pairing; otherwise alternate.
        rec.event = iso_date(last->timestamp_ms) != iso_date(rec.timestamp_ms)
                        ? AttendanceEvent::Entry
                    : last->event == AttendanceEvent::Entry ? AttendanceEvent::Exit
                                                            : AttendanceEvent::Entry;
    } else {
        rec.event = AttendanceEvent::Entry;
    }
    return append(std::move(rec));
}

void export_csv(const std::vector<AttendanceRecord>& records,
                const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write CSV file: " + path.string());
    out << "seq,source_image,name,enrollment_no,date,time,detection_ms,event\r\n";
    for (const AttendanceRecord& r : records) {
        out << r.seq << ',' << csv_escape(r.source_image) << ','
            << csv_escape(r.name) << ',' << csv_escape(r.enrollment_no) << ','
            << iso_date(r.timestamp_ms) << ',' << iso_time(r.timestamp_ms) << ','
            << format_double(r.detection_ms) << ',' << event_name(r.event) << "\r\n";
    }
    if (!out.flush()) throw IoError("failed writing CSV file: " + path.string());
}

std::vector<AttendanceRecord> import_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open CSV file: " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    size_t pos = 0;
    std::vector<AttendanceRecord> out;
    bool header = true;
    while (pos < text.size()) {
        std::vector<std::string> fields = csv_parse_record(text, &pos);
        if (fields.size() == 1 && fields[0].empty()) continue;  // trailing newline
        if (fields.size() != 8)
            throw FormatError("attendance CSV row must have 8 fields");
        if (header) {
            if (fields[0] != "seq")
                throw FormatError("attendance CSV header mismatch");
            header = false;
            continue;
        }
        AttendanceRecord r;
        try {
            r.seq = std::stol(fields[0]);
        } catch (const std::exception&) {
            throw FormatError("invalid seq field: '" + fields[0] + "'");
        }
        r.source_image = fields[1];
        r.name = fields[2];
        r.enrollment_no = fields[3];
        r.timestamp_ms = parse_iso_datetime(fields[4], fields[5]);
        r.detection_ms = parse_double(fields[6]);
        r.event = event_from_name(fields[7]);
        out.push_back(std::move(r));
    }
    if (header) throw FormatError("attendance CSV is missing its header");
    return out;
}

}  // namespace facekit
