#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>
#include <string>
#include <vector>

#include "facekit/attendance.hpp"
#include "facekit/errors.hpp"
#include "testutil.hpp"

using namespace facekit;

namespace {

// 2010-04-16 12:51:00.128 UTC
constexpr int64_t kT0 = 1271422260128;
constexpr int64_t kDay = 86'400'000;

AttendanceRecord rec(const std::string& enroll, int64_t ts,
                     AttendanceEvent ev = AttendanceEvent::Entry,
                     double det_ms = 220.128) {
    AttendanceRecord r;
    r.source_image = enroll + ".png";
    r.name = "Name " + enroll;
    r.enrollment_no = enroll;
    r.timestamp_ms = ts;
    r.detection_ms = det_ms;
    r.event = ev;
    return r;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("event names round-trip") {
    CHECK(std::string(event_name(AttendanceEvent::Entry)) == "Entry");
    CHECK(std::string(event_name(AttendanceEvent::Exit)) == "Exit");
    CHECK(event_from_name("Entry") == AttendanceEvent::Entry);
    CHECK(event_from_name("Exit") == AttendanceEvent::Exit);
    CHECK_THROWS_AS(event_from_name("entry"), FormatError);
    CHECK_THROWS_AS(event_from_name(""), FormatError);
}

TEST_CASE("append assigns increasing sequence numbers and validates input") {
    testutil::TempDir dir("facekit-attend");
    AttendanceLog log(dir.path() / "log.ndjson");
    CHECK(log.append(rec("E1", kT0)) == 1);
    CHECK(log.append(rec("E2", kT0)) == 2);  // equal timestamps are fine
    CHECK(log.append(rec("E1", kT0 + 5)) == 3);
    CHECK(log.records().size() == 3);
    CHECK(log.records()[2].seq == 3);

    CHECK_THROWS_AS(log.append(rec("E1", kT0 + 10, AttendanceEvent::Entry, -1.0)),
                    ValueError);
    CHECK_THROWS_AS(log.append(rec("E1", kT0 + 4)), ValueError);  // time goes back
    AttendanceRecord no_enroll = rec("", kT0 + 10);
    CHECK_THROWS_AS(log.append(no_enroll), ValueError);
    CHECK(log.records().size() == 3);  // failed appends leave no trace
}

TEST_CASE("the store reloads to the exact same records and keeps counting") {
    testutil::TempDir dir("facekit-attend");
    auto path = dir.path() / "log.ndjson";
    std::vector<AttendanceRecord> written;
    {
        AttendanceLog log(path);
        AttendanceRecord tricky = rec("EN,7", kT0);
        tricky.name = "Ann \"Andy\" Lee,\nline two";
        tricky.source_image = "frame 1.png";
        log.append(tricky);
        log.append(rec("E2", kT0 + 1000, AttendanceEvent::Exit, 0.0));
        log.append(rec("E3", kT0 + 2000, AttendanceEvent::Entry, 0.5));
        written = log.records();
    }
    AttendanceLog reopened(path);
    REQUIRE(reopened.records().size() == 3);
    CHECK(reopened.records() == written);
    CHECK(reopened.append(rec("E4", kT0 + 3000)) == 4);
}

TEST_CASE("the store rejects corrupt or reordered lines") {
    testutil::TempDir dir("facekit-attend");
    auto path = dir.path() / "log.ndjson";
    auto write = [&path](const std::string& text) {
        std::ofstream out(path, std::ios::binary);
        out << text;
    };
    write("{not json\n");
    CHECK_THROWS_AS(AttendanceLog{path}, FormatError);
    write(R"({"seq":2,"source_image":"a","name":"n","enrollment_no":"e",)"
          R"("ts_ms":100,"detection_ms":1.0,"event":"Entry"})"
          "\n"
          R"({"seq":2,"source_image":"a","name":"n","enrollment_no":"e",)"
          R"("ts_ms":200,"detection_ms":1.0,"event":"Entry"})"
          "\n");
    CHECK_THROWS_AS(AttendanceLog{path}, FormatError);  // seq stalls
    write(R"({"seq":1,"source_image":"a","name":"n","enrollment_no":"e",)"
          R"("ts_ms":200,"detection_ms":1.0,"event":"Entry"})"
          "\n"
          R"({"seq":2,"source_image":"a","name":"n","enrollment_no":"e",)"
          R"("ts_ms":100,"detection_ms":1.0,"event":"Entry"})"
          "\n");
    CHECK_THROWS_AS(AttendanceLog{path}, FormatError);  // time goes back
    write(R"({"seq":1,"source_image":"a","name":"n","enrollment_no":"e",)"
          R"("ts_ms":100,"detection_ms":1.0,"event":"Sighted"})"
          "\n");
    CHECK_THROWS_AS(AttendanceLog{path}, FormatError);  // unknown event

    // blank lines are tolerated
    write("\n"
          R"({"seq":1,"source_image":"a","name":"n","enrollment_no":"e",)"
          R"("ts_ms":100,"detection_ms":1.0,"event":"Exit"})"
          "\n\n");
    CHECK(AttendanceLog{path}.records().size() == 1);
}

TEST_CASE("same-type repeats are suppressed inside the cool-down window") {
    testutil::TempDir dir("facekit-attend");
    AttendanceLog log(dir.path() / "log.ndjson", 60'000);
    CHECK(log.log_event(rec("A", kT0)).has_value());
    CHECK_FALSE(log.log_event(rec("A", kT0 + 1)).has_value());
    CHECK_FALSE(log.log_event(rec("A", kT0 + 59'999)).has_value());
    // a different event type is not a repeat
    CHECK(log.log_event(rec("A", kT0 + 10, AttendanceEvent::Exit)).has_value());
    // neither is a different subject
    CHECK(log.log_event(rec("B", kT0 + 20)).has_value());
    // the window closes exactly at the cool-down
    CHECK(log.log_event(rec("A", kT0 + 60'000)).has_value());
    // ...and reopens measured from the latest matching row
    CHECK_FALSE(log.log_event(rec("A", kT0 + 60'000 + 59'999)).has_value());
    CHECK(log.records().size() == 4);
}

TEST_CASE("sightings alternate Entry/Exit per subject with a daily reset") {
    testutil::TempDir dir("facekit-attend");
    AttendanceLog log(dir.path() / "log.ndjson", 60'000);

    // the requested event type on a sighting is ignored; the log decides
    auto first = log.log_sighting(rec("A", kT0, AttendanceEvent::Exit));
    REQUIRE(first.has_value());
    CHECK(log.records().back().event == AttendanceEvent::Entry);

    // any sighting inside the window is the same sighting
    CHECK_FALSE(log.log_sighting(rec("A", kT0 + 30'000)).has_value());

    CHECK(log.log_sighting(rec("A", kT0 + 60'000)).has_value());
    CHECK(log.records().back().event == AttendanceEvent::Exit);

    // an unrelated subject starts its own pairing
    CHECK(log.log_sighting(rec("B", kT0 + 90'000)).has_value());
    CHECK(log.records().back().event == AttendanceEvent::Entry);

    CHECK(log.log_sighting(rec("A", kT0 + 120'000)).has_value());
    CHECK(log.records().back().event == AttendanceEvent::Entry);

    // first sighting of a new day is an Entry even after a dangling Entry
    CHECK(log.log_sighting(rec("A", kT0 + kDay)).has_value());
    CHECK(log.records().back().event == AttendanceEvent::Entry);
    CHECK(log.log_sighting(rec("B", kT0 + kDay + 1000)).has_value());
    CHECK(log.records().back().event == AttendanceEvent::Entry);

    // alternation resumes within the new day
    CHECK(log.log_sighting(rec("A", kT0 + kDay + 70'000)).has_value());
    CHECK(log.records().back().event == AttendanceEvent::Exit);
}

TEST_CASE("CSV export and import round-trip every field exactly") {
    std::vector<AttendanceRecord> records;
    AttendanceRecord a = rec("EN,1", kT0);
    a.seq = 1;
    a.name = "O'Neil, Jr.";
    a.source_image = "say \"cheese\".png";
    a.detection_ms = 220.128;
    AttendanceRecord b = rec("EN2", kT0 + 61'000, AttendanceEvent::Exit, 0.0);
    b.seq = 2;
    b.name = "line\nbreak";
    AttendanceRecord c = rec("EN3", kT0 + kDay, AttendanceEvent::Entry, 0.5);
    c.seq = 3;
    records = {a, b, c};

    testutil::TempDir dir("facekit-csv");
    auto path = dir.path() / "out.csv";
    export_csv(records, path);

    std::string text = slurp(path);
    CHECK(text.rfind("seq,source_image,name,enrollment_no,date,time,detection_ms,event\r\n",
                     0) == 0);
    CHECK(text.find("2010-04-16,12:51:00.128,220.128,Entry") != std::string::npos);

    std::vector<AttendanceRecord> back = import_csv(path);
    REQUIRE(back.size() == records.size());
    for (size_t i = 0; i < records.size(); ++i) CHECK(back[i] == records[i]);
}

TEST_CASE("CSV import rejects malformed tables") {
    testutil::TempDir dir("facekit-csv");
    auto path = dir.path() / "bad.csv";
    auto write = [&path](const std::string& text) {
        std::ofstream out(path, std::ios::binary);
        out << text;
    };
    const std::string header =
        "seq,source_image,name,enrollment_no,date,time,detection_ms,event\r\n";

    CHECK_THROWS_AS(import_csv(dir.path() / "absent.csv"), IoError);
    write("nope,b,c,d,e,f,g,h\r\n");
    CHECK_THROWS_AS(import_csv(path), FormatError);
    write(header + "1,a,n,e,2010-04-16,12:51:00.128,1.5\r\n");
    CHECK_THROWS_AS(import_csv(path), FormatError);  // 7 fields
    write(header + "x,a,n,e,2010-04-16,12:51:00.128,1.5,Entry\r\n");
    CHECK_THROWS_AS(import_csv(path), FormatError);  // seq not a number
    write(header + "1,a,n,e,someday,12:51:00.128,1.5,Entry\r\n");
    CHECK_THROWS_AS(import_csv(path), FormatError);
    write(header + "1,a,n,e,2010-04-16,noon,1.5,Entry\r\n");
    CHECK_THROWS_AS(import_csv(path), FormatError);
    write(header + "1,a,n,e,2010-04-16,12:51:00.128,fast,Entry\r\n");
    CHECK_THROWS_AS(import_csv(path), FormatError);
    write(header + "1,a,n,e,2010-04-16,12:51:00.128,1.5,Arrive\r\n");
    CHECK_THROWS_AS(import_csv(path), FormatError);
    write("");
    CHECK_THROWS_AS(import_csv(path), FormatError);  // no header at all
    write(header);
    CHECK(import_csv(path).empty());
}
