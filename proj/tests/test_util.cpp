#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdint>
#include <fstream>
#include <random>

#include "facekit/errors.hpp"
#include "facekit/util.hpp"
#include "testutil.hpp"

using namespace facekit;

TEST_CASE("base64 round-trips arbitrary byte strings") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> len(0, 200), byte(0, 255);
    for (int t = 0; t < 50; ++t) {
        std::vector<unsigned char> data(len(rng));
        for (auto& b : data) b = static_cast<unsigned char>(byte(rng));
        std::string enc = base64_encode(data.data(), data.size());
        CHECK(base64_decode(enc) == data);
    }
}

TEST_CASE("base64 known vectors") {
    auto enc = [](const std::string& s) {
        return base64_encode(reinterpret_cast<const unsigned char*>(s.data()), s.size());
    };
    CHECK(enc("") == "");
    CHECK(enc("f") == "Zg==");
    CHECK(enc("fo") == "Zm8=");
    CHECK(enc("foo") == "Zm9v");
    CHECK(enc("foobar") == "Zm9vYmFy");
}

TEST_CASE("csv escaping quotes exactly the fields that need it") {
    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("") == "");
    CHECK(csv_escape("a,b") == "\"a,b\"");
    CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv_escape("line\nbreak") == "\"line\nbreak\"");
}

TEST_CASE("csv record parsing handles quoting, embedded newlines and CRLF") {
    std::string text = "a,\"b,c\",\"d\"\"e\"\r\nnext,\"multi\nline\",last\n";
    size_t pos = 0;
    auto r1 = csv_parse_record(text, &pos);
    REQUIRE(r1.size() == 3);
    CHECK(r1[0] == "a");
    CHECK(r1[1] == "b,c");
    CHECK(r1[2] == "d\"e");
    auto r2 = csv_parse_record(text, &pos);
    REQUIRE(r2.size() == 3);
    CHECK(r2[1] == "multi\nline");
    CHECK(pos == text.size());
}

TEST_CASE("csv escape/parse round-trips adversarial fields") {
    std::vector<std::string> fields = {"", "x", "a,b", "\"", "\r\n", "q\"\"q", ",,", "end\n"};
    std::string line;
    for (size_t i = 0; i < fields.size(); ++i) {
        if (i) line += ',';
        line += csv_escape(fields[i]);
    }
    line += "\r\n";
    size_t pos = 0;
    auto parsed = csv_parse_record(line, &pos);
    CHECK(parsed == fields);
}

TEST_CASE("format_double emits shortest exact representation") {
    for (double v : {0.0, 1.0, -1.5, 0.1, 1e-300, 1.2345678901234567e17, -3.14159}) {
        CHECK(parse_double(format_double(v)) == v);
    }
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(2.0) == "2");
}

TEST_CASE("civil time round-trips across leap years and day boundaries") {
    for (int64_t ms : {0LL, 951827696000LL, 1271422260000LL, -86400000LL, 4102444799999LL}) {
        CivilTime c = civil_from_epoch_ms(ms);
        CHECK(epoch_ms_from_civil(c) == ms);
    }
    CivilTime c = civil_from_epoch_ms(1271422260000LL);  // 2010-04-16 12:51:00
    CHECK(c.year == 2010);
    CHECK(c.month == 4);
    CHECK(c.day == 16);
    CHECK(c.hour == 12);
    CHECK(c.minute == 51);
}

TEST_CASE("iso date and time formatting") {
    int64_t ms = 1271422260128LL;
    CHECK(iso_date(ms) == "2010-04-16");
    CHECK(iso_time(ms) == "12:51:00.128");
    CHECK(parse_iso_datetime("2010-04-16", "12:51:00.128") == ms);
}

TEST_CASE("numbered_files sorts by numeric stem, not lexically") {
    testutil::TempDir dir("facekit-util");
    for (const char* name : {"10.png", "2.png", "1.png", "notes.txt", "03.png"}) {
        std::ofstream(dir.path() / name) << "x";
    }
    auto files = numbered_files(dir.path(), {".png"});
    REQUIRE(files.size() == 4);
    CHECK(files[0].number == 1);
    CHECK(files[1].number == 2);
    CHECK(files[2].number == 3);
    CHECK(files[3].number == 10);
    CHECK(highest_numbered_file(dir.path()) == 10);
}

TEST_CASE("highest_numbered_file is 0 for empty or missing directories") {
    testutil::TempDir dir("facekit-util");
    CHECK(highest_numbered_file(dir.path()) == 0);
    CHECK(highest_numbered_file(dir.path() / "nope") == 0);
}
