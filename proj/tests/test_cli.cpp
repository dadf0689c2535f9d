// End-to-end runs of the installed binary; the path arrives in FACEKIT_BIN.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "facekit/attendance.hpp"
#include "facekit/recognizer.hpp"
#include "testutil.hpp"

namespace fs = std::filesystem;
using namespace facekit;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
}

int count_pngs(const fs::path& dir) {
    int n = 0;
    if (!fs::is_directory(dir)) return 0;
    for (const auto& e : fs::directory_iterator(dir))
        n += e.path().extension() == ".png";
    return n;
}

std::string grep_line(const std::string& text, const std::string& prefix) {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line))
        if (line.rfind(prefix, 0) == 0) return line;
    return {};
}

struct Run {
    int code = -1;
    std::string out;
};

// Everything the pipeline produces, built once: a trained cascade, an
// enrolled model, detection frames, and one attend session.
struct Fix {
    testutil::TempDir dir{"facekit-cli"};
    std::string bin;
    Run train, enroll, detect, attend, report;
    Roster roster;

    std::string p(const std::string& rel) const { return (dir.path() / rel).string(); }

    Run run(const std::string& cmd) {
        static int counter = 0;
        fs::path log = dir.path() / ("cmd_" + std::to_string(counter++) + ".txt");
        int rc = std::system((cmd + " >" + log.string() + " 2>&1").c_str());
        Run r;
        r.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
        r.out = slurp(log);
        return r;
    }

    Fix() {
        const char* env = std::getenv("FACEKIT_BIN");
        if (!env || !*env) throw std::runtime_error("FACEKIT_BIN is not set");
        bin = env;

        std::mt19937_64 rng(211);
        fs::create_directories(p("pos"));
        fs::create_directories(p("neg"));
        for (int i = 0; i < 30; ++i)
            save_png(testutil::box_pattern(24, 12, &rng), p("pos/" + std::to_string(i + 1) + ".png"));
        for (int i = 0; i < 60; ++i)
            save_png(testutil::noise_image(24, 24, rng), p("neg/" + std::to_string(i + 1) + ".png"));

        fs::create_directories(p("frames"));
        for (int i = 0; i < 3; ++i) {
            GrayImage frame = testutil::noise_image(200, 160, rng);
            testutil::plant(&frame, testutil::box_pattern(30), 60, 40);
            save_png(frame, p("frames/" + std::to_string(i + 1) + ".png"));
        }

        roster = testutil::write_chip_gallery(dir.path() / "train", 4, 3);
        save_roster(roster, dir.path() / "roster.csv");

        train = run(bin + " train-cascade --positives " + p("pos") + " --negatives " +
                    p("neg") + " --out " + p("cascade.json") +
                    " --pool-stride 211 --min-detection 0.98 --max-stage-fp 0.35" +
                    " --overall-fp 0.002 --csv " + p("stages.csv"));
        enroll = run(bin + " enroll --training " + p("train") + " --roster " +
                     p("roster.csv") + " --out " + p("model.json") + " --seed 7");
        detect = run(bin + " detect --input " + p("frames") + " --cascade " +
                     p("cascade.json") + " --chips " + p("chips") + " --csv " +
                     p("det.csv"));
        attend = run(bin + " attend --frames " + p("frames") + " --cascade " +
                     p("cascade.json") + " --model " + p("model.json") + " --roster " +
                     p("roster.csv") + " --log " + p("log.ndjson") + " --chips " +
                     p("achips") + " --review " + p("review") +
                     " --session-start 2010-04-16T12:51:00.000 --session-step-ms 61000" +
                     " --cooldown 60 --tau 1e18");
        report = run(bin + " report --log " + p("log.ndjson") + " --csv " + p("sheet.csv"));
    }
};

Fix& fixture() {
    static Fix f;
    return f;
}

}  // namespace

TEST_CASE("cascade training reports its stages and writes the table") {
    Fix& f = fixture();
    CHECK(f.train.code == 0);
    CHECK(f.train.out.find("training on 30 positives, 60 negatives") != std::string::npos);
    CHECK(f.train.out.find("cumulative_fp=") != std::string::npos);
    CHECK(f.train.out.find("stages=") != std::string::npos);
    CHECK(fs::exists(f.p("cascade.json")));
    std::string table = slurp(f.p("stages.csv"));
    CHECK(table.rfind("stage,weaks,threshold,detection,fp_rate,negatives_left\r\n", 0) == 0);
    CHECK(table.find("\r\n1,") != std::string::npos);
}

TEST_CASE("enrollment prints the model dimensions") {
    Fix& f = fixture();
    CHECK(f.enroll.code == 0);
    CHECK(grep_line(f.enroll.out, "n=") == "n=10000");
    CHECK(grep_line(f.enroll.out, "N=") == "N=12");
    CHECK(grep_line(f.enroll.out, "C=") == "C=4");
    CHECK(grep_line(f.enroll.out, "K=") == "K=3");
    CHECK(grep_line(f.enroll.out, "tau=") != "");
    CHECK(fs::exists(f.p("model.json")));
}

TEST_CASE("re-enrolling with the same seed reproduces the model byte for byte") {
    Fix& f = fixture();
    Run again = f.run(f.bin + " enroll --training " + f.p("train") + " --roster " +
                      f.p("roster.csv") + " --out " + f.p("model2.json") + " --seed 7");
    CHECK(again.code == 0);
    CHECK(slurp(f.p("model.json")) == slurp(f.p("model2.json")));
}

TEST_CASE("detection prints timings and numbers its chips consecutively") {
    Fix& f = fixture();
    CHECK(f.detect.code == 0);
    CHECK(f.detect.out.find("1.png:") != std::string::npos);
    CHECK(f.detect.out.find("Detection Time:") != std::string::npos);
    CHECK(f.detect.out.find("msec") != std::string::npos);
    int first = count_pngs(f.p("chips"));
    CHECK(first >= 3);  // one planted box per frame
    CHECK(fs::exists(f.p("chips/1.png")));
    std::string det_table = slurp(f.p("det.csv"));
    CHECK(det_table.rfind("frame,faces,detection_ms\r\n", 0) == 0);

    // a second pass continues the numbering instead of overwriting
    Run again = f.run(f.bin + " detect --input " + f.p("frames/1.png") + " --cascade " +
                      f.p("cascade.json") + " --chips " + f.p("chips"));
    CHECK(again.code == 0);
    CHECK(count_pngs(f.p("chips")) > first);
    CHECK(fs::exists(f.p("chips/" + std::to_string(first + 1) + ".png")));
}

TEST_CASE("the attendance session logs sightings on the synthetic clock") {
    Fix& f = fixture();
    CHECK(f.attend.code == 0);
    std::string counts = grep_line(f.attend.out, "frames=");
    REQUIRE(counts != "");
    int frames = 0, dets = 0, logged = 0, suppressed = 0, unknown = 0;
    REQUIRE(std::sscanf(counts.c_str(),
                        "frames=%d detections=%d logged=%d suppressed=%d unknown=%d",
                        &frames, &dets, &logged, &suppressed, &unknown) == 5);
    CHECK(frames == 3);
    CHECK(dets >= 3);
    CHECK(logged >= 1);
    CHECK(logged + suppressed == dets);  // every accepted face is accounted for
    CHECK(unknown == 0);                 // tau override admits everything
    CHECK(count_pngs(f.p("review")) == 0);
    CHECK(count_pngs(f.p("achips")) == dets);

    AttendanceLog log(f.p("log.ndjson"));
    REQUIRE(static_cast<int>(log.records().size()) == logged);
    CHECK(log.records()[0].timestamp_ms == 1271422260000);
    CHECK(log.records()[0].event == AttendanceEvent::Entry);
    for (size_t i = 1; i < log.records().size(); ++i)
        CHECK(log.records()[i].seq == log.records()[i - 1].seq + 1);
}

TEST_CASE("the report prints the sheet and exports matching CSV") {
    Fix& f = fixture();
    CHECK(f.report.code == 0);
    CHECK(f.report.out.find("Date and Time: 4/16/2010 12:51") != std::string::npos);
    CHECK(f.report.out.find("Detection Time:") != std::string::npos);
    CHECK(f.report.out.find("msec | Entry") != std::string::npos);
    CHECK(grep_line(f.report.out, "total=") != "total=0");

    std::vector<AttendanceRecord> sheet = import_csv(f.p("sheet.csv"));
    AttendanceLog log(f.p("log.ndjson"));
    REQUIRE(sheet.size() == log.records().size());
    for (size_t i = 0; i < sheet.size(); ++i) CHECK(sheet[i] == log.records()[i]);

    // a missing log is just an empty sheet
    Run empty = f.run(f.bin + " report --log " + f.p("nolog.ndjson"));
    CHECK(empty.code == 0);
    CHECK(grep_line(empty.out, "total=") == "total=0");
}

TEST_CASE("evaluation on the training chips is perfect at rank one") {
    Fix& f = fixture();
    Run ev = f.run(f.bin + " eval --model " + f.p("model.json") + " --test " +
                   f.p("train") + " --roster " + f.p("roster.csv") + " --csv " +
                   f.p("eval.csv"));
    CHECK(ev.code == 0);
    CHECK(grep_line(ev.out, "probes=") == "probes=12 skipped=0");
    std::string lda = grep_line(ev.out, "PCA+LDA");
    REQUIRE(lda != "");
    double rank1 = 0;
    REQUIRE(std::sscanf(lda.c_str(), "%*s %lf", &rank1) == 1);
    CHECK(rank1 == doctest::Approx(1.0));
    std::string pca = grep_line(ev.out, "PCA ");
    REQUIRE(pca != "");
    std::string table = slurp(f.p("eval.csv"));
    CHECK(table.rfind("file,truth,lda_class,lda_dist,pca_class,pca_dist\r\n", 0) == 0);
}

TEST_CASE("usage problems exit with 2, runtime failures with 1") {
    Fix& f = fixture();
    CHECK(f.run(f.bin).code == 2);                        // subcommand required
    CHECK(f.run(f.bin + " --help").code == 0);
    CHECK(f.run(f.bin + " detect --nonsense 1").code == 2);
    CHECK(f.run(f.bin + " detect --cascade x.json").code == 2);  // --input required

    // missing inputs are runtime failures
    CHECK(f.run(f.bin + " detect --input " + f.p("frames") + " --cascade " +
                f.p("nothere.json"))
              .code == 1);
    CHECK(f.run(f.bin + " enroll --training " + f.p("train") + " --roster " +
                f.p("noroster.csv") + " --out " + f.p("m.json"))
              .code == 1);

    // an empty positive directory is a usage error
    fs::create_directories(f.p("empty"));
    CHECK(f.run(f.bin + " train-cascade --positives " + f.p("empty") + " --negatives " +
                f.p("neg") + " --out " + f.p("c2.json"))
              .code == 2);
}

TEST_CASE("options fall back to the config file unless a flag overrides them") {
    Fix& f = fixture();
    std::ofstream cfg(f.p("facekit.cfg"));
    cfg << "[detector]\nnms_iou = 1.5\n";
    cfg.close();

    // config value reaches the detector (an impossible threshold trips it)...
    Run bad = f.run(f.bin + " --config " + f.p("facekit.cfg") + " detect --input " +
                    f.p("frames/1.png") + " --cascade " + f.p("cascade.json") +
                    " --chips " + f.p("cfg_chips"));
    CHECK(bad.code == 1);
    CHECK(bad.out.find("iou threshold") != std::string::npos);

    // ...the environment variable is honoured the same way...
    Run env_bad = f.run("FACEKIT_CONFIG=" + f.p("facekit.cfg") + " " + f.bin +
                        " detect --input " + f.p("frames/1.png") + " --cascade " +
                        f.p("cascade.json") + " --chips " + f.p("cfg_chips"));
    CHECK(env_bad.code == 1);

    // ...and an explicit flag wins over the config file
    Run good = f.run(f.bin + " --config " + f.p("facekit.cfg") + " detect --input " +
                     f.p("frames/1.png") + " --cascade " + f.p("cascade.json") +
                     " --chips " + f.p("cfg_chips") + " --nms-iou 0.3");
    CHECK(good.code == 0);

    // a broken config file is a usage error
    std::ofstream broken(f.p("broken.cfg"));
    broken << "not a section\n";
    broken.close();
    Run b = f.run(f.bin + " --config " + f.p("broken.cfg") + " report --log " +
                  f.p("log.ndjson"));
    CHECK(b.code == 2);
}
