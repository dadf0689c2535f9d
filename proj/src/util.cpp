#include "facekit/util.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstdlib>

#include "facekit/errors.hpp"

namespace facekit {

namespace {
const char* kB64Alphabet =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int b64_value(char c) {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
}
}  // namespace

std::string base64_encode(const unsigned char* data, size_t len) {
    std::string out;
    out.reserve((len + 2) / 3 * 4);
    size_t i = 0;
    for (; i + 3 <= len; i += 3) {
        unsigned v = (data[i] << 16) | (data[i + 1] << 8) | data[i + 2];
        out += kB64Alphabet[(v >> 18) & 63];
        out += kB64Alphabet[(v >> 12) & 63];
        out += kB64Alphabet[(v >> 6) & 63];
        out += kB64Alphabet[v & 63];
    }
    if (i + 1 == len) {
        unsigned v = data[i] << 16;
        out += kB64Alphabet[(v >> 18) & 63];
        out += kB64Alphabet[(v >> 12) & 63];
        out += "==";
    } else if (i + 2 == len) {
        unsigned v = (data[i] << 16) | (data[i + 1] << 8);
        out += kB64Alphabet[(v >> 18) & 63];
        out += kB64Alphabet[(v >> 12) & 63];
        out += kB64Alphabet[(v >> 6) & 63];
        out += '=';
    }
    return out;
}

std::vector<unsigned char> base64_decode(const std::string& text) {
    std::vector<unsigned char> out;
    out.reserve(text.size() / 4 * 3);
    unsigned buf = 0;
    int bits = 0;
    for (char c : text) {
        if (c == '=' || c == '\n' || c == '\r') continue;
        int v = b64_value(c);
        if (v < 0) throw FormatError("invalid base64 character");
        buf = (buf << 6) | unsigned(v);
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back((unsigned char)((buf >> bits) & 0xFF));
        }
    }
    return out;
}

std::string csv_escape(const std::string& field) {
    bool needs_quote = field.find_first_of(",\"\r\n") != std::string::npos;
    if (!needs_quote) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

std::vector<std::string> csv_parse_record(const std::string& text, size_t* pos) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    size_t i = *pos;
    const size_t n = text.size();
    while (i < n) {
        char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < n && text[i + 1] == '"') {
                    cur += '"';
                    i += 2;
                } else {
                    quoted = false;
                    ++i;
                }
            } else {
                cur += c;
                ++i;
            }
        } else if (c == '"' && cur.empty()) {
            quoted = true;
            ++i;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
            ++i;
        } else if (c == '\r' || c == '\n') {
            if (c == '\r' && i + 1 < n && text[i + 1] == '\n') ++i;
            ++i;
            break;
        } else {
            cur += c;
            ++i;
        }
    }
    fields.push_back(std::move(cur));
    *pos = i;
    return fields;
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
    double v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw FormatError("invalid number: '" + s + "'");
    return v;
}

// Days-from-civil algorithm (proleptic Gregorian), exact for the full int range.
static int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = (unsigned)(y - era * 400);
    const unsigned doy = (153u * (unsigned)(m + (m > 2 ? -3 : 9)) + 2) / 5 + (unsigned)d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + (int64_t)doe - 719468;
}

static void civil_from_days(int64_t z, int* y, int* m, int* d) {
    z += 719468;
    const int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = (unsigned)(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int64_t yr = (int64_t)yoe + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    *d = (int)(doy - (153 * mp + 2) / 5 + 1);
    *m = (int)(mp + (mp < 10 ? 3 : -9));
    *y = (int)(yr + (*m <= 2));
}

CivilTime civil_from_epoch_ms(int64_t ms) {
    int64_t days = ms / 86400000;
    int64_t rem = ms % 86400000;
    if (rem < 0) {
        rem += 86400000;
        days -= 1;
    }
    CivilTime c{};
    civil_from_days(days, &c.year, &c.month, &c.day);
    c.hour = (int)(rem / 3600000);
    c.minute = (int)(rem / 60000 % 60);
    c.second = (int)(rem / 1000 % 60);
    c.millisecond = (int)(rem % 1000);
    return c;
}

int64_t epoch_ms_from_civil(const CivilTime& c) {
    int64_t days = days_from_civil(c.year, c.month, c.day);
    return days * 86400000 + c.hour * 3600000LL + c.minute * 60000LL +
           c.second * 1000LL + c.millisecond;
}

std::string iso_date(int64_t epoch_ms) {
    CivilTime c = civil_from_epoch_ms(epoch_ms);
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", c.year, c.month, c.day);
    return buf;
}

std::string iso_time(int64_t epoch_ms) {
    CivilTime c = civil_from_epoch_ms(epoch_ms);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%02d:%02d:%02d.%03d", c.hour, c.minute,
                  c.second, c.millisecond);
    return buf;
}

int64_t parse_iso_datetime(const std::string& date, const std::string& time) {
    CivilTime c{};
    if (std::sscanf(date.c_str(), "%d-%d-%d", &c.year, &c.month, &c.day) != 3)
        throw FormatError("invalid ISO date: '" + date + "'");
    if (std::sscanf(time.c_str(), "%d:%d:%d.%d", &c.hour, &c.minute, &c.second,
                    &c.millisecond) != 4)
        throw FormatError("invalid ISO time: '" + time + "'");
    return epoch_ms_from_civil(c);
}

std::vector<NumberedFile> numbered_files(const std::filesystem::path& dir,
                                         const std::vector<std::string>& extensions) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
    std::vector<NumberedFile> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::string ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        if (std::find(extensions.begin(), extensions.end(), ext) == extensions.end())
            continue;
        std::string stem = entry.path().stem().string();
        if (stem.empty() ||
            !std::all_of(stem.begin(), stem.end(),
                         [](unsigned char c) { return std::isdigit(c); }))
            throw FormatError("non-numeric image filename: " +
                              entry.path().filename().string());
        out.push_back({std::stol(stem), entry.path()});
    }
    std::sort(out.begin(), out.end(), [](const NumberedFile& a, const NumberedFile& b) {
        return a.number < b.number;
    });
    return out;
}

long highest_numbered_file(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    long best = 0;
    if (!fs::is_directory(dir)) return 0;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::string stem = entry.path().stem().string();
        if (stem.empty() ||
            !std::all_of(stem.begin(), stem.end(),
                         [](unsigned char c) { return std::isdigit(c); }))
            continue;
        best = std::max(best, std::stol(stem));
    }
    return best;
}

}  // namespace facekit
