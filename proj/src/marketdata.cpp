#include "traderbench/marketdata.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "traderbench/error.hpp"

namespace traderbench {

bool is_valid_candle(const Candle& c) noexcept {
    const bool finite = std::isfinite(c.open) && std::isfinite(c.high) && std::isfinite(c.low) &&
                        std::isfinite(c.close) && std::isfinite(c.volume);
    return finite && c.open > 0 && c.high > 0 && c.low > 0 && c.close > 0 && c.volume >= 0 &&
           c.high >= std::max(c.open, c.close) && c.low <= std::min(c.open, c.close) &&
           c.low <= c.high;
}

void repair(Candle& c) noexcept {
    c.high = std::max({c.high, c.open, c.close});
    c.low = std::min({c.low, c.open, c.close});
}

namespace {

std::string describe(std::size_t index, const Candle& c) {
    std::ostringstream os;
    os << "candle " << index << " @" << c.timestamp << " (o=" << c.open << " h=" << c.high
       << " l=" << c.low << " c=" << c.close << " v=" << c.volume << ")";
    return os.str();
}

}  // namespace

CandleSeries::CandleSeries(std::string symbol, std::int64_t interval_seconds,
                           std::vector<Candle> candles)
    : symbol_(std::move(symbol)), interval_(interval_seconds), candles_(std::move(candles)) {
    if (candles_.size() >= 2 && interval_ <= 0)
        fail(ErrorCode::NonUniformInterval, "interval must be positive");
    for (std::size_t i = 0; i < candles_.size(); ++i) {
        if (!is_valid_candle(candles_[i]))
            fail(ErrorCode::InvariantViolation, "invalid OHLCV: " + describe(i, candles_[i]));
        if (i > 0 && candles_[i].timestamp - candles_[i - 1].timestamp != interval_)
            fail(ErrorCode::NonUniformInterval,
                 "gap at row " + std::to_string(i) + ": expected step " + std::to_string(interval_) +
                     ", got " + std::to_string(candles_[i].timestamp - candles_[i - 1].timestamp));
    }
}

std::vector<double> CandleSeries::closes() const {
    std::vector<double> out;
    out.reserve(candles_.size());
    for (const auto& c : candles_) out.push_back(c.close);
    return out;
}

CandleSeries CandleSeries::with_candles(std::vector<Candle> candles) const {
    return CandleSeries(symbol_, interval_, std::move(candles));
}

CandleSeries CandleSeries::renamed(std::string symbol) const {
    CandleSeries copy = *this;
    copy.symbol_ = std::move(symbol);
    return copy;
}

namespace {

template <typename T>
T parse_field(std::string_view field, std::size_t row) {
    T value{};
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last)
        fail(ErrorCode::MalformedRow,
             "row " + std::to_string(row) + ": bad number '" + std::string(field) + "'");
    return value;
}

void append_number(std::string& out, double v) {
    std::array<char, 32> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    out.append(buf.data(), ptr);
}

}  // namespace

CandleSeries parse_candle_csv(std::string_view text, std::string symbol,
                              std::int64_t fallback_interval) {
    std::vector<Candle> candles;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (line.empty()) continue;
        if (!header_seen) {
            if (line != kCsvHeader)
                fail(ErrorCode::MalformedRow, "expected header '" + std::string(kCsvHeader) + "'");
            header_seen = true;
            continue;
        }
        std::array<std::string_view, 6> fields;
        std::size_t count = 0;
        std::size_t start = 0;
        while (true) {
            std::size_t comma = line.find(',', start);
            std::string_view f = line.substr(start, comma == std::string_view::npos
                                                        ? std::string_view::npos
                                                        : comma - start);
            if (count == fields.size())
                fail(ErrorCode::MalformedRow, "row " + std::to_string(line_no) + ": too many fields");
            fields[count++] = f;
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (count != fields.size())
            fail(ErrorCode::MalformedRow, "row " + std::to_string(line_no) + ": expected 6 fields");
        Candle c;
        c.timestamp = parse_field<std::int64_t>(fields[0], line_no);
        c.open = parse_field<double>(fields[1], line_no);
        c.high = parse_field<double>(fields[2], line_no);
        c.low = parse_field<double>(fields[3], line_no);
        c.close = parse_field<double>(fields[4], line_no);
        c.volume = parse_field<double>(fields[5], line_no);
        candles.push_back(c);
    }
    if (!header_seen) fail(ErrorCode::MalformedRow, "missing header");
    std::int64_t interval = fallback_interval;
    if (candles.size() >= 2) interval = candles[1].timestamp - candles[0].timestamp;
    return CandleSeries(std::move(symbol), interval, std::move(candles));
}

std::string serialize_candle_csv(const CandleSeries& series) {
    std::string out(kCsvHeader);
    out.push_back('\n');
    for (const auto& c : series.candles()) {
        out += std::to_string(c.timestamp);
        for (double v : {c.open, c.high, c.low, c.close, c.volume}) {
            out.push_back(',');
            append_number(out, v);
        }
        out.push_back('\n');
    }
    return out;
}

CandleSeries load_candle_csv(const std::string& path, std::string symbol) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::Io, "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (symbol.empty()) {
        auto slash = path.find_last_of('/');
        symbol = path.substr(slash == std::string::npos ? 0 : slash + 1);
        if (auto dot = symbol.rfind('.'); dot != std::string::npos) symbol.resize(dot);
    }
    return parse_candle_csv(buf.str(), std::move(symbol));
}

void save_candle_csv(const CandleSeries& series, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::Io, "cannot write " + path);
    out << serialize_candle_csv(series);
    if (!out) fail(ErrorCode::Io, "write failed: " + path);
}

CandleSeries slice_until(const CandleSeries& series, Timestamp clock) {
    const auto& cs = series.candles();
    auto end = std::upper_bound(cs.begin(), cs.end(), clock,
                                [](Timestamp t, const Candle& c) { return t < c.timestamp; });
    if (end == cs.begin())
        fail(ErrorCode::EmptyWindow, "clock " + std::to_string(clock) + " precedes all data");
    return series.with_candles(std::vector<Candle>(cs.begin(), end));
}

std::vector<double> log_returns(const CandleSeries& series) {
    if (series.size() < 2) fail(ErrorCode::TooShort, "log_returns needs at least 2 candles");
    std::vector<double> out;
    out.reserve(series.size() - 1);
    for (std::size_t i = 0; i + 1 < series.size(); ++i)
        out.push_back(std::log(series[i + 1].close / series[i].close));
    return out;
}

}  // namespace traderbench
