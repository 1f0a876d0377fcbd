#include "modacv/series.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <utility>

namespace modacv {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    return s;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool is_missing_cell(std::string_view cell) {
    return cell.empty() || lower(std::string(cell)) == "nan";
}

double parse_cell(std::string_view cell, std::size_t line_no, const char* what) {
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        throw std::invalid_argument("line " + std::to_string(line_no) + ": cannot parse " +
                                    what + " cell '" + std::string(cell) + "'");
    }
    return value;
}

}  // namespace

ModulatedSeries::ModulatedSeries(std::vector<double> y, std::vector<double> c)
    : y_(std::move(y)), c_(std::move(c)) {
    if (y_.empty()) throw std::invalid_argument("series must contain at least one point");
    if (y_.size() != c_.size()) {
        throw std::invalid_argument("value and weight sequences differ in length (" +
                                    std::to_string(y_.size()) + " vs " +
                                    std::to_string(c_.size()) + ")");
    }
    for (std::size_t i = 0; i < c_.size(); ++i) {
        const double ci = c_[i];
        if (!(ci >= 0.0 && ci <= 1.0)) {
            throw std::invalid_argument("weight at index " + std::to_string(i) +
                                        " outside [0, 1]: " + std::to_string(ci));
        }
        if (ci == 0.0) {
            y_[i] = 0.0;  // censored points carry no value
        } else if (!std::isfinite(y_[i])) {
            throw std::invalid_argument("non-finite value at observed index " +
                                        std::to_string(i));
        }
    }
}

double ModulatedSeries::observed_fraction() const noexcept {
    std::size_t observed = 0;
    for (const double ci : c_) {
        if (ci > 0.0) ++observed;
    }
    return static_cast<double>(observed) / static_cast<double>(c_.size());
}

ModulatedSeries modulate(std::span<const double> x, std::span<const double> c) {
    if (x.size() != c.size()) {
        throw std::invalid_argument("latent series and weights differ in length");
    }
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        y[i] = c[i] == 0.0 ? 0.0 : c[i] * x[i];
    }
    return {std::move(y), std::vector<double>(c.begin(), c.end())};
}

ModulatedSeries read_series_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open '" + path + "'");

    std::vector<double> y;
    std::vector<double> c;
    std::string raw;
    std::size_t line_no = 0;
    bool first_content_line = true;

    while (std::getline(in, raw)) {
        ++line_no;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        const std::string_view line = trim(raw);
        if (line.empty()) continue;

        if (first_content_line) {
            first_content_line = false;
            const std::string header = lower(std::string(line));
            if (header == "y,c" || header == "y") continue;
        }

        const std::size_t comma = line.find(',');
        std::string_view y_cell = trim(line.substr(0, comma));
        std::string_view c_cell =
            comma == std::string_view::npos ? std::string_view() : trim(line.substr(comma + 1));
        if (c_cell.find(',') != std::string_view::npos) {
            throw std::invalid_argument("line " + std::to_string(line_no) +
                                        ": expected at most two columns");
        }

        if (is_missing_cell(y_cell)) {
            y.push_back(0.0);
            c.push_back(0.0);
            continue;
        }
        const double yi = parse_cell(y_cell, line_no, "value");
        double ci = 1.0;
        if (comma != std::string_view::npos) {
            ci = parse_cell(c_cell, line_no, "weight");
            if (!(ci >= 0.0 && ci <= 1.0)) {
                throw std::invalid_argument("line " + std::to_string(line_no) +
                                            ": weight outside [0, 1]");
            }
        }
        y.push_back(yi);
        c.push_back(ci);
    }

    if (y.empty()) throw std::invalid_argument("'" + path + "' contains no data rows");
    return {std::move(y), std::move(c)};
}

void write_series_csv(std::ostream& out, const ModulatedSeries& series) {
    out << "y,c\n";
    char buf[64];
    for (std::size_t i = 0; i < series.size(); ++i) {
        // 17 significant digits round-trip any double exactly.
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", series.y()[i], series.c()[i]);
        out << buf;
    }
}

void write_series_csv(const std::string& path, const ModulatedSeries& series) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot open '" + path + "' for writing");
    write_series_csv(out, series);
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace modacv
