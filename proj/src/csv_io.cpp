#include "plancal/csv_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "plancal/common.hpp"

namespace plancal {

namespace {

double parse_field(const std::string& field, int line, int column) {
    double value = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc() || res.ptr != last || field.empty()) {
        throw ConfigError("line " + std::to_string(line) + ", field " + std::to_string(column) +
                          ": invalid number \"" + field + "\"");
    }
    return value;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

}  // namespace

SampleRow to_row(const Sample& sample) {
    SampleRow row;
    for (int j = 0; j < 6; ++j) row.q_deg[j] = rad2deg(sample.q[j]);
    row.dial_mm = sample.dial_mm;
    return row;
}

Sample from_row(const SampleRow& row) {
    Sample s;
    for (int j = 0; j < 6; ++j) s.q[j] = deg2rad(row.q_deg[j]);
    s.dial_mm = row.dial_mm;
    return s;
}

std::string rows_to_csv(const std::vector<SampleRow>& rows) {
    std::string out = kSampleCsvHeader;
    out.push_back('\n');
    for (const auto& row : rows) {
        for (int j = 0; j < 6; ++j) {
            out += format_double(row.q_deg[j]);
            out.push_back(',');
        }
        out += format_double(row.dial_mm);
        out.push_back('\n');
    }
    return out;
}

std::vector<SampleRow> rows_from_csv(const std::string& text) {
    std::vector<SampleRow> rows;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (lineno == 1) {
            if (line != kSampleCsvHeader) {
                throw ConfigError("line 1: expected header \"" + std::string(kSampleCsvHeader) +
                                  "\", got \"" + line + "\"");
            }
            continue;
        }
        const std::vector<std::string> fields = split_fields(line);
        if (fields.size() != 7) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected 7 fields, got " +
                              std::to_string(fields.size()));
        }
        SampleRow row;
        for (int j = 0; j < 6; ++j) row.q_deg[j] = parse_field(fields[j], lineno, j + 1);
        row.dial_mm = parse_field(fields[6], lineno, 7);
        rows.push_back(row);
    }
    if (lineno == 0) throw ConfigError("line 1: empty file, expected header");
    return rows;
}

std::string samples_to_csv(const std::vector<Sample>& samples) {
    std::vector<SampleRow> rows;
    rows.reserve(samples.size());
    for (const auto& s : samples) rows.push_back(to_row(s));
    return rows_to_csv(rows);
}

std::vector<Sample> samples_from_csv(const std::string& text) {
    std::vector<Sample> samples;
    for (const auto& row : rows_from_csv(text)) samples.push_back(from_row(row));
    return samples;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open \"" + path.string() + "\" for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw ConfigError("write failed for \"" + path.string() + "\"");
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open \"" + path.string() + "\" for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_samples_csv(const std::filesystem::path& path, const std::vector<Sample>& samples) {
    write_text_file(path, samples_to_csv(samples));
}

std::vector<Sample> read_samples_csv(const std::filesystem::path& path) {
    try {
        return samples_from_csv(read_text_file(path));
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::string curve_to_csv(const std::vector<double>& objective_mm2) {
    std::string out = "iteration,objective_mm2\n";
    for (size_t i = 0; i < objective_mm2.size(); ++i) {
        out += std::to_string(i + 1);
        out.push_back(',');
        out += format_double(objective_mm2[i]);
        out.push_back('\n');
    }
    return out;
}

}  // namespace plancal
