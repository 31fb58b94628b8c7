#include "relrisk/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace relrisk::io {

namespace {

std::int64_t count_field(const nlohmann::json& j, const char* key) {
    if (!j.contains(key)) {
        throw std::invalid_argument(std::string("table is missing key \"") + key + "\"");
    }
    const auto& v = j.at(key);
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
        throw std::invalid_argument(std::string("table key \"") + key +
                                    "\" must be a nonnegative integer");
    }
    return v.get<std::int64_t>();
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

int parse_bit(const std::string& field, std::size_t line_no, const char* what) {
    const std::string t = trim(field);
    if (t == "0") return 0;
    if (t == "1") return 1;
    throw std::invalid_argument("line " + std::to_string(line_no) + ": " + what +
                                " must be 0 or 1, got \"" + field + "\"");
}

}  // namespace

TwoByTwoTable table_from_json(const nlohmann::json& j) {
    if (!j.is_object()) {
        throw std::invalid_argument("table must be a JSON object");
    }
    TwoByTwoTable t;
    t.a1_y1 = count_field(j, "a1_y1");
    t.a1_y0 = count_field(j, "a1_y0");
    t.a0_y1 = count_field(j, "a0_y1");
    t.a0_y0 = count_field(j, "a0_y0");
    return t;
}

nlohmann::ordered_json table_to_json(const TwoByTwoTable& t) {
    return {{"a1_y1", t.a1_y1}, {"a1_y0", t.a1_y0}, {"a0_y1", t.a0_y1}, {"a0_y0", t.a0_y0}};
}

RegressionDataset read_regression_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw std::invalid_argument("empty CSV: expected a header line");
    }
    const std::vector<std::string> header = split_csv_line(line);
    if (header.size() < 2 || trim(header[0]) != "a" || trim(header[1]) != "y") {
        throw std::invalid_argument("CSV header must start with columns a,y");
    }

    RegressionDataset d;
    for (std::size_t j = 2; j < header.size(); ++j) {
        const std::string name = trim(header[j]);
        if (name.empty()) {
            throw std::invalid_argument("covariate columns must have nonempty names");
        }
        d.covariate_names.push_back(name);
    }

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            throw std::invalid_argument("line " + std::to_string(line_no) + ": expected " +
                                        std::to_string(header.size()) + " fields, got " +
                                        std::to_string(fields.size()));
        }
        d.exposure.push_back(parse_bit(fields[0], line_no, "exposure"));
        d.outcome.push_back(parse_bit(fields[1], line_no, "outcome"));
        std::vector<double> row;
        row.reserve(d.covariate_names.size());
        for (std::size_t j = 2; j < fields.size(); ++j) {
            row.push_back(static_cast<double>(parse_bit(fields[j], line_no, "covariate")));
        }
        d.covariates.push_back(std::move(row));
    }
    if (d.outcome.empty()) {
        throw std::invalid_argument("CSV has a header but no data rows");
    }
    return d;
}

RegressionDataset read_regression_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open CSV file: " + path);
    }
    return read_regression_csv(in);
}

std::string format_double(double v, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, v);
    return buf;
}

namespace {

void append_cell(std::string& out, const std::optional<double>& v, int precision) {
    out += ',';
    if (v.has_value()) out += format_double(*v, precision);
}

nlohmann::ordered_json cell_json(const std::optional<double>& v) {
    if (v.has_value()) return *v;
    return nullptr;
}

}  // namespace

std::string sweep_csv(const std::vector<SweepRow>& rows, int precision) {
    std::string out = "r,p0,p1,rr,sr,rd,or,grrr,stable_scale_value\n";
    for (const SweepRow& row : rows) {
        out += format_double(row.r, precision);
        out += ',';
        out += format_double(row.p0, precision);
        out += ',';
        out += format_double(row.p1, precision);
        append_cell(out, row.rr, precision);
        append_cell(out, row.sr, precision);
        append_cell(out, row.rd, precision);
        append_cell(out, row.odds, precision);
        append_cell(out, row.grrr_value, precision);
        append_cell(out, row.stable_value, precision);
        out += '\n';
    }
    return out;
}

nlohmann::ordered_json sweep_json(const std::vector<SweepRow>& rows) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const SweepRow& row : rows) {
        arr.push_back({{"r", row.r},
                       {"p0", row.p0},
                       {"p1", row.p1},
                       {"rr", cell_json(row.rr)},
                       {"sr", cell_json(row.sr)},
                       {"rd", cell_json(row.rd)},
                       {"or", cell_json(row.odds)},
                       {"grrr", cell_json(row.grrr_value)},
                       {"stable_scale_value", cell_json(row.stable_value)}});
    }
    return arr;
}

}  // namespace relrisk::io
