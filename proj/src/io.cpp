#include "fdrkit/zsample.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace fdrkit {

void ZSample::validate() const {
    if (values.empty())
        throw std::invalid_argument("ZSample: empty sample");
    for (double v : values)
        if (!std::isfinite(v))
            throw std::invalid_argument("ZSample: nonfinite value");
    if (!ids.empty()) {
        if (ids.size() != values.size())
            throw std::invalid_argument("ZSample: ids length mismatch");
        std::unordered_set<std::string> seen;
        for (const auto& id : ids)
            if (!seen.insert(id).second)
                throw std::invalid_argument("ZSample: duplicate id '" + id +
                                            "'");
    }
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        // trim
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? std::string()
                                             : cell.substr(b, e - b + 1));
    }
    return out;
}

double parse_number(const std::string& s, long line_no) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing chars");
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("parse error at line " +
                                 std::to_string(line_no) +
                                 ": not a number: '" + s + "'");
    }
}

}  // namespace

ZSample load_zvalues(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);

    ZSample sample;
    std::string line;
    long line_no = 0;
    bool header_checked = false;
    int z_col = -1, id_col = -1;

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (!header_checked) {
            header_checked = true;
            // A header row is any first row containing a non-numeric cell.
            auto cells = split_csv(line);
            bool numeric = true;
            for (const auto& c : cells) {
                try {
                    std::size_t pos = 0;
                    std::stod(c, &pos);
                    if (pos != c.size()) numeric = false;
                } catch (const std::exception&) {
                    numeric = false;
                }
            }
            if (!numeric) {
                for (int i = 0; i < static_cast<int>(cells.size()); ++i) {
                    std::string lc = cells[i];
                    std::transform(lc.begin(), lc.end(), lc.begin(),
                                   ::tolower);
                    if (lc == "z") z_col = i;
                    if (lc == "id") id_col = i;
                }
                if (z_col < 0)
                    throw std::runtime_error(
                        "parse error at line " + std::to_string(line_no) +
                        ": header has no 'z' column");
                continue;
            }
            if (cells.size() > 1)
                throw std::runtime_error(
                    "parse error at line " + std::to_string(line_no) +
                    ": multi-column file needs a header");
            z_col = 0;  // headerless one-column layout; fall through
        }
        const auto cells = split_csv(line);
        if (z_col >= static_cast<int>(cells.size()))
            throw std::runtime_error("parse error at line " +
                                     std::to_string(line_no) +
                                     ": too few columns");
        sample.values.push_back(parse_number(cells[z_col], line_no));
        if (id_col >= 0) {
            if (id_col >= static_cast<int>(cells.size()))
                throw std::runtime_error("parse error at line " +
                                         std::to_string(line_no) +
                                         ": missing id column");
            sample.ids.push_back(cells[id_col]);
        }
    }
    if (sample.values.empty())
        throw std::runtime_error("empty input file: " + path);
    sample.validate();
    return sample;
}

std::string format_sig6(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

void save_table(const std::string& path,
                const std::vector<std::string>& header,
                const std::vector<std::vector<std::string>>& rows,
                const std::string& comment) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open file for write: " + path);
    if (!comment.empty()) out << "# " << comment << "\n";
    for (std::size_t i = 0; i < header.size(); ++i)
        out << header[i] << (i + 1 < header.size() ? "," : "\n");
    for (const auto& row : rows)
        for (std::size_t i = 0; i < row.size(); ++i)
            out << row[i] << (i + 1 < row.size() ? "," : "\n");
}

}  // namespace fdrkit
