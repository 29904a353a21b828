#pragma once

#include <string>
#include <vector>

namespace fdrkit {

// The N observed z-values, with optional unique case labels.
struct ZSample {
    std::vector<double> values;
    std::vector<std::string> ids;  // empty or same length as values

    std::size_t size() const { return values.size(); }
    bool has_ids() const { return !ids.empty(); }

    // Throws std::invalid_argument when invariants are violated
    // (empty, nonfinite value, id length/uniqueness mismatch).
    void validate() const;
};

// Reads a z-value file: one value per line, or CSV with a header naming
// a "z" column (an "id" column is picked up when present). Lines starting
// with '#' are ignored. Parse errors report the offending line number.
ZSample load_zvalues(const std::string& path);

// Writes rows as CSV with 6 significant digits; an optional '#'-prefixed
// comment line (e.g. the run configuration) precedes the header.
void save_table(const std::string& path,
                const std::vector<std::string>& header,
                const std::vector<std::vector<std::string>>& rows,
                const std::string& comment = "");

std::string format_sig6(double v);

}  // namespace fdrkit
