#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fdrkit/zsample.hpp"

namespace fdrkit {

// N rows x n columns of expression values with a two-group column design.
struct ExpressionMatrix {
    std::vector<std::vector<double>> values;
    std::vector<std::string> row_ids;
    std::vector<std::string> col_ids;
    std::vector<int> group;  // 0/1 per column

    std::size_t rows() const { return values.size(); }
    std::size_t cols() const { return values.empty() ? 0 : values[0].size(); }
    void validate() const;
};

// Matrix TSV: header row of column ids, first column row id.
ExpressionMatrix load_matrix_tsv(const std::string& path);
// Two-column design file (column id, group label); assigns 0/1 groups.
void apply_design(ExpressionMatrix& m, const std::string& path);

struct GeneSet {
    std::string name;
    std::string description;
    std::vector<std::string> members;
};

// GMT: tab-separated set name, description, member ids.
std::vector<GeneSet> load_gmt(const std::string& path);

// Row two-sample t statistics mapped to z through F_{n-2}.
ZSample matrix_to_z(const ExpressionMatrix& m);

// Mean z over the member rows; unresolved ids throw.
double set_stat(const ZSample& z, const std::vector<std::string>& set_ids);
double set_stat_indices(const ZSample& z,
                        const std::vector<std::size_t>& idx);

enum class EnrichMethod { RowRandomization, ColumnPermutation, Restandardized };

struct EnrichmentResult {
    std::string set_name;
    std::size_t m = 0;        // set size
    double observed = 0.0;    // z-bar (restandardized when applicable)
    EnrichMethod method = EnrichMethod::RowRandomization;
    long b = 0;               // null draws
    double p_two_sided = 1.0;
    double p_one_sided_right = 1.0;
    std::vector<double> null_draws;
    bool sampled_with_replacement = false;
};

// Row randomization: B random m-subsets of the z-values.
EnrichmentResult enrich_rowrand(const ZSample& z,
                                const std::vector<std::string>& set_ids,
                                long b, std::uint64_t seed);

// Column permutation / restandardization: B relabelings of the columns,
// full recomputation of the row z-values per draw.
EnrichmentResult enrich_colperm(const ExpressionMatrix& m,
                                const std::vector<std::string>& set_ids,
                                long b, std::uint64_t seed,
                                bool restandardize);

}  // namespace fdrkit
