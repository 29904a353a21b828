#include "fdrkit/enrich.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "fdrkit/dist.hpp"
#include "fdrkit/rng.hpp"

namespace fdrkit {

void ExpressionMatrix::validate() const {
    if (values.empty()) throw std::invalid_argument("matrix: no rows");
    const std::size_t n = values[0].size();
    for (const auto& r : values) {
        if (r.size() != n) throw std::invalid_argument("matrix: ragged rows");
        for (double v : r)
            if (!std::isfinite(v))
                throw std::invalid_argument("matrix: nonfinite value");
    }
    if (row_ids.size() != values.size())
        throw std::invalid_argument("matrix: row id count mismatch");
    if (!group.empty()) {
        if (group.size() != n)
            throw std::invalid_argument("matrix: group label count mismatch");
        long g0 = std::count(group.begin(), group.end(), 0);
        long g1 = std::count(group.begin(), group.end(), 1);
        if (g0 < 2 || g1 < 2)
            throw std::invalid_argument("matrix: each group needs >= 2 columns");
    }
}

ExpressionMatrix load_matrix_tsv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open matrix file: " + path);
    ExpressionMatrix m;
    std::string line;
    long line_no = 0;
    std::vector<std::string> col_ids;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, '\t')) cells.push_back(cell);
        if (col_ids.empty()) {
            col_ids.assign(cells.begin() + 1, cells.end());
            continue;
        }
        if (cells.size() != col_ids.size() + 1)
            throw std::runtime_error("matrix parse error at line " +
                                     std::to_string(line_no));
        m.row_ids.push_back(cells[0]);
        std::vector<double> row(cells.size() - 1);
        for (std::size_t j = 1; j < cells.size(); ++j) {
            try {
                row[j - 1] = std::stod(cells[j]);
            } catch (const std::exception&) {
                throw std::runtime_error("matrix parse error at line " +
                                         std::to_string(line_no));
            }
        }
        m.values.push_back(std::move(row));
    }
    m.col_ids = col_ids;
    return m;
}

void apply_design(ExpressionMatrix& m, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open design file: " + path);
    std::unordered_map<std::string, std::string> assignment;
    std::vector<std::string> labels;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string col, grp;
        if (!(ss >> col >> grp))
            throw std::runtime_error("design parse error: '" + line + "'");
        assignment[col] = grp;
        if (std::find(labels.begin(), labels.end(), grp) == labels.end())
            labels.push_back(grp);
    }
    if (labels.size() != 2)
        throw std::runtime_error("design file must name exactly two groups");
    m.group.resize(m.col_ids.size());
    for (std::size_t j = 0; j < m.col_ids.size(); ++j) {
        auto it = assignment.find(m.col_ids[j]);
        if (it == assignment.end())
            throw std::runtime_error("design missing column '" + m.col_ids[j] +
                                     "'");
        m.group[j] = it->second == labels[0] ? 0 : 1;
    }
    m.validate();
}

std::vector<GeneSet> load_gmt(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open GMT file: " + path);
    std::vector<GeneSet> sets;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        GeneSet s;
        std::string cell;
        if (!std::getline(ss, s.name, '\t'))
            throw std::runtime_error("GMT parse error");
        std::getline(ss, s.description, '\t');
        while (std::getline(ss, cell, '\t'))
            if (!cell.empty()) s.members.push_back(cell);
        if (s.members.size() < 2)
            throw std::runtime_error("GMT set '" + s.name +
                                     "' has fewer than 2 members");
        sets.push_back(std::move(s));
    }
    return sets;
}

namespace {

// two-sample t per row under the given 0/1 labels, mapped to z
std::vector<double> row_zvalues(const ExpressionMatrix& m,
                                const std::vector<int>& labels) {
    const std::size_t ncol = m.cols();
    const int df = static_cast<int>(ncol) - 2;
    std::vector<double> z(m.rows());
    long n0 = std::count(labels.begin(), labels.end(), 0);
    long n1 = static_cast<long>(ncol) - n0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double s0 = 0.0, s1 = 0.0;
        for (std::size_t j = 0; j < ncol; ++j)
            (labels[j] == 0 ? s0 : s1) += m.values[i][j];
        const double m0 = s0 / n0, m1 = s1 / n1;
        double ss = 0.0;
        for (std::size_t j = 0; j < ncol; ++j) {
            const double d =
                m.values[i][j] - (labels[j] == 0 ? m0 : m1);
            ss += d * d;
        }
        const double pooled = ss / df;
        const double se =
            std::sqrt(pooled * (1.0 / n0 + 1.0 / n1));
        const double t = se > 0.0 ? (m1 - m0) / se : 0.0;
        z[i] = t_to_z(t, df);
    }
    return z;
}

double pvalue_add_one(const std::vector<double>& null_draws, double obs,
                      bool two_sided) {
    long count = 0;
    for (double d : null_draws) {
        if (two_sided ? std::fabs(d) >= std::fabs(obs) : d >= obs) ++count;
    }
    return static_cast<double>(1 + count) /
           static_cast<double>(null_draws.size() + 1);
}

std::vector<std::size_t> resolve(const ZSample& z,
                                 const std::vector<std::string>& set_ids) {
    if (set_ids.empty())
        throw std::invalid_argument("enrich: empty gene set");
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < z.ids.size(); ++i) index[z.ids[i]] = i;
    std::vector<std::size_t> idx;
    for (const auto& id : set_ids) {
        auto it = index.find(id);
        if (it == index.end())
            throw std::invalid_argument("enrich: unresolved set member '" +
                                        id + "'");
        idx.push_back(it->second);
    }
    return idx;
}

}  // namespace

ZSample matrix_to_z(const ExpressionMatrix& m) {
    m.validate();
    if (m.group.empty())
        throw std::invalid_argument("matrix_to_z: no group design applied");
    ZSample z;
    z.values = row_zvalues(m, m.group);
    z.ids = m.row_ids;
    return z;
}

double set_stat_indices(const ZSample& z,
                        const std::vector<std::size_t>& idx) {
    if (idx.empty()) throw std::invalid_argument("set_stat: empty set");
    double acc = 0.0;
    for (std::size_t i : idx) acc += z.values[i];
    return acc / static_cast<double>(idx.size());
}

double set_stat(const ZSample& z, const std::vector<std::string>& set_ids) {
    return set_stat_indices(z, resolve(z, set_ids));
}

EnrichmentResult enrich_rowrand(const ZSample& z,
                                const std::vector<std::string>& set_ids,
                                long b, std::uint64_t seed) {
    if (b < 99) throw std::invalid_argument("enrich: B must be >= 99");
    const auto idx = resolve(z, set_ids);
    const std::size_t m = idx.size(), n = z.size();
    if (m > n) throw std::invalid_argument("enrich: set larger than sample");

    EnrichmentResult res;
    res.m = m;
    res.b = b;
    res.method = EnrichMethod::RowRandomization;
    res.observed = set_stat_indices(z, idx);
    res.null_draws.resize(b);

#pragma omp parallel for schedule(static)
    for (long d = 0; d < b; ++d) {
        auto rng = substream(seed, static_cast<std::uint64_t>(d));
        // partial Fisher-Yates for an m-subset without replacement
        std::vector<std::size_t> pool(n);
        std::iota(pool.begin(), pool.end(), 0);
        double acc = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, n - 1);
            std::swap(pool[i], pool[pick(rng)]);
            acc += z.values[pool[i]];
        }
        res.null_draws[d] = acc / static_cast<double>(m);
    }
    res.p_two_sided = pvalue_add_one(res.null_draws, res.observed, true);
    res.p_one_sided_right =
        pvalue_add_one(res.null_draws, res.observed, false);
    return res;
}

EnrichmentResult enrich_colperm(const ExpressionMatrix& m,
                                const std::vector<std::string>& set_ids,
                                long b, std::uint64_t seed,
                                bool restandardize) {
    if (b < 99) throw std::invalid_argument("enrich: B must be >= 99");
    const ZSample z = matrix_to_z(m);
    const auto idx = resolve(z, set_ids);

    auto moments = [](const std::vector<double>& v) {
        const double mean =
            std::accumulate(v.begin(), v.end(), 0.0) / v.size();
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        return std::make_pair(mean, std::sqrt(ss / (v.size() - 1)));
    };

    EnrichmentResult res;
    res.m = idx.size();
    res.b = b;
    res.method = restandardize ? EnrichMethod::Restandardized
                               : EnrichMethod::ColumnPermutation;
    const double zbar = set_stat_indices(z, idx);
    const auto [mu_z, sd_z] = moments(z.values);
    res.observed = restandardize ? (zbar - mu_z) / sd_z : zbar;
    res.null_draws.resize(b);

    // n! can undercut B for tiny column counts; flag replacement sampling
    double log_perms = 0.0;
    for (std::size_t j = 2; j <= m.cols(); ++j) log_perms += std::log(j);
    res.sampled_with_replacement = log_perms < std::log(b);

#pragma omp parallel for schedule(dynamic)
    for (long d = 0; d < b; ++d) {
        auto rng = substream(seed, static_cast<std::uint64_t>(d));
        std::vector<int> labels = m.group;
        std::shuffle(labels.begin(), labels.end(), rng);
        const auto zp = row_zvalues(m, labels);
        double acc = 0.0;
        for (std::size_t i : idx) acc += zp[i];
        double stat = acc / static_cast<double>(idx.size());
        if (restandardize) {
            const auto [mu, sd] = moments(zp);
            stat = (stat - mu) / sd;
        }
        res.null_draws[d] = stat;
    }
    res.p_two_sided = pvalue_add_one(res.null_draws, res.observed, true);
    res.p_one_sided_right =
        pvalue_add_one(res.null_draws, res.observed, false);
    return res;
}

}  // namespace fdrkit
