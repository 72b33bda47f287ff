#include "agma/data.hpp"

#include "agma/rng.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>
#include <vector>

namespace agma::data {

namespace {

bool parse_double(const std::string& cell, double* out) {
    const char* begin = cell.c_str();
    char* end = nullptr;
    double value = std::strtod(begin, &end);
    if (end == begin) return false;
    while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
    if (*end != '\0') return false;
    *out = value;
    return true;
}

std::string trim(const std::string& s) {
    auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream stream(line);
    while (std::getline(stream, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

struct RawTable {
    std::vector<std::string> header;  // empty when no header row
    std::vector<std::vector<std::string>> rows;
};

RawTable read_csv(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw ValidationError("cannot open CSV file: " + path);

    RawTable table;
    std::string line;
    bool first = true;
    while (std::getline(file, line)) {
        if (trim(line).empty()) continue;
        auto cells = split_csv_line(line);
        if (first) {
            first = false;
            // Header detection: any non-numeric cell in the first row.
            bool numeric = true;
            double ignored;
            for (const auto& c : cells) {
                if (!parse_double(c, &ignored)) {
                    numeric = false;
                    break;
                }
            }
            if (!numeric) {
                table.header = cells;
                continue;
            }
        }
        table.rows.push_back(std::move(cells));
    }
    if (table.rows.empty()) throw ValidationError("CSV file has no data rows: " + path);
    return table;
}

Index resolve_label_column(const RawTable& table, const std::string& label_column) {
    double as_number;
    if (parse_double(label_column, &as_number)) {
        auto idx = static_cast<Index>(as_number);
        auto width = static_cast<Index>(table.rows.front().size());
        if (idx < 0 || idx >= width)
            throw ValidationError("label column index out of range: " + label_column);
        return idx;
    }
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (table.header[i] == label_column) return static_cast<Index>(i);
    }
    throw ValidationError("label column not found in header: " + label_column);
}

struct SamplePool {
    Matrix inputs;
    Vector labels;
};

SamplePool parse_csv_pool(const CsvSource& source, bool standardize, bool center_labels) {
    RawTable table = read_csv(source.path);
    const Index label_col = resolve_label_column(table, source.label_column);
    const auto width = table.rows.front().size();
    if (width < 2) throw ValidationError("CSV needs at least one feature column plus the label");

    const auto samples = static_cast<Index>(table.rows.size());
    const auto features = static_cast<Index>(width) - 1;

    Matrix inputs(samples, features);
    std::vector<std::string> raw_labels(static_cast<std::size_t>(samples));
    for (Index r = 0; r < samples; ++r) {
        const auto& row = table.rows[static_cast<std::size_t>(r)];
        if (static_cast<Index>(row.size()) != static_cast<Index>(width)) {
            std::ostringstream msg;
            msg << "CSV row " << r << " has " << row.size() << " cells, expected " << width;
            throw ValidationError(msg.str());
        }
        Index c_out = 0;
        for (Index c = 0; c < static_cast<Index>(width); ++c) {
            if (c == label_col) {
                raw_labels[static_cast<std::size_t>(r)] = row[static_cast<std::size_t>(c)];
                continue;
            }
            double value;
            if (!parse_double(row[static_cast<std::size_t>(c)], &value)) {
                std::ostringstream msg;
                msg << "non-numeric cell at row " << r << ", column " << c << ": '"
                    << row[static_cast<std::size_t>(c)] << "'";
                throw ValidationError(msg.str());
            }
            inputs(r, c_out++) = value;
        }
    }

    SamplePool pool;
    pool.labels.resize(samples);
    if (source.task == Task::Regression) {
        for (Index r = 0; r < samples; ++r) {
            double value;
            if (!parse_double(raw_labels[static_cast<std::size_t>(r)], &value))
                throw ValidationError("non-numeric regression label at row " + std::to_string(r));
            pool.labels[r] = value;
        }
        if (center_labels) pool.labels.array() -= pool.labels.mean();
    } else {
        std::map<std::string, double> mapping;
        for (const auto& label : raw_labels) mapping.emplace(label, 0.0);
        if (mapping.size() != 2) {
            std::ostringstream msg;
            msg << "binary classification needs exactly two label values, found "
                << mapping.size();
            throw ValidationError(msg.str());
        }
        // Map the smaller value to -1 and the larger to +1; numeric order when
        // both labels parse as numbers, lexicographic otherwise.
        std::vector<std::string> keys;
        for (const auto& [key, unused] : mapping) keys.push_back(key);
        double a, b;
        if (parse_double(keys[0], &a) && parse_double(keys[1], &b) && a > b)
            std::swap(keys[0], keys[1]);
        mapping[keys[0]] = -1.0;
        mapping[keys[1]] = 1.0;
        for (Index r = 0; r < samples; ++r)
            pool.labels[r] = mapping[raw_labels[static_cast<std::size_t>(r)]];
    }

    if (standardize) {
        // Global per-column standardization before partitioning; constant
        // columns cannot be scaled and are dropped.
        std::vector<Index> keep;
        for (Index c = 0; c < features; ++c) {
            double mean = inputs.col(c).mean();
            double variance = (inputs.col(c).array() - mean).square().mean();
            if (variance <= 1e-30) {
                std::cerr << "warning: dropping constant feature column " << c << "\n";
                continue;
            }
            inputs.col(c) = (inputs.col(c).array() - mean) / std::sqrt(variance);
            keep.push_back(c);
        }
        if (keep.empty()) throw ValidationError("all feature columns are constant");
        if (static_cast<Index>(keep.size()) != features) {
            Matrix reduced(samples, static_cast<Index>(keep.size()));
            for (std::size_t i = 0; i < keep.size(); ++i) reduced.col(static_cast<Index>(i)) = inputs.col(keep[i]);
            inputs = std::move(reduced);
        }
    }
    pool.inputs = std::move(inputs);
    return pool;
}

/// Seeded Fisher-Yates so partitions are identical across platforms.
std::vector<Index> shuffled_indices(Index count, RngStream& rng) {
    std::vector<Index> order(static_cast<std::size_t>(count));
    std::iota(order.begin(), order.end(), Index{0});
    for (Index i = count - 1; i > 0; --i) {
        auto j = static_cast<Index>(rng.below(static_cast<std::uint64_t>(i + 1)));
        std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
    }
    return order;
}

/// Deals shuffled samples round-robin: node n gets shuffled positions
/// n, n+N, n+2N, ...
std::vector<problems::NodeDataset> deal_round_robin(const SamplePool& pool, int nodes,
                                                    std::optional<Index> samples_per_node,
                                                    RngStream& rng) {
    const Index total = pool.inputs.rows();
    Index used = total;
    if (samples_per_node) {
        if (*samples_per_node < 1)
            throw ValidationError("samples_per_node must be >= 1");
        used = *samples_per_node * nodes;
        if (used > total) {
            std::ostringstream msg;
            msg << "need " << used << " samples for " << nodes << " nodes x "
                << *samples_per_node << ", dataset has " << total;
            throw ValidationError(msg.str());
        }
    }
    if (total < nodes)
        throw ValidationError("fewer samples than nodes; every node needs at least one");

    auto order = shuffled_indices(total, rng);
    std::vector<std::vector<Index>> assignment(static_cast<std::size_t>(nodes));
    for (Index pos = 0; pos < used; ++pos) {
        assignment[static_cast<std::size_t>(pos % nodes)].push_back(order[static_cast<std::size_t>(pos)]);
    }

    std::vector<problems::NodeDataset> result;
    result.reserve(static_cast<std::size_t>(nodes));
    for (const auto& rows : assignment) {
        if (rows.empty()) throw ValidationError("a node received no samples");
        problems::NodeDataset node;
        node.inputs.resize(static_cast<Index>(rows.size()), pool.inputs.cols());
        node.labels.resize(static_cast<Index>(rows.size()));
        for (std::size_t i = 0; i < rows.size(); ++i) {
            node.inputs.row(static_cast<Index>(i)) = pool.inputs.row(rows[i]);
            node.labels[static_cast<Index>(i)] = pool.labels[rows[i]];
        }
        result.push_back(std::move(node));
    }
    return result;
}

Matrix random_orthogonal(Index n, RngStream& rng) {
    Matrix gauss(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) gauss(i, j) = rng.gaussian();
    Eigen::HouseholderQR<Matrix> qr(gauss);
    Matrix q = qr.householderQ();
    // Fix the sign convention so the factor is unique given the input.
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index j = 0; j < n; ++j) {
        if (r(j, j) < 0.0) q.col(j) = -q.col(j);
    }
    return q;
}

problems::ProblemInstance build_synthetic_quadratic(const SyntheticQuadraticSource& source,
                                                    int nodes, std::uint64_t seed,
                                                    bool attach_constants) {
    const Index d = source.dimension;
    const Index rank = source.rank;
    if (d < 1) throw ValidationError("synthetic quadratic needs dimension >= 1");
    if (rank < 1 || rank > d) throw ValidationError("synthetic quadratic needs 1 <= rank <= d");
    if (source.condition_number < 1.0)
        throw ValidationError("condition number must be >= 1");
    Index per_node = source.samples_per_node > 0 ? source.samples_per_node : d;
    if (per_node < d)
        throw ValidationError("synthetic quadratic needs samples_per_node >= dimension");

    const double top = 1.0;  // L is normalized to 1
    Vector spectrum = Vector::Zero(d);
    for (Index i = 0; i < rank; ++i) {
        double t = rank == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(rank - 1);
        spectrum[i] = top * std::pow(1.0 / source.condition_number, t);
    }

    RngStream rng(seed);
    Matrix rotation = random_orthogonal(d, rng);
    // Shared base factor B with (1/m) B^T B = rotation diag(spectrum) rotation^T;
    // per_node >= d, so each eigen-direction owns its own row.
    Matrix base = Matrix::Zero(per_node, d);
    for (Index i = 0; i < d; ++i) {
        base.row(i) = std::sqrt(static_cast<double>(per_node) * spectrum[i]) *
                      rotation.col(i).transpose();
    }
    Vector theta_gen(d);
    for (Index i = 0; i < d; ++i) theta_gen[i] = rng.gaussian();

    problems::ProblemInstance instance;
    instance.family = problems::LossFamily::LeastSquares;
    instance.dimension = d;
    instance.nodes.reserve(static_cast<std::size_t>(nodes));
    for (int n = 0; n < nodes; ++n) {
        Matrix mixer = random_orthogonal(per_node, rng);
        problems::NodeDataset node;
        node.inputs = mixer * base;
        node.labels = node.inputs * theta_gen;
        instance.nodes.push_back(std::move(node));
    }

    if (attach_constants) {
        problems::ProblemConstants constants;
        constants.lipschitz = top;
        constants.strong_convexity = rank == d ? top / source.condition_number : 0.0;
        if (rank == d) {
            constants.theta_star = theta_gen;
        } else {
            // Minimum-norm minimizer: projection onto the non-null eigenspace.
            Matrix range = rotation.leftCols(rank);
            constants.theta_star = range * (range.transpose() * theta_gen);
        }
        constants.f_star = 0.0;  // labels are noiseless by construction
        instance.constants = constants;
        Vector origin = Vector::Zero(d);
        auto estimated = problems::compute_constants(instance, &origin);
        instance.constants->gradient_power = estimated.gradient_power;
    }
    return instance;
}

SamplePool generate_logistic_pool(const SyntheticLogisticSource& source, int nodes,
                                  RngStream& rng) {
    const Index d = source.dimension;
    if (d < 1) throw ValidationError("synthetic logistic needs dimension >= 1");
    if (source.samples_per_node < 1)
        throw ValidationError("synthetic logistic needs samples_per_node >= 1");
    const Index total = source.samples_per_node * nodes;

    Vector direction(d);
    for (Index i = 0; i < d; ++i) direction[i] = rng.gaussian();
    direction.normalize();
    Vector offset = 0.5 * source.separation * direction;

    SamplePool pool;
    pool.inputs.resize(total, d);
    pool.labels.resize(total);
    for (Index s = 0; s < total; ++s) {
        double label = (s % 2 == 0) ? 1.0 : -1.0;
        for (Index i = 0; i < d; ++i) pool.inputs(s, i) = rng.gaussian();
        pool.inputs.row(s) += label * offset.transpose();
        pool.labels[s] = label;
    }
    return pool;
}

}  // namespace

problems::ProblemInstance load_and_partition(const DatasetSpec& spec) {
    if (spec.nodes < 1) throw ValidationError("dataset spec needs at least one node");

    if (const auto* quadratic = std::get_if<SyntheticQuadraticSource>(&spec.source)) {
        return build_synthetic_quadratic(*quadratic, spec.nodes, spec.seed,
                                         spec.compute_constants);
    }

    RngStream rng(spec.seed);
    SamplePool pool;
    problems::ProblemInstance instance;
    if (const auto* csv = std::get_if<CsvSource>(&spec.source)) {
        if (csv->task == Task::BinaryClassification &&
            csv->family != problems::LossFamily::RegularizedLogistic)
            throw ValidationError("binary classification requires the logistic family");
        pool = parse_csv_pool(*csv, spec.standardize, spec.center_labels);
        instance.family = csv->family;
        instance.logistic_lambda =
            csv->family == problems::LossFamily::RegularizedLogistic ? csv->logistic_lambda : 0.0;
    } else {
        const auto& logistic = std::get<SyntheticLogisticSource>(spec.source);
        pool = generate_logistic_pool(logistic, spec.nodes, rng);
        instance.family = problems::LossFamily::RegularizedLogistic;
        instance.logistic_lambda = logistic.logistic_lambda;
    }

    instance.dimension = pool.inputs.cols();
    instance.nodes = deal_round_robin(pool, spec.nodes, spec.samples_per_node, rng);
    instance.validate();
    if (spec.compute_constants && instance.family != problems::LossFamily::LogLoss) {
        instance.constants = problems::compute_constants(instance);
    }
    return instance;
}

problems::ProblemInstance synthesize_quadratic(Index dimension, double condition_number,
                                               Index rank, int nodes, std::uint64_t seed,
                                               Index samples_per_node) {
    DatasetSpec spec;
    spec.source = SyntheticQuadraticSource{dimension, condition_number, rank, samples_per_node};
    spec.nodes = nodes;
    spec.seed = seed;
    return load_and_partition(spec);
}

problems::ProblemInstance synthesize_logistic(Index dimension, double separation, double lambda,
                                              int nodes, Index samples_per_node,
                                              std::uint64_t seed) {
    DatasetSpec spec;
    spec.source = SyntheticLogisticSource{dimension, separation, lambda, samples_per_node};
    spec.nodes = nodes;
    spec.seed = seed;
    return load_and_partition(spec);
}

}  // namespace agma::data
