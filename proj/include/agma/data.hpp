#pragma once

#include "agma/problems.hpp"
#include "agma/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

namespace agma::data {

enum class Task { Regression, BinaryClassification };

/// CSV-backed dataset (UTF-8, comma delimiter, '.' decimal point, optional
/// single header row auto-detected by a non-numeric first row).
struct CsvSource {
    std::string path;
    std::string label_column;  // zero-based index or header name
    Task task = Task::Regression;
    problems::LossFamily family = problems::LossFamily::LeastSquares;
    double logistic_lambda = 0.1;
};

/// Least-squares instance with exact constants by construction: every node's
/// Gram matrix shares one controlled spectrum, labels are noiseless, F* = 0.
/// rank < dimension yields a convex-only (mu = 0) instance.
struct SyntheticQuadraticSource {
    Index dimension = 10;
    double condition_number = 1.0;
    Index rank = 10;
    Index samples_per_node = 0;  // 0 -> dimension
};

/// Two-cluster logistic instance; separation is the inter-mean distance.
struct SyntheticLogisticSource {
    Index dimension = 5;
    double separation = 2.0;
    double logistic_lambda = 0.1;
    Index samples_per_node = 4;
};

struct DatasetSpec {
    std::variant<CsvSource, SyntheticQuadraticSource, SyntheticLogisticSource> source;
    int nodes = 1;
    std::optional<Index> samples_per_node;  // CSV only; empty = all, round-robin
    bool standardize = true;
    bool center_labels = true;  // regression only
    std::uint64_t seed = 0;
    bool compute_constants = true;
};

/**
 * Builds the node-partitioned ProblemInstance described by `spec`: parses / generates
 * samples, standardizes features when flagged (constant columns dropped with a
 * warning to stderr), maps classification labels to {-1,+1}, shuffles with the
 * seed and deals samples round-robin across nodes, then attaches analytic
 * constants where the family permits. Same (spec, seed) gives an identical
 * instance.
 */
problems::ProblemInstance load_and_partition(const DatasetSpec& spec);

/// Convenience wrapper over load_and_partition for the quadratic generator.
problems::ProblemInstance synthesize_quadratic(Index dimension, double condition_number,
                                               Index rank, int nodes, std::uint64_t seed,
                                               Index samples_per_node = 0);

problems::ProblemInstance synthesize_logistic(Index dimension, double separation, double lambda,
                                              int nodes, Index samples_per_node,
                                              std::uint64_t seed);

}  // namespace agma::data
