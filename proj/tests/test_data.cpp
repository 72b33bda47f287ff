#include "agma/data.hpp"

#include "agma/rng.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <string>

using namespace agma;
using namespace agma::data;

namespace {

class TempCsv {
public:
    explicit TempCsv(const std::string& contents) {
        static int counter = 0;
        path_ = (std::filesystem::temp_directory_path() /
                 ("agma_test_" + std::to_string(counter++) + ".csv"))
                    .string();
        std::ofstream out(path_);
        out << contents;
    }
    ~TempCsv() { std::remove(path_.c_str()); }
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

DatasetSpec csv_spec(const std::string& path, const std::string& label, Task task) {
    CsvSource source;
    source.path = path;
    source.label_column = label;
    source.task = task;
    source.family = task == Task::BinaryClassification
                        ? problems::LossFamily::RegularizedLogistic
                        : problems::LossFamily::LeastSquares;
    DatasetSpec spec;
    spec.source = source;
    spec.nodes = 2;
    spec.seed = 9;
    return spec;
}

}  // namespace

TEST_CASE("round-robin deal after the seeded shuffle") {
    TempCsv csv("10,0\n11,1\n12,2\n13,3\n");
    auto spec = csv_spec(csv.path(), "1", Task::Regression);
    spec.standardize = false;
    spec.center_labels = false;
    spec.compute_constants = false;
    auto problem = load_and_partition(spec);

    REQUIRE(problem.node_count() == 2);
    CHECK(problem.nodes[0].sample_count() == 2);
    CHECK(problem.nodes[1].sample_count() == 2);

    // Replicate the seeded Fisher-Yates: node n holds shuffled positions
    // n, n+2 -- i.e. {0,2} and {1,3} of the shuffle order.
    std::vector<Index> order(4);
    std::iota(order.begin(), order.end(), Index{0});
    RngStream rng(9);
    for (Index i = 3; i > 0; --i) {
        auto j = static_cast<Index>(rng.below(static_cast<std::uint64_t>(i + 1)));
        std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
    }
    CHECK(problem.nodes[0].labels[0] == static_cast<double>(order[0]));
    CHECK(problem.nodes[1].labels[0] == static_cast<double>(order[1]));
    CHECK(problem.nodes[0].labels[1] == static_cast<double>(order[2]));
    CHECK(problem.nodes[1].labels[1] == static_cast<double>(order[3]));

    // Disjoint cover of all four samples.
    std::set<double> seen;
    for (const auto& node : problem.nodes)
        for (Index i = 0; i < node.labels.size(); ++i) seen.insert(node.labels[i]);
    CHECK(seen == std::set<double>{0.0, 1.0, 2.0, 3.0});
}

TEST_CASE("synthetic quadratic has exact constants by construction") {
    auto problem = data::synthesize_quadratic(10, 100.0, 10, 4, 17);
    REQUIRE(problem.constants.has_value());
    CHECK(problem.constants->lipschitz == 1.0);
    CHECK(problem.constants->strong_convexity == doctest::Approx(0.01).epsilon(1e-15));
    CHECK(problem.constants->f_star == 0.0);
    CHECK(problems::global_objective(problem, problem.constants->theta_star) <= 1e-20);

    // The generic eigensolver path recovers the built-in spectrum.
    auto recomputed = problems::compute_constants(problem);
    CHECK(testing::relative_error(recomputed.lipschitz / recomputed.strong_convexity, 100.0) <=
          1e-8);
}

TEST_CASE("rank-deficient synthetic quadratic is convex-only") {
    auto problem = data::synthesize_quadratic(10, 100.0, 6, 4, 18);
    CHECK(problem.constants->strong_convexity == 0.0);
    CHECK(problem.constants->f_star == 0.0);
    CHECK(problems::global_objective(problem, problem.constants->theta_star) <= 1e-20);
    // theta_star is the minimum-norm minimizer: no component outside the
    // range space means it is shorter than any other minimizer we can build.
    auto full = data::synthesize_quadratic(10, 100.0, 10, 4, 18);
    CHECK(problem.constants->theta_star.norm() <= full.constants->theta_star.norm() + 1e-12);
}

TEST_CASE("perfectly conditioned quadratic has mu equal to L") {
    auto problem = data::synthesize_quadratic(5, 1.0, 5, 3, 21);
    CHECK(problem.constants->strong_convexity == doctest::Approx(1.0));
    CHECK(problem.constants->lipschitz == doctest::Approx(1.0));
}

TEST_CASE("header detection and ionosphere-style label mapping") {
    // 34 radar attributes plus a two-valued {g, b} label column.
    std::string content;
    for (int c = 0; c < 34; ++c) content += "f" + std::to_string(c) + ",";
    content += "label\n";
    RngStream feature_rng(3141);
    for (int i = 0; i < 8; ++i) {
        for (int c = 0; c < 34; ++c) content += std::to_string(feature_rng.gaussian()) + ",";
        content += (i % 2 ? "g" : "b");
        content += "\n";
    }
    TempCsv csv(content);
    auto spec = csv_spec(csv.path(), "label", Task::BinaryClassification);
    spec.standardize = false;
    spec.compute_constants = false;
    auto problem = load_and_partition(spec);
    CHECK(problem.dimension == 34);
    std::set<double> labels;
    for (const auto& node : problem.nodes)
        for (Index i = 0; i < node.labels.size(); ++i) labels.insert(node.labels[i]);
    CHECK(labels == std::set<double>{-1.0, 1.0});
    // 'b' < 'g' lexicographically, so b -> -1 and g -> +1: four of each.
    int positives = 0;
    for (const auto& node : problem.nodes)
        for (Index i = 0; i < node.labels.size(); ++i) positives += node.labels[i] > 0;
    CHECK(positives == 4);
}

TEST_CASE("standardized columns have zero mean and unit variance") {
    std::string content;
    RngStream rng(51);
    for (int i = 0; i < 40; ++i) {
        content += std::to_string(5.0 + 3.0 * rng.gaussian()) + "," +
                   std::to_string(-2.0 + 0.1 * rng.gaussian()) + "," +
                   std::to_string(rng.gaussian()) + "\n";
    }
    TempCsv csv(content);
    auto spec = csv_spec(csv.path(), "2", Task::Regression);
    spec.nodes = 1;
    spec.compute_constants = false;
    auto problem = load_and_partition(spec);

    const auto& inputs = problem.nodes[0].inputs;
    for (Index c = 0; c < inputs.cols(); ++c) {
        double mean = inputs.col(c).mean();
        double variance = (inputs.col(c).array() - mean).square().mean();
        CHECK(std::abs(mean) < 1e-10);
        CHECK(std::abs(variance - 1.0) < 1e-10);
    }
    // Labels are centered by default.
    CHECK(std::abs(problem.nodes[0].labels.mean()) < 1e-10);
}

TEST_CASE("constant feature columns are dropped") {
    TempCsv csv("1.0,7.5,0.1\n2.0,7.5,0.2\n3.0,7.5,0.3\n4.0,7.5,0.4\n");
    auto spec = csv_spec(csv.path(), "2", Task::Regression);
    spec.nodes = 1;
    spec.compute_constants = false;
    auto problem = load_and_partition(spec);
    CHECK(problem.dimension == 1);  // the constant column is gone
}

TEST_CASE("CSV error reporting") {
    SUBCASE("unreadable file") {
        auto spec = csv_spec("/nonexistent/file.csv", "0", Task::Regression);
        CHECK_THROWS_WITH_AS(load_and_partition(spec), doctest::Contains("cannot open"),
                             ValidationError);
    }
    SUBCASE("non-numeric feature cell") {
        TempCsv csv("1.0,2.0\nbad,3.0\n");
        auto spec = csv_spec(csv.path(), "1", Task::Regression);
        CHECK_THROWS_WITH_AS(load_and_partition(spec), doctest::Contains("non-numeric"),
                             ValidationError);
    }
    SUBCASE("classification labels must take exactly two values") {
        TempCsv csv("1.0,a\n2.0,b\n3.0,c\n4.0,a\n");
        auto spec = csv_spec(csv.path(), "1", Task::BinaryClassification);
        CHECK_THROWS_WITH_AS(load_and_partition(spec), doctest::Contains("two label values"),
                             ValidationError);
    }
    SUBCASE("more requested samples than available") {
        TempCsv csv("1.0,1\n2.0,2\n3.0,3\n4.0,4\n");
        auto spec = csv_spec(csv.path(), "1", Task::Regression);
        spec.samples_per_node = 3;  // 2 nodes x 3 > 4 samples
        CHECK_THROWS_AS(load_and_partition(spec), ValidationError);
    }
    SUBCASE("more nodes than samples") {
        TempCsv csv("1.0,1\n2.0,2\n");
        auto spec = csv_spec(csv.path(), "1", Task::Regression);
        spec.nodes = 3;
        spec.standardize = false;
        CHECK_THROWS_AS(load_and_partition(spec), ValidationError);
    }
}

TEST_CASE("same spec and seed reproduce the identical instance") {
    for (int trial = 0; trial < 2; ++trial) {
        auto a = data::synthesize_quadratic(6, 10.0, 6, 5, 123);
        auto b = data::synthesize_quadratic(6, 10.0, 6, 5, 123);
        REQUIRE(a.node_count() == b.node_count());
        for (int n = 0; n < a.node_count(); ++n) {
            const auto& na = a.nodes[static_cast<std::size_t>(n)];
            const auto& nb = b.nodes[static_cast<std::size_t>(n)];
            CHECK((na.inputs - nb.inputs).cwiseAbs().maxCoeff() == 0.0);
            CHECK((na.labels - nb.labels).cwiseAbs().maxCoeff() == 0.0);
        }
        CHECK((a.constants->theta_star - b.constants->theta_star).cwiseAbs().maxCoeff() == 0.0);
    }
    auto c = data::synthesize_quadratic(6, 10.0, 6, 5, 124);
    auto a = data::synthesize_quadratic(6, 10.0, 6, 5, 123);
    CHECK((a.nodes[0].inputs - c.nodes[0].inputs).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("synthetic logistic produces a valid strongly convex instance") {
    auto problem = data::synthesize_logistic(4, 3.0, 0.1, 6, 4, 77);
    CHECK(problem.family == problems::LossFamily::RegularizedLogistic);
    CHECK(problem.node_count() == 6);
    problem.validate();
    REQUIRE(problem.constants.has_value());
    CHECK(problem.constants->strong_convexity == doctest::Approx(0.1));
    CHECK(problem.constants->lipschitz > 0.1);
}

TEST_CASE("generator validation") {
    CHECK_THROWS_AS(data::synthesize_quadratic(5, 0.5, 5, 2, 1), ValidationError);
    CHECK_THROWS_AS(data::synthesize_quadratic(5, 10.0, 6, 2, 1), ValidationError);
    CHECK_THROWS_AS(data::synthesize_quadratic(5, 10.0, 0, 2, 1), ValidationError);
    CHECK_THROWS_AS(data::synthesize_logistic(4, 2.0, 0.1, 2, 0, 1), ValidationError);
}
