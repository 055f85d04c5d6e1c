#include <doctest.h>

#include <cmath>

#include "netsmooth/errors.hpp"
#include "netsmooth/model.hpp"
#include "netsmooth/rng.hpp"
#include "test_helpers.hpp"

using namespace netsmooth;
using testutil::make_fixture;
using testutil::path_graph;

TEST_CASE("linear prediction is the inner product") {
    Eigen::VectorXd w(2), h(2);
    w << 2.0, -1.0;
    h << 1.0, 0.0;
    CHECK(predict_linear(w, h) == 2.0);
    CHECK(predict_linear(Eigen::VectorXd::Zero(2), h) == 0.0);

    Eigen::VectorXd e1 = Eigen::VectorXd::Unit(3, 1), any(3);
    any << 0.3, -7.0, 2.5;
    CHECK(predict_linear(e1, any) == -7.0);

    Eigen::VectorXd bad(3);
    CHECK_THROWS_AS(predict_linear(w, bad), ConfigError);
}

TEST_CASE("logistic loss closed-form values") {
    CHECK(logistic_loss(1, 0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(logistic_loss(-1, 0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(logistic_loss(1, -1.0) ==
          doctest::Approx(std::log1p(std::exp(1.0))).epsilon(1e-15));
    CHECK(logistic_loss(1, 1000.0) >= 0.0);
    CHECK(logistic_loss(1, 1000.0) <= 1e-300);
    // saturated wrong-side margin grows linearly, no overflow
    CHECK(logistic_loss(1, -1000.0) == doctest::Approx(1000.0).epsilon(1e-12));
}

TEST_CASE("logistic loss and gradient stay finite over extreme margins") {
    for (double yhat : {1e8, -1e8, 1e6, -1e6, 0.0}) {
        for (int gamma : {1, -1}) {
            CHECK(std::isfinite(logistic_loss(gamma, yhat)));
            CHECK(std::isfinite(loss_grad_scalar(gamma, yhat)));
            CHECK(std::abs(loss_grad_scalar(gamma, yhat)) <= 1.0);
        }
    }
}

TEST_CASE("loss gradient closed-form values") {
    CHECK(loss_grad_scalar(1, 0.0) == -0.5);
    CHECK(loss_grad_scalar(-1, 0.0) == 0.5);
    CHECK(loss_grad_scalar(1, 1e8) == doctest::Approx(0.0));
}

TEST_CASE("loss gradient matches central finite differences") {
    Rng rng(42);
    for (int trial = 0; trial < 100; ++trial) {
        const int gamma = rng.sign_coin();
        const double yhat = rng.uniform(-4.0, 4.0);
        const double h = 1e-5;
        const double fd =
            (logistic_loss(gamma, yhat + h) - logistic_loss(gamma, yhat - h)) / (2.0 * h);
        CHECK(std::abs(loss_grad_scalar(gamma, yhat) - fd) <= 1e-8);
    }
}

TEST_CASE("regularizer gradient matches finite differences") {
    Rng rng(43);
    Eigen::VectorXd w(4);
    for (int j = 0; j < 4; ++j) w(j) = rng.uniform(-2.0, 2.0);
    const double eta = 0.37;
    const Eigen::VectorXd grad = regularizer_grad(w, eta);
    const Eigen::VectorXd fd = testutil::fd_gradient(
        [&](const Eigen::VectorXd& v) { return eta * v.squaredNorm(); }, w);
    CHECK((grad - fd).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(regularizer_grad(w, 0.0).cwiseAbs().maxCoeff() == 0.0);
    CHECK(regularizer_grad(Eigen::VectorXd::Zero(3), eta).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("analytic loss gradients track finite differences to 1e-6 relative") {
    Rng rng(44);
    for (int trial = 0; trial < 50; ++trial) {
        const int gamma = rng.sign_coin();
        const double yhat = rng.uniform(-3.0, 3.0);
        const double h = 1e-5;
        const double fd =
            (logistic_loss(gamma, yhat + h) - logistic_loss(gamma, yhat - h)) / (2.0 * h);
        const double analytic = loss_grad_scalar(gamma, yhat);
        CHECK(std::abs(analytic - fd) / std::max(1e-3, std::abs(analytic)) <= 1e-6);
    }
}

TEST_CASE("model constants") {
    const Graph g = random_geometric_graph(4, 0.9, 1);
    NetworkDataset zeros;
    zeros.N = 3;
    zeros.agents.resize(4);
    zeros.agent_classes.assign(4, 1);
    for (auto& agent : zeros.agents) {
        agent.features = Eigen::MatrixXd::Zero(3, 2);
        agent.labels = Eigen::VectorXi::Ones(3);
    }
    const ModelConstants c0 = compute_constants(zeros, 0.1);
    CHECK(c0.nu == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(c0.delta == doctest::Approx(0.2).epsilon(1e-15));

    NetworkDataset one = zeros;
    one.agents[2].features(1, 0) = 2.0; // ||h||^2 = 4
    const ModelConstants c1 = compute_constants(one, 0.1);
    CHECK(c1.delta == doctest::Approx(1.2).epsilon(1e-15));

    CHECK_THROWS_AS(compute_constants(zeros, 0.0), ConfigError);

    for (std::uint64_t seed : {2u, 9u}) {
        const auto fx = make_fixture(5, 20, 3, seed);
        const ModelConstants c = compute_constants(fx.ds, 0.05);
        CHECK(c.nu <= c.delta);
    }
}

TEST_CASE("cluster map for uniform classes covers the full neighbourhood") {
    const auto fx = make_fixture(6, 10, 2, 3);
    for (int k = 0; k < fx.g.K; ++k) {
        CHECK(fx.cm.members[k] == fx.g.neighbors[k]);
        for (std::size_t j = 0; j < fx.cm.members[k].size(); ++j)
            CHECK(fx.cm.weights[k][j] == fx.A.A(fx.cm.members[k][j], k));
    }
}

TEST_CASE("cluster map drops opposite-class neighbours and keeps self") {
    const Graph g = path_graph(5);
    const CombinationMatrix A = metropolis_weights(g);

    // middle node surrounded by the opposite class
    const ClusterMap lonely = build_cluster_map(g, A, {1, -1, 1, -1, 1});
    CHECK(lonely.members[2] == std::vector<int>{2});
    CHECK(lonely.weights[2][0] == A.A(2, 2));

    // two blocks: boundary agents lose exactly their cross-class neighbour
    const ClusterMap blocks = build_cluster_map(g, A, {1, 1, 1, -1, -1});
    CHECK(blocks.members[2] == std::vector<int>{1, 2});
    CHECK(blocks.members[3] == std::vector<int>{3, 4});
    for (int k = 0; k < g.K; ++k) {
        const auto& m = blocks.members[k];
        CHECK(std::find(m.begin(), m.end(), k) != m.end());
    }
}

TEST_CASE("neighbourhood prediction reduces to the linear rule on singleton sets") {
    const Graph g = path_graph(1);
    const CombinationMatrix A = metropolis_weights(g);
    const ClusterMap cm = build_cluster_map(g, A, {1});
    std::vector<Eigen::VectorXd> w{Eigen::VectorXd(2)}, h{Eigen::VectorXd(2)};
    w[0] << 0.3, -1.7;
    h[0] << 2.0, 0.5;
    CHECK(predict_neighborhood(w, h, cm, 0) == predict_linear(w[0], h[0]));
}

TEST_CASE("neighbourhood prediction averages weighted member predictions") {
    // two members with weight 0.5 each and raw predictions 1 and 3:
    // (0.5*1 + 0.5*3)/2 = 1
    ClusterMap cm;
    cm.members = {{0, 1}, {0, 1}};
    cm.weights = {{0.5, 0.5}, {0.5, 0.5}};
    cm.self_weight = {0.5, 0.5};
    Eigen::VectorXd raw(2);
    raw << 1.0, 3.0;
    CHECK(combine_neighborhood(raw, cm, 0) == doctest::Approx(1.0).epsilon(1e-15));

    std::vector<Eigen::VectorXd> w(2), h(2);
    w[0] = Eigen::VectorXd::Constant(1, 1.0);
    h[0] = Eigen::VectorXd::Constant(1, 1.0);
    w[1] = Eigen::VectorXd::Constant(1, 1.5);
    h[1] = Eigen::VectorXd::Constant(1, 2.0);
    CHECK(predict_neighborhood(w, h, cm, 0) ==
          doctest::Approx((0.5 * 1.0 + 0.5 * 3.0) / 2.0).epsilon(1e-15));
}

TEST_CASE("identical agents give the closed-form scaled prediction") {
    // complete 3-node graph, equal weights 1/3, same w and h everywhere:
    // prediction = (1/3) * sum 1/3 * p = p/3 with p the common linear value
    Graph g;
    g.K = 3;
    g.neighbors = {{0, 1, 2}, {0, 1, 2}, {0, 1, 2}};
    g.coords.assign(3, Eigen::Vector2d(0.5, 0.5));
    g.connected = true;
    const CombinationMatrix A = metropolis_weights(g);
    const ClusterMap cm = build_cluster_map(g, A, {1, 1, 1});
    std::vector<Eigen::VectorXd> w(3, Eigen::VectorXd::Constant(2, 0.7));
    std::vector<Eigen::VectorXd> h(3, Eigen::VectorXd::Constant(2, 1.1));
    const double common = predict_linear(w[0], h[0]);
    for (int k = 0; k < 3; ++k)
        CHECK(predict_neighborhood(w, h, cm, k) ==
              doctest::Approx(common / 3.0).epsilon(1e-14));
}
