#include "netsmooth/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "netsmooth/errors.hpp"
#include "netsmooth/rng.hpp"

namespace netsmooth {

bool is_connected(const std::vector<std::vector<int>>& neighbors, int K) {
    if (K <= 0) return false;
    std::vector<char> seen(K, 0);
    std::deque<int> queue{0};
    seen[0] = 1;
    int reached = 1;
    while (!queue.empty()) {
        const int k = queue.front();
        queue.pop_front();
        for (int l : neighbors[k]) {
            if (!seen[l]) {
                seen[l] = 1;
                ++reached;
                queue.push_back(l);
            }
        }
    }
    return reached == K;
}

void validate_graph(const Graph& g) {
    if (g.K <= 0) throw ConfigError("graph: node count must be positive");
    if (static_cast<int>(g.neighbors.size()) != g.K)
        throw ConfigError("graph: neighbour list count does not match K");
    if (static_cast<int>(g.coords.size()) != g.K)
        throw ConfigError("graph: coordinate count does not match K");
    std::vector<std::set<int>> sets(g.K);
    for (int k = 0; k < g.K; ++k) {
        bool self = false;
        for (int l : g.neighbors[k]) {
            if (l < 0 || l >= g.K)
                throw ConfigError("graph: neighbour index out of range at node " +
                                  std::to_string(k));
            if (l == k) self = true;
            sets[k].insert(l);
        }
        if (!self)
            throw ConfigError("graph: missing self-loop at node " + std::to_string(k));
        if (sets[k].size() != g.neighbors[k].size())
            throw ConfigError("graph: duplicate neighbour at node " + std::to_string(k));
    }
    for (int k = 0; k < g.K; ++k)
        for (int l : g.neighbors[k])
            if (!sets[l].count(k))
                throw ConfigError("graph: asymmetric edge " + std::to_string(k) + "-" +
                                  std::to_string(l));
}

Graph geometric_graph_from_coords(const std::vector<Eigen::Vector2d>& coords,
                                  double radius) {
    const int K = static_cast<int>(coords.size());
    if (K < 1) throw ConfigError("geometric graph: K must be >= 1");
    if (!(radius > 0.0) || radius > std::sqrt(2.0) + 1e-15)
        throw ConfigError("geometric graph: radius must lie in (0, sqrt(2)]");
    Graph g;
    g.K = K;
    g.coords = coords;
    g.neighbors.assign(K, {});
    const double r2 = radius * radius;
    for (int k = 0; k < K; ++k) {
        for (int l = 0; l < K; ++l) {
            if (l == k || (g.coords[k] - g.coords[l]).squaredNorm() <= r2)
                g.neighbors[k].push_back(l);
        }
    }
    g.connected = is_connected(g.neighbors, K);
    return g;
}

Graph random_geometric_graph(int K, double radius, std::uint64_t seed) {
    if (K < 1) throw ConfigError("random_geometric_graph: K must be >= 1");
    std::vector<Eigen::Vector2d> coords(K);
    Rng rng(seed);
    for (int k = 0; k < K; ++k) {
        const double x = rng.uniform01();
        const double y = rng.uniform01();
        coords[k] = Eigen::Vector2d(x, y);
    }
    return geometric_graph_from_coords(coords, radius);
}

Graph knn_graph(const std::vector<Eigen::Vector2d>& coords, int k_neighbors) {
    const int K = static_cast<int>(coords.size());
    if (K < 2) throw ConfigError("knn_graph: need at least 2 nodes");
    if (k_neighbors < 1 || k_neighbors >= K)
        throw ConfigError("knn_graph: k_neighbors must lie in [1, K-1]");
    for (int a = 0; a < K; ++a)
        for (int b = a + 1; b < K; ++b)
            if (coords[a] == coords[b])
                throw ConfigError("knn_graph: duplicate coordinates at nodes " +
                                  std::to_string(a) + " and " + std::to_string(b) +
                                  "; nearest-neighbour order is undefined");

    // symmetrized union of per-node nearest lists, ties towards lower index
    std::vector<std::set<int>> adj(K);
    std::vector<std::pair<double, int>> order;
    for (int k = 0; k < K; ++k) {
        order.clear();
        for (int l = 0; l < K; ++l) {
            if (l == k) continue;
            order.emplace_back((coords[k] - coords[l]).squaredNorm(), l);
        }
        std::sort(order.begin(), order.end());
        for (int j = 0; j < k_neighbors; ++j) {
            const int l = order[j].second;
            adj[k].insert(l);
            adj[l].insert(k);
        }
    }

    Graph g;
    g.K = K;
    g.coords = coords;
    g.neighbors.assign(K, {});
    for (int k = 0; k < K; ++k) {
        adj[k].insert(k);
        g.neighbors[k].assign(adj[k].begin(), adj[k].end());
    }
    g.connected = is_connected(g.neighbors, K);
    return g;
}

CombinationMatrix metropolis_weights(const Graph& g) {
    validate_graph(g);
    const int K = g.K;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(K, K);
    for (int k = 0; k < K; ++k) {
        double off_sum = 0.0;
        for (int l : g.neighbors[k]) {
            if (l == k) continue;
            const double w = 1.0 / static_cast<double>(std::max(g.degree(k), g.degree(l)));
            A(k, l) = w;
            off_sum += w;
        }
        A(k, k) = 1.0 - off_sum;
    }
    return {std::move(A)};
}

Laplacian laplacian(const CombinationMatrix& A, const Graph& g) {
    const int K = g.K;
    if (A.A.rows() != K || A.A.cols() != K)
        throw ConfigError("laplacian: matrix size does not match graph");
    Laplacian lap;
    lap.D = Eigen::VectorXd::Zero(K);
    for (int k = 0; k < K; ++k)
        for (int l : g.neighbors[k]) lap.D(k) += A.A(k, l);
    lap.L = -A.A;
    lap.L.diagonal() += lap.D;
    return lap;
}

double smoothness(const Laplacian& lap, const Eigen::VectorXd& v) {
    if (v.size() != lap.L.rows())
        throw ConfigError("smoothness: vector length does not match Laplacian");
    return v.dot(lap.L * v);
}

// ---------------------------------------------------------------------------
// serialization

std::string graph_to_json(const Graph& g) {
    nlohmann::json j;
    j["K"] = g.K;
    auto& coords = j["coords"] = nlohmann::json::array();
    for (const auto& c : g.coords) coords.push_back({c.x(), c.y()});
    j["neighbors"] = g.neighbors;
    return j.dump(2) + "\n";
}

Graph graph_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("graph JSON: ") + e.what());
    }
    Graph g;
    try {
        g.K = j.at("K").get<int>();
        for (const auto& c : j.at("coords"))
            g.coords.emplace_back(c.at(0).get<double>(), c.at(1).get<double>());
        g.neighbors = j.at("neighbors").get<std::vector<std::vector<int>>>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("graph JSON: ") + e.what());
    }
    for (auto& list : g.neighbors) std::sort(list.begin(), list.end());
    validate_graph(g);
    g.connected = is_connected(g.neighbors, g.K);
    return g;
}

static std::string read_file(const std::string& path, const char* what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingDataError(std::string(what) + ": cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void save_graph(const Graph& g, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("save_graph: cannot write " + path);
    out << graph_to_json(g);
}

Graph load_graph(const std::string& path) {
    return graph_from_json(read_file(path, "load_graph"));
}

std::string matrix_to_csv(const Eigen::MatrixXd& m) {
    std::string out;
    char buf[64];
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            std::snprintf(buf, sizeof(buf), "%.17g", m(r, c));
            if (c) out += ',';
            out += buf;
        }
        out += '\n';
    }
    return out;
}

Eigen::MatrixXd matrix_from_csv(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        rows.emplace_back();
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            std::size_t used = 0;
            double v;
            try {
                v = std::stod(cell, &used);
            } catch (const std::exception&) {
                throw ConfigError("matrix CSV: non-numeric cell '" + cell + "'");
            }
            if (used != cell.size())
                throw ConfigError("matrix CSV: trailing characters in cell '" + cell + "'");
            rows.back().push_back(v);
        }
    }
    if (rows.empty()) throw ConfigError("matrix CSV: no rows");
    const std::size_t cols = rows.front().size();
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != cols)
            throw ConfigError("matrix CSV: ragged row " + std::to_string(r));
        for (std::size_t c = 0; c < cols; ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
    return m;
}

void save_matrix_csv(const Eigen::MatrixXd& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("save_matrix_csv: cannot write " + path);
    out << matrix_to_csv(m);
}

Eigen::MatrixXd load_matrix_csv(const std::string& path) {
    return matrix_from_csv(read_file(path, "load_matrix_csv"));
}

} // namespace netsmooth
