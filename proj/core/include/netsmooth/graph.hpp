#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace netsmooth {

// Undirected topology with self-inclusive neighbourhoods. Node indices are
// 0-based everywhere, including on disk.
struct Graph {
    int K = 0;
    std::vector<std::vector<int>> neighbors; // sorted, each list contains its own node
    std::vector<Eigen::Vector2d> coords;     // positions in [0,1]^2
    bool connected = false;

    int degree(int k) const { return static_cast<int>(neighbors[k].size()); }
};

// Doubly stochastic, symmetric edge weights; zero off the neighbourhood.
struct CombinationMatrix {
    Eigen::MatrixXd A;
};

// L = D - A with D the diagonal of neighbourhood row sums. For a doubly
// stochastic A over self-inclusive neighbourhoods D is the identity.
struct Laplacian {
    Eigen::MatrixXd L;
    Eigen::VectorXd D; // diagonal entries
};

// Nodes placed uniformly at random in the unit square, connected when their
// Euclidean distance is at most `radius`. Disconnected outcomes are flagged,
// not rejected; callers decide whether to resample.
Graph random_geometric_graph(int K, double radius, std::uint64_t seed);

// Distance-threshold adjacency over given positions (no wraparound).
Graph geometric_graph_from_coords(const std::vector<Eigen::Vector2d>& coords,
                                  double radius);

// Symmetrized k-nearest-neighbour graph over the given positions. Distance
// ties are broken towards the lower node index. Duplicate coordinates are
// rejected because nearest-neighbour order would be undefined.
Graph knn_graph(const std::vector<Eigen::Vector2d>& coords, int k_neighbors);

// Metropolis weights with self-inclusive degrees: a_kl = 1/max(n_k, n_l) for
// an edge, diagonal absorbs the remainder. Doubly stochastic and symmetric.
CombinationMatrix metropolis_weights(const Graph& g);

Laplacian laplacian(const CombinationMatrix& A, const Graph& g);

// Quadratic form v' L v. Equals 1/2 * sum_{k,l} a_kl (v_k - v_l)^2 for
// symmetric weights; zero on constant vectors.
double smoothness(const Laplacian& lap, const Eigen::VectorXd& v);

// Throws ConfigError when self-loops, symmetry, or index ranges are violated.
void validate_graph(const Graph& g);

bool is_connected(const std::vector<std::vector<int>>& neighbors, int K);

// JSON document {"K":int, "coords":[[x,y],...], "neighbors":[[...],...]}.
std::string graph_to_json(const Graph& g);
Graph graph_from_json(const std::string& text);
void save_graph(const Graph& g, const std::string& path);
Graph load_graph(const std::string& path);

// Dense CSV, row-major, 17 significant digits.
std::string matrix_to_csv(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_csv(const std::string& text);
void save_matrix_csv(const Eigen::MatrixXd& m, const std::string& path);
Eigen::MatrixXd load_matrix_csv(const std::string& path);

} // namespace netsmooth
