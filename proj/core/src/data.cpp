#include "netsmooth/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "netsmooth/errors.hpp"
#include "netsmooth/rng.hpp"

namespace fs = std::filesystem;

namespace netsmooth {

FeatureSpec FeatureSpec::defaults() {
    FeatureSpec spec;
    Eigen::VectorXd base(5);
    base << 0.4, 0.8, 1.2, 1.6, 2.0;
    spec.attr_means = base / base.norm();
    spec.attr_stddevs = Eigen::VectorXd::Ones(5);
    spec.class_separation = 1.0;
    return spec;
}

LabelAssignment LabelAssignment::clustered(std::vector<int> classes) {
    LabelAssignment a;
    a.pattern = LabelPattern::Clustered;
    a.classes = std::move(classes);
    return a;
}

NetworkDataset generate_synthetic(const Graph& g, const FeatureSpec& spec,
                                  const LabelAssignment& labels, int N,
                                  std::uint64_t seed, DimMode dims) {
    if (N < 1) throw ConfigError("generate_synthetic: N must be >= 1");
    if (spec.attr_means.size() != spec.attr_stddevs.size())
        throw ConfigError("generate_synthetic: means/stddevs length mismatch");
    if ((spec.attr_stddevs.array() <= 0.0).any())
        throw ConfigError("generate_synthetic: attribute stddevs must be positive");
    if (spec.class_separation < 0.0)
        throw ConfigError("generate_synthetic: class_separation must be >= 0");

    const int K = g.K;
    std::vector<int> classes(K, +1);
    if (labels.pattern == LabelPattern::Clustered) {
        if (static_cast<int>(labels.classes.size()) != K)
            throw ConfigError("generate_synthetic: clustered pattern needs one +-1 class "
                              "per agent (got " + std::to_string(labels.classes.size()) +
                              " for K=" + std::to_string(K) + ")");
        for (int c : labels.classes)
            if (c != 1 && c != -1)
                throw ConfigError("generate_synthetic: cluster classes must be +-1");
        classes = labels.classes;
    }

    Rng rng(seed);
    const int M_max = spec.max_dim();

    // draw order is fixed: dimensions, then the shared coins, then features
    std::vector<int> M(K);
    for (int k = 0; k < K; ++k)
        M[k] = (dims == DimMode::Fixed)
                   ? M_max
                   : 1 + static_cast<int>(rng.bounded(static_cast<std::uint64_t>(M_max)));

    Eigen::VectorXi coin(N);
    for (int n = 0; n < N; ++n) coin(n) = rng.sign_coin();

    NetworkDataset ds;
    ds.N = N;
    ds.pattern = labels.pattern;
    ds.agent_classes = classes;
    ds.agents.resize(K);
    const double s = spec.class_separation;
    for (int k = 0; k < K; ++k) {
        AgentDataset& agent = ds.agents[k];
        agent.features.resize(N, M[k]);
        agent.labels.resize(N);
        for (int n = 0; n < N; ++n) {
            const int y = classes[k] * coin(n);
            agent.labels(n) = y;
            for (int m = 0; m < M[k]; ++m)
                agent.features(n, m) =
                    rng.normal(y * s * spec.attr_means(m), spec.attr_stddevs(m));
        }
    }
    return ds;
}

SplitIndices train_test_split(int N, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw ConfigError("train_test_split: fraction must lie in (0, 1)");
    const int n_train = static_cast<int>(std::floor(train_fraction * N));
    if (n_train < 1)
        throw ConfigError("train_test_split: fraction leaves an empty training set");

    std::vector<int> perm(N);
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(seed);
    for (int i = N - 1; i > 0; --i) {
        const int j = static_cast<int>(rng.bounded(static_cast<std::uint64_t>(i + 1)));
        std::swap(perm[i], perm[j]);
    }

    SplitIndices split;
    split.train.assign(perm.begin(), perm.begin() + n_train);
    split.test.assign(perm.begin() + n_train, perm.end());
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

// ---------------------------------------------------------------------------
// CSV ingestion

namespace {

std::string read_file(const std::string& path, const char* what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingDataError(std::string(what) + ": cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

double parse_cell(const std::string& cell, const std::string& file, std::size_t row,
                  const char* what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(cell, &used);
    } catch (const std::exception&) {
        used = std::string::npos;
    }
    if (used != cell.size())
        throw ConfigError(file + ": row " + std::to_string(row) + ": non-numeric " +
                          what + " '" + cell + "'");
    return v;
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

AgentDataset load_agent_csv(const std::string& path, int N,
                            const std::map<long, int>* label_mapping) {
    const std::string text = read_file(path, "load_network_csv");
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line))
        throw ConfigError(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const auto header = split_line(line);
    if (header.size() < 3 || header[0] != "n" || header[1] != "label")
        throw ConfigError(path + ": header must be n,label,f1,...,fM");
    const int M = static_cast<int>(header.size()) - 2;
    for (int m = 0; m < M; ++m)
        if (header[2 + m] != "f" + std::to_string(m + 1))
            throw ConfigError(path + ": unexpected feature column '" + header[2 + m] + "'");

    AgentDataset agent;
    agent.features.resize(N, M);
    agent.labels.resize(N);
    std::vector<char> seen(N, 0);
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split_line(line);
        if (static_cast<int>(cells.size()) != M + 2)
            throw ConfigError(path + ": row " + std::to_string(row) + ": expected " +
                              std::to_string(M + 2) + " columns, got " +
                              std::to_string(cells.size()));
        const long n = std::lround(parse_cell(cells[0], path, row, "sample index"));
        if (n < 0 || n >= N)
            throw ConfigError(path + ": row " + std::to_string(row) +
                              ": sample index " + std::to_string(n) + " outside 0.." +
                              std::to_string(N - 1));
        if (seen[n])
            throw ConfigError(path + ": row " + std::to_string(row) +
                              ": duplicate sample index " + std::to_string(n));
        seen[n] = 1;

        const long raw_label = std::lround(parse_cell(cells[1], path, row, "label"));
        int label = 0;
        if (label_mapping) {
            auto it = label_mapping->find(raw_label);
            if (it == label_mapping->end())
                throw ConfigError(path + ": row " + std::to_string(row) + ": label " +
                                  std::to_string(raw_label) + " not in the declared mapping");
            label = it->second;
        } else {
            if (raw_label != 1 && raw_label != -1)
                throw ConfigError(path + ": row " + std::to_string(row) + ": label " +
                                  std::to_string(raw_label) +
                                  " must be +-1 (or declare a label_mapping)");
            label = static_cast<int>(raw_label);
        }
        agent.labels(n) = label;
        for (int m = 0; m < M; ++m)
            agent.features(n, m) = parse_cell(cells[2 + m], path, row, "feature");
    }
    for (int n = 0; n < N; ++n)
        if (!seen[n])
            throw ConfigError(path + ": missing sample index " + std::to_string(n));
    return agent;
}

} // namespace

LoadedNetwork load_network_csv(const std::string& manifest_path) {
    const std::string text = read_file(manifest_path, "load_network_csv");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(manifest_path + ": " + e.what());
    }

    const fs::path base = fs::path(manifest_path).parent_path();
    LoadedNetwork out;
    try {
        out.ds.N = j.at("N").get<int>();
        if (out.ds.N < 1) throw ConfigError(manifest_path + ": N must be >= 1");

        std::map<long, int> mapping;
        const bool has_mapping = j.contains("label_mapping");
        if (has_mapping) {
            for (const auto& [key, value] : j.at("label_mapping").items()) {
                const int target = value.get<int>();
                if (target != 1 && target != -1)
                    throw ConfigError(manifest_path + ": label_mapping values must be +-1");
                mapping[std::stol(key)] = target;
            }
        }

        std::map<int, std::string> files;
        for (const auto& agent : j.at("agents")) {
            const int id = agent.at("id").get<int>();
            if (files.count(id))
                throw ConfigError(manifest_path + ": duplicate agent id " + std::to_string(id));
            files[id] = agent.at("file").get<std::string>();
        }
        if (files.empty()) throw ConfigError(manifest_path + ": no agents");
        int expect = 0;
        for (const auto& [id, file] : files) {
            if (id != expect)
                throw ConfigError(manifest_path + ": agent ids must be 0..K-1 without gaps");
            ++expect;
            out.ds.agents.push_back(
                load_agent_csv((base / file).string(), out.ds.N,
                               has_mapping ? &mapping : nullptr));
        }

        if (j.contains("stations")) {
            const std::string spath = (base / j.at("stations").get<std::string>()).string();
            const std::string stext = read_file(spath, "load_network_csv");
            std::istringstream sin(stext);
            std::string line;
            if (!std::getline(sin, line))
                throw ConfigError(spath + ": empty stations file");
            std::vector<Eigen::Vector2d> coords(out.ds.agents.size(),
                                                Eigen::Vector2d::Zero());
            std::vector<char> seen(out.ds.agents.size(), 0);
            std::size_t row = 1;
            while (std::getline(sin, line)) {
                ++row;
                if (!line.empty() && line.back() == '\r') line.pop_back();
                if (line.empty()) continue;
                const auto cells = split_line(line);
                if (cells.size() != 3)
                    throw ConfigError(spath + ": row " + std::to_string(row) +
                                      ": expected agent_id,x,y");
                const long id = std::lround(parse_cell(cells[0], spath, row, "agent id"));
                if (id < 0 || id >= static_cast<long>(coords.size()))
                    throw ConfigError(spath + ": row " + std::to_string(row) +
                                      ": agent id out of range");
                coords[id] = Eigen::Vector2d(parse_cell(cells[1], spath, row, "x"),
                                             parse_cell(cells[2], spath, row, "y"));
                seen[id] = 1;
            }
            for (std::size_t k = 0; k < seen.size(); ++k)
                if (!seen[k])
                    throw ConfigError(spath + ": missing station for agent " +
                                      std::to_string(k));
            out.station_coords = std::move(coords);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(manifest_path + ": " + e.what());
    }
    out.ds.pattern = LabelPattern::External;
    out.ds.agent_classes.assign(out.ds.agents.size(), +1);
    return out;
}

std::string export_network_csv(const NetworkDataset& ds,
                               const std::optional<std::vector<Eigen::Vector2d>>& coords,
                               const std::string& dir) {
    fs::create_directories(dir);
    const fs::path base(dir);
    char buf[64];

    nlohmann::json manifest;
    manifest["N"] = ds.N;
    auto& agents = manifest["agents"] = nlohmann::json::array();
    for (int k = 0; k < ds.K(); ++k) {
        const std::string fname = "agent_" + std::to_string(k) + ".csv";
        agents.push_back({{"id", k}, {"file", fname}});

        const AgentDataset& agent = ds.agents[k];
        std::string text = "n,label";
        for (int m = 1; m <= agent.dim(); ++m) text += ",f" + std::to_string(m);
        text += '\n';
        for (int n = 0; n < ds.N; ++n) {
            text += std::to_string(n);
            text += ',';
            text += std::to_string(agent.labels(n));
            for (int m = 0; m < agent.dim(); ++m) {
                std::snprintf(buf, sizeof(buf), ",%.17g", agent.features(n, m));
                text += buf;
            }
            text += '\n';
        }
        std::ofstream out(base / fname, std::ios::binary);
        if (!out) throw ConfigError("export_network_csv: cannot write " + (base / fname).string());
        out << text;
    }

    if (coords) {
        if (coords->size() != static_cast<std::size_t>(ds.K()))
            throw ConfigError("export_network_csv: coordinate count does not match agents");
        manifest["stations"] = "stations.csv";
        std::string text = "agent_id,x,y\n";
        for (int k = 0; k < ds.K(); ++k) {
            std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g\n", k, (*coords)[k].x(),
                          (*coords)[k].y());
            text += buf;
        }
        std::ofstream out(base / "stations.csv", std::ios::binary);
        if (!out) throw ConfigError("export_network_csv: cannot write stations.csv");
        out << text;
    }

    const std::string mpath = (base / "manifest.json").string();
    std::ofstream out(mpath, std::ios::binary);
    if (!out) throw ConfigError("export_network_csv: cannot write " + mpath);
    out << manifest.dump(2) << '\n';
    return mpath;
}

} // namespace netsmooth
