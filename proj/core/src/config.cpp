#include "netsmooth/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "netsmooth/errors.hpp"

namespace netsmooth {

namespace {

// One parsed value: scalar string token or flat array of tokens. Typing is
// applied at lookup time so errors can name the key.
struct Value {
    std::vector<std::string> items;
    bool is_array = false;
    bool quoted = false;
};

struct Table {
    std::map<std::string, Value> entries; // key = "section.name"
    std::string origin;

    const Value* find(const std::string& key) const {
        auto it = entries.find(key);
        return it == entries.end() ? nullptr : &it->second;
    }
};

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

// strips a trailing comment that is not inside quotes
std::string strip_comment(const std::string& s) {
    bool in_quote = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') in_quote = !in_quote;
        if (s[i] == '#' && !in_quote) return s.substr(0, i);
    }
    return s;
}

Value parse_value(const std::string& raw, const std::string& where) {
    Value v;
    std::string text = trim(raw);
    if (text.empty()) throw ConfigError(where + ": missing value");
    if (text.front() == '[') {
        if (text.back() != ']') throw ConfigError(where + ": unterminated array");
        v.is_array = true;
        std::string body = text.substr(1, text.size() - 2);
        std::string item;
        std::istringstream in(body);
        while (std::getline(in, item, ',')) {
            item = trim(item);
            if (item.empty()) continue;
            v.items.push_back(item);
        }
        return v;
    }
    if (text.front() == '"') {
        if (text.size() < 2 || text.back() != '"')
            throw ConfigError(where + ": unterminated string");
        v.quoted = true;
        v.items.push_back(text.substr(1, text.size() - 2));
        return v;
    }
    v.items.push_back(text);
    return v;
}

Table parse_table(const std::string& text, const std::string& origin) {
    Table table;
    table.origin = origin;
    std::istringstream in(text);
    std::string line, section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(strip_comment(line));
        if (line.empty()) continue;
        const std::string where = origin + ":" + std::to_string(lineno);
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(where + ": malformed section header '" + line + "'");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) throw ConfigError(where + ": empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(where + ": expected key = value, got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError(where + ": empty key");
        const std::string full = section.empty() ? key : section + "." + key;
        if (table.entries.count(full))
            throw ConfigError(where + ": duplicate key '" + full + "'");
        table.entries[full] = parse_value(line.substr(eq + 1), where + " (" + full + ")");
    }
    return table;
}

// typed lookups -------------------------------------------------------------

double to_double(const std::string& token, const std::string& key) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(token, &used);
    } catch (const std::exception&) {
        used = std::string::npos;
    }
    if (used != token.size())
        throw ConfigError("config key '" + key + "': expected a number, got '" + token + "'");
    return v;
}

long to_long(const std::string& token, const std::string& key) {
    const double v = to_double(token, key);
    const long l = static_cast<long>(v);
    if (static_cast<double>(l) != v)
        throw ConfigError("config key '" + key + "': expected an integer, got '" + token + "'");
    return l;
}

struct Reader {
    const Table& table;
    std::vector<std::string> known;

    const Value* get(const std::string& key) {
        known.push_back(key);
        return table.find(key);
    }
    void read(const std::string& key, std::string& out) {
        if (const Value* v = get(key)) {
            if (v->is_array) throw ConfigError("config key '" + key + "': expected a string");
            out = v->items[0];
        }
    }
    void read(const std::string& key, double& out) {
        if (const Value* v = get(key)) {
            if (v->is_array || v->quoted)
                throw ConfigError("config key '" + key + "': expected a number");
            out = to_double(v->items[0], key);
        }
    }
    void read(const std::string& key, int& out) {
        if (const Value* v = get(key)) {
            if (v->is_array || v->quoted)
                throw ConfigError("config key '" + key + "': expected an integer");
            out = static_cast<int>(to_long(v->items[0], key));
        }
    }
    void read(const std::string& key, long& out) {
        if (const Value* v = get(key)) {
            if (v->is_array || v->quoted)
                throw ConfigError("config key '" + key + "': expected an integer");
            out = to_long(v->items[0], key);
        }
    }
    void read(const std::string& key, std::uint64_t& out) {
        if (const Value* v = get(key)) {
            if (v->is_array || v->quoted)
                throw ConfigError("config key '" + key + "': expected an integer");
            const long l = to_long(v->items[0], key);
            if (l < 0) throw ConfigError("config key '" + key + "': seed must be >= 0");
            out = static_cast<std::uint64_t>(l);
        }
    }
    void read(const std::string& key, bool& out) {
        if (const Value* v = get(key)) {
            const std::string& t = v->items[0];
            if (t == "true")
                out = true;
            else if (t == "false")
                out = false;
            else
                throw ConfigError("config key '" + key + "': expected true or false");
        }
    }
    void read(const std::string& key, std::vector<double>& out) {
        if (const Value* v = get(key)) {
            if (!v->is_array)
                throw ConfigError("config key '" + key + "': expected an array");
            out.clear();
            for (const auto& item : v->items) out.push_back(to_double(item, key));
        }
    }
    void read(const std::string& key, std::vector<int>& out) {
        if (const Value* v = get(key)) {
            if (!v->is_array)
                throw ConfigError("config key '" + key + "': expected an array");
            out.clear();
            for (const auto& item : v->items)
                out.push_back(static_cast<int>(to_long(item, key)));
        }
    }

    void reject_unknown() const {
        for (const auto& [key, value] : table.entries) {
            if (std::find(known.begin(), known.end(), key) == known.end())
                throw ConfigError(table.origin + ": unknown config key '" + key + "'");
        }
    }
};

void validate(const ExperimentConfig& cfg) {
    auto expect = [](bool ok, const std::string& key, const std::string& why) {
        if (!ok) throw ConfigError("config key '" + key + "': " + why);
    };
    expect(cfg.graph.kind == "geometric" || cfg.graph.kind == "knn" ||
               cfg.graph.kind == "file",
           "graph.kind", "must be geometric, knn, or file");
    expect(cfg.graph.K >= 1, "graph.K", "must be >= 1");
    expect(cfg.graph.radius > 0.0, "graph.radius", "must be positive");
    expect(cfg.graph.k_neighbors >= 1, "graph.k_neighbors", "must be >= 1");
    expect(cfg.data.kind == "synthetic" || cfg.data.kind == "file", "data.kind",
           "must be synthetic or file");
    expect(cfg.data.N >= 1, "data.N", "must be >= 1");
    expect(cfg.data.M_max >= 1, "data.M_max", "must be >= 1");
    expect(cfg.data.pattern == "uniform" || cfg.data.pattern == "clustered",
           "data.pattern", "must be uniform or clustered");
    expect(cfg.data.dims == "random" || cfg.data.dims == "fixed", "data.dims",
           "must be random or fixed");
    expect(cfg.data.train_fraction > 0.0 && cfg.data.train_fraction < 1.0,
           "data.train_fraction", "must lie in (0, 1)");
    expect(cfg.data.class_separation >= 0.0, "data.class_separation", "must be >= 0");
    expect(cfg.train.algorithm == "global" || cfg.train.algorithm == "local" ||
               cfg.train.algorithm == "noncoop",
           "train.algorithm", "must be global, local, or noncoop");
    expect(cfg.train.mu > 0.0, "train.mu", "must be positive");
    expect(cfg.train.rho >= 0.0, "train.rho", "must be >= 0");
    expect(cfg.train.eta >= 0.0, "train.eta", "must be >= 0");
    expect(cfg.train.passes >= 1, "train.passes", "must be >= 1");
    expect(cfg.train.grad_mode == "full" || cfg.train.grad_mode == "own-term",
           "train.grad_mode", "must be full or own-term");
    expect(cfg.train.eval_every >= 1, "train.eval_every", "must be >= 1");
    expect(cfg.analysis.reference_tol > 0.0, "analysis.reference_tol",
           "must be positive");
    expect(cfg.analysis.seeds >= 1, "analysis.seeds", "must be >= 1");
    expect(!cfg.out_dir.empty(), "output.dir", "must not be empty");
}

} // namespace

HyperParams ExperimentConfig::hyperparams() const {
    HyperParams hp;
    hp.mu = train.mu;
    hp.rho = train.rho;
    hp.eta = train.eta;
    hp.passes = train.passes;
    hp.seed = train.seed;
    hp.grad_mode = train.grad_mode == "own-term" ? GradMode::OwnTerm : GradMode::Full;
    hp.paper_literal_alg1 = train.paper_literal_alg1;
    hp.eval_every = train.eval_every;
    return hp;
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
    const Table table = parse_table(text, origin);
    Reader r{table, {}};
    ExperimentConfig cfg;

    r.read("graph.kind", cfg.graph.kind);
    r.read("graph.K", cfg.graph.K);
    r.read("graph.radius", cfg.graph.radius);
    r.read("graph.k_neighbors", cfg.graph.k_neighbors);
    r.read("graph.seed", cfg.graph.seed);
    r.read("graph.file", cfg.graph.file);
    r.read("graph.matrix_file", cfg.graph.matrix_file);

    r.read("data.kind", cfg.data.kind);
    r.read("data.N", cfg.data.N);
    r.read("data.M_max", cfg.data.M_max);
    r.read("data.pattern", cfg.data.pattern);
    r.read("data.cluster_classes", cfg.data.cluster_classes);
    r.read("data.cluster_rule", cfg.data.cluster_rule);
    r.read("data.attr_means", cfg.data.attr_means);
    r.read("data.attr_stddevs", cfg.data.attr_stddevs);
    r.read("data.class_separation", cfg.data.class_separation);
    r.read("data.dims", cfg.data.dims);
    r.read("data.train_fraction", cfg.data.train_fraction);
    r.read("data.seed", cfg.data.seed);
    r.read("data.split_seed", cfg.data.split_seed);
    r.read("data.manifest", cfg.data.manifest);

    r.read("train.algorithm", cfg.train.algorithm);
    r.read("train.mu", cfg.train.mu);
    r.read("train.rho", cfg.train.rho);
    r.read("train.eta", cfg.train.eta);
    r.read("train.passes", cfg.train.passes);
    r.read("train.grad_mode", cfg.train.grad_mode);
    r.read("train.paper_literal_alg1", cfg.train.paper_literal_alg1);
    r.read("train.seed", cfg.train.seed);
    r.read("train.eval_every", cfg.train.eval_every);

    r.read("analysis.reference_tol", cfg.analysis.reference_tol);
    r.read("analysis.max_iters", cfg.analysis.max_iters);
    r.read("analysis.seeds", cfg.analysis.seeds);
    r.read("analysis.iterations", cfg.analysis.iterations);

    r.read("output.dir", cfg.out_dir);

    r.reject_unknown();
    validate(cfg);
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingDataError("config: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path);
}

void apply_overrides(ExperimentConfig& cfg, const CliOverrides& ov) {
    if (ov.out_dir) cfg.out_dir = *ov.out_dir;
    if (ov.seed) cfg.train.seed = *ov.seed;
    if (ov.grad_mode) {
        if (*ov.grad_mode != "full" && *ov.grad_mode != "own-term")
            throw ConfigError("--grad-mode must be full or own-term");
        cfg.train.grad_mode = *ov.grad_mode;
    }
    if (ov.paper_literal_alg1) cfg.train.paper_literal_alg1 = true;
}

} // namespace netsmooth
