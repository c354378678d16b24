#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace orrw {

// The finite connected graph whose copies form the levels of the cylinder.
// Vertices are indices 0..size-1; edges are simple and undirected.
class FiberGraph {
public:
    static constexpr int kMaxVertices = 4096;

    FiberGraph(int vertex_count, std::vector<std::pair<int, int>> edges, std::string name)
        : size_(vertex_count), name_(std::move(name)) {
        if (size_ < 1) throw std::invalid_argument("fiber: needs at least one vertex");
        if (size_ > kMaxVertices) throw std::invalid_argument("fiber: too many vertices");
        adjacency_.resize(size_);
        std::set<std::pair<int, int>> seen;
        for (auto [u, v] : edges) {
            if (u < 0 || v < 0 || u >= size_ || v >= size_)
                throw std::invalid_argument("fiber: edge endpoint out of range");
            if (u == v) throw std::invalid_argument("fiber: self-loop");
            auto key = std::minmax(u, v);
            if (!seen.insert(key).second) throw std::invalid_argument("fiber: duplicate edge");
            adjacency_[u].push_back(v);
            adjacency_[v].push_back(u);
        }
        for (auto& nbrs : adjacency_) std::sort(nbrs.begin(), nbrs.end());
        edge_count_ = static_cast<int>(seen.size());
        if (!connected()) throw std::invalid_argument("fiber: graph must be connected");
    }

    int size() const noexcept { return size_; }
    int edge_count() const noexcept { return edge_count_; }
    const std::string& name() const noexcept { return name_; }
    const std::vector<int>& neighbors(int v) const { return adjacency_.at(v); }
    int degree(int v) const { return static_cast<int>(adjacency_.at(v).size()); }
    int max_degree() const {
        int d = 0;
        for (const auto& nbrs : adjacency_) d = std::max<int>(d, static_cast<int>(nbrs.size()));
        return d;
    }

    bool has_edge(int u, int v) const {
        const auto& nbrs = adjacency_.at(u);
        return std::binary_search(nbrs.begin(), nbrs.end(), v);
    }

    std::vector<std::pair<int, int>> edges() const {
        std::vector<std::pair<int, int>> out;
        out.reserve(edge_count_);
        for (int u = 0; u < size_; ++u)
            for (int v : adjacency_[u])
                if (u < v) out.emplace_back(u, v);
        return out;
    }

    // Built-in families used throughout the experiment sweeps.
    static FiberGraph point() { return FiberGraph(1, {}, "point"); }

    static FiberGraph path(int m) {
        require_size(m);
        std::vector<std::pair<int, int>> e;
        for (int i = 0; i + 1 < m; ++i) e.emplace_back(i, i + 1);
        return FiberGraph(m, std::move(e), "path" + std::to_string(m));
    }

    static FiberGraph cycle(int m) {
        if (m < 3) throw std::invalid_argument("fiber: cycle needs >= 3 vertices");
        std::vector<std::pair<int, int>> e;
        for (int i = 0; i < m; ++i) e.emplace_back(i, (i + 1) % m);
        return FiberGraph(m, std::move(e), "cycle" + std::to_string(m));
    }

    static FiberGraph complete(int m) {
        require_size(m);
        std::vector<std::pair<int, int>> e;
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j) e.emplace_back(i, j);
        return FiberGraph(m, std::move(e), "complete" + std::to_string(m));
    }

    // Edge-list file: one "u v" pair per line, 0-based indices, blank lines
    // and '#' comments ignored, vertex count = 1 + max index.
    static FiberGraph from_edge_list_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("fiber file: cannot open " + path);
        std::vector<std::pair<int, int>> e;
        int max_index = -1;
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            auto hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            std::istringstream ls(line);
            int u, v;
            std::string trailing;
            if (!(ls >> u >> v) || (ls >> trailing))
                throw std::runtime_error("fiber file: malformed line " + std::to_string(line_no) +
                                         " in " + path);
            if (u < 0 || v < 0)
                throw std::runtime_error("fiber file: negative index at line " +
                                         std::to_string(line_no) + " in " + path);
            e.emplace_back(u, v);
            max_index = std::max({max_index, u, v});
        }
        if (max_index < 0) throw std::runtime_error("fiber file: no edges in " + path);
        return FiberGraph(max_index + 1, std::move(e), "file:" + path);
    }

    // Parses point | path<m> | cycle<m> | complete<m> | file:<path>.
    static FiberGraph from_spec(const std::string& spec) {
        if (spec == "point") return point();
        auto numeric_suffix = [&](const std::string& prefix, int& out) {
            if (spec.rfind(prefix, 0) != 0) return false;
            const std::string tail = spec.substr(prefix.size());
            if (tail.empty() || tail.find_first_not_of("0123456789") != std::string::npos)
                return false;
            out = std::stoi(tail);
            return true;
        };
        int m = 0;
        if (numeric_suffix("path", m)) return path(m);
        if (numeric_suffix("cycle", m)) return cycle(m);
        if (numeric_suffix("complete", m)) return complete(m);
        if (spec.rfind("file:", 0) == 0) return from_edge_list_file(spec.substr(5));
        throw std::invalid_argument("unknown fiber spec: " + spec);
    }

private:
    static void require_size(int m) {
        if (m < 1) throw std::invalid_argument("fiber: needs at least one vertex");
    }

    bool connected() const {
        std::vector<char> seen(size_, 0);
        std::queue<int> q;
        q.push(0);
        seen[0] = 1;
        int visited = 1;
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            for (int v : adjacency_[u])
                if (!seen[v]) {
                    seen[v] = 1;
                    ++visited;
                    q.push(v);
                }
        }
        return visited == size_;
    }

    int size_ = 1;
    int edge_count_ = 0;
    std::string name_;
    std::vector<std::vector<int>> adjacency_;
};

} // namespace orrw
