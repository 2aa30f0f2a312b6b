#ifndef RUMOR_GRAPH_HPP
#define RUMOR_GRAPH_HPP

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "util.hpp"

namespace rumor {

// Immutable undirected graph in compressed sparse row form. Nodes carry
// arbitrary non-negative external ids; internally they are renumbered to
// dense indices 0..n-1 in ascending id order, so "ascending internal index"
// and "ascending external id" coincide. That ordering is a contract: BFS
// tie-breaking and therefore estimator output depend on it. The renumbering
// is exposed through id_of()/index_of()/external_ids().
class Graph {
public:
	Graph() = default;

	node_t num_nodes() const { return n_; }
	uint64_t num_edges() const { return adj_.size() / 2; }

	std::span<const node_t> neighbors(node_t i) const {
		return {adj_.data() + off_[i], adj_.data() + off_[i + 1]};
	}

	uint32_t degree(node_t i) const { return uint32_t(off_[i + 1] - off_[i]); }

	bool has_dense_ids() const { return ids_.empty(); }

	uint32_t id_of(node_t i) const { return ids_.empty() ? i : ids_[i]; }

	node_t index_of(uint32_t external_id) const {
		if (ids_.empty()) {
			if (external_id >= n_)
				throw std::domain_error("unknown node id " + std::to_string(external_id));
			return external_id;
		}
		auto it = index_.find(external_id);
		if (it == index_.end())
			throw std::domain_error("unknown node id " + std::to_string(external_id));
		return it->second;
	}

	bool has_id(uint32_t external_id) const {
		if (ids_.empty()) return external_id < n_;
		return index_.count(external_id) != 0;
	}

	// index -> external id mapping; empty when ids are already dense 0..n-1
	const std::vector<uint32_t>& external_ids() const { return ids_; }

	// Build from edges over dense ids 0..n-1 (the generators' fast path).
	// Duplicate edges are collapsed; self-loops are rejected.
	static Graph from_dense_edges(node_t n, std::vector<std::pair<node_t, node_t>> edges) {
		for (auto& [u, v] : edges) {
			if (u == v) throw std::domain_error("self-loop at node " + std::to_string(u));
			if (u >= n || v >= n) throw std::domain_error("edge endpoint out of range");
		}
		Graph g;
		g.n_ = n;
		g.build_csr(edges);
		return g;
	}

	// Build from edges over arbitrary external ids, renumbering ascending.
	// `isolated` lists ids that must exist even without incident edges.
	static Graph from_edges(const std::vector<std::pair<uint32_t, uint32_t>>& edges,
	                        const std::vector<uint32_t>& isolated = {}) {
		std::vector<uint32_t> ids;
		ids.reserve(edges.size() * 2 + isolated.size());
		for (auto& [u, v] : edges) {
			if (u == v) throw std::domain_error("self-loop at node " + std::to_string(u));
			ids.push_back(u);
			ids.push_back(v);
		}
		for (uint32_t u : isolated) ids.push_back(u);
		std::sort(ids.begin(), ids.end());
		ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

		Graph g;
		g.n_ = node_t(ids.size());
		bool dense = true;
		for (node_t i = 0; i < g.n_; ++i)
			if (ids[i] != i) { dense = false; break; }
		if (!dense) {
			g.ids_ = ids;
			g.index_.reserve(ids.size());
			for (node_t i = 0; i < g.n_; ++i) g.index_.emplace(ids[i], i);
		}
		std::vector<std::pair<node_t, node_t>> internal;
		internal.reserve(edges.size());
		for (auto& [u, v] : edges)
			internal.emplace_back(g.index_of(u), g.index_of(v));
		g.build_csr(internal);
		return g;
	}

	bool operator==(const Graph& o) const {
		return n_ == o.n_ && off_ == o.off_ && adj_ == o.adj_ && ids_ == o.ids_;
	}

private:
	void build_csr(std::vector<std::pair<node_t, node_t>>& edges) {
		// normalize to u < v, dedup, then mirror
		for (auto& [u, v] : edges)
			if (u > v) std::swap(u, v);
		std::sort(edges.begin(), edges.end());
		edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

		std::vector<uint32_t> deg(n_, 0);
		for (auto& [u, v] : edges) {
			++deg[u];
			++deg[v];
		}
		off_.assign(n_ + 1, 0);
		for (node_t i = 0; i < n_; ++i) off_[i + 1] = off_[i] + deg[i];
		adj_.resize(off_[n_]);
		std::vector<uint64_t> cursor(off_.begin(), off_.end() - 1);
		for (auto& [u, v] : edges) {
			adj_[cursor[u]++] = v;
			adj_[cursor[v]++] = u;
		}
		// each row was filled in ascending order of the opposite endpoint
		// only for the v-side; sort every row to guarantee the contract
		for (node_t i = 0; i < n_; ++i)
			std::sort(adj_.begin() + long(off_[i]), adj_.begin() + long(off_[i + 1]));
	}

	node_t n_ = 0;
	std::vector<uint64_t> off_{0};
	std::vector<node_t> adj_;
	std::vector<uint32_t> ids_;                       // empty => identity mapping
	std::unordered_map<uint32_t, uint32_t> index_;    // populated only when !dense
};

// --- edge-list text format ---------------------------------------------
//
// One edge per line: two whitespace-separated non-negative integers "u v".
// Lines starting with '#' are comments. Duplicate and reversed lines
// collapse to a single undirected edge. A line with a single integer
// declares an isolated node (needed so single-node graphs round-trip).

inline Graph load_edge_list(std::istream& in, const std::string& name = "<stream>") {
	std::vector<std::pair<uint32_t, uint32_t>> edges;
	std::vector<uint32_t> isolated;
	std::string line;
	uint64_t lineno = 0;
	while (std::getline(in, line)) {
		++lineno;
		size_t start = line.find_first_not_of(" \t\r");
		if (start == std::string::npos || line[start] == '#') continue;
		std::istringstream ls(line);
		long long u = -1, v = -1;
		std::string trailing;
		if (!(ls >> u) || u < 0)
			throw std::runtime_error(name + ":" + std::to_string(lineno) + ": expected node id");
		if (!(ls >> v)) {
			isolated.push_back(uint32_t(u));
			continue;
		}
		if (v < 0 || (ls >> trailing))
			throw std::runtime_error(name + ":" + std::to_string(lineno) + ": malformed edge line");
		edges.emplace_back(uint32_t(u), uint32_t(v));
	}
	return Graph::from_edges(edges, isolated);
}

inline Graph load_edge_list(const std::string& path) {
	std::ifstream in(path);
	if (!in) throw std::runtime_error("cannot open edge list: " + path);
	return load_edge_list(in, path);
}

inline void save_edge_list(const Graph& g, std::ostream& out) {
	for (node_t i = 0; i < g.num_nodes(); ++i) {
		if (g.degree(i) == 0) {
			out << g.id_of(i) << "\n";
			continue;
		}
		for (node_t j : g.neighbors(i))
			if (i < j) out << g.id_of(i) << " " << g.id_of(j) << "\n";
	}
}

inline void save_edge_list(const Graph& g, const std::string& path) {
	std::ofstream out(path);
	if (!out) throw std::runtime_error("cannot open for writing: " + path);
	save_edge_list(g, out);
}

// Node-list files (e.g. infected sets): one external id per line, '#'
// comments allowed. Returned as internal indices, sorted ascending.
inline std::vector<node_t> load_node_list(const Graph& g, std::istream& in,
                                          const std::string& name = "<stream>") {
	std::vector<node_t> nodes;
	std::string line;
	uint64_t lineno = 0;
	while (std::getline(in, line)) {
		++lineno;
		size_t start = line.find_first_not_of(" \t\r");
		if (start == std::string::npos || line[start] == '#') continue;
		std::istringstream ls(line);
		long long u = -1;
		std::string trailing;
		if (!(ls >> u) || u < 0 || (ls >> trailing))
			throw std::runtime_error(name + ":" + std::to_string(lineno) + ": expected one node id");
		nodes.push_back(g.index_of(uint32_t(u)));
	}
	std::sort(nodes.begin(), nodes.end());
	nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
	return nodes;
}

inline std::vector<node_t> load_node_list(const Graph& g, const std::string& path) {
	std::ifstream in(path);
	if (!in) throw std::runtime_error("cannot open node list: " + path);
	return load_node_list(g, in, path);
}

inline void save_node_list(const Graph& g, const std::vector<node_t>& nodes, std::ostream& out) {
	for (node_t i : nodes) out << g.id_of(i) << "\n";
}

} // namespace rumor

#endif
