#ifndef RUMOR_GENERATORS_HPP
#define RUMOR_GENERATORS_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "graph.hpp"
#include "rng.hpp"
#include "tree.hpp"
#include "util.hpp"

namespace rumor {

inline Graph line_graph(node_t n) {
	if (n == 0) throw std::domain_error("line_graph: n must be >= 1");
	std::vector<std::pair<node_t, node_t>> edges;
	edges.reserve(n - 1);
	for (node_t i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
	return Graph::from_dense_edges(n, edges);
}

// Ball of radius `depth` in the infinite d-regular tree: the root keeps
// its full degree d, every other internal node has d-1 children so that
// only the depth-`depth` leaves fall short of degree d. Ids are assigned
// in BFS order from the root.
inline Graph regular_tree(unsigned d, unsigned depth) {
	if (d < 2) throw std::domain_error("regular_tree: degree must be >= 2");
	std::vector<std::pair<node_t, node_t>> edges;
	node_t next = 1;
	std::vector<node_t> layer = {0};
	for (unsigned r = 0; r < depth; ++r) {
		std::vector<node_t> fresh;
		const unsigned fanout = (r == 0) ? d : d - 1;
		for (node_t u : layer)
			for (unsigned j = 0; j < fanout; ++j) {
				edges.push_back({u, next});
				fresh.push_back(next);
				++next;
			}
		layer = std::move(fresh);
	}
	return Graph::from_dense_edges(next, edges);
}

struct GeometricTreeSpec {
	double alpha = 1.0; // growth exponent
	double b = 1.0;     // lower level-count coefficient
	double c = 1.0;     // upper level-count coefficient
	unsigned d_star = 3;  // root degree
	unsigned radius = 10; // maximum depth in hops
};

namespace detail {

inline void check_geometric_spec(const GeometricTreeSpec& s) {
	if (!(s.alpha > 0)) throw std::domain_error("geometric_tree: alpha must be > 0");
	if (!(s.b > 0 && s.b <= s.c)) throw std::domain_error("geometric_tree: need 0 < b <= c");
	if (s.d_star < 3) throw std::domain_error("geometric_tree: root degree must be >= 3");
}

} // namespace detail

// Verify the grown tree against the level-count growth condition: in each
// root subtree the number of nodes at distance r from the root must lie
// in [b*r^alpha, c*r^alpha] for every level r up to the radius. Root
// degree and depth are checked as well. Throws on violation, so a tree
// returned by geometric_tree is certified by construction.
inline void validate_geometric_tree(const Graph& g, const GeometricTreeSpec& spec) {
	detail::check_geometric_spec(spec);
	if (g.degree(0) != spec.d_star)
		throw std::runtime_error("geometric_tree: root degree " + std::to_string(g.degree(0)) +
		                         " != " + std::to_string(spec.d_star));
	RootedTree t = bfs_tree(g, 0);
	// subtree label of each position = which root child it descends from
	std::vector<uint32_t> branch(t.size(), 0);
	std::span<const uint32_t> root_children = t.children(0);
	for (uint32_t i = 0; i < root_children.size(); ++i) branch[root_children[i]] = i;
	for (uint32_t p = 1; p < t.size(); ++p)
		if (t.depth[p] > 1) branch[p] = branch[t.parent[p]];
	std::vector<std::vector<uint32_t>> count(spec.d_star,
	                                         std::vector<uint32_t>(spec.radius + 1, 0));
	uint32_t max_depth = 0;
	for (uint32_t p = 1; p < t.size(); ++p) {
		if (t.depth[p] > spec.radius)
			throw std::runtime_error("geometric_tree: node beyond radius");
		++count[branch[p]][t.depth[p]];
		max_depth = std::max(max_depth, t.depth[p]);
	}
	if (max_depth != spec.radius)
		throw std::runtime_error("geometric_tree: depth " + std::to_string(max_depth) +
		                         " != radius " + std::to_string(spec.radius));
	const double eps = 1e-9;
	for (unsigned i = 0; i < spec.d_star; ++i)
		for (unsigned r = 1; r <= spec.radius; ++r) {
			double lo = spec.b * std::pow(double(r), spec.alpha);
			double hi = spec.c * std::pow(double(r), spec.alpha);
			double cnt = double(count[i][r]);
			if (cnt < lo - eps || cnt > hi + eps)
				throw std::runtime_error("geometric_tree: subtree " + std::to_string(i) +
				                         " has " + std::to_string(count[i][r]) +
				                         " nodes at level " + std::to_string(r) +
				                         ", outside [" + std::to_string(lo) + ", " +
				                         std::to_string(hi) + "]");
		}
}

// Grow a tree satisfying the polynomial level-count condition: root 0 has
// d_star subtrees, and each subtree's level r holds a target number of
// nodes drawn uniformly from the integers in [b*r^alpha, c*r^alpha]
// (clamped to >= 1). Children are spread across the previous level as
// evenly as possible, the first few parents taking the extra ones. Ids go
// in BFS order, interleaving subtrees level by level. The result is
// validated post-hoc: the condition constrains counts from the root, and
// building to sampled targets satisfies it by construction, but we do not
// trust that silently.
inline Graph geometric_tree(const GeometricTreeSpec& spec, uint64_t seed) {
	detail::check_geometric_spec(spec);
	if (spec.radius == 0) throw std::domain_error("geometric_tree: radius must be >= 1");
	Rng rng(seed);
	// per-subtree level sizes; level 1 is the root's child itself
	std::vector<std::vector<uint64_t>> level(spec.d_star);
	for (unsigned i = 0; i < spec.d_star; ++i) {
		level[i].assign(spec.radius + 1, 0);
		level[i][1] = 1;
		if (spec.b > 1.0 + 1e-12)
			throw std::runtime_error(
			    "geometric_tree: b > 1 is unsatisfiable at level 1 (one root child per subtree)");
		for (unsigned r = 2; r <= spec.radius; ++r) {
			double fr = std::pow(double(r), spec.alpha);
			uint64_t lo = uint64_t(std::ceil(spec.b * fr - 1e-9));
			uint64_t hi = uint64_t(std::floor(spec.c * fr + 1e-9));
			if (lo < 1) lo = 1;
			if (hi < lo)
				throw std::runtime_error("geometric_tree: no admissible level size at level " +
				                         std::to_string(r) + " (interval [" +
				                         std::to_string(spec.b * fr) + ", " +
				                         std::to_string(spec.c * fr) + "])");
			level[i][r] = lo + rng.below(hi - lo + 1);
		}
	}
	std::vector<std::pair<node_t, node_t>> edges;
	std::vector<std::vector<node_t>> prev(spec.d_star); // previous level's ids per subtree
	node_t next = 1;
	for (unsigned i = 0; i < spec.d_star; ++i) {
		edges.push_back({0, next});
		prev[i] = {next};
		++next;
	}
	for (unsigned r = 2; r <= spec.radius; ++r)
		for (unsigned i = 0; i < spec.d_star; ++i) {
			const uint64_t want = level[i][r];
			const uint64_t parents = prev[i].size();
			const uint64_t base = want / parents, extra = want % parents;
			std::vector<node_t> fresh;
			fresh.reserve(want);
			for (uint64_t j = 0; j < parents; ++j) {
				uint64_t kids = base + (j < extra ? 1 : 0);
				for (uint64_t s = 0; s < kids; ++s) {
					edges.push_back({prev[i][j], next});
					fresh.push_back(next);
					++next;
				}
			}
			prev[i] = std::move(fresh);
		}
	Graph g = Graph::from_dense_edges(next, edges);
	validate_geometric_tree(g, spec);
	return g;
}

// Watts-Strogatz small world: ring lattice with k nearest neighbors, each
// clockwise edge rewired with probability p to a uniformly random new far
// endpoint (no self-loops, no duplicate edges). Disconnected draws are
// retried with an incremented seed; connectivity matters because every
// downstream routine works on connected infected subgraphs.
inline Graph small_world(node_t n, unsigned k, double p, uint64_t seed) {
	if (k < 2 || k % 2 != 0) throw std::domain_error("small_world: k must be even and >= 2");
	if (n <= k) throw std::domain_error("small_world: need n > k");
	if (p < 0.0 || p > 1.0) throw std::domain_error("small_world: p must be in [0, 1]");
	const int max_attempts = 64;
	for (int attempt = 0; attempt < max_attempts; ++attempt) {
		Rng rng(seed + uint64_t(attempt));
		std::vector<std::unordered_set<node_t>> adj(n);
		auto connect = [&](node_t a, node_t b) {
			adj[a].insert(b);
			adj[b].insert(a);
		};
		for (node_t i = 0; i < n; ++i)
			for (unsigned j = 1; j <= k / 2; ++j) connect(i, node_t((i + j) % n));
		for (node_t i = 0; i < n; ++i)
			for (unsigned j = 1; j <= k / 2; ++j) {
				node_t old = node_t((i + j) % n);
				if (rng.uniform01() >= p) continue;
				if (adj[i].size() >= size_t(n) - 1) continue; // i already saturated
				node_t fresh;
				do
					fresh = node_t(rng.below(n));
				while (fresh == i || adj[i].count(fresh));
				adj[i].erase(old);
				adj[old].erase(i);
				connect(i, fresh);
			}
		std::vector<std::pair<node_t, node_t>> edges;
		for (node_t i = 0; i < n; ++i)
			for (node_t w : adj[i])
				if (i < w) edges.push_back({i, w});
		Graph g = Graph::from_dense_edges(n, edges);
		// cheap connectivity probe before accepting the draw
		Workspace ws;
		Stamped& seen = ws.mark;
		seen.reset(n);
		std::vector<node_t> queue = {0};
		seen.set(0, 1);
		for (size_t head = 0; head < queue.size(); ++head)
			for (node_t w : g.neighbors(queue[head]))
				if (!seen.has(w)) {
					seen.set(w, 1);
					queue.push_back(w);
				}
		if (queue.size() == n) return g;
	}
	throw std::runtime_error("small_world: no connected draw in " +
	                         std::to_string(max_attempts) + " attempts");
}

// Barabasi-Albert preferential attachment: seed clique on m+1 nodes, then
// each arriving node attaches m edges to distinct targets chosen with
// probability proportional to degree (sampled from the running edge-
// endpoint list, which realizes exactly that distribution).
inline Graph scale_free(node_t n, unsigned m, uint64_t seed) {
	if (m < 1) throw std::domain_error("scale_free: m must be >= 1");
	if (n <= m) throw std::domain_error("scale_free: need n > m");
	Rng rng(seed);
	std::vector<std::pair<node_t, node_t>> edges;
	std::vector<node_t> endpoints; // node appears once per incident edge
	for (node_t a = 0; a <= m; ++a)
		for (node_t b = a + 1; b <= m; ++b) {
			edges.push_back({a, b});
			endpoints.push_back(a);
			endpoints.push_back(b);
		}
	std::vector<node_t> chosen;
	for (node_t v = m + 1; v < n; ++v) {
		chosen.clear();
		while (chosen.size() < m) {
			node_t t = endpoints[rng.below(endpoints.size())];
			bool dup = false;
			for (node_t c : chosen)
				if (c == t) dup = true;
			if (!dup) chosen.push_back(t);
		}
		for (node_t t : chosen) {
			edges.push_back({t, v});
			endpoints.push_back(t);
			endpoints.push_back(v);
		}
	}
	return Graph::from_dense_edges(n, edges);
}

} // namespace rumor

#endif
