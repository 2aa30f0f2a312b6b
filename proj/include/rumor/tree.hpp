#ifndef RUMOR_TREE_HPP
#define RUMOR_TREE_HPP

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "graph.hpp"
#include "util.hpp"

namespace rumor {

// Array with O(1) logical clearing via an epoch counter. Experiments run
// millions of trials against multi-million-node hosts; re-zeroing a
// host-sized array per trial would dominate everything else.
struct Stamped {
	std::vector<uint32_t> stamp;
	std::vector<uint32_t> val;
	uint32_t epoch = 0;

	void reset(size_t n) {
		if (stamp.size() < n) {
			stamp.assign(n, 0);
			val.resize(n);
			epoch = 0;
		}
		if (++epoch == 0) {
			std::fill(stamp.begin(), stamp.end(), 0);
			epoch = 1;
		}
	}
	bool has(uint32_t i) const { return stamp[i] == epoch; }
	void set(uint32_t i, uint32_t v) {
		stamp[i] = epoch;
		val[i] = v;
	}
	uint32_t get(uint32_t i) const { return val[i]; }
};

// Reusable per-thread scratch space. All library entry points accept an
// optional Workspace; passing one amortizes allocations across trials.
struct Workspace {
	Stamped member;   // infected-set membership
	Stamped mark;     // visited flags / position lookup / distances
	Stamped mark2;    // second distance map where needed
	std::vector<node_t> buf;
	std::vector<std::pair<double, node_t>> heap;
};

// Rooted spanning tree of an infected subgraph, stored in BFS order.
// Arrays are indexed by BFS position (not host index): position 0 is the
// root, layers are contiguous, and within a layer positions ascend by id.
// Children of any node are therefore contiguous-by-layer and ascending.
struct RootedTree {
	std::vector<node_t> order;       // pos -> host node index
	std::vector<uint32_t> parent;    // pos -> parent pos (root maps to itself)
	std::vector<uint32_t> depth;     // pos -> hop distance from root
	std::vector<uint32_t> subtree;   // pos -> subtree node count T_u
	std::vector<uint32_t> child_off; // pos -> children range start; size N+1
	std::vector<uint32_t> child;     // children positions, ascending

	node_t size() const { return node_t(order.size()); }
	node_t root() const { return order[0]; }
	std::span<const uint32_t> children(uint32_t pos) const {
		return {child.data() + child_off[pos], child.data() + child_off[pos + 1]};
	}
};

// Deterministic BFS tree of the infected subgraph rooted at `root`.
// Contract: the frontier expands in ascending id order and every node
// attaches to its lowest-id neighbor in the previous layer. A plain FIFO
// queue does not guarantee the latter (a high-id frontier node can reach
// a new node before its lower-id same-layer sibling is dequeued), so the
// BFS is layer-synchronous with each layer sorted before expansion.
inline RootedTree bfs_tree(const Graph& g, const std::vector<node_t>& infected, node_t root,
                           Workspace* ws = nullptr) {
	Workspace local;
	if (!ws) ws = &local;
	const size_t n_host = g.num_nodes();
	ws->member.reset(n_host);
	for (node_t u : infected) ws->member.set(u, 1);
	if (!ws->member.has(root)) throw std::domain_error("bfs_tree: root is not infected");

	RootedTree t;
	const uint32_t n = uint32_t(infected.size());
	t.order.reserve(n);
	t.parent.reserve(n);
	t.depth.reserve(n);

	Stamped& pos_of = ws->mark; // host index -> BFS position
	pos_of.reset(n_host);

	t.order.push_back(root);
	t.parent.push_back(0);
	t.depth.push_back(0);
	pos_of.set(root, 0);

	uint32_t layer_begin = 0, layer_end = 1, d = 0;
	while (layer_begin < layer_end) {
		++d;
		// expanding positions in order is expanding ids in ascending order,
		// because each layer below is sorted before its positions are fixed
		for (uint32_t p = layer_begin; p < layer_end; ++p) {
			const node_t u = t.order[p];
			for (node_t w : g.neighbors(u)) {
				if (!ws->member.has(w) || pos_of.has(w)) continue;
				pos_of.set(w, uint32_t(t.order.size()));
				t.order.push_back(w);
				t.parent.push_back(p); // first discoverer == lowest-id previous-layer neighbor
				t.depth.push_back(d);
			}
		}
		uint32_t next_begin = layer_end, next_end = uint32_t(t.order.size());
		// sort the fresh layer ascending by host id, keeping parents aligned
		std::vector<uint32_t> idx(next_end - next_begin);
		for (uint32_t i = 0; i < idx.size(); ++i) idx[i] = next_begin + i;
		std::sort(idx.begin(), idx.end(),
		          [&](uint32_t a, uint32_t b) { return t.order[a] < t.order[b]; });
		std::vector<node_t> ord(idx.size());
		std::vector<uint32_t> par(idx.size());
		for (uint32_t i = 0; i < idx.size(); ++i) {
			ord[i] = t.order[idx[i]];
			par[i] = t.parent[idx[i]];
		}
		for (uint32_t i = 0; i < idx.size(); ++i) {
			t.order[next_begin + i] = ord[i];
			t.parent[next_begin + i] = par[i];
			pos_of.set(ord[i], next_begin + i);
		}
		layer_begin = next_begin;
		layer_end = next_end;
	}

	if (t.order.size() != infected.size())
		throw std::domain_error("bfs_tree: infected set is not connected (reached " +
		                        std::to_string(t.order.size()) + " of " +
		                        std::to_string(infected.size()) + " nodes)");

	// children CSR: filling in position order yields ascending child lists
	t.child_off.assign(t.order.size() + 1, 0);
	for (uint32_t p = 1; p < t.order.size(); ++p) ++t.child_off[t.parent[p] + 1];
	for (uint32_t p = 0; p < t.order.size(); ++p) t.child_off[p + 1] += t.child_off[p];
	t.child.resize(t.order.size() ? t.order.size() - 1 : 0);
	{
		std::vector<uint32_t> cursor(t.child_off.begin(), t.child_off.end() - 1);
		for (uint32_t p = 1; p < t.order.size(); ++p) t.child[cursor[t.parent[p]]++] = p;
	}

	// subtree sizes in one reverse sweep over the BFS order
	t.subtree.assign(t.order.size(), 1);
	for (uint32_t p = uint32_t(t.order.size()); p-- > 1;) t.subtree[t.parent[p]] += t.subtree[p];
	return t;
}

// BFS tree over the whole graph (the graph itself need not be a tree).
inline RootedTree bfs_tree(const Graph& g, node_t root, Workspace* ws = nullptr) {
	std::vector<node_t> all(g.num_nodes());
	for (node_t i = 0; i < g.num_nodes(); ++i) all[i] = i;
	return bfs_tree(g, all, root, ws);
}

// Subtree sizes keyed by BFS position (already carried by the tree; this
// is the spec'd single post-order pass, recomputed for callers that
// mutate nothing but want the map standalone).
inline std::vector<uint32_t> subtree_sizes(const RootedTree& t) {
	std::vector<uint32_t> size(t.order.size(), 1);
	for (uint32_t p = uint32_t(t.order.size()); p-- > 1;) size[t.parent[p]] += size[p];
	return size;
}

// Hop distances from `from` to every node of `restrict`, computed within
// the induced subgraph. Result is aligned with `restrict`. Throws if some
// restricted node is unreachable inside the restriction.
inline std::vector<uint32_t> hop_distances(const Graph& g, const std::vector<node_t>& restrict_set,
                                           node_t from, Workspace* ws = nullptr) {
	Workspace local;
	if (!ws) ws = &local;
	ws->member.reset(g.num_nodes());
	for (node_t u : restrict_set) ws->member.set(u, 1);
	if (!ws->member.has(from)) throw std::domain_error("hop_distances: source not in restriction");

	Stamped& dist = ws->mark;
	dist.reset(g.num_nodes());
	std::vector<node_t>& queue = ws->buf;
	queue.clear();
	queue.push_back(from);
	dist.set(from, 0);
	for (size_t head = 0; head < queue.size(); ++head) {
		node_t u = queue[head];
		uint32_t du = dist.get(u);
		for (node_t w : g.neighbors(u)) {
			if (!ws->member.has(w) || dist.has(w)) continue;
			dist.set(w, du + 1);
			queue.push_back(w);
		}
	}
	std::vector<uint32_t> out(restrict_set.size());
	for (size_t i = 0; i < restrict_set.size(); ++i) {
		if (!dist.has(restrict_set[i]))
			throw std::domain_error("hop_distances: node " +
			                        std::to_string(g.id_of(restrict_set[i])) +
			                        " unreachable within restriction");
		out[i] = dist.get(restrict_set[i]);
	}
	return out;
}

// Unrestricted variant over the whole graph, aligned with node indices.
inline std::vector<uint32_t> hop_distances(const Graph& g, node_t from, Workspace* ws = nullptr) {
	std::vector<node_t> all(g.num_nodes());
	for (node_t i = 0; i < g.num_nodes(); ++i) all[i] = i;
	return hop_distances(g, all, from, ws);
}

// Single-pair hop distance in the host graph, with early exit.
inline uint32_t hop_distance(const Graph& g, node_t a, node_t b, Workspace* ws = nullptr) {
	if (a == b) return 0;
	Workspace local;
	if (!ws) ws = &local;
	Stamped& dist = ws->mark;
	dist.reset(g.num_nodes());
	std::vector<node_t>& queue = ws->buf;
	queue.clear();
	queue.push_back(a);
	dist.set(a, 0);
	for (size_t head = 0; head < queue.size(); ++head) {
		node_t u = queue[head];
		uint32_t du = dist.get(u);
		for (node_t w : g.neighbors(u)) {
			if (dist.has(w)) continue;
			if (w == b) return du + 1;
			dist.set(w, du + 1);
			queue.push_back(w);
		}
	}
	throw std::domain_error("hop_distance: nodes are in different components");
}

// Number of host edges with both endpoints infected; the infected
// subgraph is a tree exactly when this equals N-1 (given connectivity).
inline uint64_t induced_edge_count(const Graph& g, const std::vector<node_t>& infected,
                                   Workspace* ws = nullptr) {
	Workspace local;
	if (!ws) ws = &local;
	ws->member.reset(g.num_nodes());
	for (node_t u : infected) ws->member.set(u, 1);
	uint64_t cnt = 0;
	for (node_t u : infected)
		for (node_t w : g.neighbors(u))
			if (u < w && ws->member.has(w)) ++cnt;
	return cnt;
}

} // namespace rumor

#endif
