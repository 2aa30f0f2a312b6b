#ifndef RUMOR_SPREAD_HPP
#define RUMOR_SPREAD_HPP

#include <algorithm>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "graph.hpp"
#include "rng.hpp"
#include "tree.hpp"
#include "util.hpp"

namespace rumor {

enum class SpreadMode { by_count, by_time };

// One realization of the SI process. `order` is the infection order with
// order[0] = source; `times` are the cumulative infection times aligned
// with it. The infected node set (the rumor graph) is exactly `order`.
struct SpreadTrace {
	node_t source = 0;
	std::vector<node_t> order;
	std::vector<double> times;
	SpreadMode mode = SpreadMode::by_count;
	double mode_param = 0; // target count or time horizon

	node_t size() const { return node_t(order.size()); }
};

struct Boundary {
	std::vector<std::pair<node_t, node_t>> edges; // (infected, uninfected)
	size_t size() const { return edges.size(); }
};

inline Boundary boundary(const Graph& g, const std::vector<node_t>& infected,
                         Workspace* ws = nullptr) {
	if (infected.empty()) throw std::domain_error("boundary: infected set is empty");
	Workspace local;
	if (!ws) ws = &local;
	ws->member.reset(g.num_nodes());
	for (node_t u : infected) ws->member.set(u, 1);
	Boundary b;
	for (node_t u : infected)
		for (node_t w : g.neighbors(u))
			if (!ws->member.has(w)) b.edges.push_back({u, w});
	return b;
}

// Embedded jump chain of the exponential-clock SI process, run until n
// nodes are infected. Each live boundary edge carries an Exp(1) clock, so
// the next infection happens across a uniformly random live edge after an
// Exp(#live) holding time; the returned times therefore make the trace
// simultaneously valid as a continuous-time realization.
//
// The boundary is kept as an append-only edge vector with lazy deletion:
// sampling rejects edges whose far endpoint is already infected, removing
// each dead edge the first time it is drawn. A separate live-edge counter
// (maintained by scanning each newly infected node's neighborhood) gives
// the exact rejection acceptance set and the exact holding-time rate.
// Every edge is appended once and removed at most once, so the whole
// simulation is amortized O(edges touched).
inline SpreadTrace spread_by_count(const Graph& g, node_t source, node_t n, uint64_t seed,
                                   Workspace* ws = nullptr) {
	if (source >= g.num_nodes()) throw std::domain_error("spread_by_count: bad source index");
	if (n == 0) throw std::domain_error("spread_by_count: n must be >= 1");
	Workspace local;
	if (!ws) ws = &local;
	Rng rng(seed);

	SpreadTrace tr;
	tr.source = source;
	tr.mode = SpreadMode::by_count;
	tr.mode_param = double(n);
	tr.order.reserve(n);
	tr.times.reserve(n);

	Stamped& infected = ws->member;
	infected.reset(g.num_nodes());
	infected.set(source, 1);
	tr.order.push_back(source);
	tr.times.push_back(0.0);

	std::vector<std::pair<node_t, node_t>> bvec; // live + not-yet-removed dead edges
	size_t live = 0;
	for (node_t w : g.neighbors(source)) {
		bvec.push_back({source, w});
		++live;
	}

	double now = 0.0;
	while (tr.order.size() < n) {
		if (live == 0)
			throw std::domain_error("spread_by_count: component of source has only " +
			                        std::to_string(tr.order.size()) + " nodes, need " +
			                        std::to_string(n));
		now += rng.exponential() / double(live);
		node_t fresh = NO_NODE;
		for (;;) {
			size_t idx = rng.below(bvec.size());
			auto [u, w] = bvec[idx];
			if (infected.has(w)) { // dead edge: evict and redraw
				bvec[idx] = bvec.back();
				bvec.pop_back();
				continue;
			}
			fresh = w;
			break;
		}
		infected.set(fresh, 1);
		tr.order.push_back(fresh);
		tr.times.push_back(now);
		for (node_t x : g.neighbors(fresh)) {
			if (infected.has(x)) {
				--live; // edge x-fresh just left the boundary
			} else {
				bvec.push_back({fresh, x});
				++live;
			}
		}
	}
	return tr;
}

// Event-driven SI simulation up to time t. Edge clocks are sampled lazily
// the moment their first endpoint gets infected; memorylessness of the
// exponential makes this exact. Stale heap entries (node infected through
// an earlier arrival) are skipped on pop.
inline SpreadTrace spread_by_time(const Graph& g, node_t source, double t, uint64_t seed,
                                  Workspace* ws = nullptr) {
	if (source >= g.num_nodes()) throw std::domain_error("spread_by_time: bad source index");
	if (t < 0) throw std::domain_error("spread_by_time: t must be >= 0");
	Workspace local;
	if (!ws) ws = &local;
	Rng rng(seed);

	SpreadTrace tr;
	tr.source = source;
	tr.mode = SpreadMode::by_time;
	tr.mode_param = t;

	Stamped& infected = ws->member;
	infected.reset(g.num_nodes());
	auto& heap = ws->heap; // min-heap via greater-than comparator
	heap.clear();
	auto cmp = [](const std::pair<double, node_t>& a, const std::pair<double, node_t>& b) {
		return a.first > b.first;
	};

	auto infect = [&](node_t u, double at) {
		infected.set(u, 1);
		tr.order.push_back(u);
		tr.times.push_back(at);
		for (node_t w : g.neighbors(u)) {
			if (infected.has(w)) continue;
			heap.push_back({at + rng.exponential(), w});
			std::push_heap(heap.begin(), heap.end(), cmp);
		}
	};
	infect(source, 0.0);
	while (!heap.empty()) {
		std::pop_heap(heap.begin(), heap.end(), cmp);
		auto [at, w] = heap.back();
		heap.pop_back();
		if (at > t) break; // heap min beyond horizon: nothing else can arrive
		if (infected.has(w)) continue;
		infect(w, at);
	}
	return tr;
}

// --- spreading on the infinite regular tree ------------------------------
// A finite ball can never stand in for the infinite d-regular tree here:
// the SI cluster is stringy, and its deepest tendril runs ahead of the
// volume radius by a constant factor (branching-random-walk front), so a
// ball big enough to make boundary contact rare would need exponentially
// more nodes than the rumor itself. Instead the infinite tree is grown on
// demand: only the infected nodes exist, each remembering how many of its
// d slots are still free. Afterwards the free slots are materialized as
// uninfected stub leaves, giving a finite host on which every quantity an
// estimator reads -- host degrees of infected nodes, the rumor subgraph,
// distances inside it -- is identical to the infinite-tree picture.
//
// Infected nodes are numbered 0..n-1 in infection order with 0 the source;
// stubs get the ids after them. `first_slot_child` is the infected child
// hanging off the source's first slot (NO_NODE if that slot never fired);
// since the slot is fixed before any randomness is drawn, the subtree below
// it is an unbiased sample of one branch of the source.
struct RegularTreeSample {
	Graph host;
	std::vector<node_t> infected;      // 0..n-1, infection order
	std::vector<node_t> parent;        // parent[0] = NO_NODE
	SpreadTrace trace;
	node_t first_slot_child = NO_NODE;
};

namespace detail {

// Shared tail: turn the grown tree into a concrete host graph. Each
// infected node u still owning free slots contributes that many stub
// leaves, so deg(u) = d exactly as on the infinite tree.
inline void finish_regular_sample(RegularTreeSample& s, unsigned d,
                                  std::vector<std::pair<node_t, node_t>>& edges) {
	node_t n = node_t(s.trace.order.size());
	std::vector<node_t> used(n, 0);
	for (node_t v = 1; v < n; ++v) {
		++used[v];
		++used[s.parent[v]];
	}
	node_t next = n;
	for (node_t v = 0; v < n; ++v) {
		RUMOR_CHECK(used[v] <= d, "regular-tree sample: degree overflow");
		for (node_t k = used[v]; k < d; ++k) edges.push_back({v, next++});
	}
	s.host = Graph::from_dense_edges(next, std::move(edges));
	s.infected.resize(n);
	for (node_t v = 0; v < n; ++v) s.infected[v] = v;
}

} // namespace detail

// Jump chain of the SI process on the infinite d-regular tree, run until n
// nodes are infected. The boundary is a vector of free slots (one entry per
// uninfected neighbor of an infected node); on the infinite tree slots never
// go stale, so a uniform draw from the vector is the next infection and the
// vector size is the exact holding-time rate d + (k-1)(d-2).
inline RegularTreeSample spread_regular_tree_count(unsigned d, node_t n, uint64_t seed) {
	if (d < 2) throw std::domain_error("spread_regular_tree_count: degree must be >= 2");
	if (n == 0) throw std::domain_error("spread_regular_tree_count: n must be >= 1");
	Rng rng(seed);

	RegularTreeSample s;
	s.trace.source = 0;
	s.trace.mode = SpreadMode::by_count;
	s.trace.mode_param = double(n);
	s.trace.order.reserve(n);
	s.trace.times.reserve(n);
	s.trace.order.push_back(0);
	s.trace.times.push_back(0.0);
	s.parent.assign(1, NO_NODE);

	// flag marks the source's first slot so one branch stays identifiable
	// after swap-pop reshuffling.
	std::vector<std::pair<node_t, uint8_t>> slots;
	for (unsigned k = 0; k < d; ++k) slots.push_back({0, k == 0});

	std::vector<std::pair<node_t, node_t>> edges;
	double now = 0.0;
	for (node_t fresh = 1; fresh < n; ++fresh) {
		now += rng.exponential() / double(slots.size());
		size_t idx = rng.below(slots.size());
		auto [par, flag] = slots[idx];
		slots[idx] = slots.back();
		slots.pop_back();
		if (flag) s.first_slot_child = fresh;
		edges.push_back({par, fresh});
		s.parent.push_back(par);
		s.trace.order.push_back(fresh);
		s.trace.times.push_back(now);
		for (unsigned k = 0; k + 1 < d; ++k) slots.push_back({fresh, 0});
	}
	detail::finish_regular_sample(s, d, edges);
	return s;
}

// Event-driven SI on the infinite d-regular tree up to time t. Every free
// slot carries its own Exp(1) clock from the moment its owner is infected;
// the heap holds (fire time, owner, first-slot flag). `cap` bounds the
// materialized size in case a caller asks for a horizon whose exponential
// population outgrows memory.
inline RegularTreeSample spread_regular_tree_time(unsigned d, double t, uint64_t seed,
                                                  node_t cap = 20u * 1000 * 1000) {
	if (d < 2) throw std::domain_error("spread_regular_tree_time: degree must be >= 2");
	if (t < 0) throw std::domain_error("spread_regular_tree_time: t must be >= 0");
	Rng rng(seed);

	RegularTreeSample s;
	s.trace.source = 0;
	s.trace.mode = SpreadMode::by_time;
	s.trace.mode_param = t;
	s.trace.order.push_back(0);
	s.trace.times.push_back(0.0);
	s.parent.assign(1, NO_NODE);

	struct Clock {
		double at;
		node_t owner;
		uint8_t flag;
	};
	auto cmp = [](const Clock& a, const Clock& b) { return a.at > b.at; };
	std::vector<Clock> heap;
	for (unsigned k = 0; k < d; ++k) {
		heap.push_back({rng.exponential(), 0, k == 0});
		std::push_heap(heap.begin(), heap.end(), cmp);
	}

	std::vector<std::pair<node_t, node_t>> edges;
	while (!heap.empty()) {
		std::pop_heap(heap.begin(), heap.end(), cmp);
		Clock c = heap.back();
		heap.pop_back();
		if (c.at > t) break; // heap min beyond horizon
		node_t fresh = node_t(s.trace.order.size());
		if (fresh >= cap)
			throw std::runtime_error("spread_regular_tree_time: population exceeded cap of " +
			                         std::to_string(cap) + " nodes before t=" + std::to_string(t));
		if (c.flag) s.first_slot_child = fresh;
		edges.push_back({c.owner, fresh});
		s.parent.push_back(c.owner);
		s.trace.order.push_back(fresh);
		s.trace.times.push_back(c.at);
		for (unsigned k = 0; k + 1 < d; ++k) {
			heap.push_back({c.at + rng.exponential(), fresh, 0});
			std::push_heap(heap.begin(), heap.end(), cmp);
		}
	}
	detail::finish_regular_sample(s, d, edges);
	return s;
}

// --- trace serialization ------------------------------------------------
// CSV with mandatory header "step,node,time"; node column holds external
// ids. Lines starting with '#' before the header are passed over, so
// writers may prepend provenance comments (the CLI echoes its seed there).

inline void save_trace_csv(const SpreadTrace& tr, const Graph& g, std::ostream& out) {
	out << "step,node,time\n";
	out << std::setprecision(17);
	for (size_t k = 0; k < tr.order.size(); ++k)
		out << k << ',' << g.id_of(tr.order[k]) << ',' << tr.times[k] << '\n';
}

inline SpreadTrace load_trace_csv(std::istream& in, const Graph& g,
                                  const std::string& name = "<trace>") {
	std::string line;
	size_t lineno = 0;
	bool saw_header = false;
	SpreadTrace tr;
	tr.mode = SpreadMode::by_count;
	while (std::getline(in, line)) {
		++lineno;
		if (!line.empty() && line.back() == '\r') line.pop_back();
		if (line.empty() || line[0] == '#') continue;
		if (!saw_header) {
			if (line != "step,node,time")
				throw std::runtime_error(name + ":" + std::to_string(lineno) +
				                         ": expected header \"step,node,time\"");
			saw_header = true;
			continue;
		}
		std::replace(line.begin(), line.end(), ',', ' ');
		std::istringstream ss(line);
		uint64_t step;
		int64_t id;
		double at;
		if (!(ss >> step >> id >> at))
			throw std::runtime_error(name + ":" + std::to_string(lineno) + ": malformed row");
		if (step != tr.order.size())
			throw std::runtime_error(name + ":" + std::to_string(lineno) + ": step " +
			                         std::to_string(step) + " out of sequence");
		if (!tr.times.empty() && at < tr.times.back())
			throw std::runtime_error(name + ":" + std::to_string(lineno) +
			                         ": times must be nondecreasing");
		tr.order.push_back(g.index_of(id));
		tr.times.push_back(at);
	}
	if (!saw_header) throw std::runtime_error(name + ": missing header \"step,node,time\"");
	if (tr.order.empty()) throw std::runtime_error(name + ": empty trace");
	tr.source = tr.order[0];
	tr.mode_param = double(tr.order.size());
	return tr;
}

} // namespace rumor

#endif
