#ifndef RUMOR_CENTRALITY_HPP
#define RUMOR_CENTRALITY_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "graph.hpp"
#include "tree.hpp"
#include "util.hpp"

namespace rumor {

// ln n!, grown incrementally and cached. thread_local keeps the cache
// race-free while still amortizing across the millions of calls a worker
// makes; rebuilding a few hundred entries per thread is negligible.
inline double ln_factorial(uint64_t n) {
	thread_local std::vector<double> tab{0.0};
	while (tab.size() <= n) tab.push_back(tab.back() + std::log(double(tab.size())));
	return tab[n];
}

// log of a huge positive integer without overflowing double range
// (factorial-sized scores exceed DBL_MAX long before N = 400).
inline double log_of_mpz(const mpz_class& z) {
	if (z <= 0) throw std::domain_error("log_of_mpz: nonpositive value");
	signed long e;
	double d = mpz_get_d_2exp(&e, z.get_mpz_t());
	return std::log(d) + double(e) * std::log(2.0);
}

// Relative tie tolerance on log scores. Scores this close are treated as
// tied; tree consumers escalate such ties to exact arithmetic on small
// instances instead of trusting the tolerance.
inline constexpr double log_tie_rel_tol = 1e-9;
inline constexpr node_t exact_escalation_cap = 64;

namespace detail {

inline std::vector<size_t> argmax_indices_log(const std::vector<double>& ls) {
	double best = ls[0];
	for (double v : ls) best = std::max(best, v);
	double tol = log_tie_rel_tol * std::max(1.0, std::fabs(best));
	std::vector<size_t> out;
	for (size_t i = 0; i < ls.size(); ++i)
		if (ls[i] >= best - tol) out.push_back(i);
	return out;
}

inline std::vector<size_t> argmax_indices_exact(const std::vector<mpz_class>& xs) {
	const mpz_class* best = &xs[0];
	for (const mpz_class& v : xs)
		if (v > *best) best = &v;
	std::vector<size_t> out;
	for (size_t i = 0; i < xs.size(); ++i)
		if (xs[i] == *best) out.push_back(i);
	return out;
}

} // namespace detail

// Per-node scores over a candidate set. `nodes` holds host indices and
// the score vectors align with it; exact_score is only populated in exact
// mode. argmax_set is sorted ascending by host index.
struct CentralityScores {
	std::vector<node_t> nodes;
	std::vector<double> log_score;
	std::vector<mpz_class> exact_score;
	std::vector<node_t> argmax_set;

	bool has_exact() const { return !exact_score.empty(); }
	size_t index_of(node_t v) const {
		for (size_t i = 0; i < nodes.size(); ++i)
			if (nodes[i] == v) return i;
		throw std::domain_error("CentralityScores: node not scored");
	}

	void compute_argmax() {
		RUMOR_CHECK(!nodes.empty(), "scores over empty candidate set");
		std::vector<size_t> idx = has_exact() ? detail::argmax_indices_exact(exact_score)
		                                      : detail::argmax_indices_log(log_score);
		argmax_set.clear();
		for (size_t i : idx) argmax_set.push_back(nodes[i]);
		std::sort(argmax_set.begin(), argmax_set.end());
	}
};

enum class ScoreMode { log_only, with_exact };

// Messages of the rumor-centrality message-passing algorithm, indexed by
// BFS position. t_up[p] is the subtree count sent toward the parent
// (t_up[root] covers the whole tree), p_up[p] is the log of the product
// of subtree sizes within p's subtree, and r_down[p] is ln R(node at p).
struct MessageState {
	std::vector<uint32_t> t_up;
	std::vector<double> p_up;
	std::vector<double> r_down;
};

// One upward and one downward pass over the tree. Upward accumulates
// subtree counts and products; the root then knows its own score
// ln R = ln N! - ln N - sum of child products, and the downward pass
// rescales along each edge by t/(N-t).
inline MessageState message_passing(const RootedTree& t) {
	const uint32_t n = t.size();
	MessageState ms;
	ms.t_up.assign(n, 1);
	ms.p_up.assign(n, 0.0);
	ms.r_down.assign(n, 0.0);
	for (uint32_t p = n; p-- > 0;) {
		for (uint32_t c : t.children(p)) {
			ms.t_up[p] += ms.t_up[c];
			ms.p_up[p] += ms.p_up[c];
		}
		ms.p_up[p] += std::log(double(ms.t_up[p]));
	}
	RUMOR_CHECK(ms.t_up[0] == n, "up-pass subtree counts do not cover the tree");
	double root_children_prod = 0.0;
	for (uint32_t c : t.children(0)) root_children_prod += ms.p_up[c];
	ms.r_down[0] = ln_factorial(n) - std::log(double(n)) - root_children_prod;
	for (uint32_t p = 0; p < n; ++p)
		for (uint32_t c : t.children(p))
			ms.r_down[c] = ms.r_down[p] + std::log(double(ms.t_up[c])) -
			               std::log(double(n - ms.t_up[c]));
	return ms;
}

// R(root) of the tree as an exact integer: N! divided by the product of
// all subtree sizes. The quotient is exact by construction (it counts
// permitted permutations), which mpz_divexact exploits.
inline mpz_class count_linear_extensions(const RootedTree& t) {
	mpz_class num, den = 1;
	mpz_fac_ui(num.get_mpz_t(), t.size());
	for (uint32_t p = 0; p < t.size(); ++p) den *= t.subtree[p];
	mpz_class out;
	mpz_divexact(out.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
	return out;
}

namespace detail {

inline RootedTree rooted_infected_tree(const Graph& g, const std::vector<node_t>& infected,
                                       node_t root, Workspace* ws) {
	if (induced_edge_count(g, infected, ws) != uint64_t(infected.size()) - 1)
		throw std::domain_error("infected subgraph is not a tree");
	return bfs_tree(g, infected, root, ws); // also rejects disconnected sets
}

} // namespace detail

inline mpz_class rumor_centrality_exact(const RootedTree& t) { return count_linear_extensions(t); }

inline mpz_class rumor_centrality_exact(const Graph& g, const std::vector<node_t>& infected,
                                        node_t v, Workspace* ws = nullptr) {
	return count_linear_extensions(detail::rooted_infected_tree(g, infected, v, ws));
}

// Scores for every node of the tree via a single message pass; exact mode
// additionally walks the Eq.-(12)-style neighbor ratios in integer
// arithmetic, so fixture equalities need no tolerance at all.
inline CentralityScores rumor_centrality_all(const RootedTree& t,
                                             ScoreMode mode = ScoreMode::log_only) {
	const uint32_t n = t.size();
	MessageState ms = message_passing(t);
	CentralityScores s;
	s.nodes.assign(t.order.begin(), t.order.end());
	s.log_score = ms.r_down;
	if (mode == ScoreMode::with_exact) {
		s.exact_score.resize(n);
		s.exact_score[0] = count_linear_extensions(t);
		for (uint32_t p = 0; p < n; ++p)
			for (uint32_t c : t.children(p)) {
				// R(child) = R(parent) * t / (N - t), an exact integer
				mpz_class tmp = s.exact_score[p] * ms.t_up[c];
				mpz_divexact_ui(s.exact_score[c].get_mpz_t(), tmp.get_mpz_t(), n - ms.t_up[c]);
			}
		for (uint32_t p = 0; p < n; ++p) {
			double lx = log_of_mpz(s.exact_score[p]);
			RUMOR_CHECK(std::fabs(lx - s.log_score[p]) <=
			                log_tie_rel_tol * std::max(1.0, std::fabs(lx)),
			            "log and exact scores disagree");
		}
	}
	s.compute_argmax();
	return s;
}

inline CentralityScores rumor_centrality_all(const Graph& g, const std::vector<node_t>& infected,
                                             ScoreMode mode = ScoreMode::log_only,
                                             Workspace* ws = nullptr) {
	node_t root = *std::min_element(infected.begin(), infected.end());
	return rumor_centrality_all(detail::rooted_infected_tree(g, infected, root, ws), mode);
}

// All permitted permutations of the tree starting at its root: orderings
// where every node appears after its parent. Exponentially many, hence
// the cap; this is the enumeration oracle the fast paths are checked
// against.
inline void enumerate_permitted_permutations_rec(const RootedTree& t,
                                                 std::vector<uint32_t>& frontier,
                                                 std::vector<node_t>& prefix,
                                                 std::vector<std::vector<node_t>>& out) {
	if (prefix.size() == t.order.size()) {
		out.push_back(prefix);
		return;
	}
	for (size_t i = 0; i < frontier.size(); ++i) {
		uint32_t p = frontier[i];
		std::vector<uint32_t> next = frontier;
		next.erase(next.begin() + i);
		for (uint32_t c : t.children(p)) next.push_back(c);
		prefix.push_back(t.order[p]);
		enumerate_permitted_permutations_rec(t, next, prefix, out);
		prefix.pop_back();
	}
}

inline std::vector<std::vector<node_t>> enumerate_permitted_permutations(const RootedTree& t,
                                                                         node_t cap = 10) {
	if (t.size() > cap)
		throw std::domain_error("enumerate_permitted_permutations: tree of " +
		                        std::to_string(t.size()) + " nodes exceeds cap " +
		                        std::to_string(cap));
	std::vector<std::vector<node_t>> out;
	std::vector<node_t> prefix = {t.order[0]};
	std::vector<uint32_t> frontier(t.children(0).begin(), t.children(0).end());
	if (t.size() == 1) {
		out.push_back(prefix);
		return out;
	}
	enumerate_permitted_permutations_rec(t, frontier, prefix, out);
	return out;
}

inline std::vector<std::vector<node_t>> enumerate_permitted_permutations(
    const Graph& g, const std::vector<node_t>& infected, node_t v, node_t cap = 10,
    Workspace* ws = nullptr) {
	return enumerate_permitted_permutations(detail::rooted_infected_tree(g, infected, v, ws), cap);
}

// Rumor center of a tree: argmax of rumor centrality, found through the
// subtree characterization — a node is a center iff every component left
// by removing it has at most N/2 nodes. Comparisons are pure integers
// (2T <= N), so the result is exact at any size; the message-passing
// argmax is cross-checked against it.
inline std::vector<node_t> rumor_center(const RootedTree& t) {
	const uint32_t n = t.size();
	std::vector<node_t> centers;
	for (uint32_t p = 0; p < n; ++p) {
		bool ok = 2u * uint64_t(n - t.subtree[p]) <= n; // parent-side component
		for (uint32_t c : t.children(p))
			if (2u * uint64_t(t.subtree[c]) > n) ok = false;
		if (ok) centers.push_back(t.order[p]);
	}
	std::sort(centers.begin(), centers.end());
	RUMOR_CHECK(centers.size() == 1 || centers.size() == 2,
	            "tree must have exactly 1 or 2 rumor centers");
	// cross-check against the score argmax: exact where affordable, else
	// the centers must at least be among the log-domain near-ties
	if (n <= exact_escalation_cap) {
		CentralityScores s = rumor_centrality_all(t, ScoreMode::with_exact);
		RUMOR_CHECK(s.argmax_set == centers, "subtree criterion disagrees with exact argmax");
	} else {
		CentralityScores s = rumor_centrality_all(t, ScoreMode::log_only);
		RUMOR_CHECK(std::includes(s.argmax_set.begin(), s.argmax_set.end(), centers.begin(),
		                          centers.end()),
		            "centers missing from log-domain argmax");
	}
	return centers;
}

inline std::vector<node_t> rumor_center(const Graph& g, const std::vector<node_t>& infected,
                                        Workspace* ws = nullptr) {
	node_t root = *std::min_element(infected.begin(), infected.end());
	return rumor_center(detail::rooted_infected_tree(g, infected, root, ws));
}

// Sum of hop distances from each candidate to every node of the
// restricted subgraph, measured inside the restriction.
struct DistanceScores {
	std::vector<node_t> nodes;
	std::vector<uint64_t> dsum;
	std::vector<node_t> argmin_set;
};

inline DistanceScores distance_centrality_all(const Graph& g,
                                              const std::vector<node_t>& restrict_set,
                                              Workspace* ws = nullptr) {
	Workspace local;
	if (!ws) ws = &local;
	DistanceScores out;
	out.nodes = restrict_set;
	std::sort(out.nodes.begin(), out.nodes.end());
	out.dsum.resize(out.nodes.size());
	for (size_t i = 0; i < out.nodes.size(); ++i) {
		std::vector<uint32_t> d = hop_distances(g, out.nodes, out.nodes[i], ws);
		uint64_t s = 0;
		for (uint32_t x : d) s += x;
		out.dsum[i] = s;
	}
	uint64_t best = *std::min_element(out.dsum.begin(), out.dsum.end());
	for (size_t i = 0; i < out.nodes.size(); ++i)
		if (out.dsum[i] == best) out.argmin_set.push_back(out.nodes[i]);
	return out;
}

// General-graph rumor centrality: score each candidate v by the rumor
// centrality of its own BFS tree of the infected subgraph. On tree inputs
// every BFS tree is the tree itself, so one message pass covers all
// candidates; general inputs pay one BFS + pass per candidate.
inline CentralityScores general_rumor_scores(const Graph& g, const std::vector<node_t>& infected,
                                             Workspace* ws = nullptr) {
	Workspace local;
	if (!ws) ws = &local;
	if (induced_edge_count(g, infected, ws) == uint64_t(infected.size()) - 1) {
		node_t root = *std::min_element(infected.begin(), infected.end());
		return rumor_centrality_all(bfs_tree(g, infected, root, ws), ScoreMode::log_only);
	}
	CentralityScores s;
	s.nodes = infected;
	std::sort(s.nodes.begin(), s.nodes.end());
	s.log_score.resize(s.nodes.size());
	for (size_t i = 0; i < s.nodes.size(); ++i) {
		RootedTree t = bfs_tree(g, infected, s.nodes[i], ws);
		MessageState ms = message_passing(t);
		s.log_score[i] = ms.r_down[0];
	}
	s.compute_argmax();
	return s;
}

inline std::vector<node_t> rumor_center_general(const Graph& g,
                                                const std::vector<node_t>& infected,
                                                Workspace* ws = nullptr) {
	Workspace local;
	if (!ws) ws = &local;
	CentralityScores s = general_rumor_scores(g, infected, ws);
	if (s.argmax_set.size() > 1 && infected.size() <= exact_escalation_cap &&
	    induced_edge_count(g, infected, ws) != uint64_t(infected.size()) - 1) {
		// near-ties on a small general graph: settle them exactly
		std::vector<mpz_class> exact(s.argmax_set.size());
		for (size_t i = 0; i < s.argmax_set.size(); ++i)
			exact[i] = count_linear_extensions(bfs_tree(g, infected, s.argmax_set[i], ws));
		std::vector<size_t> idx = detail::argmax_indices_exact(exact);
		std::vector<node_t> out;
		for (size_t i : idx) out.push_back(s.argmax_set[i]);
		return out;
	}
	return s.argmax_set;
}

// Score dump: node,log_score,exact_score,is_argmax with the exact column
// left empty in log mode.
inline void save_scores_csv(const CentralityScores& s, const Graph& g, std::ostream& out) {
	out << "node,log_score,exact_score,is_argmax\n";
	out.precision(17);
	for (size_t i = 0; i < s.nodes.size(); ++i) {
		bool am = std::binary_search(s.argmax_set.begin(), s.argmax_set.end(), s.nodes[i]);
		out << g.id_of(s.nodes[i]) << ',' << s.log_score[i] << ',';
		if (s.has_exact()) out << s.exact_score[i].get_str();
		out << ',' << (am ? 1 : 0) << '\n';
	}
}

} // namespace rumor

#endif
