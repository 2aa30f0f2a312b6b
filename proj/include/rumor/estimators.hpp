#ifndef RUMOR_ESTIMATORS_HPP
#define RUMOR_ESTIMATORS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "centrality.hpp"
#include "graph.hpp"
#include "rng.hpp"
#include "tree.hpp"
#include "util.hpp"

namespace rumor {

enum class Estimator { rumor, rumor_bfs, distance, random_pick, exact_oracle };

inline const char* estimator_name(Estimator e) {
	switch (e) {
	case Estimator::rumor: return "rumor";
	case Estimator::rumor_bfs: return "rumor-bfs";
	case Estimator::distance: return "distance";
	case Estimator::random_pick: return "random";
	case Estimator::exact_oracle: return "exact-oracle";
	}
	throw internal_error("estimator_name: bad enum");
}

inline Estimator parse_estimator(const std::string& s) {
	if (s == "rumor" || s == "rumor-centrality") return Estimator::rumor;
	if (s == "rumor-bfs" || s == "bfs-heuristic") return Estimator::rumor_bfs;
	if (s == "distance") return Estimator::distance;
	if (s == "random") return Estimator::random_pick;
	if (s == "exact-oracle") return Estimator::exact_oracle;
	throw std::domain_error("unknown estimator \"" + s +
	                        "\" (expected rumor, rumor-bfs, distance, random, exact-oracle)");
}

// Probability of one specific infection order under SI, through the
// boundary recursion n_k = n_{k-1} + d_k - 2 with host-graph degrees
// (uninfected neighbors count — the boundary is what races). Exact on
// tree hosts; on cyclic hosts the recursion is the paper-style surrogate
// for the true boundary, applied verbatim.
struct PermutationProbability {
	double log_p = 0;
	std::vector<uint64_t> boundary_sequence; // n_1 .. n_{N-1}
};

namespace detail {

inline std::vector<int64_t> boundary_recursion(const Graph& g, const std::vector<node_t>& sigma,
                                               Workspace* ws) {
	if (sigma.empty()) throw std::domain_error("permutation_probability: empty sequence");
	Workspace local;
	if (!ws) ws = &local;
	Stamped& infected = ws->member;
	infected.reset(g.num_nodes());
	if (sigma[0] >= g.num_nodes())
		throw std::domain_error("permutation_probability: node index out of range");
	infected.set(sigma[0], 1);
	std::vector<int64_t> nk;
	nk.reserve(sigma.size() - 1);
	int64_t n = int64_t(g.degree(sigma[0]));
	for (size_t k = 1; k < sigma.size(); ++k) {
		if (n <= 0)
			throw std::domain_error("permutation_probability: boundary exhausted at step " +
			                        std::to_string(k));
		nk.push_back(n);
		node_t v = sigma[k];
		if (v >= g.num_nodes())
			throw std::domain_error("permutation_probability: node index out of range");
		if (infected.has(v))
			throw std::domain_error("permutation_probability: node repeated in sequence");
		bool adjacent = false;
		for (node_t w : g.neighbors(v))
			if (infected.has(w)) adjacent = true;
		if (!adjacent)
			throw std::domain_error("permutation_probability: not a permitted permutation "
			                        "(node " +
			                        std::to_string(g.id_of(v)) +
			                        " has no previously infected neighbor)");
		infected.set(v, 1);
		n += int64_t(g.degree(v)) - 2;
	}
	return nk;
}

} // namespace detail

inline PermutationProbability permutation_probability(const Graph& g,
                                                      const std::vector<node_t>& sigma,
                                                      Workspace* ws = nullptr) {
	std::vector<int64_t> nk = detail::boundary_recursion(g, sigma, ws);
	PermutationProbability out;
	for (int64_t n : nk) {
		out.boundary_sequence.push_back(uint64_t(n));
		out.log_p -= std::log(double(n));
	}
	return out;
}

// Same quantity as an exact rational, for fixture equalities.
inline mpq_class permutation_probability_exact(const Graph& g, const std::vector<node_t>& sigma,
                                               Workspace* ws = nullptr) {
	std::vector<int64_t> nk = detail::boundary_recursion(g, sigma, ws);
	mpz_class den = 1;
	for (int64_t n : nk) den *= (unsigned long)(n);
	mpq_class q(1);
	q /= mpq_class(den);
	return q;
}

inline double log_of_mpq(const mpq_class& q) {
	return log_of_mpz(q.get_num()) - log_of_mpz(q.get_den());
}

// True SI likelihood P(G_N | v) on a tree host, by brute enumeration of
// every permitted permutation. Exponential in N, hence the cap; this is
// the oracle the fast estimators answer to.
inline mpq_class exact_likelihood_exact(const Graph& g, const std::vector<node_t>& infected,
                                        node_t v, node_t cap = 10, Workspace* ws = nullptr) {
	Workspace local;
	if (!ws) ws = &local;
	RootedTree t = detail::rooted_infected_tree(g, infected, v, ws);
	mpq_class sum = 0;
	for (const std::vector<node_t>& sigma : enumerate_permitted_permutations(t, cap))
		sum += permutation_probability_exact(g, sigma, ws);
	return sum;
}

inline double exact_likelihood(const Graph& g, const std::vector<node_t>& infected, node_t v,
                               node_t cap = 10, Workspace* ws = nullptr) {
	return log_of_mpq(exact_likelihood_exact(g, infected, v, cap, ws));
}

inline node_t random_guess(const std::vector<node_t>& infected, uint64_t seed) {
	if (infected.empty()) throw std::domain_error("random_guess: empty infected set");
	Rng rng(seed);
	return infected[rng.below(infected.size())];
}

// A scored source estimate. argmax_set (inside scores) is always the full
// tie set so consumers can score ties fractionally; `estimate` is one
// member drawn uniformly with the given seed.
struct EstimateResult {
	std::string name;
	CentralityScores scores;
	node_t estimate = NO_NODE;
	uint64_t seed_used = 0;

	const std::vector<node_t>& argmax_set() const { return scores.argmax_set; }
};

namespace detail {

inline void break_tie(EstimateResult& r, uint64_t seed) {
	r.seed_used = seed;
	Rng rng(seed);
	const std::vector<node_t>& am = r.scores.argmax_set;
	RUMOR_CHECK(!am.empty(), "empty argmax set");
	r.estimate = am[rng.below(am.size())];
}

inline std::vector<size_t> argmax_indices_mpq(const std::vector<mpq_class>& xs) {
	const mpq_class* best = &xs[0];
	for (const mpq_class& v : xs)
		if (v > *best) best = &v;
	std::vector<size_t> out;
	for (size_t i = 0; i < xs.size(); ++i)
		if (xs[i] == *best) out.push_back(i);
	return out;
}

// Shared worker for the rumor-centrality estimators. `biased` selects the
// BFS-heuristic objective P(sigma_v*|v) * R(v, T_bfs(v)); without it the
// objective is R(v, T_bfs(v)) alone. Tree inputs need only one message
// pass for all the R values; every candidate still gets its own BFS order
// for the P factor.
inline EstimateResult rumor_estimate(const Graph& g, const std::vector<node_t>& infected,
                                     bool biased, uint64_t seed, Workspace* ws) {
	Workspace local;
	if (!ws) ws = &local;
	const size_t N = infected.size();
	const bool tree = induced_edge_count(g, infected, ws) == uint64_t(N) - 1;

	EstimateResult r;
	r.name = biased ? "rumor-bfs" : "rumor";
	CentralityScores& s = r.scores;
	s.nodes = infected;
	std::sort(s.nodes.begin(), s.nodes.end());
	s.log_score.assign(N, 0.0);

	RootedTree shared;
	if (tree) {
		shared = bfs_tree(g, infected, s.nodes[0], ws);
		MessageState ms = message_passing(shared);
		// r_down is in BFS-position order; fold back to sorted-node order
		Stamped& pos = ws->mark2;
		pos.reset(g.num_nodes());
		for (uint32_t p = 0; p < shared.size(); ++p) pos.set(shared.order[p], p);
		for (size_t i = 0; i < N; ++i) s.log_score[i] = ms.r_down[pos.get(s.nodes[i])];
	}
	if (!tree || biased) {
		for (size_t i = 0; i < N; ++i) {
			RootedTree t = bfs_tree(g, infected, s.nodes[i], ws);
			if (!tree) s.log_score[i] = message_passing(t).r_down[0];
			if (biased) s.log_score[i] += permutation_probability(g, t.order, ws).log_p;
		}
	}
	s.compute_argmax();

	if (s.argmax_set.size() > 1) {
		if (tree && !biased) {
			// subtree criterion: integer-exact argmax at any size
			s.argmax_set = rumor_center(shared);
		} else if (N <= exact_escalation_cap) {
			// settle near-ties in exact arithmetic
			std::vector<mpq_class> exact(s.argmax_set.size());
			for (size_t i = 0; i < s.argmax_set.size(); ++i) {
				RootedTree t = bfs_tree(g, infected, s.argmax_set[i], ws);
				exact[i] = mpq_class(count_linear_extensions(t));
				if (biased) exact[i] *= permutation_probability_exact(g, t.order, ws);
			}
			std::vector<node_t> kept;
			for (size_t i : argmax_indices_mpq(exact)) kept.push_back(s.argmax_set[i]);
			s.argmax_set = kept;
		}
	}
	break_tie(r, seed);
	return r;
}

} // namespace detail

// Eq.-(5) estimator: argmax of rumor centrality, ML on regular trees.
inline EstimateResult estimate_regular_tree(const Graph& g, const std::vector<node_t>& infected,
                                            uint64_t seed, Workspace* ws = nullptr) {
	Workspace local;
	if (!ws) ws = &local;
	if (induced_edge_count(g, infected, ws) != uint64_t(infected.size()) - 1)
		throw std::domain_error("estimate_regular_tree: infected subgraph is not a tree");
	return detail::rumor_estimate(g, infected, false, seed, ws);
}

// Eq.-(6) estimator for general trees: argmax P(sigma_v*|v) R(v,G_N).
inline EstimateResult estimate_general_tree(const Graph& g, const std::vector<node_t>& infected,
                                            uint64_t seed, Workspace* ws = nullptr) {
	Workspace local;
	if (!ws) ws = &local;
	if (induced_edge_count(g, infected, ws) != uint64_t(infected.size()) - 1)
		throw std::domain_error("estimate_general_tree: infected subgraph is not a tree");
	return detail::rumor_estimate(g, infected, true, seed, ws);
}

// Eq.-(7) estimator for general graphs; `unbiased` switches to the plain
// general-graph rumor center argmax R(v, T_bfs(v)).
inline EstimateResult estimate_general_graph(const Graph& g, const std::vector<node_t>& infected,
                                             uint64_t seed, bool unbiased = false,
                                             Workspace* ws = nullptr) {
	return detail::rumor_estimate(g, infected, !unbiased, seed, ws);
}

inline EstimateResult estimate_source(const Graph& g, const std::vector<node_t>& infected,
                                      Estimator which, uint64_t seed, Workspace* ws = nullptr,
                                      node_t oracle_cap = 10) {
	Workspace local;
	if (!ws) ws = &local;
	EstimateResult r;
	switch (which) {
	case Estimator::rumor:
		return detail::rumor_estimate(g, infected, false, seed, ws);
	case Estimator::rumor_bfs:
		return detail::rumor_estimate(g, infected, true, seed, ws);
	case Estimator::distance: {
		DistanceScores ds = distance_centrality_all(g, infected, ws);
		r.name = "distance";
		r.scores.nodes = ds.nodes;
		r.scores.log_score.resize(ds.dsum.size());
		for (size_t i = 0; i < ds.dsum.size(); ++i)
			r.scores.log_score[i] = -double(ds.dsum[i]);
		r.scores.argmax_set = ds.argmin_set;
		detail::break_tie(r, seed);
		return r;
	}
	case Estimator::random_pick: {
		r.name = "random";
		r.scores.nodes = infected;
		std::sort(r.scores.nodes.begin(), r.scores.nodes.end());
		r.scores.log_score.assign(infected.size(), 0.0);
		r.scores.argmax_set = r.scores.nodes;
		detail::break_tie(r, seed);
		return r;
	}
	case Estimator::exact_oracle: {
		r.name = "exact-oracle";
		r.scores.nodes = infected;
		std::sort(r.scores.nodes.begin(), r.scores.nodes.end());
		r.scores.log_score.resize(infected.size());
		std::vector<mpq_class> exact(infected.size());
		for (size_t i = 0; i < r.scores.nodes.size(); ++i) {
			exact[i] = exact_likelihood_exact(g, infected, r.scores.nodes[i], oracle_cap, ws);
			r.scores.log_score[i] = log_of_mpq(exact[i]);
		}
		r.scores.argmax_set.clear();
		for (size_t i : detail::argmax_indices_mpq(exact))
			r.scores.argmax_set.push_back(r.scores.nodes[i]);
		detail::break_tie(r, seed);
		return r;
	}
	}
	throw internal_error("estimate_source: bad estimator enum");
}

inline void save_estimate_csv(const EstimateResult& r, const Graph& g, std::ostream& out) {
	out << "estimator,node,log_score,is_argmax,chosen\n";
	out.precision(17);
	for (size_t i = 0; i < r.scores.nodes.size(); ++i) {
		node_t v = r.scores.nodes[i];
		bool am = std::binary_search(r.scores.argmax_set.begin(), r.scores.argmax_set.end(), v);
		out << r.name << ',' << g.id_of(v) << ',' << r.scores.log_score[i] << ','
		    << (am ? 1 : 0) << ',' << (v == r.estimate ? 1 : 0) << '\n';
	}
}

} // namespace rumor

#endif
