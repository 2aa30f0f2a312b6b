// Source estimators: permutation probabilities, the exact-likelihood
// oracle, the centrality-based estimators, and tie handling.
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <sstream>
#include <vector>

#include <gmpxx.h>

#include "rumor/estimators.hpp"
#include "rumor/generators.hpp"
#include "rumor/spread.hpp"
#include "rumor/stats.hpp"

using namespace rumor;

namespace {

// hub 1 with spokes 2..5, each spoke carrying an uninfected pendant
Graph star_host() {
	return Graph::from_edges({{1, 2}, {1, 3}, {1, 4}, {1, 5}, {2, 6}, {3, 7}, {4, 8}, {5, 9}});
}

std::vector<node_t> star_infected(const Graph& g) {
	std::vector<node_t> v;
	for (uint32_t id : {1, 2, 3, 4, 5}) v.push_back(g.index_of(id));
	return v;
}

std::vector<node_t> all_nodes(const Graph& g) {
	std::vector<node_t> v(g.num_nodes());
	for (node_t i = 0; i < g.num_nodes(); ++i) v[i] = i;
	return v;
}

} // namespace

TEST_CASE("estimator names parse both canonically and via their long aliases") {
	REQUIRE(parse_estimator("rumor") == Estimator::rumor);
	REQUIRE(parse_estimator("rumor-centrality") == Estimator::rumor);
	REQUIRE(parse_estimator("rumor-bfs") == Estimator::rumor_bfs);
	REQUIRE(parse_estimator("bfs-heuristic") == Estimator::rumor_bfs);
	REQUIRE(parse_estimator("distance") == Estimator::distance);
	REQUIRE(parse_estimator("random") == Estimator::random_pick);
	REQUIRE(parse_estimator("exact-oracle") == Estimator::exact_oracle);
	REQUIRE_THROWS_WITH(parse_estimator("closeness"),
	                    Catch::Matchers::ContainsSubstring("unknown estimator"));
	for (Estimator e : {Estimator::rumor, Estimator::rumor_bfs, Estimator::distance,
	                    Estimator::random_pick, Estimator::exact_oracle})
		REQUIRE(parse_estimator(estimator_name(e)) == e);
}

TEST_CASE("the boundary recursion prices the star fixture's orderings") {
	Graph g = star_host();
	auto seq = [&](std::initializer_list<uint32_t> ids) {
		std::vector<node_t> s;
		for (uint32_t id : ids) s.push_back(g.index_of(id));
		return s;
	};
	// from the hub every step leaves four live boundary edges
	PermutationProbability hub = permutation_probability(g, seq({1, 2, 3, 4, 5}));
	REQUIRE(hub.boundary_sequence == std::vector<uint64_t>{4, 4, 4, 4});
	REQUIRE_THAT(hub.log_p, Catch::Matchers::WithinAbs(-std::log(256.0), 1e-12));
	REQUIRE(permutation_probability_exact(g, seq({1, 2, 3, 4, 5})) == mpq_class(1, 256));

	// from a spoke: n_1 = deg(2) = 2, then the hub restores the boundary
	PermutationProbability spoke = permutation_probability(g, seq({2, 1, 3, 4, 5}));
	REQUIRE(spoke.boundary_sequence == std::vector<uint64_t>{2, 4, 4, 4});
	REQUIRE(permutation_probability_exact(g, seq({2, 1, 3, 4, 5})) == mpq_class(1, 128));
	REQUIRE_THAT(std::exp(spoke.log_p), Catch::Matchers::WithinRel(1.0 / 128.0, 1e-12));

	REQUIRE_THROWS_WITH(permutation_probability(g, seq({1, 2, 2})),
	                    Catch::Matchers::ContainsSubstring("repeated"));
	REQUIRE_THROWS_WITH(permutation_probability(g, seq({1, 2, 7})),
	                    Catch::Matchers::ContainsSubstring("no previously infected neighbor"));
	REQUIRE_THROWS_AS(permutation_probability(g, std::vector<node_t>{99}), std::domain_error);
	REQUIRE_THROWS_AS(permutation_probability(g, {}), std::domain_error);
	// a single node has probability one vacuously
	REQUIRE(permutation_probability(g, seq({3})).log_p == 0.0);
}

TEST_CASE("exact likelihoods of the star fixture are 3/32 and 3/64") {
	Graph g = star_host();
	std::vector<node_t> inf = star_infected(g);
	REQUIRE(exact_likelihood_exact(g, inf, g.index_of(1)) == mpq_class(3, 32));
	for (uint32_t id : {2, 3, 4, 5})
		REQUIRE(exact_likelihood_exact(g, inf, g.index_of(id)) == mpq_class(3, 64));
	REQUIRE_THAT(exact_likelihood(g, inf, g.index_of(1)),
	             Catch::Matchers::WithinRel(std::log(3.0 / 32.0), 1e-12));
}

TEST_CASE("the BFS heuristic scores the star fixture like the exact likelihood") {
	// P(sigma_v*|v) R(v): hub 24/256 = 3/32, spokes 6/128 = 3/64 -- equal to
	// the true likelihoods here, with the hub winning at ratio 2
	Graph g = star_host();
	std::vector<node_t> inf = star_infected(g);
	EstimateResult r = estimate_general_tree(g, inf, 5);
	REQUIRE(r.name == "rumor-bfs");
	REQUIRE(r.estimate == g.index_of(1));
	REQUIRE(r.argmax_set() == std::vector<node_t>{g.index_of(1)});
	size_t hub = r.scores.index_of(g.index_of(1));
	size_t spoke = r.scores.index_of(g.index_of(2));
	REQUIRE_THAT(r.scores.log_score[hub],
	             Catch::Matchers::WithinAbs(std::log(3.0 / 32.0), 1e-9));
	REQUIRE_THAT(std::exp(r.scores.log_score[hub] - r.scores.log_score[spoke]),
	             Catch::Matchers::WithinRel(2.0, 1e-9));

	// the oracle agrees, score for score
	EstimateResult oracle = estimate_source(g, inf, Estimator::exact_oracle, 5);
	REQUIRE(oracle.estimate == g.index_of(1));
	for (size_t i = 0; i < oracle.scores.nodes.size(); ++i)
		REQUIRE_THAT(oracle.scores.log_score[i],
		             Catch::Matchers::WithinAbs(r.scores.log_score[i], 1e-9));

	// plain rumor centrality keeps the same winner here (24 vs 6)
	EstimateResult plain = estimate_source(g, inf, Estimator::rumor, 5);
	REQUIRE(plain.name == "rumor");
	REQUIRE(plain.argmax_set() == std::vector<node_t>{g.index_of(1)});
}

TEST_CASE("rumor centrality picks the fixture tree's center") {
	Graph g = Graph::from_edges({{1, 2}, {1, 3}, {2, 4}, {2, 5}});
	EstimateResult r = estimate_regular_tree(g, all_nodes(g), 9);
	REQUIRE(r.estimate == g.index_of(2));
	REQUIRE(r.argmax_set() == std::vector<node_t>{g.index_of(2)});

	EstimateResult d = estimate_source(g, all_nodes(g), Estimator::distance, 9);
	REQUIRE(d.estimate == g.index_of(2));
	REQUIRE(d.name == "distance");

	Graph cyc = Graph::from_dense_edges(3, {{0, 1}, {1, 2}, {2, 0}});
	REQUIRE_THROWS_AS(estimate_regular_tree(cyc, all_nodes(cyc), 1), std::domain_error);
	REQUIRE_THROWS_AS(estimate_general_tree(cyc, all_nodes(cyc), 1), std::domain_error);
}

TEST_CASE("on a degree-regular host the BFS factor is a common constant") {
	// star of five in the 4-regular tree: every BFS order prices to
	// 1/(4*6*8*10), so the biased and unbiased argmax coincide
	Graph g = regular_tree(4, 2);
	std::vector<node_t> inf = {0, 1, 2, 3, 4};
	for (node_t v : inf) {
		RootedTree t = bfs_tree(g, inf, v);
		REQUIRE(permutation_probability_exact(g, t.order) == mpq_class(1, 1920));
	}
	EstimateResult biased = estimate_general_graph(g, inf, 3);
	EstimateResult unbiased = estimate_general_graph(g, inf, 3, true);
	REQUIRE(biased.name == "rumor-bfs");
	REQUIRE(unbiased.name == "rumor");
	REQUIRE(biased.argmax_set() == unbiased.argmax_set());
	REQUIRE(biased.estimate == 0);
	// the biased scores are the unbiased ones shifted by log(1/1920)
	for (size_t i = 0; i < inf.size(); ++i)
		REQUIRE_THAT(biased.scores.log_score[i] - unbiased.scores.log_score[i],
		             Catch::Matchers::WithinAbs(-std::log(1920.0), 1e-9));
}

TEST_CASE("estimator entry points agree with the dispatcher") {
	Graph g = star_host();
	std::vector<node_t> inf = star_infected(g);
	EstimateResult a = estimate_general_graph(g, inf, 11);
	EstimateResult b = estimate_source(g, inf, Estimator::rumor_bfs, 11);
	REQUIRE(a.scores.log_score == b.scores.log_score);
	REQUIRE(a.estimate == b.estimate);
	EstimateResult c = estimate_general_graph(g, inf, 11, true);
	EstimateResult d = estimate_source(g, inf, Estimator::rumor, 11);
	REQUIRE(c.scores.log_score == d.scores.log_score);
}

TEST_CASE("distance centrality is measured inside the infected subgraph") {
	// line 0..5 plus a shortcut 1-6-5 that only the host knows about;
	// within the infected path the medians are {2,3}, and the shortcut
	// (which would promote 1) must not leak in
	Graph g = Graph::from_dense_edges(
	    7, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {1, 6}, {5, 6}});
	std::vector<node_t> inf = {0, 1, 2, 3, 4, 5};
	EstimateResult r = estimate_source(g, inf, Estimator::distance, 2);
	REQUIRE(r.argmax_set() == std::vector<node_t>{2, 3});
	DistanceScores unrestricted = distance_centrality_all(g, all_nodes(g));
	REQUIRE(unrestricted.argmin_set != r.argmax_set());
}

TEST_CASE("symmetric ties keep the full argmax set and break uniformly") {
	Graph path = line_graph(4); // twin centroids 1 and 2
	EstimateResult r = estimate_regular_tree(path, all_nodes(path), 17);
	REQUIRE(r.argmax_set() == std::vector<node_t>{1, 2});
	REQUIRE((r.estimate == 1 || r.estimate == 2));
	REQUIRE(estimate_regular_tree(path, all_nodes(path), 17).estimate == r.estimate);

	uint64_t picked_one = 0;
	const uint64_t trials = 2000;
	for (uint64_t i = 0; i < trials; ++i)
		if (estimate_regular_tree(path, all_nodes(path), derive_seed(88, i)).estimate == 1)
			++picked_one;
	double se = std::sqrt(0.25 * double(trials));
	REQUIRE(std::fabs(double(picked_one) - double(trials) / 2) <= 4.0 * se);
}

TEST_CASE("random guessing is uniform over the infected set") {
	Graph g = line_graph(10);
	std::vector<node_t> inf = all_nodes(g);
	EstimateResult r = estimate_source(g, inf, Estimator::random_pick, 1);
	REQUIRE(r.name == "random");
	REQUIRE(r.argmax_set() == inf); // everyone ties
	std::vector<uint64_t> counts(10, 0);
	const uint64_t trials = 20000;
	for (uint64_t i = 0; i < trials; ++i) ++counts[random_guess(inf, derive_seed(9, i))];
	ChiSquare cs = chi_square_gof(counts, std::vector<double>(10, 0.1));
	INFO("p=" << cs.p_value);
	REQUIRE(cs.p_value > 1e-4);
	REQUIRE(random_guess({7}, 123) == 7);
	REQUIRE_THROWS_AS(random_guess({}, 1), std::domain_error);
}

TEST_CASE("the oracle refuses instances beyond its enumeration cap") {
	Graph g = line_graph(11);
	REQUIRE_THROWS_WITH(estimate_source(g, all_nodes(g), Estimator::exact_oracle, 1),
	                    Catch::Matchers::ContainsSubstring("exceeds cap"));
	REQUIRE_NOTHROW(estimate_source(g, all_nodes(g), Estimator::exact_oracle, 1, nullptr, 11));
}

TEST_CASE("rumor centrality is maximum likelihood on regular trees") {
	// grow small rumors on the infinite 3-regular tree and compare the
	// centrality argmax against the brute-force likelihood argmax, both in
	// exact arithmetic
	for (uint64_t rep = 0; rep < 50; ++rep) {
		uint64_t seed = derive_seed(6006, rep);
		node_t n = 2 + node_t(Rng(seed).below(7)); // 2..8
		RegularTreeSample s = spread_regular_tree_count(3, n, seed);
		EstimateResult fast = estimate_source(s.host, s.infected, Estimator::rumor, rep);
		EstimateResult oracle =
		    estimate_source(s.host, s.infected, Estimator::exact_oracle, rep);
		REQUIRE(fast.argmax_set() == oracle.argmax_set());
	}
}

TEST_CASE("estimate CSV carries scores, the tie set, and the chosen node") {
	Graph g = star_host();
	EstimateResult r = estimate_general_tree(g, star_infected(g), 5);
	std::ostringstream out;
	save_estimate_csv(r, g, out);
	std::istringstream in(out.str());
	std::string line;
	std::getline(in, line);
	REQUIRE(line == "estimator,node,log_score,is_argmax,chosen");
	std::map<uint32_t, std::pair<int, int>> rows;
	while (std::getline(in, line)) {
		std::istringstream ls(line);
		std::string est, id, logs, am, ch;
		std::getline(ls, est, ',');
		std::getline(ls, id, ',');
		std::getline(ls, logs, ',');
		std::getline(ls, am, ',');
		std::getline(ls, ch, ',');
		REQUIRE(est == "rumor-bfs");
		rows[uint32_t(std::stoul(id))] = {std::stoi(am), std::stoi(ch)};
	}
	REQUIRE(rows.size() == 5);
	REQUIRE(rows[1] == std::make_pair(1, 1));
	for (uint32_t id : {2, 3, 4, 5}) REQUIRE(rows[id] == std::make_pair(0, 0));
}
