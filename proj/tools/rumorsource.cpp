// rumorsource: command-line frontend for the rumor-source toolkit.
//
// Subcommands:
//   gen        write a host graph as an edge list
//   simulate   spread a rumor on a host and write the infection trace
//   estimate   score an infected set and pick a source estimate
//   experiment run a key=value experiment config to its CSV output
//
// Every randomized command takes a mandatory --seed and echoes it as a
// `# seed=` comment in its output, so any file the tool writes can be
// regenerated from its own header. Exit codes: 0 success, 2 user error
// (bad flags, bad files, impossible requests), 3 internal invariant
// failure.
#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "rumor/config.hpp"
#include "rumor/estimators.hpp"
#include "rumor/experiments.hpp"
#include "rumor/generators.hpp"
#include "rumor/graph.hpp"
#include "rumor/spread.hpp"

namespace {

// Family flags shared by `gen` and `simulate`. Which ones matter depends
// on --family; unused flags are simply ignored, but a family missing a
// required size is rejected by name.
struct FamilyOpts {
	std::string family;
	uint32_t nodes = 0;
	unsigned degree = 3;
	unsigned depth = 0;
	rumor::GeometricTreeSpec geom;
	uint32_t n = 5000;
	unsigned k = 4;
	double p = 0.1;
	unsigned m = 2;
	CLI::Option* family_opt = nullptr;
	CLI::Option* nodes_opt = nullptr;
	CLI::Option* depth_opt = nullptr;
};

void add_family_flags(CLI::App* cmd, FamilyOpts& f) {
	f.family_opt = cmd->add_option(
	    "--family", f.family, "line | regular-tree | geometric-tree | small-world | scale-free");
	f.nodes_opt = cmd->add_option("--nodes", f.nodes, "line: node count");
	cmd->add_option("--degree", f.degree, "regular-tree: node degree (default 3)");
	f.depth_opt = cmd->add_option("--depth", f.depth, "regular-tree: ball radius");
	cmd->add_option("--alpha", f.geom.alpha, "geometric-tree: level growth exponent");
	cmd->add_option("--b", f.geom.b, "geometric-tree: lower level-count coefficient");
	cmd->add_option("--c", f.geom.c, "geometric-tree: upper level-count coefficient");
	cmd->add_option("--dstar", f.geom.d_star, "geometric-tree: root branch count");
	cmd->add_option("--radius", f.geom.radius, "geometric-tree: truncation radius");
	cmd->add_option("--n", f.n, "small-world / scale-free: node count");
	cmd->add_option("--k", f.k, "small-world: lattice neighbors (even)");
	cmd->add_option("--p", f.p, "small-world: rewiring probability");
	cmd->add_option("--m", f.m, "scale-free: edges per new node");
}

bool family_is_random(const std::string& family) {
	return family == "geometric-tree" || family == "small-world" || family == "scale-free";
}

rumor::Graph build_family(const FamilyOpts& f, uint64_t seed) {
	if (f.family == "line") {
		if (!f.nodes_opt->count()) throw std::domain_error("family line needs --nodes");
		return rumor::line_graph(f.nodes);
	}
	if (f.family == "regular-tree") {
		if (!f.depth_opt->count()) throw std::domain_error("family regular-tree needs --depth");
		return rumor::regular_tree(f.degree, f.depth);
	}
	if (f.family == "geometric-tree") return rumor::geometric_tree(f.geom, seed);
	if (f.family == "small-world") return rumor::small_world(f.n, f.k, f.p, seed);
	if (f.family == "scale-free") return rumor::scale_free(f.n, f.m, seed);
	throw std::domain_error("unknown graph family \"" + f.family + "\"");
}

// Run a writer against --out, with "-" (or nothing) meaning stdout.
template <class Fn>
void with_output(const std::string& path, Fn&& fn) {
	if (path.empty() || path == "-") {
		fn(std::cout);
		std::cout.flush();
		if (!std::cout) throw std::runtime_error("write to stdout failed");
		return;
	}
	std::ofstream out(path);
	if (!out) throw std::runtime_error("cannot open \"" + path + "\" for writing");
	fn(out);
	if (!out) throw std::runtime_error("write failed for \"" + path + "\"");
}

} // namespace

int main(int argc, char** argv) {
	CLI::App app{"rumor-source toolkit: generate hosts, spread rumors, estimate sources"};
	app.require_subcommand(1);

	// --- gen ----------------------------------------------------------
	CLI::App* gen = app.add_subcommand("gen", "write a host graph as an edge list");
	FamilyOpts genf;
	add_family_flags(gen, genf);
	genf.family_opt->required();
	uint64_t gen_seed = 0;
	std::string gen_out = "-";
	CLI::Option* gen_seed_opt =
	    gen->add_option("--seed", gen_seed, "generator seed (required for randomized families)");
	gen->add_option("--out", gen_out, "output path ('-' for stdout)");
	gen->callback([&]() {
		bool randomized = family_is_random(genf.family);
		if (randomized && !gen_seed_opt->count())
			throw std::domain_error("--seed is required for family \"" + genf.family + "\"");
		rumor::Graph g = build_family(genf, gen_seed);
		with_output(gen_out, [&](std::ostream& out) {
			if (randomized) out << "# seed=" << gen_seed << "\n";
			rumor::save_edge_list(g, out);
		});
	});

	// --- simulate -----------------------------------------------------
	CLI::App* sim = app.add_subcommand("simulate", "spread a rumor and write its trace CSV");
	FamilyOpts simf;
	std::string sim_graph, sim_out = "-", sim_infected_out;
	uint32_t sim_source = 0, sim_count = 0;
	double sim_time = 0;
	uint64_t sim_seed = 0;
	CLI::Option* sim_graph_opt =
	    sim->add_option("--graph", sim_graph, "host edge-list path (alternative to --family)");
	add_family_flags(sim, simf);
	sim->add_option("--source", sim_source, "rumor source (external node id)")->required();
	CLI::Option* by_count_opt =
	    sim->add_option("--by-count", sim_count, "stop after this many infected nodes");
	CLI::Option* by_time_opt = sim->add_option("--by-time", sim_time, "stop at this time horizon");
	sim->add_option("--seed", sim_seed, "master seed (host and spread streams derive from it)")
	    ->required();
	sim->add_option("--out", sim_out, "trace CSV path ('-' for stdout)");
	sim->add_option("--infected-out", sim_infected_out, "also write the infected node list here");
	sim->callback([&]() {
		if ((sim_graph_opt->count() != 0) == (simf.family_opt->count() != 0))
			throw std::domain_error("simulate: give exactly one of --graph or --family");
		if ((by_count_opt->count() != 0) == (by_time_opt->count() != 0))
			throw std::domain_error("simulate: give exactly one of --by-count or --by-time");
		rumor::Graph g =
		    sim_graph_opt->count()
		        ? rumor::load_edge_list(sim_graph)
		        : build_family(simf, rumor::derive_seed(sim_seed, rumor::detail::tag_host));
		rumor::node_t src = g.index_of(sim_source);
		uint64_t spread_seed = rumor::derive_seed(sim_seed, rumor::detail::tag_spread);
		rumor::SpreadTrace tr = by_count_opt->count()
		                            ? rumor::spread_by_count(g, src, sim_count, spread_seed)
		                            : rumor::spread_by_time(g, src, sim_time, spread_seed);
		with_output(sim_out, [&](std::ostream& out) {
			out << "# seed=" << sim_seed << "\n";
			rumor::save_trace_csv(tr, g, out);
		});
		if (!sim_infected_out.empty()) {
			std::vector<rumor::node_t> infected = tr.order;
			std::sort(infected.begin(), infected.end());
			with_output(sim_infected_out, [&](std::ostream& out) {
				out << "# seed=" << sim_seed << "\n";
				rumor::save_node_list(g, infected, out);
			});
		}
	});

	// --- estimate -----------------------------------------------------
	CLI::App* est = app.add_subcommand("estimate", "score an infected set and pick a source");
	std::string est_graph, est_infected, est_name, est_out = "-";
	uint64_t est_seed = 0;
	uint32_t est_cap = 10;
	est->add_option("--graph", est_graph, "host edge-list path")->required();
	est->add_option("--infected", est_infected, "infected node-list path")->required();
	est->add_option("--estimator", est_name,
	                "rumor | rumor-bfs | distance | random | exact-oracle")
	    ->required();
	est->add_option("--seed", est_seed, "tie-breaking seed")->required();
	est->add_option("--oracle-cap", est_cap, "exact-oracle size limit (default 10)");
	est->add_option("--out", est_out, "estimate CSV path ('-' for stdout)");
	est->callback([&]() {
		rumor::Graph g = rumor::load_edge_list(est_graph);
		std::vector<rumor::node_t> infected = rumor::load_node_list(g, est_infected);
		rumor::EstimateResult r = rumor::estimate_source(
		    g, infected, rumor::parse_estimator(est_name), est_seed, nullptr, est_cap);
		with_output(est_out, [&](std::ostream& out) {
			out << "# seed=" << est_seed << "\n";
			rumor::save_estimate_csv(r, g, out);
		});
	});

	// --- experiment ---------------------------------------------------
	CLI::App* exp = app.add_subcommand("experiment", "run a key=value config to its CSV output");
	std::string exp_config;
	unsigned exp_workers = 0;
	exp->add_option("--config", exp_config, "experiment config path")->required();
	exp->add_option("--workers", exp_workers, "worker threads (overrides the config)");
	exp->callback([&]() {
		rumor::run_experiment(rumor::load_experiment_config(exp_config), exp_workers);
	});

	try {
		app.parse(argc, argv);
	} catch (const CLI::ParseError& e) {
		int code = app.exit(e);
		return code == 0 ? 0 : 2;
	} catch (const rumor::internal_error& e) {
		std::cerr << "internal error: " << e.what() << "\n";
		return 3;
	} catch (const std::domain_error& e) {
		std::cerr << "error: " << e.what() << "\n";
		return 2;
	} catch (const std::invalid_argument& e) {
		std::cerr << "error: " << e.what() << "\n";
		return 2;
	} catch (const std::logic_error& e) {
		std::cerr << "internal error: " << e.what() << "\n";
		return 3;
	} catch (const std::exception& e) {
		std::cerr << "error: " << e.what() << "\n";
		return 2;
	}
	return 0;
}
