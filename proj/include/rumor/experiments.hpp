#ifndef RUMOR_EXPERIMENTS_HPP
#define RUMOR_EXPERIMENTS_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "centrality.hpp"
#include "estimators.hpp"
#include "generators.hpp"
#include "graph.hpp"
#include "rng.hpp"
#include "spread.hpp"
#include "stats.hpp"
#include "tree.hpp"
#include "util.hpp"

namespace rumor {

// --- graph family description --------------------------------------------
// One structure covers every host the experiments and the CLI can build,
// so configs and command-line flags share a single parser.
struct FamilySpec {
	std::string family; // line, regular-tree, geometric-tree, small-world, scale-free, file
	unsigned degree = 3;     // regular-tree
	GeometricTreeSpec geom;  // geometric-tree
	node_t n = 5000;         // small-world / scale-free node count
	unsigned k = 4;          // small-world lattice neighbors
	double p = 0.1;          // small-world rewiring probability
	unsigned m = 2;          // scale-free attachment edges
	std::string path;        // file

	// Deterministic tree families pin the source at their special node
	// (the theorems condition on it); everything else draws the source
	// uniformly per trial, as in the paper's synthetic-network runs.
	bool random_source() const {
		return family == "small-world" || family == "scale-free" || family == "file";
	}

	// parameter summary for the CSV `param` column (semicolons, not
	// commas, so the field never breaks the CSV shape)
	std::string param_string() const {
		std::ostringstream s;
		if (family == "regular-tree") s << "d=" << degree;
		else if (family == "geometric-tree")
			s << "alpha=" << geom.alpha << ";b=" << geom.b << ";c=" << geom.c
			  << ";dstar=" << geom.d_star;
		else if (family == "small-world") s << "n=" << n << ";k=" << k << ";p=" << p;
		else if (family == "scale-free") s << "n=" << n << ";m=" << m;
		else if (family == "file") s << path;
		else s << "-";
		return s.str();
	}
};

// A host graph plus the bookkeeping experiments need: the canonical
// source (NO_NODE when sources are drawn per trial) and a sentinel mask
// marking the synthetic boundary of truncated infinite trees. Trials that
// infect a sentinel are discarded — the theorems concern infinite trees,
// and a rumor that feels the truncation is outside their hypotheses.
struct Host {
	Graph g;
	node_t source = NO_NODE;
	std::vector<uint8_t> sentinel;
	uint32_t depth = 0; // truncation depth/radius for sentinel-guarded families
};

namespace detail {

inline constexpr uint64_t tag_host = 0x74736f68;
inline constexpr uint64_t tag_spread = 1;
inline constexpr uint64_t tag_source = 2;
inline constexpr uint64_t tag_estimate = 3;

inline void mark_depth_sentinels(Host& h, uint32_t depth) {
	std::vector<uint32_t> dist = hop_distances(h.g, h.source);
	h.sentinel.assign(h.g.num_nodes(), 0);
	for (node_t i = 0; i < h.g.num_nodes(); ++i)
		if (dist[i] >= depth) h.sentinel[i] = 1;
}

} // namespace detail

// Build the host for one experiment point, auto-sized so the spread
// cannot plausibly reach the truncation boundary: a count-mode rumor of N
// nodes gets a full side of the line, and a time-mode rumor gets radius
// ~2t — on these polynomially growing families the infection front is
// ballistic at about one hop per unit time, so doubling is a large safety
// factor. Random families are built once per point from the given seed.
//
// Regular trees are deliberately absent: their SI cluster's deepest
// tendril outruns the volume radius by a constant factor (the front of a
// branching random walk), so no affordable truncation keeps boundary
// contact rare. Experiments on that family instead grow the infinite tree
// on demand per trial (spread_regular_tree_*), which is exact.
inline Host make_host(const FamilySpec& fam, bool by_time, double amount, uint64_t host_seed) {
	if (amount < (by_time ? 0.0 : 1.0))
		throw std::domain_error("make_host: bad spread amount");
	Host h;
	if (fam.family == "line") {
		uint64_t side = by_time
		                    ? uint64_t(std::ceil(amount + 10.0 * std::sqrt(amount) + 10.0))
		                    : uint64_t(amount);
		node_t len = node_t(2 * side + 1);
		h.g = line_graph(len);
		h.source = node_t(side);
		h.depth = uint32_t(side);
		h.sentinel.assign(len, 0);
		h.sentinel[0] = h.sentinel[len - 1] = 1;
	} else if (fam.family == "geometric-tree") {
		GeometricTreeSpec gs = fam.geom;
		unsigned radius;
		if (by_time) radius = unsigned(std::ceil(2.0 * amount)) + 5;
		else {
			// invert the level-count lower bound sum b*i^alpha to find a
			// radius holding at least twice the requested node count
			double need = 2.0 * amount * (gs.alpha + 1.0) /
			              (double(gs.d_star) * std::min(gs.b, 1.0));
			radius = unsigned(std::ceil(std::pow(need, 1.0 / (gs.alpha + 1.0)))) + 3;
		}
		gs.radius = std::max(gs.radius, radius);
		h.g = geometric_tree(gs, derive_seed(host_seed, detail::tag_host));
		h.source = 0;
		h.depth = gs.radius;
		detail::mark_depth_sentinels(h, gs.radius);
	} else if (fam.family == "small-world") {
		if (!by_time && amount > double(fam.n))
			throw std::domain_error("make_host: rumor larger than the host");
		h.g = small_world(fam.n, fam.k, fam.p, host_seed);
	} else if (fam.family == "scale-free") {
		if (!by_time && amount > double(fam.n))
			throw std::domain_error("make_host: rumor larger than the host");
		h.g = scale_free(fam.n, fam.m, host_seed);
	} else if (fam.family == "file") {
		h.g = load_edge_list(fam.path);
	} else if (fam.family == "regular-tree") {
		throw std::domain_error("make_host: regular-tree hosts are grown per trial, "
		                        "not materialized");
	} else {
		throw std::domain_error("unknown graph family \"" + fam.family + "\"");
	}
	return h;
}

// --- parallel trial runner ------------------------------------------------
// Static partition of the trial range over a worker pool. Every trial
// derives its own seeds from (point seed, trial id), and results land in
// per-trial slots, so output is bit-identical for any worker count.
template <class F>
inline void parallel_trials(uint64_t trials, unsigned workers, F&& per_trial) {
	if (workers <= 1) {
		Workspace ws;
		for (uint64_t i = 0; i < trials; ++i) per_trial(i, ws);
		return;
	}
	std::vector<std::thread> pool;
	std::vector<std::exception_ptr> errors(workers);
	for (unsigned w = 0; w < workers; ++w) {
		uint64_t lo = trials * w / workers, hi = trials * (w + 1) / workers;
		pool.emplace_back([&, lo, hi, w]() {
			try {
				Workspace ws;
				for (uint64_t i = lo; i < hi; ++i) per_trial(i, ws);
			} catch (...) {
				errors[w] = std::current_exception();
			}
		});
	}
	for (std::thread& t : pool) t.join();
	for (std::exception_ptr& e : errors)
		if (e) std::rethrow_exception(e);
}

// --- detection curves -----------------------------------------------------

struct DetectionPoint {
	double x = 0;
	double p_detect = 0;
	double se = 0;
	uint64_t trials = 0;    // valid trials entering the estimate
	uint64_t discarded = 0; // boundary-touch trials
};

struct DetectionCurve {
	FamilySpec family;
	Estimator est = Estimator::rumor;
	std::vector<DetectionPoint> points;
};

namespace detail {

inline bool touches_sentinel(const Host& h, const SpreadTrace& tr) {
	if (h.sentinel.empty()) return false;
	for (node_t v : tr.order)
		if (h.sentinel[v]) return true;
	return false;
}

// One trial's spread outcome, owning its storage. The regular-tree family
// grows its own host; everything else spreads on the shared per-point
// host. Access the graph and infected set through the methods (the object
// is returned by value, so raw member pointers would dangle).
struct TrialWorld {
	bool virtual_host = false;
	bool discarded = false;
	node_t source = NO_NODE;
	const Host* shared = nullptr;
	RegularTreeSample sample;
	SpreadTrace trace;

	const Graph& graph() const { return virtual_host ? sample.host : shared->g; }
	const std::vector<node_t>& infected() const {
		return virtual_host ? sample.infected : trace.order;
	}
};

inline TrialWorld run_trial_spread(const Host* host, const FamilySpec& fam, bool by_time,
                                   double amount, uint64_t trial_seed, Workspace& ws) {
	TrialWorld w;
	if (fam.family == "regular-tree") {
		w.virtual_host = true;
		w.source = 0;
		uint64_t ss = derive_seed(trial_seed, tag_spread);
		w.sample = by_time ? spread_regular_tree_time(fam.degree, amount, ss)
		                   : spread_regular_tree_count(fam.degree, node_t(amount), ss);
		return w;
	}
	w.shared = host;
	w.source = host->source;
	if (fam.random_source()) {
		Rng r(derive_seed(trial_seed, tag_source));
		w.source = node_t(r.below(host->g.num_nodes()));
	}
	w.trace = by_time ? spread_by_time(host->g, w.source, amount,
	                                   derive_seed(trial_seed, tag_spread), &ws)
	                  : spread_by_count(host->g, w.source, node_t(amount),
	                                    derive_seed(trial_seed, tag_spread), &ws);
	w.discarded = touches_sentinel(*host, w.trace);
	return w;
}

inline DetectionPoint run_detection_point(const Host* host, const FamilySpec& fam, bool by_time,
                                          double amount, Estimator est, uint64_t trials,
                                          uint64_t point_seed, unsigned workers,
                                          bool sampled_ties) {
	std::vector<double> credit(trials, -1.0); // -1 marks a discarded trial
	parallel_trials(trials, workers, [&](uint64_t trial, Workspace& ws) {
		uint64_t ts = derive_seed(point_seed, trial);
		TrialWorld w = run_trial_spread(host, fam, by_time, amount, ts, ws);
		if (w.discarded) return;
		EstimateResult er =
		    estimate_source(w.graph(), w.infected(), est, derive_seed(ts, tag_estimate), &ws);
		if (sampled_ties) {
			credit[trial] = (er.estimate == w.source) ? 1.0 : 0.0;
		} else {
			const std::vector<node_t>& am = er.argmax_set();
			bool hit = std::binary_search(am.begin(), am.end(), w.source);
			credit[trial] = hit ? 1.0 / double(am.size()) : 0.0;
		}
	});
	DetectionPoint pt;
	pt.x = amount;
	double sum = 0;
	for (double c : credit) {
		if (c < 0) ++pt.discarded;
		else {
			sum += c;
			++pt.trials;
		}
	}
	if (pt.discarded * 100 > trials)
		throw std::runtime_error("detection run aborted: " + std::to_string(pt.discarded) +
		                         " of " + std::to_string(trials) +
		                         " trials touched the truncation boundary (>1%); "
		                         "the host is too small for this spread");
	RUMOR_CHECK(pt.trials > 0, "all trials discarded");
	pt.p_detect = sum / double(pt.trials);
	pt.se = binomial_stderr(pt.p_detect, pt.trials);
	return pt;
}

inline void require_tree_family(const FamilySpec& fam) {
	if (fam.family != "line" && fam.family != "regular-tree" && fam.family != "geometric-tree")
		throw std::domain_error("detection experiments need a tree family "
		                        "(line, regular-tree, geometric-tree), got \"" +
		                        fam.family + "\"");
}

} // namespace detail

inline DetectionCurve detection_probability(const FamilySpec& fam,
                                            const std::vector<node_t>& sizes, Estimator est,
                                            uint64_t trials, uint64_t master_seed,
                                            unsigned workers = 1, bool sampled_ties = false) {
	detail::require_tree_family(fam);
	if (trials == 0) throw std::domain_error("detection_probability: trials must be >= 1");
	DetectionCurve curve;
	curve.family = fam;
	curve.est = est;
	for (size_t i = 0; i < sizes.size(); ++i) {
		uint64_t point_seed = derive_seed(master_seed, i);
		Host host;
		if (fam.family != "regular-tree")
			host = make_host(fam, false, double(sizes[i]), point_seed);
		curve.points.push_back(detail::run_detection_point(
		    &host, fam, false, double(sizes[i]), est, trials, point_seed, workers, sampled_ties));
	}
	return curve;
}

inline DetectionCurve detection_probability_time(const FamilySpec& fam,
                                                 const std::vector<double>& times, Estimator est,
                                                 uint64_t trials, uint64_t master_seed,
                                                 unsigned workers = 1, bool sampled_ties = false) {
	detail::require_tree_family(fam);
	if (trials == 0) throw std::domain_error("detection_probability_time: trials must be >= 1");
	DetectionCurve curve;
	curve.family = fam;
	curve.est = est;
	for (size_t i = 0; i < times.size(); ++i) {
		uint64_t point_seed = derive_seed(master_seed, i);
		Host host;
		if (fam.family != "regular-tree") host = make_host(fam, true, times[i], point_seed);
		curve.points.push_back(detail::run_detection_point(&host, fam, true, times[i], est,
		                                                   trials, point_seed, workers,
		                                                   sampled_ties));
	}
	return curve;
}

inline void save_curve_csv(const DetectionCurve& c, uint64_t seed, std::ostream& out) {
	out << "# seed=" << seed << "\n";
	out << "family,param,x,p_detect,stderr,trials\n";
	out.precision(17);
	for (const DetectionPoint& p : c.points)
		out << c.family.family << ',' << c.family.param_string() << ',' << p.x << ','
		    << p.p_detect << ',' << p.se << ',' << p.trials << '\n';
}

// Exact detection probability on the infinite line after time t:
// P(N1 = N2) + P(|N1 - N2| = 1)/2 for independent Poisson(t) side counts,
// which collapses to sum_k (e^{-t} t^k / k!)^2 (1 + t/(k+1)). This is the
// closed-form oracle the line Monte Carlo is checked against.
inline double line_detection_series(double t) {
	if (t < 0) throw std::domain_error("line_detection_series: t must be >= 0");
	if (t == 0) return 1.0;
	double sum = 0;
	size_t kmax = size_t(t + 60.0 * std::sqrt(t) + 60.0);
	for (size_t k = 0; k <= kmax; ++k) {
		double lg = -t + double(k) * std::log(t) - ln_factorial(k);
		sum += std::exp(2.0 * lg) * (1.0 + t / double(k + 1));
	}
	return sum;
}

// --- hop-error histograms -------------------------------------------------

struct TrialRecord {
	uint64_t trial_id = 0;
	node_t n_infected = 0;
	int64_t true_source = 0; // external ids
	std::string estimator;
	int64_t estimate = 0;
	uint32_t tie_size = 0;
	uint32_t hop_error = 0;
	double wall_time = 0;
};

struct HistogramResult {
	FamilySpec family;
	node_t n_infected = 0;
	uint64_t trials = 0;
	std::vector<Estimator> estimators; // random baseline always present
	std::vector<TrialRecord> records;  // trials x estimators, trial-major
};

inline HistogramResult error_histogram(const FamilySpec& fam, node_t n_infected,
                                       std::vector<Estimator> estimators, uint64_t trials,
                                       uint64_t master_seed, unsigned workers = 1) {
	if (trials == 0) throw std::domain_error("error_histogram: trials must be >= 1");
	if (n_infected == 0) throw std::domain_error("error_histogram: n_infected must be >= 1");
	if (std::find(estimators.begin(), estimators.end(), Estimator::random_pick) ==
	    estimators.end())
		estimators.push_back(Estimator::random_pick); // the paper's baseline
	HistogramResult hr;
	hr.family = fam;
	hr.n_infected = n_infected;
	hr.trials = trials;
	hr.estimators = estimators;
	hr.records.resize(trials * estimators.size());

	uint64_t point_seed = derive_seed(master_seed, 0);
	Host host;
	if (fam.family != "regular-tree") {
		host = make_host(fam, false, double(n_infected), point_seed);
		if (host.g.num_nodes() < n_infected)
			throw std::domain_error("error_histogram: host smaller than the rumor");
	}

	parallel_trials(trials, workers, [&](uint64_t trial, Workspace& ws) {
		uint64_t ts = derive_seed(point_seed, trial);
		detail::TrialWorld w =
		    detail::run_trial_spread(&host, fam, false, double(n_infected), ts, ws);
		if (w.discarded)
			throw std::runtime_error("error_histogram: a trial touched the truncation "
			                         "boundary; the host is too small for this rumor size");
		const Graph& g = w.graph();
		for (size_t e = 0; e < estimators.size(); ++e) {
			auto t0 = std::chrono::steady_clock::now();
			EstimateResult er = estimate_source(g, w.infected(), estimators[e],
			                                    derive_seed(ts, detail::tag_estimate + e), &ws);
			auto t1 = std::chrono::steady_clock::now();
			TrialRecord& rec = hr.records[trial * estimators.size() + e];
			rec.trial_id = trial;
			rec.n_infected = n_infected;
			rec.true_source = g.id_of(w.source);
			rec.estimator = er.name;
			rec.estimate = g.id_of(er.estimate);
			rec.tie_size = uint32_t(er.argmax_set().size());
			rec.hop_error = hop_distance(g, w.source, er.estimate, &ws);
			rec.wall_time = std::chrono::duration<double>(t1 - t0).count();
		}
	});
	return hr;
}

inline void save_histogram_csv(const HistogramResult& hr, uint64_t seed, std::ostream& out) {
	out << "# seed=" << seed << "\n";
	out << "estimator,hop_error,count\n";
	for (size_t e = 0; e < hr.estimators.size(); ++e) {
		const char* name = estimator_name(hr.estimators[e]);
		std::map<uint32_t, uint64_t> hist;
		for (uint64_t t = 0; t < hr.trials; ++t)
			++hist[hr.records[t * hr.estimators.size() + e].hop_error];
		for (auto [hop, count] : hist) out << name << ',' << hop << ',' << count << '\n';
	}
}

// --- goodness-of-fit style reports ----------------------------------------

struct Report {
	std::vector<std::pair<std::string, std::string>> rows;

	void add(const std::string& key, const std::string& value) { rows.push_back({key, value}); }
	void add(const std::string& key, double value) {
		std::ostringstream s;
		s.precision(17);
		s << value;
		rows.push_back({key, s.str()});
	}
	const std::string& get(const std::string& key) const {
		for (const auto& [k, v] : rows)
			if (k == key) return v;
		throw std::domain_error("report: no row \"" + key + "\"");
	}
	double get_num(const std::string& key) const { return std::stod(get(key)); }
};

inline void save_report_csv(const Report& r, uint64_t seed, std::ostream& out) {
	out << "# seed=" << seed << "\n";
	out << "key,value\n";
	for (const auto& [k, v] : r.rows) out << k << ',' << v << '\n';
}

// Distribution of one root subtree's infected count on a d-regular tree
// at time t, against the Geometric(e^{-t}) law. Reports total variation
// distance and a chi-square goodness-of-fit p-value.
inline Report subtree_distribution_check(double t, uint64_t trials, uint64_t seed,
                                         unsigned workers = 1, unsigned degree = 3) {
	if (t <= 0) throw std::domain_error("subtree_distribution_check: t must be > 0");
	if (trials == 0) throw std::domain_error("subtree_distribution_check: trials must be >= 1");
	if (degree < 2) throw std::domain_error("subtree_distribution_check: degree must be >= 2");

	// Each trial grows the infinite tree on demand and counts the infected
	// nodes descending from the source's first slot. The slot is fixed
	// before any clock is drawn, so the count is an unbiased sample of one
	// branch's population (0 when the slot's edge never fires).
	std::vector<int64_t> value(trials, 0);
	parallel_trials(trials, workers, [&](uint64_t trial, Workspace&) {
		uint64_t ts = derive_seed(seed, trial);
		RegularTreeSample s =
		    spread_regular_tree_time(degree, t, derive_seed(ts, detail::tag_spread));
		if (s.first_slot_child == NO_NODE) return; // branch stayed empty
		node_t n = node_t(s.infected.size());
		std::vector<uint8_t> in(n, 0);
		in[s.first_slot_child] = 1;
		int64_t cnt = 0;
		for (node_t v = s.first_slot_child; v < n; ++v) {
			if (v > s.first_slot_child) in[v] = in[s.parent[v]];
			if (in[v]) ++cnt;
		}
		value[trial] = cnt;
	});

	const size_t kmax = 512;
	std::vector<uint64_t> counts(kmax + 2, 0);
	double mean = 0;
	for (int64_t v : value) {
		mean += double(v);
		counts[std::min<size_t>(size_t(v), kmax + 1)]++;
	}
	mean /= double(trials);

	const double s = std::exp(-t);
	std::vector<double> pmf = geometric_pmf_with_tail(s, kmax);
	double tv = total_variation(normalize_counts(counts), pmf);
	ChiSquare cs = chi_square_gof(counts, pmf);

	Report rep;
	rep.add("experiment", "subtree");
	rep.add("degree", double(degree));
	rep.add("t", t);
	rep.add("trials", double(trials));
	rep.add("tv", tv);
	rep.add("chi2_stat", cs.stat);
	rep.add("chi2_df", double(cs.df));
	rep.add("chi2_p", cs.p_value);
	rep.add("mean_empirical", mean);
	rep.add("mean_theoretical", (1.0 - s) / s);
	return rep;
}

// Shape theorem at finite t: fraction of runs in which every node within
// t(1-eps) of the source is infected and no infected node lies beyond
// t(1+eps), with eps = t^(-1/2+delta). Report-only; asymptotic in t.
inline Report shape_check(const GeometricTreeSpec& base, double t, double delta, uint64_t trials,
                          uint64_t seed, unsigned workers = 1) {
	if (t <= 0) throw std::domain_error("shape_check: t must be > 0");
	if (delta <= 0 || delta >= 0.5) throw std::domain_error("shape_check: need 0 < delta < 0.5");
	if (trials == 0) throw std::domain_error("shape_check: trials must be >= 1");
	const double eps = std::pow(t, -0.5 + delta);
	const double inner = t * (1.0 - eps), outer = t * (1.0 + eps);

	FamilySpec fam;
	fam.family = "geometric-tree";
	fam.geom = base;
	Host host = make_host(fam, true, t, seed);
	if (double(host.depth) <= outer)
		throw std::domain_error("shape_check: host radius does not cover t(1+eps)");

	std::vector<uint32_t> depth = hop_distances(host.g, 0);
	uint64_t inner_total = 0;
	for (node_t v = 0; v < host.g.num_nodes(); ++v)
		if (double(depth[v]) <= inner) ++inner_total;

	std::vector<int8_t> result(trials, 0); // 1 pass, 2 inner fail, 3 outer fail, 4 both
	parallel_trials(trials, workers, [&](uint64_t trial, Workspace& ws) {
		uint64_t ts = derive_seed(seed, trial);
		SpreadTrace tr =
		    spread_by_time(host.g, 0, t, derive_seed(ts, detail::tag_spread), &ws);
		uint64_t inner_hit = 0;
		bool outer_breach = false;
		for (node_t v : tr.order) {
			if (double(depth[v]) <= inner) ++inner_hit;
			if (double(depth[v]) > outer) outer_breach = true;
		}
		bool inner_fail = inner_hit != inner_total;
		result[trial] = int8_t(inner_fail ? (outer_breach ? 4 : 2) : (outer_breach ? 3 : 1));
	});

	uint64_t pass = 0, fail_inner = 0, fail_outer = 0;
	for (int8_t r : result) {
		if (r == 1) ++pass;
		if (r == 2 || r == 4) ++fail_inner;
		if (r == 3 || r == 4) ++fail_outer;
	}
	double frac = double(pass) / double(trials);

	Report rep;
	rep.add("experiment", "shape");
	rep.add("t", t);
	rep.add("delta", delta);
	rep.add("epsilon", eps);
	rep.add("radius", double(host.depth));
	rep.add("trials", double(trials));
	rep.add("pass_fraction", frac);
	rep.add("stderr", binomial_stderr(frac, trials));
	rep.add("fail_inner", double(fail_inner));
	rep.add("fail_outer", double(fail_outer));
	return rep;
}

} // namespace rumor

#endif
