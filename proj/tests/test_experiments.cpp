// Experiment drivers: host sizing, the parallel trial runner, detection
// curves, histograms, distribution checks, and config files.
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rumor/config.hpp"
#include "rumor/experiments.hpp"
#include "rumor/stats.hpp"

using namespace rumor;

namespace {

FamilySpec family(const std::string& name) {
	FamilySpec f;
	f.family = name;
	return f;
}

std::string slurp(const std::string& path) {
	std::ifstream in(path);
	REQUIRE(in);
	std::ostringstream s;
	s << in.rdbuf();
	return s.str();
}

struct TempFile {
	std::string path;
	explicit TempFile(const std::string& tag) {
		path = (std::filesystem::temp_directory_path() / ("rumor-test-" + tag)).string();
	}
	~TempFile() { std::remove(path.c_str()); }
};

} // namespace

TEST_CASE("line hosts are sized so a count-mode rumor cannot reach the ends") {
	Host h = make_host(family("line"), false, 100, 1);
	REQUIRE(h.g.num_nodes() == 201);
	REQUIRE(h.source == 100);
	REQUIRE(h.sentinel[0] == 1);
	REQUIRE(h.sentinel[200] == 1);
	uint64_t sentinels = 0;
	for (uint8_t s : h.sentinel) sentinels += s;
	REQUIRE(sentinels == 2);

	// time mode pads by ten standard deviations of the Poisson side count
	Host ht = make_host(family("line"), true, 10.0, 1);
	REQUIRE(ht.g.num_nodes() >= 2 * (10 + 32) + 1);
	REQUIRE(ht.source == (ht.g.num_nodes() - 1) / 2);
}

TEST_CASE("geometric hosts grow their radius with the horizon") {
	FamilySpec f = family("geometric-tree");
	Host h = make_host(f, true, 5.0, 7);
	REQUIRE(h.depth == 15); // ceil(2t) + 5
	REQUIRE(h.source == 0);
	std::vector<uint32_t> dist = hop_distances(h.g, 0);
	for (node_t v = 0; v < h.g.num_nodes(); ++v)
		REQUIRE(bool(h.sentinel[v]) == (dist[v] >= h.depth));

	// count mode inverts the level-sum lower bound; the default radius
	// already covers a 20-node rumor twice over
	Host hc = make_host(f, false, 20, 7);
	REQUIRE(hc.depth == 10);
	REQUIRE(hc.g.num_nodes() >= 40);
}

TEST_CASE("host construction rejects what it cannot honor") {
	REQUIRE_THROWS_WITH(make_host(family("regular-tree"), false, 100, 1),
	                    Catch::Matchers::ContainsSubstring("grown per trial"));
	REQUIRE_THROWS_WITH(make_host(family("mesh"), false, 10, 1),
	                    Catch::Matchers::ContainsSubstring("unknown graph family"));
	FamilySpec sw = family("small-world");
	sw.n = 50;
	REQUIRE_THROWS_WITH(make_host(sw, false, 100, 1),
	                    Catch::Matchers::ContainsSubstring("larger than the host"));
	REQUIRE_THROWS_AS(make_host(family("line"), false, 0, 1), std::domain_error);
}

TEST_CASE("file-backed hosts load from disk and draw random sources") {
	TempFile tmp("host.edges");
	{
		std::ofstream out(tmp.path);
		save_edge_list(line_graph(6), out);
	}
	FamilySpec f = family("file");
	f.path = tmp.path;
	Host h = make_host(f, false, 3, 1);
	REQUIRE(h.g.num_nodes() == 6);
	REQUIRE(h.source == NO_NODE); // per-trial sources
	REQUIRE(f.random_source());
	REQUIRE_FALSE(family("line").random_source());
	REQUIRE(family("small-world").random_source());
	REQUIRE(f.param_string() == tmp.path);
	FamilySpec sw = family("small-world");
	REQUIRE(sw.param_string() == "n=5000;k=4;p=0.1");
}

TEST_CASE("the trial runner is deterministic for any worker count") {
	std::vector<double> one(64), four(64);
	parallel_trials(64, 1, [&](uint64_t i, Workspace&) {
		one[i] = double(derive_seed(42, i) % 1000);
	});
	parallel_trials(64, 4, [&](uint64_t i, Workspace&) {
		four[i] = double(derive_seed(42, i) % 1000);
	});
	REQUIRE(one == four);

	REQUIRE_THROWS_WITH(parallel_trials(8, 3,
	                                    [&](uint64_t i, Workspace&) {
		                                    if (i == 5) throw std::runtime_error("trial 5 burst");
	                                    }),
	                    Catch::Matchers::ContainsSubstring("trial 5 burst"));
}

TEST_CASE("degenerate line rumors have closed-form detection probabilities") {
	// N=1: the rumor is the source, so every estimator is always right
	DetectionCurve c1 = detection_probability(family("line"), {1}, Estimator::rumor, 200, 5);
	REQUIRE(c1.points[0].p_detect == 1.0);
	REQUIRE(c1.points[0].se == 0.0);
	REQUIRE(c1.points[0].trials == 200);
	REQUIRE(c1.points[0].discarded == 0);

	// N=2: the two infected nodes tie by symmetry; fractional credit is
	// exactly 1/2 in every trial, and sampled ties hit 1/2 on average
	DetectionCurve c2 = detection_probability(family("line"), {2}, Estimator::rumor, 400, 5);
	REQUIRE(c2.points[0].p_detect == 0.5);
	DetectionCurve c2s =
	    detection_probability(family("line"), {2}, Estimator::rumor, 2000, 5, 1, true);
	double se = binomial_stderr(0.5, 2000);
	REQUIRE(std::fabs(c2s.points[0].p_detect - 0.5) <= 4 * se);
}

TEST_CASE("detection curves are identical no matter how many workers run them") {
	FamilySpec f = family("line");
	DetectionCurve a = detection_probability(f, {10, 20}, Estimator::rumor, 300, 99, 1);
	DetectionCurve b = detection_probability(f, {10, 20}, Estimator::rumor, 300, 99, 3);
	REQUIRE(a.points.size() == 2);
	for (size_t i = 0; i < 2; ++i) {
		REQUIRE(a.points[i].p_detect == b.points[i].p_detect);
		REQUIRE(a.points[i].se == b.points[i].se);
		REQUIRE(a.points[i].trials == b.points[i].trials);
	}
	REQUIRE(a.points[0].x == 10.0);
	REQUIRE(a.points[1].x == 20.0);
}

TEST_CASE("regular-tree detection runs on the virtual host with no discards") {
	FamilySpec f = family("regular-tree");
	f.degree = 3;
	DetectionCurve c = detection_probability(f, {50}, Estimator::rumor, 300, 17, 2);
	REQUIRE(c.points[0].discarded == 0);
	REQUIRE(c.points[0].trials == 300);
	REQUIRE(c.points[0].p_detect > 0.05);
	REQUIRE(c.points[0].p_detect < 0.6);
	DetectionCurve again = detection_probability(f, {50}, Estimator::rumor, 300, 17, 1);
	REQUIRE(again.points[0].p_detect == c.points[0].p_detect);
}

TEST_CASE("line detection at a time horizon matches the Poisson series") {
	double series = line_detection_series(5.0);
	DetectionCurve c =
	    detection_probability_time(family("line"), {5.0}, Estimator::rumor, 3000, 2024);
	const DetectionPoint& p = c.points[0];
	INFO("mc=" << p.p_detect << " series=" << series);
	REQUIRE(std::fabs(p.p_detect - series) <= 4.0 * std::max(p.se, 1e-3));
}

TEST_CASE("the line series is the two-Poisson tie formula") {
	// independent route: P(N1 = N2) + P(|N1 - N2| = 1)/2 from the pmf
	for (double t : {0.5, 1.0, 5.0, 10.0}) {
		size_t kmax = size_t(t + 60 * std::sqrt(t) + 60);
		std::vector<double> pmf = poisson_pmf_with_tail(t, kmax);
		double tie = 0, off1 = 0;
		for (size_t k = 0; k <= kmax; ++k) {
			tie += pmf[k] * pmf[k];
			if (k + 1 <= kmax) off1 += 2.0 * pmf[k] * pmf[k + 1];
		}
		REQUIRE_THAT(line_detection_series(t),
		             Catch::Matchers::WithinRel(tie + off1 / 2.0, 1e-10));
	}
	REQUIRE(line_detection_series(0.0) == 1.0);
	REQUIRE_THROWS_AS(line_detection_series(-1.0), std::domain_error);
}

TEST_CASE("detection experiments insist on tree families and sane inputs") {
	REQUIRE_THROWS_WITH(
	    detection_probability(family("small-world"), {10}, Estimator::rumor, 10, 1),
	    Catch::Matchers::ContainsSubstring("tree family"));
	REQUIRE_THROWS_AS(detection_probability(family("line"), {10}, Estimator::rumor, 0, 1),
	                  std::domain_error);
	REQUIRE_THROWS_AS(
	    detection_probability_time(family("file"), {1.0}, Estimator::rumor, 10, 1),
	    std::domain_error);
}

TEST_CASE("curve CSV starts with the seed echo and one row per point") {
	DetectionCurve c = detection_probability(family("line"), {5, 10}, Estimator::rumor, 50, 3);
	std::ostringstream out;
	save_curve_csv(c, 3, out);
	std::istringstream in(out.str());
	std::string line;
	std::getline(in, line);
	REQUIRE(line == "# seed=3");
	std::getline(in, line);
	REQUIRE(line == "family,param,x,p_detect,stderr,trials");
	size_t rows = 0;
	while (std::getline(in, line)) {
		REQUIRE_THAT(line, Catch::Matchers::StartsWith("line,-,"));
		++rows;
	}
	REQUIRE(rows == 2);
}

TEST_CASE("error histograms record every estimator per trial, plus the random baseline") {
	FamilySpec f = family("line");
	const uint64_t trials = 50;
	HistogramResult hr =
	    error_histogram(f, 21, {Estimator::rumor, Estimator::distance}, trials, 11, 2);
	REQUIRE(hr.estimators.size() == 3); // random appended
	REQUIRE(hr.records.size() == trials * 3);
	for (uint64_t t = 0; t < trials; ++t) {
		REQUIRE(hr.records[t * 3 + 0].estimator == "rumor");
		REQUIRE(hr.records[t * 3 + 1].estimator == "distance");
		REQUIRE(hr.records[t * 3 + 2].estimator == "random");
		for (size_t e = 0; e < 3; ++e) {
			const TrialRecord& rec = hr.records[t * 3 + e];
			REQUIRE(rec.trial_id == t);
			REQUIRE(rec.n_infected == 21);
			REQUIRE(rec.tie_size >= 1);
			REQUIRE(rec.wall_time >= 0.0);
			// on the line host external ids are coordinates, so the hop
			// error is plain distance -- an independent check of the field
			REQUIRE(rec.hop_error == uint32_t(std::llabs(rec.estimate - rec.true_source)));
		}
	}
	// explicit random is not appended twice
	HistogramResult hr2 = error_histogram(f, 5, {Estimator::random_pick}, 10, 11);
	REQUIRE(hr2.estimators.size() == 1);

	REQUIRE_THROWS_AS(error_histogram(f, 0, {Estimator::rumor}, 10, 1), std::domain_error);
	REQUIRE_THROWS_AS(error_histogram(f, 5, {Estimator::rumor}, 0, 1), std::domain_error);
}

TEST_CASE("regular-tree histograms grow their hosts per trial") {
	FamilySpec f = family("regular-tree");
	f.degree = 3;
	HistogramResult hr = error_histogram(f, 15, {Estimator::rumor}, 30, 21);
	REQUIRE(hr.records.size() == 30 * 2);
	for (const TrialRecord& rec : hr.records) {
		REQUIRE(rec.true_source == 0); // infection order ids, source first
		REQUIRE(rec.estimate >= 0);
		REQUIRE(rec.estimate < 15);
		REQUIRE(rec.hop_error <= 14);
	}
}

TEST_CASE("small-world histograms draw a fresh source per trial") {
	FamilySpec f = family("small-world");
	f.n = 300;
	f.k = 4;
	f.p = 0.1;
	HistogramResult hr = error_histogram(f, 30, {Estimator::rumor_bfs}, 25, 31);
	bool source_moved = false;
	for (const TrialRecord& rec : hr.records)
		if (rec.true_source != hr.records[0].true_source) source_moved = true;
	REQUIRE(source_moved);

	std::ostringstream out;
	save_histogram_csv(hr, 31, out);
	std::istringstream in(out.str());
	std::string line;
	std::getline(in, line);
	REQUIRE(line == "# seed=31");
	std::getline(in, line);
	REQUIRE(line == "estimator,hop_error,count");
	uint64_t total = 0;
	while (std::getline(in, line)) {
		std::istringstream ls(line);
		std::string est, hop, cnt;
		std::getline(ls, est, ',');
		std::getline(ls, hop, ',');
		std::getline(ls, cnt, ',');
		total += std::stoull(cnt);
	}
	REQUIRE(total == 25 * 2); // rumor-bfs + random baseline
}

TEST_CASE("one root branch of the regular tree is geometrically populated") {
	Report rep = subtree_distribution_check(0.5, 20000, 1717, 2);
	REQUIRE(rep.get("experiment") == "subtree");
	REQUIRE(rep.get_num("degree") == 3.0);
	REQUIRE(rep.get_num("trials") == 20000.0);
	INFO("tv=" << rep.get_num("tv") << " chi2_p=" << rep.get_num("chi2_p"));
	REQUIRE(rep.get_num("tv") < 0.02);
	REQUIRE(rep.get_num("chi2_p") > 1e-6);
	double want_mean = std::exp(0.5) - 1.0;
	REQUIRE(std::fabs(rep.get_num("mean_empirical") - rep.get_num("mean_theoretical")) < 0.05);
	REQUIRE_THAT(rep.get_num("mean_theoretical"), Catch::Matchers::WithinRel(want_mean, 1e-12));

	REQUIRE_THROWS_AS(subtree_distribution_check(0.0, 10, 1), std::domain_error);
	REQUIRE_THROWS_AS(subtree_distribution_check(1.0, 0, 1), std::domain_error);
	REQUIRE_THROWS_AS(subtree_distribution_check(1.0, 10, 1, 1, 1), std::domain_error);
}

TEST_CASE("the shape check reports inner and outer failures separately") {
	GeometricTreeSpec geom;
	Report rep = shape_check(geom, 4.0, 0.1, 200, 909, 2);
	REQUIRE(rep.get("experiment") == "shape");
	double frac = rep.get_num("pass_fraction");
	REQUIRE(frac >= 0.0);
	REQUIRE(frac <= 1.0);
	REQUIRE(rep.get_num("fail_inner") <= 200.0);
	REQUIRE(rep.get_num("fail_outer") <= 200.0);
	REQUIRE_THAT(rep.get_num("stderr"),
	             Catch::Matchers::WithinAbs(binomial_stderr(frac, 200), 1e-15));
	REQUIRE(rep.get_num("radius") > 4.0 * (1.0 + std::pow(4.0, -0.4)));

	REQUIRE_THROWS_AS(shape_check(geom, 0.0, 0.1, 10, 1), std::domain_error);
	REQUIRE_THROWS_AS(shape_check(geom, 4.0, 0.6, 10, 1), std::domain_error);
	REQUIRE_THROWS_AS(shape_check(geom, 4.0, 0.1, 0, 1), std::domain_error);
}

TEST_CASE("the shape pass fraction does not decay as the horizon grows") {
	GeometricTreeSpec geom;
	Report early = shape_check(geom, 25.0, 0.05, 200, 1213);
	Report late = shape_check(geom, 100.0, 0.05, 200, 1214);
	REQUIRE(late.get_num("pass_fraction") >=
	        early.get_num("pass_fraction") - 2.0 * early.get_num("stderr"));
}

TEST_CASE("reports refuse questions they never answered") {
	Report r;
	r.add("alpha", 1.5);
	REQUIRE(r.get_num("alpha") == 1.5);
	REQUIRE_THROWS_WITH(r.get("beta"), Catch::Matchers::ContainsSubstring("no row \"beta\""));
}

TEST_CASE("key=value configs are strict about shape") {
	auto parse = [](const std::string& text) {
		std::istringstream in(text);
		return parse_kv_config(in, "cfg");
	};
	auto kv = parse("# comment\n  family = line \n\nseed=7\n");
	REQUIRE(kv.at("family") == "line");
	REQUIRE(kv.at("seed") == "7");

	REQUIRE_THROWS_WITH(parse("family line\n"),
	                    Catch::Matchers::ContainsSubstring("cfg:1: expected key=value"));
	REQUIRE_THROWS_WITH(parse("a=1\na=2\n"),
	                    Catch::Matchers::ContainsSubstring("cfg:2: duplicate key \"a\""));
	REQUIRE_THROWS_WITH(parse("=3\n"), Catch::Matchers::ContainsSubstring("cfg:1: empty key"));
}

TEST_CASE("experiment configs name exactly what is wrong") {
	auto cfg_of = [](const std::string& text) {
		std::istringstream in(text);
		return parse_experiment_config(parse_kv_config(in, "cfg"), "cfg");
	};
	ExperimentConfig cfg = cfg_of("experiment=detection\nfamily=line\nsizes=10,20,40\n"
	                              "estimator=rumor-centrality\ntrials=50\nseed=9\nout=x.csv\n"
	                              "ties=sampled\nworkers=2\n");
	REQUIRE(cfg.experiment == "detection");
	REQUIRE(cfg.sizes == std::vector<node_t>{10, 20, 40});
	REQUIRE(cfg.estimators == std::vector<Estimator>{Estimator::rumor});
	REQUIRE(cfg.sampled_ties);
	REQUIRE(cfg.workers == 2);
	REQUIRE(cfg.seed == 9);

	REQUIRE_THROWS_WITH(cfg_of("experiment=detection\nfamily=line\nsizes=10\n"
	                           "estimator=rumor\ntrials=50\nout=x.csv\n"),
	                    Catch::Matchers::ContainsSubstring("missing required key \"seed\""));
	REQUIRE_THROWS_WITH(cfg_of("experiment=detection\nfamily=line\nsizes=10\n"
	                           "estimator=rumor\ntrials=50\nseed=1\nout=x.csv\nfoo=1\n"),
	                    Catch::Matchers::ContainsSubstring("unknown key \"foo\""));
	REQUIRE_THROWS_WITH(cfg_of("experiment=voting\ntrials=1\nseed=1\nout=x.csv\n"),
	                    Catch::Matchers::ContainsSubstring("unknown experiment \"voting\""));
	REQUIRE_THROWS_WITH(cfg_of("experiment=detection\nfamily=torus\nsizes=10\n"
	                           "estimator=rumor\ntrials=5\nseed=1\nout=x.csv\n"),
	                    Catch::Matchers::ContainsSubstring("unknown graph family \"torus\""));
	REQUIRE_THROWS_WITH(cfg_of("experiment=detection\nfamily=line\nsizes=10\n"
	                           "estimator=rumor\ntrials=abc\nseed=1\nout=x.csv\n"),
	                    Catch::Matchers::ContainsSubstring("bad integer for trials"));
	REQUIRE_THROWS_WITH(cfg_of("experiment=detection\nfamily=line\nsizes=10\n"
	                           "estimator=rumor\ntrials=5\nseed=1\nout=x.csv\nties=maybe\n"),
	                    Catch::Matchers::ContainsSubstring("ties must be fractional or sampled"));
	REQUIRE_THROWS_AS(cfg_of("experiment=histogram\nfamily=line\nn_infected=5\n"
	                         "estimators=\ntrials=5\nseed=1\nout=x.csv\n"),
	                  std::domain_error);

	ExperimentConfig tcfg = cfg_of("experiment=detection-time\nfamily=line\ntimes=1,2.5\n"
	                               "estimator=bfs-heuristic\ntrials=5\nseed=1\nout=x.csv\n");
	REQUIRE(tcfg.times == std::vector<double>{1.0, 2.5});
	REQUIRE(tcfg.estimators[0] == Estimator::rumor_bfs);

	REQUIRE_THROWS_WITH(load_experiment_config("/nonexistent.cfg"),
	                    Catch::Matchers::ContainsSubstring("/nonexistent.cfg"));
}

TEST_CASE("running a config writes the same bytes for any worker count") {
	TempFile out1("det1.csv"), out2("det2.csv");
	std::string text = "experiment=detection\nfamily=line\nsizes=5,9\nestimator=rumor\n"
	                   "trials=60\nseed=33\nout=";
	auto cfg_of = [&](const std::string& path) {
		std::istringstream in(text + path + "\n");
		return parse_experiment_config(parse_kv_config(in, "cfg"), "cfg");
	};
	run_experiment(cfg_of(out1.path));
	run_experiment(cfg_of(out2.path), 3);
	std::string a = slurp(out1.path), b = slurp(out2.path);
	REQUIRE(a == b);
	REQUIRE_THAT(a, Catch::Matchers::StartsWith("# seed=33\n"));

	// the other experiment kinds run end to end through the same entry
	TempFile hist("hist.csv"), sub("sub.csv"), shp("shape.csv");
	std::istringstream h("experiment=histogram\nfamily=line\nn_infected=9\n"
	                     "estimators=rumor,distance\ntrials=20\nseed=2\nout=" +
	                     hist.path + "\n");
	run_experiment(parse_experiment_config(parse_kv_config(h, "h"), "h"));
	REQUIRE_THAT(slurp(hist.path), Catch::Matchers::ContainsSubstring("estimator,hop_error,count"));

	std::istringstream s("experiment=subtree\nt=1\ntrials=2000\nseed=3\nout=" + sub.path + "\n");
	run_experiment(parse_experiment_config(parse_kv_config(s, "s"), "s"));
	REQUIRE_THAT(slurp(sub.path), Catch::Matchers::ContainsSubstring("tv,"));

	std::istringstream p("experiment=shape\nt=3\ndelta=0.1\ntrials=50\nseed=4\nout=" + shp.path +
	                     "\n");
	run_experiment(parse_experiment_config(parse_kv_config(p, "p"), "p"));
	REQUIRE_THAT(slurp(shp.path), Catch::Matchers::ContainsSubstring("pass_fraction,"));
}
