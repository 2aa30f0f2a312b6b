#ifndef RUMOR_CONFIG_HPP
#define RUMOR_CONFIG_HPP

#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "experiments.hpp"
#include "util.hpp"

namespace rumor {

// Plain key=value files: one pair per line, '#' comments, blank lines
// ignored. Errors carry the file name and line number.
inline std::map<std::string, std::string> parse_kv_config(std::istream& in,
                                                          const std::string& name) {
	auto trim = [](std::string s) {
		size_t a = s.find_first_not_of(" \t\r");
		size_t b = s.find_last_not_of(" \t\r");
		return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
	};
	std::map<std::string, std::string> kv;
	std::string line;
	size_t lineno = 0;
	while (std::getline(in, line)) {
		++lineno;
		std::string t = trim(line);
		if (t.empty() || t[0] == '#') continue;
		size_t eq = t.find('=');
		if (eq == std::string::npos)
			throw std::runtime_error(name + ":" + std::to_string(lineno) +
			                         ": expected key=value");
		std::string key = trim(t.substr(0, eq)), value = trim(t.substr(eq + 1));
		if (key.empty())
			throw std::runtime_error(name + ":" + std::to_string(lineno) + ": empty key");
		if (kv.count(key))
			throw std::runtime_error(name + ":" + std::to_string(lineno) + ": duplicate key \"" +
			                         key + "\"");
		kv[key] = value;
	}
	return kv;
}

namespace detail {

// Tracks which keys a reader consumed so leftovers (typos, stale keys)
// can be rejected instead of silently ignored.
struct KvReader {
	const std::map<std::string, std::string>& kv;
	std::string name;
	std::set<std::string> used;

	bool has(const std::string& key) {
		if (kv.count(key)) {
			used.insert(key);
			return true;
		}
		return false;
	}
	std::string require(const std::string& key) {
		if (!has(key))
			throw std::domain_error(name + ": missing required key \"" + key + "\"");
		return kv.at(key);
	}
	std::string get_or(const std::string& key, const std::string& dflt) {
		return has(key) ? kv.at(key) : dflt;
	}
	void finish() const {
		for (const auto& [k, v] : kv)
			if (!used.count(k))
				throw std::domain_error(name + ": unknown key \"" + k + "\"");
	}
};

inline uint64_t to_u64(const std::string& s, const std::string& what) {
	try {
		size_t pos;
		uint64_t v = std::stoull(s, &pos);
		if (pos != s.size()) throw std::invalid_argument(s);
		return v;
	} catch (const std::exception&) {
		throw std::domain_error("bad integer for " + what + ": \"" + s + "\"");
	}
}

inline double to_double(const std::string& s, const std::string& what) {
	try {
		size_t pos;
		double v = std::stod(s, &pos);
		if (pos != s.size()) throw std::invalid_argument(s);
		return v;
	} catch (const std::exception&) {
		throw std::domain_error("bad number for " + what + ": \"" + s + "\"");
	}
}

inline std::vector<std::string> split_list(const std::string& s) {
	std::vector<std::string> out;
	std::string item;
	std::istringstream ss(s);
	while (std::getline(ss, item, ',')) out.push_back(item);
	return out;
}

} // namespace detail

// Family description from config keys (family= plus per-family params).
inline FamilySpec family_from_kv(detail::KvReader& r) {
	FamilySpec fam;
	fam.family = r.require("family");
	if (fam.family == "line") {
		// sized by the experiment, no free parameters
	} else if (fam.family == "regular-tree") {
		fam.degree = unsigned(detail::to_u64(r.get_or("degree", "3"), "degree"));
	} else if (fam.family == "geometric-tree") {
		fam.geom.alpha = detail::to_double(r.get_or("alpha", "1"), "alpha");
		fam.geom.b = detail::to_double(r.get_or("b", "1"), "b");
		fam.geom.c = detail::to_double(r.get_or("c", "1"), "c");
		fam.geom.d_star = unsigned(detail::to_u64(r.get_or("dstar", "3"), "dstar"));
	} else if (fam.family == "small-world") {
		fam.n = node_t(detail::to_u64(r.get_or("n", "5000"), "n"));
		fam.k = unsigned(detail::to_u64(r.get_or("k", "4"), "k"));
		fam.p = detail::to_double(r.get_or("p", "0.1"), "p");
	} else if (fam.family == "scale-free") {
		fam.n = node_t(detail::to_u64(r.get_or("n", "5000"), "n"));
		fam.m = unsigned(detail::to_u64(r.get_or("m", "2"), "m"));
	} else if (fam.family == "file") {
		fam.path = r.require("path");
	} else {
		throw std::domain_error(r.name + ": unknown graph family \"" + fam.family + "\"");
	}
	return fam;
}

struct ExperimentConfig {
	std::string experiment;
	FamilySpec family;
	std::vector<node_t> sizes;
	std::vector<double> times;
	node_t n_infected = 0;
	std::vector<Estimator> estimators;
	uint64_t trials = 0;
	uint64_t seed = 0;
	std::string out;
	double t = 0;
	double delta = 0;
	unsigned degree = 3;
	GeometricTreeSpec geom;
	unsigned workers = 1;
	bool sampled_ties = false;
};

inline ExperimentConfig parse_experiment_config(const std::map<std::string, std::string>& kv,
                                                const std::string& name) {
	detail::KvReader r{kv, name, {}};
	ExperimentConfig cfg;
	cfg.experiment = r.require("experiment");
	cfg.seed = detail::to_u64(r.require("seed"), "seed");
	cfg.trials = detail::to_u64(r.require("trials"), "trials");
	cfg.out = r.require("out");
	cfg.workers = unsigned(detail::to_u64(r.get_or("workers", "1"), "workers"));

	if (cfg.experiment == "detection" || cfg.experiment == "detection-time") {
		cfg.family = family_from_kv(r);
		cfg.estimators = {parse_estimator(r.require("estimator"))};
		std::string ties = r.get_or("ties", "fractional");
		if (ties == "sampled") cfg.sampled_ties = true;
		else if (ties != "fractional")
			throw std::domain_error(name + ": ties must be fractional or sampled");
		if (cfg.experiment == "detection") {
			for (const std::string& s : detail::split_list(r.require("sizes")))
				cfg.sizes.push_back(node_t(detail::to_u64(s, "sizes")));
			if (cfg.sizes.empty()) throw std::domain_error(name + ": sizes is empty");
		} else {
			for (const std::string& s : detail::split_list(r.require("times")))
				cfg.times.push_back(detail::to_double(s, "times"));
			if (cfg.times.empty()) throw std::domain_error(name + ": times is empty");
		}
	} else if (cfg.experiment == "histogram") {
		cfg.family = family_from_kv(r);
		cfg.n_infected = node_t(detail::to_u64(r.require("n_infected"), "n_infected"));
		for (const std::string& s : detail::split_list(r.require("estimators")))
			cfg.estimators.push_back(parse_estimator(s));
		if (cfg.estimators.empty()) throw std::domain_error(name + ": estimators is empty");
	} else if (cfg.experiment == "subtree") {
		cfg.t = detail::to_double(r.require("t"), "t");
		cfg.degree = unsigned(detail::to_u64(r.get_or("degree", "3"), "degree"));
	} else if (cfg.experiment == "shape") {
		cfg.t = detail::to_double(r.require("t"), "t");
		cfg.delta = detail::to_double(r.require("delta"), "delta");
		cfg.geom.alpha = detail::to_double(r.get_or("alpha", "1"), "alpha");
		cfg.geom.b = detail::to_double(r.get_or("b", "1"), "b");
		cfg.geom.c = detail::to_double(r.get_or("c", "1"), "c");
		cfg.geom.d_star = unsigned(detail::to_u64(r.get_or("dstar", "3"), "dstar"));
	} else {
		throw std::domain_error(name + ": unknown experiment \"" + cfg.experiment +
		                        "\" (expected detection, detection-time, histogram, "
		                        "subtree, shape)");
	}
	r.finish();
	return cfg;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
	std::ifstream in(path);
	if (!in) throw std::runtime_error("cannot open config \"" + path + "\"");
	return parse_experiment_config(parse_kv_config(in, path), path);
}

// Run the configured experiment and write its CSV. A nonzero
// workers_override (the CLI's --workers flag) beats the config value.
inline void run_experiment(const ExperimentConfig& cfg, unsigned workers_override = 0) {
	unsigned workers = workers_override ? workers_override : cfg.workers;
	std::ofstream out(cfg.out);
	if (!out) throw std::runtime_error("cannot open \"" + cfg.out + "\" for writing");
	if (cfg.experiment == "detection") {
		DetectionCurve c = detection_probability(cfg.family, cfg.sizes, cfg.estimators[0],
		                                         cfg.trials, cfg.seed, workers,
		                                         cfg.sampled_ties);
		save_curve_csv(c, cfg.seed, out);
	} else if (cfg.experiment == "detection-time") {
		DetectionCurve c = detection_probability_time(cfg.family, cfg.times, cfg.estimators[0],
		                                              cfg.trials, cfg.seed, workers,
		                                              cfg.sampled_ties);
		save_curve_csv(c, cfg.seed, out);
	} else if (cfg.experiment == "histogram") {
		HistogramResult h = error_histogram(cfg.family, cfg.n_infected, cfg.estimators,
		                                    cfg.trials, cfg.seed, workers);
		save_histogram_csv(h, cfg.seed, out);
	} else if (cfg.experiment == "subtree") {
		Report rep = subtree_distribution_check(cfg.t, cfg.trials, cfg.seed, workers,
		                                        cfg.degree);
		save_report_csv(rep, cfg.seed, out);
	} else if (cfg.experiment == "shape") {
		Report rep = shape_check(cfg.geom, cfg.t, cfg.delta, cfg.trials, cfg.seed, workers);
		save_report_csv(rep, cfg.seed, out);
	} else {
		throw internal_error("run_experiment: unhandled experiment");
	}
	if (!out) throw std::runtime_error("write failed for \"" + cfg.out + "\"");
}

} // namespace rumor

#endif
