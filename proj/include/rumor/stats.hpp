#ifndef RUMOR_STATS_HPP
#define RUMOR_STATS_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace rumor {

inline double binomial_stderr(double p_hat, uint64_t trials) {
	if (trials == 0) throw std::domain_error("binomial_stderr: zero trials");
	return std::sqrt(p_hat * (1.0 - p_hat) / double(trials));
}

// Regularized upper incomplete gamma Q(a,x), via the usual series /
// continued-fraction split at x = a+1. Only used to turn chi-square
// statistics into p-values, so relative accuracy around 1e-12 is plenty.
inline double gammq(double a, double x) {
	if (a <= 0 || x < 0) throw std::domain_error("gammq: need a > 0, x >= 0");
	if (x == 0) return 1.0;
	const double prefix = std::exp(-x + a * std::log(x) - std::lgamma(a));
	if (x < a + 1.0) {
		double ap = a, sum = 1.0 / a, del = sum;
		for (int i = 0; i < 1000; ++i) {
			ap += 1.0;
			del *= x / ap;
			sum += del;
			if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
		}
		return 1.0 - sum * prefix;
	}
	const double tiny = 1e-300;
	double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
	for (int i = 1; i < 1000; ++i) {
		double an = -double(i) * (double(i) - a);
		b += 2.0;
		d = an * d + b;
		if (std::fabs(d) < tiny) d = tiny;
		c = b + an / c;
		if (std::fabs(c) < tiny) c = tiny;
		d = 1.0 / d;
		double del = d * c;
		h *= del;
		if (std::fabs(del - 1.0) < 1e-15) break;
	}
	return prefix * h;
}

struct ChiSquare {
	double stat = 0;
	unsigned df = 0;
	double p_value = 1;
};

// Two-sample homogeneity test: are the two count vectors draws from the
// same distribution? Cells empty in both samples carry no information and
// are dropped from the degrees of freedom.
inline ChiSquare chi_square_two_sample(const std::vector<uint64_t>& a,
                                       const std::vector<uint64_t>& b) {
	if (a.size() != b.size())
		throw std::domain_error("chi_square_two_sample: length mismatch");
	double ta = 0, tb = 0;
	for (uint64_t x : a) ta += double(x);
	for (uint64_t x : b) tb += double(x);
	if (ta == 0 || tb == 0) throw std::domain_error("chi_square_two_sample: empty sample");
	ChiSquare out;
	const double ka = std::sqrt(tb / ta), kb = std::sqrt(ta / tb);
	unsigned cells = 0;
	for (size_t i = 0; i < a.size(); ++i) {
		double tot = double(a[i]) + double(b[i]);
		if (tot == 0) continue;
		++cells;
		double diff = ka * double(a[i]) - kb * double(b[i]);
		out.stat += diff * diff / tot;
	}
	if (cells < 2) throw std::domain_error("chi_square_two_sample: fewer than 2 occupied cells");
	out.df = cells - 1;
	out.p_value = gammq(out.df / 2.0, out.stat / 2.0);
	return out;
}

// Goodness of fit of observed counts against a model pmf over the same
// cells. Cells whose expected count falls below 5 are pooled into their
// right neighbor so the chi-square approximation stays honest.
inline ChiSquare chi_square_gof(const std::vector<uint64_t>& counts,
                                const std::vector<double>& probs) {
	if (counts.size() != probs.size())
		throw std::domain_error("chi_square_gof: length mismatch");
	double total = 0;
	for (uint64_t c : counts) total += double(c);
	if (total == 0) throw std::domain_error("chi_square_gof: empty sample");
	std::vector<double> obs, exp;
	double acc_o = 0, acc_e = 0;
	for (size_t i = 0; i < counts.size(); ++i) {
		acc_o += double(counts[i]);
		acc_e += probs[i] * total;
		if (acc_e >= 5.0) {
			obs.push_back(acc_o);
			exp.push_back(acc_e);
			acc_o = acc_e = 0;
		}
	}
	if (acc_e > 0 || acc_o > 0) {
		if (exp.empty()) throw std::domain_error("chi_square_gof: too little mass to test");
		obs.back() += acc_o;
		exp.back() += acc_e;
	}
	if (obs.size() < 2) throw std::domain_error("chi_square_gof: fewer than 2 pooled cells");
	ChiSquare out;
	for (size_t i = 0; i < obs.size(); ++i) {
		double d = obs[i] - exp[i];
		out.stat += d * d / exp[i];
	}
	out.df = unsigned(obs.size()) - 1;
	out.p_value = gammq(out.df / 2.0, out.stat / 2.0);
	return out;
}

// Total variation distance between two probability vectors over the same
// support (callers fold any tail mass into the final entry).
inline double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
	if (p.size() != q.size()) throw std::domain_error("total_variation: length mismatch");
	double s = 0;
	for (size_t i = 0; i < p.size(); ++i) s += std::fabs(p[i] - q[i]);
	return 0.5 * s;
}

// pmf vectors for the reference distributions, with all remaining mass
// folded into the last entry so they sum to one exactly.

inline std::vector<double> poisson_pmf_with_tail(double t, size_t kmax) {
	if (t < 0) throw std::domain_error("poisson_pmf_with_tail: t must be >= 0");
	std::vector<double> p(kmax + 2, 0.0);
	double term = std::exp(-t), cum = 0;
	for (size_t k = 0; k <= kmax; ++k) {
		p[k] = term;
		cum += term;
		term *= t / double(k + 1);
	}
	p[kmax + 1] = std::max(0.0, 1.0 - cum);
	return p;
}

// Geometric on {0,1,2,...} with success probability s: P(k) = s(1-s)^k.
inline std::vector<double> geometric_pmf_with_tail(double s, size_t kmax) {
	if (s <= 0 || s > 1) throw std::domain_error("geometric_pmf_with_tail: need 0 < s <= 1");
	std::vector<double> p(kmax + 2, 0.0);
	double term = s, cum = 0;
	for (size_t k = 0; k <= kmax; ++k) {
		p[k] = term;
		cum += term;
		term *= (1.0 - s);
	}
	p[kmax + 1] = std::max(0.0, 1.0 - cum);
	return p;
}

// Empirical counts (index = value, overflow folded into the last entry)
// turned into a probability vector aligned with the pmfs above.
inline std::vector<double> normalize_counts(const std::vector<uint64_t>& counts) {
	double total = 0;
	for (uint64_t c : counts) total += double(c);
	if (total == 0) throw std::domain_error("normalize_counts: empty sample");
	std::vector<double> p(counts.size());
	for (size_t i = 0; i < counts.size(); ++i) p[i] = double(counts[i]) / total;
	return p;
}

} // namespace rumor

#endif
