#ifndef RUMOR_RNG_HPP
#define RUMOR_RNG_HPP

#include <cmath>
#include <cstdint>

#include "util.hpp"

namespace rumor {

// splitmix64 mixing step (Vigna). Used to expand seeds and to derive
// per-trial seeds from a master seed; the output is well scrambled even
// for adjacent inputs, which is exactly what sequential trial ids are.
inline uint64_t splitmix64(uint64_t& state) {
	uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
	z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
	z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
	return z ^ (z >> 31);
}

// Deterministic per-trial seed: hash(master_seed, trial_id). Trials keep
// their seeds when the trial count changes, so curves are extendable.
inline uint64_t derive_seed(uint64_t master, uint64_t trial) {
	uint64_t s = master;
	uint64_t a = splitmix64(s);
	s = a ^ (trial + 0x9e3779b97f4a7c15ULL);
	return splitmix64(s);
}

// xoshiro256** (Blackman & Vigna): small, fast, portable, and fully
// specified, unlike the distributions in <random> whose output is
// implementation-defined. All stochastic code in this library draws
// from this generator so results are bit-stable across platforms.
class Rng {
public:
	explicit Rng(uint64_t seed) {
		// seed the full 256-bit state via splitmix64, per the authors' advice
		for (int i = 0; i < 4; ++i) s_[i] = splitmix64(seed);
	}

	uint64_t next() {
		const uint64_t result = rotl(s_[1] * 5, 7) * 9;
		const uint64_t t = s_[1] << 17;
		s_[2] ^= s_[0];
		s_[3] ^= s_[1];
		s_[1] ^= s_[2];
		s_[0] ^= s_[3];
		s_[2] ^= t;
		s_[3] = rotl(s_[3], 45);
		return result;
	}

	// uniform on [0,1) with 53 random bits
	double uniform01() {
		return (next() >> 11) * 0x1.0p-53;
	}

	// Exp(1) by inversion; 1-uniform01() is in (0,1] so log never sees 0
	double exponential() {
		return -std::log(1.0 - uniform01());
	}

	// unbiased integer in [0, n) by rejection
	uint64_t below(uint64_t n) {
		RUMOR_CHECK(n > 0, "Rng::below(0)");
		const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
		uint64_t x;
		do {
			x = next();
		} while (x >= limit);
		return x % n;
	}

private:
	static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

	uint64_t s_[4];
};

} // namespace rumor

#endif
