#ifndef RUMOR_UTIL_HPP
#define RUMOR_UTIL_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rumor {

using node_t = uint32_t;
constexpr node_t NO_NODE = 0xffffffffu;

// Thrown on violated internal invariants (CLI maps these to exit code 3,
// as opposed to user/domain errors which map to exit code 2).
struct internal_error : std::logic_error {
	using std::logic_error::logic_error;
};

#define RUMOR_CHECK(cond, msg) \
	do { \
		if (!(cond)) throw ::rumor::internal_error(std::string("internal check failed: ") + (msg)); \
	} while (0)

} // namespace rumor

#endif
