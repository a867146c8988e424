#pragma once

#include <string>

#include "varelim/instance.hpp"

namespace fixtures {

inline std::string data_path(const std::string& name) { return std::string(VARELIM_TEST_DATA) + "/" + name; }

inline varelim::Instance load(const std::string& name) { return varelim::load_instance_file(data_path(name)); }

inline varelim::Instance bt() { return load("fix_bt.bcsp"); }
inline varelim::Instance tetra() { return load("fix_tetra.bcsp"); }
inline varelim::Instance aebtp_gap() { return load("fix_aebtp_gap.bcsp"); }

/// Centre 0 and n-1 leaves over {0,1}; each centre-leaf relation is inequality.
inline varelim::Instance star(std::size_t n)
{
    varelim::Instance inst(std::vector<std::vector<varelim::Label>>(n, {0, 1}));
    for (varelim::Var k = 1; k < n; ++k) {
        inst.add_relation(0, k);
        inst.set_allowed(0, 0, k, 1, true);
        inst.set_allowed(0, 1, k, 0, true);
    }
    return inst;
}

// Tetra variable names.
inline constexpr varelim::Var TI = 0, TJ = 1, TK = 2, TM = 3;
inline constexpr varelim::Value U = 0, U1 = 1, U2 = 2;

} // namespace fixtures
