#pragma once

// Designed operators shared by several suites, computed once per process.

#include "octspec/inverse_design.hpp"

namespace fixtures {

inline const octspec::DesignResult& design_d2() {
    static const auto r = octspec::design_uniform(octspec::DesignSpec::uniform(8, 2, 200.0), 200.0);
    return r;
}

inline const octspec::DesignResult& design_d3() {
    static const auto r = octspec::design_uniform(octspec::DesignSpec::uniform(8, 3, 200.0), 200.0);
    return r;
}

}  // namespace fixtures
