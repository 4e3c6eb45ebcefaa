#pragma once

// A pre- and post-selected pair: the forward evolving state |psi> and the
// backward evolving functional <phi|, stored as the ket of conjugated
// entries, so overlap(tsv) = inner(backward, forward) = <phi|psi>.

#include "cfc/qstate.hpp"

namespace cfc {

struct TwoStateVector {
    StateVector forward;
    StateVector backward;
};

inline Complex overlap(const TwoStateVector& tsv) {
    return inner(tsv.backward, tsv.forward);
}

}  // namespace cfc
